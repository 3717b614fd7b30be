//! Rational Speech Acts speakers and listeners over conditional sequence
//! models.
//!
//! Naming follows the usual hierarchy: `S0` is the base model used forward,
//! `L0` a backward model, `L1` a listener that inverts `S0` over a distractor
//! set, and `S1` speakers that trade fluency under `S0` against how well a
//! listener recovers the source. Global speakers score whole sentences;
//! incremental ones make the trade-off at each next-word decision.

mod cyclic;
mod listener;
mod search;
mod speaker;

pub use cyclic::{decode_s1_cip, decode_s1_cip_exact, greedy_rollout, s1_word_c, s1_word_c_exact, RolloutCache};
pub use listener::{l1_sentence, l1_word};
pub use search::{beam_decode, greedy_decode};
pub use speaker::{decode_s0, decode_s1_ip, s1_cgp_rerank, s1_global, s1_word};

pub(crate) use search::rank_order;

use crate::dist::{log_normalize, LogDistribution};
use crate::error::{Error, Result};
use crate::models::{self, ConditionalSequenceModel};
use crate::vocab::Sentence;

/// Source sentences a pragmatic listener chooses between, with a prior.
#[derive(Debug, Clone)]
pub struct DistractorSet {
    sentences: Vec<Sentence>,
    prior: LogDistribution<usize>,
}

impl DistractorSet {
    /// Uniform prior over distinct, nonempty source sentences.
    pub fn new(sentences: Vec<Sentence>) -> Result<Self> {
        let n = sentences.len();
        Self::with_prior(sentences, vec![0.0; n])
    }

    /// Explicit prior given as unnormalized log weights, one per sentence.
    pub fn with_prior(sentences: Vec<Sentence>, log_prior: Vec<f64>) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::InvalidConfig("distractor set is empty".into()));
        }
        if log_prior.len() != sentences.len() {
            return Err(Error::InvalidConfig("prior length differs from distractor count".into()));
        }
        for (i, s) in sentences.iter().enumerate() {
            if s.tokens().is_empty() {
                return Err(Error::EmptySource);
            }
            if sentences[..i].iter().any(|t| t.tokens() == s.tokens()) {
                return Err(Error::InvalidConfig("duplicate distractor".into()));
            }
        }
        let sentences = sentences.into_iter().map(Sentence::terminate).collect();
        Ok(Self { sentences, prior: log_normalize(log_prior.into_iter().enumerate())? })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn prior(&self) -> &LogDistribution<usize> {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn index_of(&self, source: &Sentence) -> Result<usize> {
        self.sentences.iter().position(|s| s.tokens() == source.tokens()).ok_or(Error::NotInDistractors)
    }
}

/// Finite set of complete candidate translations.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    utterances: Vec<Sentence>,
}

impl CandidateSet {
    /// Keeps first occurrences; every candidate must be terminated.
    pub fn new(utterances: Vec<Sentence>) -> Result<Self> {
        let mut unique: Vec<Sentence> = Vec::with_capacity(utterances.len());
        for u in utterances {
            if !u.is_terminated() {
                return Err(Error::InvalidSentence("candidate is not terminated".into()));
            }
            if !unique.contains(&u) {
                unique.push(u);
            }
        }
        if unique.is_empty() {
            return Err(Error::InvalidConfig("candidate set is empty".into()));
        }
        Ok(Self { utterances: unique })
    }

    /// The terminated hypotheses of a base-model beam search.
    pub fn from_beam<M: ConditionalSequenceModel + ?Sized>(
        model: &M,
        source: &Sentence,
        beam_width: usize,
        max_len: usize,
    ) -> Result<Self> {
        let eos = model.target_vocab().eos();
        let beam = beam_decode(|c| models::next_token_dist(model, source, c), eos, beam_width, max_len)?;
        Self::new(beam.into_iter().map(|(s, _)| s).filter(Sentence::is_terminated).collect())
    }

    /// Every sentence of nonzero probability up to `max_len`.
    pub fn from_enumeration<M: ConditionalSequenceModel + ?Sized>(
        model: &M,
        source: &Sentence,
        max_len: usize,
    ) -> Result<Self> {
        let all = models::enumerate_sentences(model, source, max_len)?;
        Self::new(all.into_iter().map(|(s, _)| s).collect())
    }

    pub fn utterances(&self) -> &[Sentence] {
        &self.utterances
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }
}

pub(crate) fn check_source(source: &Sentence) -> Result<()> {
    if source.tokens().is_empty() {
        Err(Error::EmptySource)
    } else {
        Ok(())
    }
}

/// `base + alpha * listener`, with `alpha = 0` ignoring the listener
/// entirely so `0 * -inf` never arises.
pub(crate) fn weigh(base: f64, alpha: f64, listener: f64) -> f64 {
    if base == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if alpha == 0.0 {
        base
    } else {
        base + alpha * listener
    }
}
