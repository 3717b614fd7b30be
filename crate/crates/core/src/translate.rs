//! Whole-sentence translation under each speaker, behind one interface.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::PragmaticsConfig;
use crate::error::{Error, Result};
use crate::models::ConditionalSequenceModel;
use crate::rsa::{self, CandidateSet, DistractorSet};
use crate::trace::DecodeTrace;
use crate::vocab::{Sentence, TokenId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Greedy base speaker.
    S0,
    /// Incremental speaker against explicit distractors.
    S1Ip,
    /// Global speaker against explicit distractors, over a base beam.
    S1Gp,
    /// Global cyclic speaker reranking a base beam.
    S1Cgp,
    /// Incremental cyclic speaker with greedy rollouts.
    S1Cip,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::S0, Mode::S1Ip, Mode::S1Gp, Mode::S1Cgp, Mode::S1Cip];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::S0 => "s0",
            Mode::S1Ip => "s1-ip",
            Mode::S1Gp => "s1-gp",
            Mode::S1Cgp => "s1-cgp",
            Mode::S1Cip => "s1-cip",
        }
    }

    pub fn needs_distractors(self) -> bool {
        matches!(self, Mode::S1Ip | Mode::S1Gp)
    }

    pub fn needs_backward(self) -> bool {
        matches!(self, Mode::S1Cgp | Mode::S1Cip)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mode {s:?}")))
    }
}

/// Distractor sets keyed by the tokens of the source sentence they belong to.
#[derive(Debug, Clone, Default)]
pub struct DistractorIndex {
    sets: HashMap<Vec<TokenId>, DistractorSet>,
}

impl DistractorIndex {
    /// Parses one group per line: the source sentence, then its distractors,
    /// separated by tabs.
    pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Self> {
        let mut sets = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |e: Error| Error::Parse { line: i + 1, message: e.to_string() };
            let sentences = line
                .split('\t')
                .map(|field| vocab.parse_sentence(field))
                .collect::<Result<Vec<_>>>()
                .map_err(parse_err)?;
            let key = sentences[0].tokens().to_vec();
            let set = DistractorSet::new(sentences).map_err(parse_err)?;
            sets.insert(key, set);
        }
        Ok(Self { sets })
    }

    pub fn insert(&mut self, set: DistractorSet) {
        let key = set.sentences()[0].tokens().to_vec();
        self.sets.insert(key, set);
    }

    pub fn get(&self, source: &Sentence) -> Option<&DistractorSet> {
        self.sets.get(source.tokens())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Anything that maps a source sentence to a target sentence.
pub trait TranslationSystem: Sync {
    fn translate(&self, source: &Sentence) -> Result<Sentence>;

    /// Identity tags of every model the system consults.
    fn model_tags(&self) -> Vec<String>;

    fn source_vocab(&self) -> &Vocabulary;

    fn target_vocab(&self) -> &Vocabulary;
}

/// A speaker together with the models and knobs it needs.
pub struct Translator<'a> {
    mode: Mode,
    fwd: &'a dyn ConditionalSequenceModel,
    bwd: Option<&'a dyn ConditionalSequenceModel>,
    distractors: Option<&'a DistractorIndex>,
    config: PragmaticsConfig,
}

impl<'a> Translator<'a> {
    pub fn new(
        mode: Mode,
        fwd: &'a dyn ConditionalSequenceModel,
        bwd: Option<&'a dyn ConditionalSequenceModel>,
        distractors: Option<&'a DistractorIndex>,
        config: PragmaticsConfig,
    ) -> Result<Self> {
        config.validate()?;
        if mode.needs_backward() && bwd.is_none() {
            return Err(Error::InvalidConfig(format!("mode {mode} needs a backward model")));
        }
        if mode.needs_distractors() && distractors.is_none() {
            return Err(Error::InvalidConfig(format!("mode {mode} needs distractors")));
        }
        if let (true, Some(b)) = (mode.needs_backward(), bwd) {
            crate::models::check_direction_compatible(fwd, b)?;
        }
        Ok(Self { mode, fwd, bwd, distractors, config })
    }

    /// Greedy base speaker.
    pub fn greedy(fwd: &'a dyn ConditionalSequenceModel, max_len: usize) -> Self {
        let config = PragmaticsConfig::default().with_max_len(max_len.max(1));
        Self { mode: Mode::S0, fwd, bwd: None, distractors: None, config }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> &PragmaticsConfig {
        &self.config
    }

    fn distractors_for(&self, source: &Sentence) -> Result<&'a DistractorSet> {
        self.distractors.and_then(|d| d.get(source)).ok_or(Error::NotInDistractors)
    }

    /// Translation plus the per-step trace. Global modes choose among whole
    /// beam candidates and leave the trace empty.
    pub fn translate_traced(&self, source: &Sentence) -> Result<(Sentence, DecodeTrace)> {
        if source.tokens().is_empty() {
            return Err(Error::EmptySource);
        }
        let source = source.clone().terminate();
        let cfg = &self.config;
        match self.mode {
            Mode::S0 => rsa::decode_s0(self.fwd, &source, cfg),
            Mode::S1Ip => rsa::decode_s1_ip(self.fwd, self.distractors_for(&source)?, &source, cfg),
            Mode::S1Cip => rsa::decode_s1_cip(self.fwd, self.bwd.expect("checked in new"), &source, cfg),
            Mode::S1Gp => {
                let set = self.distractors_for(&source)?;
                let candidates = CandidateSet::from_beam(self.fwd, &source, cfg.beam_width, cfg.max_len)?;
                let dist = rsa::s1_global(self.fwd, set, &source, &candidates, cfg.alpha)?;
                Ok((candidates.utterances()[dist.argmax()].clone(), DecodeTrace::default()))
            }
            Mode::S1Cgp => {
                let bwd = self.bwd.expect("checked in new");
                let candidates = CandidateSet::from_beam(self.fwd, &source, cfg.beam_width, cfg.max_len)?;
                let ranked = rsa::s1_cgp_rerank(self.fwd, bwd, &source, &candidates, cfg.alpha)?;
                Ok((ranked[0].0.clone(), DecodeTrace::default()))
            }
        }
    }
}

impl TranslationSystem for Translator<'_> {
    fn translate(&self, source: &Sentence) -> Result<Sentence> {
        self.translate_traced(source).map(|(s, _)| s)
    }

    fn model_tags(&self) -> Vec<String> {
        let mut tags = vec![self.fwd.identity_tag().to_string()];
        if let (true, Some(b)) = (self.mode.needs_backward(), self.bwd) {
            tags.push(b.identity_tag().to_string());
        }
        tags
    }

    fn source_vocab(&self) -> &Vocabulary {
        self.fwd.source_vocab()
    }

    fn target_vocab(&self) -> &Vocabulary {
        self.fwd.target_vocab()
    }
}
