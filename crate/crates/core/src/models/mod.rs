//! The conditional sequence model contract and its toy implementations.

mod enumerate;
mod tabular;

pub use enumerate::{enumerate_continuations, enumerate_sentences, ENUMERATION_LIMIT};
pub use tabular::{load_tabular, parse_tabular, TabularModel, TabularModelBuilder, TABULAR_HEADER};

use crate::dist::LogDistribution;
use crate::error::{Error, Result};
use crate::vocab::{Sentence, Vocabulary};

/// Next-token distribution over a target vocabulary, conditioned on a source
/// sentence and a target-side prefix.
///
/// Backward (target to source) models implement the same trait with the
/// vocabularies swapped.
pub trait ConditionalSequenceModel: Send + Sync {
    fn source_vocab(&self) -> &Vocabulary;

    fn target_vocab(&self) -> &Vocabulary;

    /// Opaque tag naming the model instance; two handles on the same model
    /// share a tag.
    fn identity_tag(&self) -> &str;

    /// Distribution over the full target vocabulary, EOS included.
    fn next_token_dist(&self, source: &Sentence, prefix: &Sentence) -> Result<LogDistribution>;

    /// Log probability of a whole sentence by the chain rule, EOS step
    /// included when the sentence is terminated.
    fn sequence_logprob(&self, source: &Sentence, sentence: &Sentence) -> Result<f64> {
        continuation_logprob(self, source, &Sentence::empty_prefix(), sentence)
    }
}

/// Validating front door for [`ConditionalSequenceModel::next_token_dist`].
pub fn next_token_dist<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    prefix: &Sentence,
) -> Result<LogDistribution> {
    model.source_vocab().check_sentence(source)?;
    model.target_vocab().check_sentence(prefix)?;
    if prefix.is_terminated() {
        return Err(Error::InvalidSentence("prefix is already terminated".into()));
    }
    model.next_token_dist(source, prefix)
}

/// Validating front door for [`ConditionalSequenceModel::sequence_logprob`].
pub fn sequence_logprob<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    sentence: &Sentence,
) -> Result<f64> {
    model.source_vocab().check_sentence(source)?;
    model.target_vocab().check_sentence(sentence)?;
    model.sequence_logprob(source, sentence)
}

/// Log probability of the tokens of `full` that follow `prefix`.
///
/// Stops at the first zero-probability step so closed-world models are never
/// queried on unreachable prefixes.
pub fn continuation_logprob<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    prefix: &Sentence,
    full: &Sentence,
) -> Result<f64> {
    let start = prefix.tokens().len();
    if full.tokens().len() < start || full.tokens()[..start] != *prefix.tokens() {
        return Err(Error::InvalidSentence("sentence does not extend the prefix".into()));
    }
    let eos = model.target_vocab().eos();
    let ids = full.ids_with_eos(eos);
    let mut total = 0.0;
    for (t, id) in ids.iter().enumerate().skip(start) {
        let dist = model.next_token_dist(source, &full.truncated(t))?;
        total += dist.logweight(id);
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(total)
}

/// Checks that `backward` translates from `forward`'s target language into its
/// source language.
pub fn check_direction_compatible<F, B>(forward: &F, backward: &B) -> Result<()>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    if forward.target_vocab() != backward.source_vocab() {
        return Err(Error::IncompatibleModels(
            "backward source vocabulary differs from forward target vocabulary".into(),
        ));
    }
    if forward.source_vocab() != backward.target_vocab() {
        return Err(Error::IncompatibleModels(
            "backward target vocabulary differs from forward source vocabulary".into(),
        ));
    }
    Ok(())
}

impl<M: ConditionalSequenceModel + ?Sized> ConditionalSequenceModel for &M {
    fn source_vocab(&self) -> &Vocabulary {
        (**self).source_vocab()
    }
    fn target_vocab(&self) -> &Vocabulary {
        (**self).target_vocab()
    }
    fn identity_tag(&self) -> &str {
        (**self).identity_tag()
    }
    fn next_token_dist(&self, source: &Sentence, prefix: &Sentence) -> Result<LogDistribution> {
        (**self).next_token_dist(source, prefix)
    }
    fn sequence_logprob(&self, source: &Sentence, sentence: &Sentence) -> Result<f64> {
        (**self).sequence_logprob(source, sentence)
    }
}

impl<M: ConditionalSequenceModel + ?Sized> ConditionalSequenceModel for Box<M> {
    fn source_vocab(&self) -> &Vocabulary {
        (**self).source_vocab()
    }
    fn target_vocab(&self) -> &Vocabulary {
        (**self).target_vocab()
    }
    fn identity_tag(&self) -> &str {
        (**self).identity_tag()
    }
    fn next_token_dist(&self, source: &Sentence, prefix: &Sentence) -> Result<LogDistribution> {
        (**self).next_token_dist(source, prefix)
    }
    fn sequence_logprob(&self, source: &Sentence, sentence: &Sentence) -> Result<f64> {
        (**self).sequence_logprob(source, sentence)
    }
}
