use super::DistractorSet;
use crate::dist::{log_normalize, LogDistribution};
use crate::error::{Error, Result};
use crate::models::{self, ConditionalSequenceModel};
use crate::vocab::{Sentence, TokenId};

/// Sentence-level pragmatic listener: posterior over the distractors given a
/// complete utterance, by Bayes' rule on the base speaker.
pub fn l1_sentence<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    utterance: &Sentence,
) -> Result<LogDistribution<usize>> {
    if !utterance.is_terminated() {
        return Err(Error::InvalidSentence("listener needs a terminated utterance".into()));
    }
    let weights = distractors
        .sentences()
        .iter()
        .enumerate()
        .map(|(i, w)| Ok((i, distractors.prior().logweight(&i) + models::sequence_logprob(fwd, w, utterance)?)))
        .collect::<Result<Vec<_>>>()?;
    log_normalize(weights)
}

/// Word-level pragmatic listener: posterior over the distractors given one
/// next word after a shared prefix.
pub fn l1_word<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    word: TokenId,
    prefix: &Sentence,
) -> Result<LogDistribution<usize>> {
    fwd.target_vocab().check(word)?;
    let weights = distractors
        .sentences()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let dist = models::next_token_dist(fwd, w, prefix)?;
            Ok((i, distractors.prior().logweight(&i) + dist.logweight(&word)))
        })
        .collect::<Result<Vec<_>>>()?;
    log_normalize(weights)
}
