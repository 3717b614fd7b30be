//! Exhaustive expansion of a model's sentence distribution.

use super::ConditionalSequenceModel;
use crate::error::{Error, Result};
use crate::vocab::Sentence;

/// Upper bound on `|V|^depth` accepted by the enumerators.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// All terminated sentences of length at most `max_len` (EOS counted) with
/// their chain-rule log probabilities, in lexicographic token order.
/// Zero-probability sentences are omitted.
pub fn enumerate_sentences<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    max_len: usize,
) -> Result<Vec<(Sentence, f64)>> {
    enumerate_continuations(model, source, &Sentence::empty_prefix(), max_len)
}

/// Terminated completions of `prefix` up to `max_len` total tokens, each
/// paired with the log probability of the continuation alone.
pub fn enumerate_continuations<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    prefix: &Sentence,
    max_len: usize,
) -> Result<Vec<(Sentence, f64)>> {
    if prefix.is_terminated() {
        return Ok(if prefix.len() <= max_len { vec![(prefix.clone(), 0.0)] } else { Vec::new() });
    }
    let depth = max_len.saturating_sub(prefix.len());
    let count = (model.target_vocab().len() as f64).powi(depth as i32);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { count, limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::new();
    expand(model, source, prefix, 0.0, max_len, &mut out)?;
    Ok(out)
}

fn expand<M: ConditionalSequenceModel + ?Sized>(
    model: &M,
    source: &Sentence,
    prefix: &Sentence,
    logprob: f64,
    max_len: usize,
    out: &mut Vec<(Sentence, f64)>,
) -> Result<()> {
    if prefix.len() >= max_len {
        return Ok(());
    }
    let eos = model.target_vocab().eos();
    let dist = model.next_token_dist(source, prefix)?;
    for (&token, lp) in dist.iter() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let next = prefix.extended(token, eos)?;
        if next.is_terminated() {
            out.push((next, logprob + lp));
        } else {
            expand(model, source, &next, logprob + lp, max_len, out)?;
        }
    }
    Ok(())
}
