//! Greedy and beam search over an arbitrary next-token step function.

use std::cmp::Ordering;

use crate::dist::LogDistribution;
use crate::error::Result;
use crate::vocab::{Sentence, TokenId};

/// Orders hypotheses by score descending, then by token ids (EOS at its own
/// id) ascending, matching the lowest-id tie-break of [`LogDistribution::argmax`].
pub(crate) fn rank_order(a: &(Sentence, f64), b: &(Sentence, f64), eos: TokenId) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.ids_with_eos(eos).cmp(&b.0.ids_with_eos(eos)))
}

/// Appends the argmax token until EOS or `max_len` tokens. A sentence that
/// hits the cap without EOS comes back unterminated.
pub fn greedy_decode<F>(mut step_fn: F, eos: TokenId, max_len: usize) -> Result<Sentence>
where
    F: FnMut(&Sentence) -> Result<LogDistribution>,
{
    let mut sentence = Sentence::empty_prefix();
    while !sentence.is_terminated() && sentence.len() < max_len {
        let dist = step_fn(&sentence)?;
        sentence = sentence.extended(dist.argmax(), eos)?;
    }
    Ok(sentence)
}

/// Beam search keeping the `beam_width` best expansions (finished or not) per
/// step. Returns up to `beam_width` terminated sentences, best first; when no
/// hypothesis terminates within `max_len`, the best truncated ones are
/// returned instead.
pub fn beam_decode<F>(mut step_fn: F, eos: TokenId, beam_width: usize, max_len: usize) -> Result<Vec<(Sentence, f64)>>
where
    F: FnMut(&Sentence) -> Result<LogDistribution>,
{
    let beam_width = beam_width.max(1);
    let mut alive = vec![(Sentence::empty_prefix(), 0.0)];
    let mut finished: Vec<(Sentence, f64)> = Vec::new();
    let mut truncated: Vec<(Sentence, f64)> = Vec::new();

    while !alive.is_empty() {
        let mut expansions = Vec::new();
        for (sentence, score) in alive.drain(..) {
            if sentence.len() >= max_len {
                truncated.push((sentence, score));
                continue;
            }
            let dist = step_fn(&sentence)?;
            for (&token, lp) in dist.iter() {
                if lp > f64::NEG_INFINITY {
                    expansions.push((sentence.extended(token, eos)?, score + lp));
                }
            }
        }
        expansions.sort_by(|a, b| rank_order(a, b, eos));
        expansions.truncate(beam_width);
        for hyp in expansions {
            if hyp.0.is_terminated() {
                finished.push(hyp);
            } else {
                alive.push(hyp);
            }
        }
        if finished.len() >= beam_width {
            finished.sort_by(|a, b| rank_order(a, b, eos));
            let kth = finished[beam_width - 1].1;
            // Log probabilities never increase along a path.
            if alive.iter().all(|(_, s)| *s < kth) {
                break;
            }
        }
    }

    let mut out = if finished.is_empty() { truncated } else { finished };
    out.sort_by(|a, b| rank_order(a, b, eos));
    out.truncate(beam_width);
    Ok(out)
}
