use super::{check_source, l1_sentence, rank_order, weigh, CandidateSet, DistractorSet};
use crate::config::PragmaticsConfig;
use crate::dist::{log_normalize, log_sum_exp, LogDistribution};
use crate::error::Result;
use crate::models::{self, check_direction_compatible, ConditionalSequenceModel};
use crate::trace::{CandidateRecord, DecodeTrace, StepRecord};
use crate::vocab::{Sentence, TokenId};

/// Global speaker with explicit distractors: a distribution over the
/// candidate utterances (keyed by index into `candidates`).
pub fn s1_global<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    source: &Sentence,
    candidates: &CandidateSet,
    alpha: f64,
) -> Result<LogDistribution<usize>> {
    let index = distractors.index_of(source)?;
    let source = &distractors.sentences()[index];
    let weights = candidates
        .utterances()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let base = models::sequence_logprob(fwd, source, u)?;
            if base == f64::NEG_INFINITY || alpha == 0.0 {
                return Ok((i, base));
            }
            let listener = l1_sentence(fwd, distractors, u)?.logweight(&index);
            Ok((i, weigh(base, alpha, listener)))
        })
        .collect::<Result<Vec<_>>>()?;
    log_normalize(weights)
}

/// Incremental speaker with explicit distractors: next-word distribution over
/// the target vocabulary.
pub fn s1_word<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    source: &Sentence,
    prefix: &Sentence,
    alpha: f64,
) -> Result<LogDistribution> {
    s1_word_step(fwd, distractors, source, prefix, alpha).map(|(dist, _)| dist)
}

fn s1_word_step<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    source: &Sentence,
    prefix: &Sentence,
    alpha: f64,
) -> Result<(LogDistribution, Vec<CandidateRecord>)> {
    let index = distractors.index_of(source)?;
    let per_source =
        distractors.sentences().iter().map(|w| models::next_token_dist(fwd, w, prefix)).collect::<Result<Vec<_>>>()?;
    let own = &per_source[index];
    let prior = distractors.prior();

    let mut records = Vec::new();
    let mut weights = Vec::with_capacity(own.len());
    for (&token, base) in own.iter() {
        if base == f64::NEG_INFINITY {
            weights.push((token, base));
            continue;
        }
        // L1(w | wd, c): the normalizer is finite because w itself contributes.
        let joint: Vec<f64> =
            per_source.iter().enumerate().map(|(j, d)| prior.logweight(&j) + d.logweight(&token)).collect();
        let listener = prior.logweight(&index) + base - log_sum_exp(&joint);
        let combined = weigh(base, alpha, listener);
        weights.push((token, combined));
        records.push(CandidateRecord {
            token,
            base_logprob: base,
            rollout: None,
            rollout_truncated: false,
            listener_logscore: listener,
            combined,
        });
    }
    Ok((log_normalize(weights)?, records))
}

/// Greedy decode with the incremental distractor-aware speaker. The trace
/// holds one record per emitted token.
pub fn decode_s1_ip<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    distractors: &DistractorSet,
    source: &Sentence,
    config: &PragmaticsConfig,
) -> Result<(Sentence, DecodeTrace)> {
    config.validate()?;
    check_source(source)?;
    distractors.index_of(source)?;
    greedy_traced(fwd.target_vocab().eos(), config.max_len, |prefix| {
        s1_word_step(fwd, distractors, source, prefix, config.alpha)
    })
}

/// Greedy base-speaker decode with a trace in the same shape as the
/// pragmatic decoders (listener scores are zero).
pub fn decode_s0<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    source: &Sentence,
    config: &PragmaticsConfig,
) -> Result<(Sentence, DecodeTrace)> {
    config.validate()?;
    greedy_traced(fwd.target_vocab().eos(), config.max_len, |prefix| {
        let dist = models::next_token_dist(fwd, source, prefix)?;
        let records = dist
            .iter()
            .filter(|(_, lp)| *lp > f64::NEG_INFINITY)
            .map(|(&token, lp)| CandidateRecord {
                token,
                base_logprob: lp,
                rollout: None,
                rollout_truncated: false,
                listener_logscore: 0.0,
                combined: lp,
            })
            .collect();
        Ok((dist, records))
    })
}

pub(crate) fn greedy_traced<F>(eos: TokenId, max_len: usize, mut step: F) -> Result<(Sentence, DecodeTrace)>
where
    F: FnMut(&Sentence) -> Result<(LogDistribution, Vec<CandidateRecord>)>,
{
    let mut trace = DecodeTrace::default();
    let mut sentence = Sentence::empty_prefix();
    while !sentence.is_terminated() && sentence.len() < max_len {
        let (dist, candidates) = step(&sentence)?;
        let chosen = dist.argmax();
        trace.push(StepRecord { prefix: sentence.clone(), candidates, chosen });
        sentence = sentence.extended(chosen, eos)?;
    }
    Ok((sentence, trace))
}

/// Global cyclic speaker: candidates ranked by forward score plus `alpha`
/// times the backward model's log probability of recovering the source.
/// Best first; ties go to the lowest token ids.
pub fn s1_cgp_rerank<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    candidates: &CandidateSet,
    alpha: f64,
) -> Result<Vec<(Sentence, f64)>>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    check_source(source)?;
    check_direction_compatible(fwd, bwd)?;
    let source = source.clone().terminate();
    let eos = fwd.target_vocab().eos();
    let mut scored = candidates
        .utterances()
        .iter()
        .map(|u| {
            let base = models::sequence_logprob(fwd, &source, u)?;
            if base == f64::NEG_INFINITY || alpha == 0.0 {
                return Ok((u.clone(), base));
            }
            let back = models::sequence_logprob(bwd, u, &source)?;
            Ok((u.clone(), weigh(base, alpha, back)))
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| rank_order(a, b, eos));
    Ok(scored)
}
