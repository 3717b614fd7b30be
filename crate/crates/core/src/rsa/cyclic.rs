//! Cyclic speakers: informativity measured by a backward translation model
//! instead of an explicit distractor set.

use std::collections::HashMap;

use super::speaker::greedy_traced;
use super::{check_source, weigh};
use crate::config::PragmaticsConfig;
use crate::dist::{log_normalize, log_sum_exp, LogDistribution};
use crate::error::{Error, Result};
use crate::models::{self, check_direction_compatible, enumerate_continuations, ConditionalSequenceModel};
use crate::trace::{CandidateRecord, DecodeTrace, StepRecord};
use crate::vocab::{Sentence, TokenId};

/// Memo of greedy completions for one source sentence, keyed by prefix.
///
/// A greedy completion of `c` passes through `c + k[..i]` for every `i`, and
/// the completion of each of those prefixes is the same sentence, so every
/// intermediate prefix is cached too.
#[derive(Debug, Default)]
pub struct RolloutCache {
    completions: HashMap<Vec<TokenId>, Sentence>,
}

impl RolloutCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.completions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.completions.is_empty()
    }
}

/// Completes `prefix` by repeatedly taking the base model's argmax. The
/// result is unterminated when `max_len` is reached first.
pub fn greedy_rollout<M: ConditionalSequenceModel + ?Sized>(
    fwd: &M,
    source: &Sentence,
    prefix: &Sentence,
    max_len: usize,
    cache: &mut RolloutCache,
) -> Result<Sentence> {
    if prefix.is_terminated() {
        return Ok(prefix.clone());
    }
    let eos = fwd.target_vocab().eos();
    let mut visited = Vec::new();
    let mut current = prefix.clone();
    let completion = loop {
        if let Some(done) = cache.completions.get(current.tokens()) {
            break done.clone();
        }
        if current.len() >= max_len {
            break current;
        }
        let dist = models::next_token_dist(fwd, source, &current)?;
        let next = current.extended(dist.argmax(), eos)?;
        visited.push(current.tokens().to_vec());
        if next.is_terminated() {
            break next;
        }
        current = next;
    };
    for key in visited {
        cache.completions.insert(key, completion.clone());
    }
    Ok(completion)
}

/// Incremental cyclic speaker with the greedy-rollout approximation, using a
/// fresh rollout cache.
pub fn s1_word_c<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    prefix: &Sentence,
    config: &PragmaticsConfig,
) -> Result<(LogDistribution, StepRecord)>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    check_direction_compatible(fwd, bwd)?;
    s1_word_c_cached(fwd, bwd, source, prefix, config, &mut RolloutCache::new())
}

/// One step of the approximate cyclic speaker:
///
/// 1. take the `candidate_width_k` most probable next tokens under `fwd`;
/// 2. complete each `c + wd` greedily into `c + wd + k`;
/// 3. score `log S0(wd | w, c) + alpha * log L0(w | c + wd + k)`;
/// 4. normalize over the candidates.
///
/// The returned distribution is supported on the candidates only.
pub(crate) fn s1_word_c_cached<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    prefix: &Sentence,
    config: &PragmaticsConfig,
    cache: &mut RolloutCache,
) -> Result<(LogDistribution, StepRecord)>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    config.validate()?;
    check_source(source)?;
    if prefix.len() >= config.max_len {
        return Err(Error::InvalidSentence("prefix already at the length cap".into()));
    }
    let source = source.clone().terminate();
    let eos = fwd.target_vocab().eos();
    let base = models::next_token_dist(fwd, &source, prefix)?;
    let mut candidates = Vec::with_capacity(config.candidate_width_k);
    for (token, base_lp) in base.ranked().into_iter().take(config.candidate_width_k) {
        let extended = prefix.extended(token, eos)?;
        let rollout = greedy_rollout(fwd, &source, &extended, config.max_len, cache)?;
        let listener = models::sequence_logprob(bwd, &rollout, &source)?;
        candidates.push(CandidateRecord {
            token,
            base_logprob: base_lp,
            rollout_truncated: !rollout.is_terminated(),
            rollout: Some(rollout),
            listener_logscore: listener,
            combined: weigh(base_lp, config.alpha, listener),
        });
    }
    let dist = log_normalize(candidates.iter().map(|c| (c.token, c.combined)))?;
    let step = StepRecord { prefix: prefix.clone(), candidates, chosen: dist.argmax() };
    Ok((dist, step))
}

/// Incremental cyclic speaker with the continuation sum computed exactly:
/// the weight of `wd` is `S0(wd | w, c)` times the sum over every terminated
/// continuation `k` (within `max_len`) of `L0(w | c + wd + k)^alpha *
/// S0(k | w, c + wd)`. Supported on the whole target vocabulary.
pub fn s1_word_c_exact<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    prefix: &Sentence,
    alpha: f64,
    max_len: usize,
) -> Result<LogDistribution>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    check_direction_compatible(fwd, bwd)?;
    s1_word_c_exact_step(fwd, bwd, source, prefix, alpha, max_len).map(|(d, _)| d)
}

fn s1_word_c_exact_step<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    prefix: &Sentence,
    alpha: f64,
    max_len: usize,
) -> Result<(LogDistribution, Vec<CandidateRecord>)>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    check_source(source)?;
    let source = source.clone().terminate();
    let eos = fwd.target_vocab().eos();
    let base = models::next_token_dist(fwd, &source, prefix)?;
    let mut weights = Vec::with_capacity(base.len());
    let mut records = Vec::new();
    for (&token, base_lp) in base.iter() {
        if base_lp == f64::NEG_INFINITY {
            weights.push((token, base_lp));
            continue;
        }
        let extended = prefix.extended(token, eos)?;
        let terms = enumerate_continuations(fwd, &source, &extended, max_len)?
            .into_iter()
            .map(|(full, cont_lp)| {
                if alpha == 0.0 {
                    Ok(cont_lp)
                } else {
                    Ok(alpha * models::sequence_logprob(bwd, &full, &source)? + cont_lp)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let marginal = log_sum_exp(&terms);
        let combined = base_lp + marginal;
        weights.push((token, combined));
        records.push(CandidateRecord {
            token,
            base_logprob: base_lp,
            rollout: None,
            rollout_truncated: false,
            listener_logscore: marginal,
            combined,
        });
    }
    Ok((log_normalize(weights)?, records))
}

/// Greedy decode with the approximate cyclic speaker. Rollouts are memoized
/// for the duration of this call.
pub fn decode_s1_cip<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    config: &PragmaticsConfig,
) -> Result<(Sentence, DecodeTrace)>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    config.validate()?;
    check_source(source)?;
    check_direction_compatible(fwd, bwd)?;
    let mut cache = RolloutCache::new();
    greedy_traced(fwd.target_vocab().eos(), config.max_len, |prefix| {
        let (dist, step) = s1_word_c_cached(fwd, bwd, source, prefix, config, &mut cache)?;
        Ok((dist, step.candidates))
    })
}

/// Greedy decode taking the argmax of [`s1_word_c_exact`] at every step.
/// `candidate_width_k` is ignored.
pub fn decode_s1_cip_exact<F, B>(
    fwd: &F,
    bwd: &B,
    source: &Sentence,
    config: &PragmaticsConfig,
) -> Result<(Sentence, DecodeTrace)>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    config.validate()?;
    check_source(source)?;
    check_direction_compatible(fwd, bwd)?;
    greedy_traced(fwd.target_vocab().eos(), config.max_len, |prefix| {
        s1_word_c_exact_step(fwd, bwd, source, prefix, config.alpha, config.max_len)
    })
}
