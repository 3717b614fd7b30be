//! Corpus BLEU without smoothing, plus a smoothed sentence-level variant for
//! per-sentence diagnostics.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tokenizer {
    #[default]
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuConfig {
    pub max_order: usize,
    pub case_sensitive: bool,
    pub tokenizer: Tokenizer,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self { max_order: 4, case_sensitive: true, tokenizer: Tokenizer::Whitespace }
    }
}

impl BleuConfig {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self.tokenizer {
            Tokenizer::Whitespace => text
                .split_whitespace()
                .map(|t| if self.case_sensitive { t.to_string() } else { t.to_lowercase() })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::InvalidConfig("BLEU max order must be at least 1".into()));
        }
        Ok(())
    }
}

/// Clipped n-gram matches and hypothesis n-gram totals, indexed by `n - 1`.
#[derive(Debug, Clone, Default)]
struct NgramStats {
    matches: Vec<u64>,
    totals: Vec<u64>,
    hyp_len: u64,
    ref_len: u64,
}

impl NgramStats {
    fn new(max_order: usize) -> Self {
        Self { matches: vec![0; max_order], totals: vec![0; max_order], hyp_len: 0, ref_len: 0 }
    }

    fn add(&mut self, hyp: &[String], reference: &[String], case_sensitive: bool) {
        let fold = |t: &String| if case_sensitive { t.clone() } else { t.to_lowercase() };
        let hyp: Vec<String> = hyp.iter().map(fold).collect();
        let reference: Vec<String> = reference.iter().map(fold).collect();
        self.hyp_len += hyp.len() as u64;
        self.ref_len += reference.len() as u64;
        for n in 1..=self.matches.len() {
            if hyp.len() < n {
                continue;
            }
            let ref_counts = counts(&reference, n);
            let hyp_counts = counts(&hyp, n);
            self.totals[n - 1] += (hyp.len() + 1 - n) as u64;
            self.matches[n - 1] +=
                hyp_counts.iter().map(|(g, c)| (*c).min(*ref_counts.get(g).unwrap_or(&0))).sum::<u64>();
        }
    }

    /// Highest order with at least one hypothesis n-gram.
    fn effective_order(&self) -> usize {
        self.totals.iter().rposition(|&t| t > 0).map_or(0, |i| i + 1)
    }

    fn brevity_penalty(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        (1.0 - self.ref_len as f64 / self.hyp_len as f64).min(0.0).exp()
    }

    fn score(&self, smooth: bool) -> f64 {
        let order = self.effective_order();
        if order == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for n in 0..order {
            let (m, t) = (self.matches[n], self.totals[n]);
            let p = if m > 0 {
                m as f64 / t as f64
            } else if smooth && n >= 1 {
                1.0 / (t as f64 + 1.0)
            } else {
                return 0.0;
            };
            log_sum += p.ln();
        }
        100.0 * self.brevity_penalty() * (log_sum / order as f64).exp()
    }
}

fn counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut map = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *map.entry(gram).or_insert(0) += 1;
        }
    }
    map
}

/// Corpus-level BLEU in `[0, 100]`, one reference per hypothesis.
///
/// Precisions are aggregated over the corpus before the geometric mean. The
/// order is capped at the largest `n` for which any hypothesis has an n-gram,
/// and a zero precision at any used order yields 0.
pub fn bleu_corpus(hypotheses: &[Vec<String>], references: &[Vec<String>], config: &BleuConfig) -> Result<f64> {
    config.validate()?;
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch { hypotheses: hypotheses.len(), references: references.len() });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut stats = NgramStats::new(config.max_order);
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add(h, r, config.case_sensitive);
    }
    Ok(stats.score(false))
}

/// Sentence-level BLEU with add-one smoothing of zero counts for orders two
/// and up. Diagnostic only; not comparable to corpus scores.
pub fn sentence_bleu_diagnostic(hypothesis: &[String], reference: &[String], config: &BleuConfig) -> f64 {
    let mut stats = NgramStats::new(config.max_order.max(1));
    stats.add(hypothesis, reference, config.case_sensitive);
    stats.score(true)
}

/// Convenience wrapper over raw lines.
pub fn bleu_corpus_lines(hypotheses: &[String], references: &[String], config: &BleuConfig) -> Result<f64> {
    let h: Vec<Vec<String>> = hypotheses.iter().map(|l| config.tokenize(l)).collect();
    let r: Vec<Vec<String>> = references.iter().map(|l| config.tokenize(l)).collect();
    bleu_corpus(&h, &r, config)
}
