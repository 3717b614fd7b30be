//! Side-by-side comparison of the approximate cyclic speaker with its exact
//! and global counterparts on enumerable models.

use serde::Serialize;

use crate::config::PragmaticsConfig;
use crate::error::Result;
use crate::models::{check_direction_compatible, ConditionalSequenceModel};
use crate::rsa::{self, CandidateSet};
use crate::vocab::{Sentence, TokenId, Vocabulary};

/// One decoding step on the approximate path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepComparison {
    pub source: usize,
    pub step: usize,
    pub prefix: Sentence,
    pub approximate: TokenId,
    pub exact: TokenId,
}

impl StepComparison {
    pub fn agrees(&self) -> bool {
        self.approximate == self.exact
    }
}

/// Whole-sentence outputs of each decoder for one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceComparison {
    pub source: Sentence,
    /// Greedy base speaker.
    pub greedy: Sentence,
    /// Incremental cyclic speaker with greedy rollouts.
    pub approximate: Sentence,
    /// Incremental cyclic speaker with exact continuation sums.
    pub exact: Sentence,
    /// Global cyclic speaker over every enumerable utterance.
    pub global: Sentence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub config: PragmaticsConfig,
    pub steps: Vec<StepComparison>,
    pub sentences: Vec<SentenceComparison>,
}

impl OracleReport {
    pub fn step_disagreements(&self) -> usize {
        self.steps.iter().filter(|s| !s.agrees()).count()
    }

    pub fn exact_disagreements(&self) -> usize {
        self.sentences.iter().filter(|s| s.approximate != s.exact).count()
    }

    pub fn global_disagreements(&self) -> usize {
        self.sentences.iter().filter(|s| s.approximate != s.global).count()
    }

    pub fn greedy_disagreements(&self) -> usize {
        self.sentences.iter().filter(|s| s.approximate != s.greedy).count()
    }

    /// Step and sentence agreement between the approximate and exact speakers.
    pub fn full_agreement(&self) -> bool {
        self.step_disagreements() == 0 && self.exact_disagreements() == 0
    }

    /// `key=value` lines: one per step, one per sentence, then a summary.
    pub fn to_text(&self, source: &Vocabulary, target: &Vocabulary) -> Result<String> {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "step\tsource={}\tstep={}\tprefix={}\tapproximate={}\texact={}\tagree={}\n",
                source.render(&self.sentences[s.source].source)?,
                s.step,
                target.render(&s.prefix)?,
                target.surface(s.approximate)?,
                target.surface(s.exact)?,
                s.agrees(),
            ));
        }
        for s in &self.sentences {
            out.push_str(&format!(
                "sentence\tsource={}\tgreedy={}\tapproximate={}\texact={}\tglobal={}\n",
                source.render(&s.source)?,
                target.render_with_eos(&s.greedy)?,
                target.render_with_eos(&s.approximate)?,
                target.render_with_eos(&s.exact)?,
                target.render_with_eos(&s.global)?,
            ));
        }
        out.push_str(&format!(
            "summary\tsteps={}\tstep_disagreements={}\tsentences={}\texact_disagreements={}\tglobal_disagreements={}\tgreedy_disagreements={}\tfull_agreement={}\n",
            self.steps.len(),
            self.step_disagreements(),
            self.sentences.len(),
            self.exact_disagreements(),
            self.global_disagreements(),
            self.greedy_disagreements(),
            self.full_agreement(),
        ));
        Ok(out)
    }
}

/// Runs every decoder on every source. Each step of the approximate decode
/// is compared with the exact speaker at the same prefix.
pub fn compare<F, B>(fwd: &F, bwd: &B, sources: &[Sentence], config: &PragmaticsConfig) -> Result<OracleReport>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    config.validate()?;
    check_direction_compatible(fwd, bwd)?;
    let mut steps = Vec::new();
    let mut sentences = Vec::with_capacity(sources.len());
    for (i, source) in sources.iter().enumerate() {
        let source = source.clone().terminate();
        let (approximate, trace) = rsa::decode_s1_cip(fwd, bwd, &source, config)?;
        for (n, step) in trace.steps.iter().enumerate() {
            let exact = rsa::s1_word_c_exact(fwd, bwd, &source, &step.prefix, config.alpha, config.max_len)?;
            steps.push(StepComparison {
                source: i,
                step: n,
                prefix: step.prefix.clone(),
                approximate: step.chosen,
                exact: exact.argmax(),
            });
        }
        let (exact, _) = rsa::decode_s1_cip_exact(fwd, bwd, &source, config)?;
        let (greedy, _) = rsa::decode_s0(fwd, &source, config)?;
        let candidates = CandidateSet::from_enumeration(fwd, &source, config.max_len)?;
        let global = rsa::s1_cgp_rerank(fwd, bwd, &source, &candidates, config.alpha)?.remove(0).0;
        sentences.push(SentenceComparison { source, greedy, approximate, exact, global });
    }
    Ok(OracleReport { config: config.clone(), steps, sentences })
}
