use rayon::prelude::*;
use serde::Serialize;

use super::bleu::{bleu_corpus, sentence_bleu_diagnostic, BleuConfig};
use crate::error::{Error, Result};
use crate::translate::TranslationSystem;
use crate::vocab::Sentence;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceScores {
    /// Smoothed sentence BLEU; for diagnosis only.
    pub sentence_bleu: f64,
    pub exact_match: bool,
}

/// One corpus line of a cycle-consistency run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleRecord {
    pub index: usize,
    pub source: String,
    pub pivot: String,
    pub back_translation: String,
    pub scores: SentenceScores,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    /// Corpus BLEU of back-translations against the originals.
    pub score: f64,
    pub records: Vec<CycleRecord>,
}

impl CycleReport {
    /// Indices of sentences that did not survive the round trip.
    pub fn flagged(&self) -> Vec<usize> {
        self.records.iter().filter(|r| !r.scores.exact_match).map(|r| r.index).collect()
    }

    /// One tab-separated `key=value` record per sentence, fixed field order.
    pub fn to_text(&self) -> String {
        let mut out = format!("cycle_bleu={:.2}\n", self.score);
        for r in &self.records {
            out.push_str(&format!(
                "index={}\tsource={}\tpivot={}\tback_translation={}\tsentence_bleu={:.2}\texact_match={}\tnote=diagnostic-only\n",
                r.index, r.source, r.pivot, r.back_translation, r.scores.sentence_bleu, r.scores.exact_match
            ));
        }
        out
    }

    /// One JSON object per sentence.
    pub fn to_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
    }
}

/// Translates every sentence forward, back-translates with a separate system,
/// and scores the result against the originals.
///
/// The back-translator must not share any model identity tag with the
/// forward system; otherwise the system could optimize against its own judge.
pub fn cycle_consistency(
    fwd_system: &dyn TranslationSystem,
    independent_bwd: &dyn TranslationSystem,
    corpus: &[Sentence],
    config: &BleuConfig,
) -> Result<CycleReport> {
    let fwd_tags = fwd_system.model_tags();
    if let Some(shared) = independent_bwd.model_tags().into_iter().find(|t| fwd_tags.contains(t)) {
        return Err(Error::SameBackTranslator(shared));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let source_vocab = fwd_system.source_vocab();
    let target_vocab = fwd_system.target_vocab();
    let back_vocab = independent_bwd.target_vocab();

    let records = corpus
        .par_iter()
        .enumerate()
        .map(|(index, source)| {
            let pivot = fwd_system.translate(source)?;
            let back = independent_bwd.translate(&pivot)?;
            let source_text = source_vocab.render(source)?;
            let back_text = back_vocab.render(&back)?;
            let hyp = config.tokenize(&back_text);
            let reference = config.tokenize(&source_text);
            Ok(CycleRecord {
                index,
                pivot: target_vocab.render(&pivot)?,
                scores: SentenceScores {
                    sentence_bleu: sentence_bleu_diagnostic(&hyp, &reference, config),
                    exact_match: hyp == reference,
                },
                source: source_text,
                back_translation: back_text,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hyps: Vec<Vec<String>> = records.iter().map(|r| config.tokenize(&r.back_translation)).collect();
    let refs: Vec<Vec<String>> = records.iter().map(|r| config.tokenize(&r.source)).collect();
    let score = bleu_corpus(&hyps, &refs, config)?;
    Ok(CycleReport { score, records })
}
