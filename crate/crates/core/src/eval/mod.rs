//! Evaluation: corpus BLEU, cycle-consistency, and the many-to-one survey.

mod bleu;
mod cycle;
mod survey;

pub use bleu::{bleu_corpus, bleu_corpus_lines, sentence_bleu_diagnostic, BleuConfig, Tokenizer};
pub use cycle::{cycle_consistency, CycleRecord, CycleReport, SentenceScores};
pub use survey::{survey_many_to_one, CollisionEvidence, CollisionPair};

use crate::error::{Error, Result};
use crate::vocab::{Sentence, Vocabulary};

/// Reads a corpus: one sentence per line, whitespace-separated surface forms.
/// Blank lines are skipped.
pub fn parse_corpus(text: &str, vocab: &Vocabulary) -> Result<Vec<Sentence>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| vocab.parse_sentence(l).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() }))
        .collect()
}
