use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::models::{self, ConditionalSequenceModel};
use crate::rsa::{beam_decode, greedy_decode};
use crate::vocab::{Sentence, TokenId, Vocabulary};

/// What confirmed a collision, enough to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionEvidence {
    /// Corpus sentence whose translation produced the pivot.
    pub origin: Sentence,
    /// Best back-translations of the pivot, best first.
    pub back_translations: Vec<Sentence>,
    pub reforward_a: Sentence,
    pub reforward_b: Sentence,
}

/// Two distinct source sentences sharing one forward translation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionPair {
    pub source_a: Sentence,
    pub source_b: Sentence,
    pub pivot: Sentence,
    pub evidence: CollisionEvidence,
}

impl CollisionPair {
    /// Re-translates both sources greedily and checks they still meet at the
    /// pivot.
    pub fn verify<M: ConditionalSequenceModel + ?Sized>(&self, fwd: &M, max_len: usize) -> Result<bool> {
        let a = translate(fwd, &self.source_a, max_len)?;
        let b = translate(fwd, &self.source_b, max_len)?;
        Ok(a == self.pivot && b == self.pivot)
    }

    pub fn render(&self, source: &Vocabulary, target: &Vocabulary) -> Result<String> {
        Ok(format!(
            "source_a={}\tsource_b={}\tpivot={}\torigin={}",
            source.render(&self.source_a)?,
            source.render(&self.source_b)?,
            target.render(&self.pivot)?,
            source.render(&self.evidence.origin)?,
        ))
    }
}

fn translate<M: ConditionalSequenceModel + ?Sized>(model: &M, source: &Sentence, max_len: usize) -> Result<Sentence> {
    let eos = model.target_vocab().eos();
    greedy_decode(|c| models::next_token_dist(model, source, c), eos, max_len)
}

/// Finds many-to-one collisions: translate each corpus sentence, take the
/// `n_back` best back-translations of the result, and keep every pair of them
/// that translates forward to the same pivot. Pairs are deduplicated across
/// the corpus; output follows corpus order.
pub fn survey_many_to_one<F, B>(
    fwd: &F,
    bwd: &B,
    corpus: &[Sentence],
    n_back: usize,
    max_len: usize,
) -> Result<Vec<CollisionPair>>
where
    F: ConditionalSequenceModel + ?Sized,
    B: ConditionalSequenceModel + ?Sized,
{
    models::check_direction_compatible(fwd, bwd)?;
    if n_back < 2 {
        return Ok(Vec::new());
    }
    let per_sentence = corpus
        .par_iter()
        .map(|origin| {
            let origin = origin.clone().terminate();
            let pivot = translate(fwd, &origin, max_len)?;
            let eos = bwd.target_vocab().eos();
            let backs: Vec<Sentence> = beam_decode(|c| models::next_token_dist(bwd, &pivot, c), eos, n_back, max_len)?
                .into_iter()
                .map(|(s, _)| s)
                .filter(|s| s.is_terminated() && !s.tokens().is_empty())
                .collect();
            let reforward = backs.iter().map(|b| translate(fwd, b, max_len)).collect::<Result<Vec<_>>>()?;
            let mut pairs = Vec::new();
            for i in 0..backs.len() {
                for j in i + 1..backs.len() {
                    if backs[i] != backs[j] && reforward[i] == pivot && reforward[j] == pivot {
                        pairs.push(CollisionPair {
                            source_a: backs[i].clone(),
                            source_b: backs[j].clone(),
                            pivot: pivot.clone(),
                            evidence: CollisionEvidence {
                                origin: origin.clone(),
                                back_translations: backs.clone(),
                                reforward_a: reforward[i].clone(),
                                reforward_b: reforward[j].clone(),
                            },
                        });
                    }
                }
            }
            Ok(pairs)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut seen: HashSet<(Vec<TokenId>, Vec<TokenId>)> = HashSet::new();
    let mut out = Vec::new();
    for pair in per_sentence.into_iter().flatten() {
        let (a, b) = (pair.source_a.tokens().to_vec(), pair.source_b.tokens().to_vec());
        let key = if a <= b { (a, b) } else { (b, a) };
        if seen.insert(key) {
            out.push(pair);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn corpus(v: &Vocabulary) -> Vec<Sentence> {
        ["A", "B"].iter().map(|w| v.parse_sentence(w).unwrap()).collect()
    }

    #[test]
    fn ambig_has_one_collision() {
        let (fwd, bwd) = (fixtures::ambig1_forward(), fixtures::ambig1_backward());
        let pairs = survey_many_to_one(&fwd, &bwd, &corpus(fwd.source_vocab()), 2, 4).unwrap();
        assert_eq!(pairs.len(), 1);
        let line = pairs[0].render(fwd.source_vocab(), fwd.target_vocab()).unwrap();
        assert_eq!(line, "source_a=A\tsource_b=B\tpivot=u\torigin=A");
        assert!(pairs[0].verify(&fwd, 4).unwrap());
    }

    #[test]
    fn injective_has_none() {
        let (fwd, bwd) = (fixtures::injective_forward(), fixtures::injective_backward());
        assert!(survey_many_to_one(&fwd, &bwd, &corpus(fwd.source_vocab()), 2, 4).unwrap().is_empty());
    }

    #[test]
    fn single_back_translation_never_pairs() {
        let (fwd, bwd) = (fixtures::ambig1_forward(), fixtures::ambig1_backward());
        assert!(survey_many_to_one(&fwd, &bwd, &corpus(fwd.source_vocab()), 1, 4).unwrap().is_empty());
    }
}
