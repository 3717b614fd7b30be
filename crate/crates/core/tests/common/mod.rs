//! Random model generators shared by the integration suites.

#![allow(dead_code)]

use pragma::models::TabularModel;
use pragma::TokenId;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dimensions of a generated model pair.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub source_words: usize,
    pub target_words: usize,
    /// Longest source sentence, in words.
    pub source_len: usize,
    /// Longest target sentence, EOS included.
    pub max_len: usize,
}

impl Shape {
    /// Target vocabulary of at most six entries and `max_len <= 4`.
    pub fn random(rng: &mut TestRng) -> Self {
        Shape {
            source_words: rng.gen_range(2..=3),
            target_words: rng.gen_range(2..=5),
            source_len: rng.gen_range(1..=2),
            max_len: rng.gen_range(2..=4),
        }
    }
}

/// Every word sequence with length in `lengths`, shortest first, then in
/// lexicographic id order.
pub fn sequences(words: usize, lengths: std::ops::RangeInclusive<usize>) -> Vec<Vec<TokenId>> {
    let mut out = Vec::new();
    for len in lengths {
        let mut current = vec![0u32; len];
        loop {
            out.push(current.iter().map(|&i| TokenId(i)).collect());
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                current[i] += 1;
                if (current[i] as usize) < words {
                    break;
                }
                current[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if len == 0 || i == usize::MAX {
                break;
            }
        }
    }
    out
}

fn word_names(prefix: char, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A normalized random row over `width` entries. EOS sits at `width - 1`.
/// `eos` chooses between forced EOS, forbidden EOS, and free EOS.
fn random_row(rng: &mut TestRng, width: usize, eos: EosRule, zeros: bool) -> Vec<f64> {
    let eos_id = width - 1;
    if eos == EosRule::Forced {
        let mut row = vec![0.0; width];
        row[eos_id] = 1.0;
        return row;
    }
    let mut row: Vec<f64> = (0..width)
        .map(|i| {
            if (i == eos_id && eos == EosRule::Forbidden) || (zeros && rng.gen_bool(0.25)) {
                0.0
            } else {
                rng.gen_range(0.05..1.0)
            }
        })
        .collect();
    if row.iter().all(|&p| p == 0.0) {
        let pick = rng.gen_range(0..eos_id);
        row[pick] = 1.0;
    }
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= total);
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EosRule {
    Forced,
    Forbidden,
    Free,
}

/// Forward model with a table for every source sentence and every target
/// prefix. EOS is impossible first and certain at the length cap, so every
/// decode ends with a nonempty terminated sentence.
pub fn random_forward(rng: &mut TestRng, shape: Shape) -> TabularModel {
    let mut b =
        TabularModel::builder(word_names('s', shape.source_words), word_names('t', shape.target_words)).unwrap();
    let width = shape.target_words + 1;
    for src in sequences(shape.source_words, 1..=shape.source_len) {
        for prefix in sequences(shape.target_words, 0..=shape.max_len - 1) {
            let rule = if prefix.len() + 1 == shape.max_len {
                EosRule::Forced
            } else if prefix.is_empty() {
                EosRule::Forbidden
            } else {
                EosRule::Free
            };
            let row = random_row(rng, width, rule, true);
            b = b.entry_ids(src.clone(), prefix, row).unwrap();
        }
    }
    b.build().unwrap()
}

/// Backward model covering every nonempty target sentence the matching
/// forward model can produce. All probabilities are positive except where
/// EOS is forced or forbidden.
pub fn random_backward(rng: &mut TestRng, shape: Shape) -> TabularModel {
    let mut b =
        TabularModel::builder(word_names('t', shape.target_words), word_names('s', shape.source_words)).unwrap();
    let width = shape.source_words + 1;
    for tgt in sequences(shape.target_words, 1..=shape.max_len - 1) {
        for prefix in sequences(shape.source_words, 0..=shape.source_len) {
            let rule = if prefix.len() == shape.source_len {
                EosRule::Forced
            } else if prefix.is_empty() {
                EosRule::Forbidden
            } else {
                EosRule::Free
            };
            let row = random_row(rng, width, rule, false);
            b = b.entry_ids(tgt.clone(), prefix, row).unwrap();
        }
    }
    b.build().unwrap()
}

/// A forward model, its backward model, and an independent evaluator.
pub struct PairFamilyMember {
    pub forward: TabularModel,
    pub backward: TabularModel,
    pub evaluator: TabularModel,
    /// Whether the base speaker maps both sources to one sentence.
    pub collides: bool,
}

/// Two sources `A` and `B`, targets `u x y f`. In colliding members both
/// sources prefer `u` by a small margin over their distinguishing word
/// (`x` for A, `y` for B). In control members each source already prefers
/// its distinguishing word. After the first word the sentence ends or takes
/// one filler `f`.
pub fn ambiguous_pair(rng: &mut TestRng, collides: bool) -> PairFamilyMember {
    let margin = rng.gen_range(0.005..0.04);
    let p_own = rng.gen_range(0.40..0.47);
    let p_u = if collides { p_own * (1.0 + margin) } else { p_own * (1.0 - 3.0 * margin) };
    let p_other = 1.0 - p_own - p_u;
    let p_end = rng.gen_range(0.6..0.95);

    let mut fwd = TabularModel::builder(["A", "B"], ["u", "x", "y", "f"]).unwrap();
    for (src, own, other) in [("A", "x", "y"), ("B", "y", "x")] {
        fwd = fwd.entry(src, "", &[("u", p_u), (own, p_own), (other, p_other)]).unwrap();
        for first in ["u", "x", "y"] {
            fwd = fwd.entry(src, first, &[("</s>", p_end), ("f", 1.0 - p_end)]).unwrap();
            fwd = fwd.entry(src, &format!("{first} f"), &[("</s>", 1.0)]).unwrap();
        }
    }

    let clear = rng.gen_range(0.85..0.97);
    let mut bwd = TabularModel::builder(["u", "x", "y", "f"], ["A", "B"]).unwrap();
    let mut eval = TabularModel::builder(["u", "x", "y", "f"], ["A", "B"]).unwrap();
    let eval_clear = rng.gen_range(0.8..0.9);
    for first in ["u", "x", "y"] {
        let (p_a, e_a) = match first {
            "u" => (0.5, 0.6),
            "x" => (clear, eval_clear),
            _ => (1.0 - clear, 1.0 - eval_clear),
        };
        for tgt in [first.to_string(), format!("{first} f")] {
            bwd = bwd.entry(&tgt, "", &[("A", p_a), ("B", 1.0 - p_a)]).unwrap();
            eval = eval.entry(&tgt, "", &[("A", e_a), ("B", 1.0 - e_a)]).unwrap();
            for s in ["A", "B"] {
                bwd = bwd.entry(&tgt, s, &[("</s>", 1.0)]).unwrap();
                eval = eval.entry(&tgt, s, &[("</s>", 1.0)]).unwrap();
            }
        }
    }
    PairFamilyMember {
        forward: fwd.build().unwrap(),
        backward: bwd.build().unwrap(),
        evaluator: eval.build().unwrap(),
        collides,
    }
}
