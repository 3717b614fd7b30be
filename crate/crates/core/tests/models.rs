mod common;

use common::{random_backward, random_forward, rng, sequences, Shape};
use pragma::models::{self, enumerate_sentences, load_tabular, parse_tabular};
use pragma::vocab::Sentence;
use pragma::ConditionalSequenceModel;
use proptest::prelude::*;

/// Product of next-token probabilities, computed step by step in probability
/// space.
fn chain_product<M: ConditionalSequenceModel>(m: &M, source: &Sentence, sentence: &Sentence) -> f64 {
    let eos = m.target_vocab().eos();
    let ids = sentence.ids_with_eos(eos);
    let mut p = 1.0;
    for (t, id) in ids.iter().enumerate() {
        let dist = m.next_token_dist(source, &sentence.truncated(t)).unwrap();
        p *= dist.prob(id);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sequence_logprob_follows_the_chain_rule(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut r = rng(seed);
        let shape = Shape::random(&mut r);
        let fwd = random_forward(&mut r, shape);
        let sources = fwd.sources();
        let source = pick.get(&sources);
        let eos = fwd.target_vocab().eos();
        for tokens in sequences(shape.target_words, 1..=shape.max_len - 1) {
            for sentence in [Sentence::complete(tokens.clone()), Sentence::prefix(tokens.clone())] {
                if Sentence::from_ids(&sentence.ids_with_eos(eos), eos).unwrap() != sentence {
                    continue;
                }
                let lp = models::sequence_logprob(&fwd, source, &sentence).unwrap();
                let expected = chain_product(&fwd, source, &sentence);
                if expected == 0.0 {
                    prop_assert_eq!(lp, f64::NEG_INFINITY);
                } else {
                    prop_assert!((lp - expected.ln()).abs() < 1e-12, "{} vs {}", lp, expected.ln());
                }
            }
        }
    }

    #[test]
    fn enumeration_mass_is_at_most_one(seed in any::<u64>(), cap in 1usize..=4) {
        let mut r = rng(seed);
        let shape = Shape::random(&mut r);
        let fwd = random_forward(&mut r, shape);
        for source in fwd.sources() {
            let all = enumerate_sentences(&fwd, &source, cap).unwrap();
            let mass: f64 = all.iter().map(|(_, lp)| lp.exp()).sum();
            prop_assert!(mass <= 1.0 + 1e-12);
            if cap >= shape.max_len {
                prop_assert!((mass - 1.0).abs() < 1e-12, "mass {}", mass);
            }
            for (s, lp) in &all {
                prop_assert!(s.is_terminated() && s.len() <= cap);
                prop_assert!(*lp > f64::NEG_INFINITY);
            }
        }
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..8 {
        let mut r = rng(seed);
        let shape = Shape::random(&mut r);
        let fwd = random_forward(&mut r, shape);
        let bwd = random_backward(&mut r, shape);
        for (i, m) in [fwd, bwd].into_iter().enumerate() {
            let path = dir.path().join(format!("m{seed}-{i}.tab"));
            m.save(&path).unwrap();
            let loaded = load_tabular(&path).unwrap();
            assert_eq!(loaded.identity_tag(), m.identity_tag());
            assert_eq!(loaded.table_count(), m.table_count());
            assert_eq!(loaded.to_text(), m.to_text());
            let reparsed = parse_tabular(&m.to_text()).unwrap();
            for source in m.sources() {
                for prefix in sequences(m.target_vocab().len() - 1, 0..=1) {
                    let prefix = Sentence::prefix(prefix);
                    let (a, b) = (m.next_token_dist(&source, &prefix), reparsed.next_token_dist(&source, &prefix));
                    match (a, b) {
                        (Ok(a), Ok(b)) => {
                            for (tok, lp) in a.iter() {
                                let other = b.logweight(tok);
                                assert!(lp == other || (lp - other).abs() < 1e-15, "{lp} vs {other}");
                            }
                        }
                        (Err(_), Err(_)) => {}
                        _ => panic!("round trip changed table coverage"),
                    }
                }
            }
        }
    }
}

#[test]
fn generated_backward_models_are_compatible() {
    let mut r = rng(7);
    let shape = Shape::random(&mut r);
    let fwd = random_forward(&mut r, shape);
    let bwd = random_backward(&mut r, shape);
    models::check_direction_compatible(&fwd, &bwd).unwrap();
    assert_ne!(fwd.identity_tag(), bwd.identity_tag());
}
