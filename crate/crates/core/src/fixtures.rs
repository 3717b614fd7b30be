//! Small exact models shipped with the crate, used by tests, the oracle
//! command, and documentation.
//!
//! | name        | shape                                                         |
//! |-------------|---------------------------------------------------------------|
//! | `ambig1`    | sources A, B both translate greedily to "u"                   |
//! | `det1`      | single deterministic chain s -> "t"                           |
//! | `chain1`    | greedy rollout and exact continuation sums disagree at step 1 |
//! | `chain2`    | exact incremental decoding misses the best whole sentence     |
//! | `injective` | A -> "x", B -> "y"; no collisions                             |

use crate::models::{parse_tabular, TabularModel};

pub const AMBIG1_FWD: &str = include_str!("../fixtures/ambig1.fwd.tab");
pub const AMBIG1_BWD: &str = include_str!("../fixtures/ambig1.bwd.tab");
pub const AMBIG1_EVAL: &str = include_str!("../fixtures/ambig1.eval.tab");
pub const DET1: &str = include_str!("../fixtures/det1.tab");
pub const CHAIN1_FWD: &str = include_str!("../fixtures/chain1.fwd.tab");
pub const CHAIN1_BWD: &str = include_str!("../fixtures/chain1.bwd.tab");
pub const CHAIN2_FWD: &str = include_str!("../fixtures/chain2.fwd.tab");
pub const CHAIN2_BWD: &str = include_str!("../fixtures/chain2.bwd.tab");
pub const INJECTIVE_FWD: &str = include_str!("../fixtures/injective.fwd.tab");
pub const INJECTIVE_BWD: &str = include_str!("../fixtures/injective.bwd.tab");

fn load(text: &str) -> TabularModel {
    parse_tabular(text).expect("bundled fixture parses")
}

pub fn ambig1_forward() -> TabularModel {
    load(AMBIG1_FWD)
}

pub fn ambig1_backward() -> TabularModel {
    load(AMBIG1_BWD)
}

/// Back-translator for evaluation, distinct from [`ambig1_backward`].
pub fn ambig1_eval_backward() -> TabularModel {
    load(AMBIG1_EVAL)
}

pub fn det1() -> TabularModel {
    load(DET1)
}

pub fn chain1_forward() -> TabularModel {
    load(CHAIN1_FWD)
}

pub fn chain1_backward() -> TabularModel {
    load(CHAIN1_BWD)
}

pub fn chain2_forward() -> TabularModel {
    load(CHAIN2_FWD)
}

pub fn chain2_backward() -> TabularModel {
    load(CHAIN2_BWD)
}

pub fn injective_forward() -> TabularModel {
    load(INJECTIVE_FWD)
}

pub fn injective_backward() -> TabularModel {
    load(INJECTIVE_BWD)
}

/// Forward/backward pair by fixture name.
pub fn pair(name: &str) -> Option<(TabularModel, TabularModel)> {
    match name {
        "ambig1" => Some((ambig1_forward(), ambig1_backward())),
        "chain1" => Some((chain1_forward(), chain1_backward())),
        "chain2" => Some((chain2_forward(), chain2_backward())),
        "injective" => Some((injective_forward(), injective_backward())),
        _ => None,
    }
}

pub const PAIR_NAMES: [&str; 4] = ["ambig1", "chain1", "chain2", "injective"];
