//! Audit trail of pragmatic decoding decisions.

use serde::Serialize;

use crate::vocab::{Sentence, TokenId};

/// One scored next-token candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRecord {
    pub token: TokenId,
    /// Base-speaker log probability of the token after the prefix.
    pub base_logprob: f64,
    /// Greedy completion scored by the backward model, when one was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rollout: Option<Sentence>,
    /// Set when the rollout hit the length cap without producing EOS.
    pub rollout_truncated: bool,
    /// Listener log score before the rationality weight is applied.
    pub listener_logscore: f64,
    /// Unnormalized combined log score used for the decision.
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub prefix: Sentence,
    pub candidates: Vec<CandidateRecord>,
    pub chosen: TokenId,
}

impl StepRecord {
    pub fn any_truncated(&self) -> bool {
        self.candidates.iter().any(|c| c.rollout_truncated)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DecodeTrace {
    pub steps: Vec<StepRecord>,
}

impl DecodeTrace {
    pub fn push(&mut self, step: StepRecord) {
        self.steps.push(step);
    }

    pub fn chosen_tokens(&self) -> Vec<TokenId> {
        self.steps.iter().map(|s| s.chosen).collect()
    }

    pub fn rollout_truncated(&self) -> bool {
        self.steps.iter().any(StepRecord::any_truncated)
    }
}
