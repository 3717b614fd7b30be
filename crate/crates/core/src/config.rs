use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a partial translation is completed before it is scored by the
/// backward model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RolloutPolicy {
    #[default]
    Greedy,
}

/// Every inference knob shared by the speakers and decoders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PragmaticsConfig {
    /// Rationality weight applied as an exponent on the listener term.
    pub alpha: f64,
    /// Next-word candidates scored per step by the cyclic speaker.
    pub candidate_width_k: usize,
    pub beam_width: usize,
    /// Hard cap on decoded length, EOS included.
    pub max_len: usize,
    pub rollout: RolloutPolicy,
}

impl Default for PragmaticsConfig {
    fn default() -> Self {
        Self { alpha: 0.1, candidate_width_k: 2, beam_width: 4, max_len: 50, rollout: RolloutPolicy::Greedy }
    }
}

impl PragmaticsConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_candidates(mut self, k: usize) -> Self {
        self.candidate_width_k = k;
        self
    }

    pub fn with_beam(mut self, beam_width: usize) -> Self {
        self.beam_width = beam_width;
        self
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be a finite value >= 0, got {}", self.alpha)));
        }
        if self.candidate_width_k == 0 {
            return Err(Error::InvalidConfig("candidate width must be at least 1".into()));
        }
        if self.beam_width == 0 {
            return Err(Error::InvalidConfig("beam width must be at least 1".into()));
        }
        if self.max_len == 0 {
            return Err(Error::InvalidConfig("max length must be at least 1".into()));
        }
        Ok(())
    }
}
