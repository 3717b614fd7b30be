//! Pragmatic sequence decoding.
//!
//! Speakers and listeners in the Rational Speech Acts family, layered over an
//! abstract [`ConditionalSequenceModel`]. The crate ships exact tabular toy
//! models for brute-force verification, a corpus BLEU and cycle-consistency
//! harness, a many-to-one collision survey, and a line-delimited wire client
//! for driving everything from an external scoring process.

pub mod adapter;
pub mod config;
pub mod dist;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod models;
pub mod oracle;
pub mod rsa;
pub mod trace;
pub mod translate;
pub mod vocab;

pub use config::{PragmaticsConfig, RolloutPolicy};
pub use dist::{argmax, log_normalize, LogDistribution};
pub use error::{Error, Result};
pub use models::{ConditionalSequenceModel, TabularModel};
pub use trace::{CandidateRecord, DecodeTrace, StepRecord};
pub use vocab::{Sentence, Token, TokenId, Vocabulary, EOS_SURFACE};
