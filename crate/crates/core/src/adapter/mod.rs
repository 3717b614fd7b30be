//! Client for external scorers speaking the `pragma-score v1` protocol, plus
//! a reference responder over local models.

mod client;
pub mod protocol;
mod server;

pub use client::{
    batch_score, connect, RemoteModel, ScoreRequest, ScoreResponse, ScorerEndpoint, Transport, DEFAULT_TIMEOUT_MS,
};
pub use protocol::PROTOCOL_VERSION;
pub use server::{respond, serve};
