//! Message types of the `pragma-score v1` line protocol. See
//! `docs/protocol.md` for the normative description.

use std::io;

use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: &str = "pragma-score v1";

/// Tolerance on `|log Σ exp(logprobs)|` for remote distributions.
pub const REMOTE_NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    #[serde(flatten)]
    pub body: RequestBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RequestBody {
    Handshake {
        protocol: String,
    },
    /// `source` excludes EOS; `prefix` never contains EOS.
    NextTokenLogprobs {
        source: Vec<u32>,
        prefix: Vec<u32>,
    },
    /// `sentence` ends with the target EOS id when terminated.
    SequenceLogprob {
        source: Vec<u32>,
        sentence: Vec<u32>,
    },
    Batch {
        requests: Vec<Request>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    /// Absent only on errors for lines that could not be parsed.
    pub id: Option<u64>,
    #[serde(flatten)]
    pub body: ResponseBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResponseBody {
    Handshake {
        protocol: String,
        source_vocab: Vec<String>,
        target_vocab: Vec<String>,
        source_eos_id: u32,
        target_eos_id: u32,
        model_tag: String,
    },
    /// One entry per target token; `null` is zero probability.
    Logprobs {
        logprobs: Vec<Option<f64>>,
    },
    Logprob {
        logprob: Option<f64>,
    },
    Batch {
        responses: Vec<Response>,
    },
    Error {
        code: String,
        message: String,
    },
}

/// Error codes used in `error` responses.
pub mod codes {
    pub const BAD_REQUEST: &str = "bad-request";
    pub const UNKNOWN_TOKEN: &str = "unknown-token";
    pub const MISSING_ENTRY: &str = "missing-entry";
    pub const UNSUPPORTED_PROTOCOL: &str = "unsupported-protocol";
    pub const INTERNAL: &str = "internal";
}

/// Writes floats with 17 significant digits in exponent form so every
/// number on the wire round-trips exactly.
struct WireFormatter;

impl serde_json::ser::Formatter for WireFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn encode<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, WireFormatter);
    value.serialize(&mut ser).expect("protocol messages serialize");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

impl Request {
    /// Single line, no trailing newline.
    pub fn to_line(&self) -> String {
        encode(self)
    }

    pub fn from_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

impl Response {
    /// Single line, no trailing newline.
    pub fn to_line(&self) -> String {
        encode(self)
    }

    pub fn from_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }

    pub fn error(id: Option<u64>, code: &str, message: impl Into<String>) -> Self {
        Self { id, body: ResponseBody::Error { code: code.to_string(), message: message.into() } }
    }
}
