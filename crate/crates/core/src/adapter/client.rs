use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::protocol::{Request, RequestBody, Response, ResponseBody, PROTOCOL_VERSION, REMOTE_NORMALIZATION_TOLERANCE};
use crate::dist::{log_normalize, log_sum_exp, LogDistribution};
use crate::error::{Error, Result};
use crate::models::ConditionalSequenceModel;
use crate::vocab::{Sentence, TokenId, Vocabulary};

pub const DEFAULT_TIMEOUT_MS: u64 = 30_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "transport", rename_all = "lowercase")]
pub enum Transport {
    /// Spawn a process and talk over its stdin and stdout.
    Stdio { command: Vec<String> },
    /// Connect to `host:port`.
    Tcp { address: String },
}

/// Where a scorer lives and how long to wait for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScorerEndpoint {
    pub transport: Transport,
    pub timeout_ms: u64,
    /// Overrides the tag reported in the handshake when set.
    pub identity_tag: Option<String>,
}

impl ScorerEndpoint {
    pub fn tcp(address: impl Into<String>) -> Self {
        Self {
            transport: Transport::Tcp { address: address.into() },
            timeout_ms: DEFAULT_TIMEOUT_MS,
            identity_tag: None,
        }
    }

    pub fn stdio<I, S>(command: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let command = command.into_iter().map(Into::into).collect();
        Self { transport: Transport::Stdio { command }, timeout_ms: DEFAULT_TIMEOUT_MS, identity_tag: None }
    }

    /// Accepts `tcp://host:port` or `stdio:<command and args>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(addr) = spec.strip_prefix("tcp://") {
            if addr.is_empty() {
                return Err(Error::InvalidConfig("empty tcp address".into()));
            }
            Ok(Self::tcp(addr))
        } else if let Some(cmd) = spec.strip_prefix("stdio:") {
            let parts: Vec<&str> = cmd.split_whitespace().collect();
            if parts.is_empty() {
                return Err(Error::InvalidConfig("empty stdio command".into()));
            }
            Ok(Self::stdio(parts))
        } else {
            Err(Error::InvalidConfig(format!("not a scorer endpoint: {spec:?}")))
        }
    }

    pub fn with_timeout_ms(mut self, timeout_ms: u64) -> Self {
        self.timeout_ms = timeout_ms;
        self
    }

    pub fn with_identity_tag(mut self, tag: impl Into<String>) -> Self {
        self.identity_tag = Some(tag.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout_ms == 0 {
            return Err(Error::InvalidConfig("scorer timeout must be positive".into()));
        }
        if self.identity_tag.as_deref() == Some("") {
            return Err(Error::InvalidConfig("scorer identity tag must be nonempty".into()));
        }
        Ok(())
    }
}

struct Connection {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    child: Option<Child>,
    next_id: u64,
}

impl Connection {
    fn open(endpoint: &ScorerEndpoint) -> Result<Self> {
        let (writer, reader, child): (Box<dyn Write + Send>, Box<dyn std::io::Read + Send>, _) =
            match &endpoint.transport {
                Transport::Tcp { address } => {
                    let stream = TcpStream::connect(address)?;
                    stream.set_nodelay(true)?;
                    (Box::new(stream.try_clone()?), Box::new(stream), None)
                }
                Transport::Stdio { command } => {
                    let (program, args) =
                        command.split_first().ok_or_else(|| Error::InvalidConfig("empty stdio command".into()))?;
                    let mut child = Command::new(program)
                        .args(args)
                        .stdin(Stdio::piped())
                        .stdout(Stdio::piped())
                        .stderr(Stdio::inherit())
                        .spawn()?;
                    let stdin = child.stdin.take().expect("piped stdin");
                    let stdout = child.stdout.take().expect("piped stdout");
                    (Box::new(stdin), Box::new(stdout), Some(child))
                }
            };
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(Self { writer, lines: rx, child, next_id: 1 })
    }

    /// Sends one request and waits for the response carrying its id.
    /// Responses to earlier, abandoned requests are skipped.
    fn call(&mut self, body: RequestBody, timeout_ms: u64) -> Result<ResponseBody> {
        let id = self.next_id;
        self.next_id += 1;
        let mut line = Request { id, body }.to_line();
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()?;

        let deadline = Instant::now() + Duration::from_millis(timeout_ms);
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            let raw = match self.lines.recv_timeout(left) {
                Ok(line) => line?,
                Err(RecvTimeoutError::Timeout) => return Err(Error::Timeout(timeout_ms)),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(Error::Protocol("scorer closed the connection".into()))
                }
            };
            if raw.trim().is_empty() {
                continue;
            }
            let resp = Response::from_line(&raw).map_err(|e| Error::Protocol(format!("unparseable response: {e}")))?;
            match resp.id {
                Some(got) if got == id => return Ok(resp.body),
                Some(got) if got < id => continue,
                Some(got) => return Err(Error::Protocol(format!("response id {got} does not match request {id}"))),
                None => return Err(remote_error(resp.body)),
            }
        }
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

fn remote_error(body: ResponseBody) -> Error {
    match body {
        ResponseBody::Error { code, message } => Error::Remote { code, message },
        other => Error::Protocol(format!("response without id: {other:?}")),
    }
}

fn unexpected(want: &str, got: ResponseBody) -> Error {
    match got {
        ResponseBody::Error { code, message } => Error::Remote { code, message },
        other => Error::Protocol(format!("expected {want} response, got {other:?}")),
    }
}

/// A model served by an external scorer process.
pub struct RemoteModel {
    endpoint: ScorerEndpoint,
    source: Vocabulary,
    target: Vocabulary,
    tag: String,
    conn: Mutex<Connection>,
}

impl std::fmt::Debug for RemoteModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteModel").field("endpoint", &self.endpoint).field("tag", &self.tag).finish()
    }
}

/// Opens a connection and performs the handshake.
pub fn connect(endpoint: &ScorerEndpoint) -> Result<RemoteModel> {
    endpoint.validate()?;
    let mut conn = Connection::open(endpoint).map_err(|e| match e {
        Error::Io(io) => Error::HandshakeFailed(format!("cannot reach scorer: {io}")),
        other => other,
    })?;
    let body = RequestBody::Handshake { protocol: PROTOCOL_VERSION.to_string() };
    let reply = match conn.call(body, endpoint.timeout_ms) {
        Ok(reply) => reply,
        Err(e @ Error::Timeout(_)) => return Err(e),
        Err(e) => return Err(Error::HandshakeFailed(e.to_string())),
    };
    let ResponseBody::Handshake { protocol, source_vocab, target_vocab, source_eos_id, target_eos_id, model_tag } =
        reply
    else {
        return Err(Error::HandshakeFailed(format!("expected handshake, got {reply:?}")));
    };
    if protocol != PROTOCOL_VERSION {
        return Err(Error::HandshakeFailed(format!("scorer speaks {protocol:?}")));
    }
    let vocab = |s, eos| Vocabulary::with_eos(s, TokenId(eos)).map_err(|e| Error::HandshakeFailed(e.to_string()));
    let source = vocab(source_vocab, source_eos_id)?;
    let target = vocab(target_vocab, target_eos_id)?;
    let tag = endpoint.identity_tag.clone().unwrap_or(model_tag);
    if tag.is_empty() {
        return Err(Error::HandshakeFailed("empty model tag".into()));
    }
    Ok(RemoteModel { endpoint: endpoint.clone(), source, target, tag, conn: Mutex::new(conn) })
}

impl RemoteModel {
    pub fn endpoint(&self) -> &ScorerEndpoint {
        &self.endpoint
    }

    fn call(&self, body: RequestBody) -> Result<ResponseBody> {
        let mut conn = self.conn.lock().unwrap_or_else(|p| p.into_inner());
        conn.call(body, self.endpoint.timeout_ms)
    }

    fn ids(sentence: &Sentence) -> Vec<u32> {
        sentence.tokens().iter().map(|t| t.0).collect()
    }

    fn next_token_body(&self, source: &Sentence, prefix: &Sentence) -> RequestBody {
        RequestBody::NextTokenLogprobs { source: Self::ids(source), prefix: Self::ids(prefix) }
    }

    fn sequence_body(&self, source: &Sentence, sentence: &Sentence) -> RequestBody {
        let ids = sentence.ids_with_eos(self.target.eos()).into_iter().map(|t| t.0).collect();
        RequestBody::SequenceLogprob { source: Self::ids(source), sentence: ids }
    }

    /// Checks a remote distribution and renormalizes small drift.
    fn to_distribution(&self, body: ResponseBody) -> Result<LogDistribution> {
        let ResponseBody::Logprobs { logprobs } = body else {
            return Err(unexpected("logprobs", body));
        };
        if logprobs.len() != self.target.len() {
            return Err(Error::Protocol(format!(
                "{} logprobs for a vocabulary of {}",
                logprobs.len(),
                self.target.len()
            )));
        }
        let values: Vec<f64> = logprobs.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect();
        let total = log_sum_exp(&values);
        if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY)
            || total.is_nan()
            || total.abs() > REMOTE_NORMALIZATION_TOLERANCE
        {
            return Err(Error::Normalization { table: "remote next-token distribution".into(), sum: total.exp() });
        }
        log_normalize(values.into_iter().enumerate().map(|(i, v)| (TokenId(i as u32), v)))
    }

    fn to_logprob(body: ResponseBody) -> Result<f64> {
        match body {
            ResponseBody::Logprob { logprob } => {
                let v = logprob.unwrap_or(f64::NEG_INFINITY);
                if v.is_nan() || v > 0.0 {
                    return Err(Error::Protocol(format!("invalid sequence log probability {v}")));
                }
                Ok(v)
            }
            other => Err(unexpected("logprob", other)),
        }
    }
}

impl ConditionalSequenceModel for RemoteModel {
    fn source_vocab(&self) -> &Vocabulary {
        &self.source
    }

    fn target_vocab(&self) -> &Vocabulary {
        &self.target
    }

    fn identity_tag(&self) -> &str {
        &self.tag
    }

    fn next_token_dist(&self, source: &Sentence, prefix: &Sentence) -> Result<LogDistribution> {
        let body = self.call(self.next_token_body(source, prefix))?;
        self.to_distribution(body)
    }

    fn sequence_logprob(&self, source: &Sentence, sentence: &Sentence) -> Result<f64> {
        Self::to_logprob(self.call(self.sequence_body(source, sentence))?)
    }
}

/// One item of a batch.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreRequest {
    NextToken { source: Sentence, prefix: Sentence },
    Sequence { source: Sentence, sentence: Sentence },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreResponse {
    NextToken(LogDistribution),
    Sequence(f64),
}

impl RemoteModel {
    fn check_item(&self, item: &ScoreRequest) -> Result<RequestBody> {
        match item {
            ScoreRequest::NextToken { source, prefix } => {
                self.source.check_sentence(source)?;
                self.target.check_sentence(prefix)?;
                if prefix.is_terminated() {
                    return Err(Error::InvalidSentence("prefix is already terminated".into()));
                }
                Ok(self.next_token_body(source, prefix))
            }
            ScoreRequest::Sequence { source, sentence } => {
                self.source.check_sentence(source)?;
                self.target.check_sentence(sentence)?;
                Ok(self.sequence_body(source, sentence))
            }
        }
    }
}

/// Scores many items in one round trip. The outer error covers transport
/// failures; each item carries its own result, in request order.
pub fn batch_score(model: &RemoteModel, requests: &[ScoreRequest]) -> Result<Vec<Result<ScoreResponse>>> {
    let mut out: Vec<Option<Result<ScoreResponse>>> = Vec::with_capacity(requests.len());
    let mut wire = Vec::new();
    for (i, item) in requests.iter().enumerate() {
        match model.check_item(item) {
            Ok(body) => {
                wire.push(Request { id: i as u64, body });
                out.push(None);
            }
            Err(e) => out.push(Some(Err(e))),
        }
    }
    if !wire.is_empty() {
        let sent: Vec<u64> = wire.iter().map(|r| r.id).collect();
        let reply = model.call(RequestBody::Batch { requests: wire })?;
        let ResponseBody::Batch { responses } = reply else {
            return Err(unexpected("batch", reply));
        };
        if responses.len() != sent.len() {
            return Err(Error::Protocol(format!("batch of {} answered with {}", sent.len(), responses.len())));
        }
        for (want, resp) in sent.into_iter().zip(responses) {
            if resp.id != Some(want) {
                return Err(Error::Protocol(format!("batch item {want} answered out of order")));
            }
            let i = want as usize;
            let result = match (&requests[i], resp.body) {
                (_, ResponseBody::Error { code, message }) => Err(Error::Remote { code, message }),
                (ScoreRequest::NextToken { .. }, body) => model.to_distribution(body).map(ScoreResponse::NextToken),
                (ScoreRequest::Sequence { .. }, body) => RemoteModel::to_logprob(body).map(ScoreResponse::Sequence),
            };
            out[i] = Some(result);
        }
    }
    Ok(out.into_iter().map(|r| r.expect("every item answered")).collect())
}
