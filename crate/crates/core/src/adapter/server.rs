//! Reference responder: answers protocol requests from a local model.

use std::io::{BufRead, Write};

use super::protocol::{codes, Request, RequestBody, Response, ResponseBody, PROTOCOL_VERSION};
use crate::error::Error;
use crate::models::{self, ConditionalSequenceModel};
use crate::vocab::{Sentence, TokenId};

fn finite(v: f64) -> Option<f64> {
    (v != f64::NEG_INFINITY).then_some(v)
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::UnknownToken { .. } | Error::UnknownSurface(_) => codes::UNKNOWN_TOKEN,
        Error::MissingEntry { .. } => codes::MISSING_ENTRY,
        Error::InvalidSentence(_) => codes::BAD_REQUEST,
        _ => codes::INTERNAL,
    }
}

fn to_ids(ids: &[u32]) -> Vec<TokenId> {
    ids.iter().copied().map(TokenId).collect()
}

/// Answers one request.
pub fn respond<M: ConditionalSequenceModel + ?Sized>(model: &M, request: &Request) -> Response {
    let id = Some(request.id);
    let fail = |e: Error| Response::error(id, error_code(&e), e.to_string());
    match &request.body {
        RequestBody::Handshake { protocol } => {
            if protocol != PROTOCOL_VERSION {
                return Response::error(id, codes::UNSUPPORTED_PROTOCOL, format!("unsupported protocol {protocol:?}"));
            }
            let (s, t) = (model.source_vocab(), model.target_vocab());
            Response {
                id,
                body: ResponseBody::Handshake {
                    protocol: PROTOCOL_VERSION.to_string(),
                    source_vocab: s.surfaces().to_vec(),
                    target_vocab: t.surfaces().to_vec(),
                    source_eos_id: s.eos().0,
                    target_eos_id: t.eos().0,
                    model_tag: model.identity_tag().to_string(),
                },
            }
        }
        RequestBody::NextTokenLogprobs { source, prefix } => {
            let source = Sentence::complete(to_ids(source));
            let prefix = Sentence::prefix(to_ids(prefix));
            match models::next_token_dist(model, &source, &prefix) {
                Ok(dist) => {
                    let logprobs = model.target_vocab().ids().map(|t| finite(dist.logweight(&t))).collect();
                    Response { id, body: ResponseBody::Logprobs { logprobs } }
                }
                Err(e) => fail(e),
            }
        }
        RequestBody::SequenceLogprob { source, sentence } => {
            let source = Sentence::complete(to_ids(source));
            let sentence = match Sentence::from_ids(&to_ids(sentence), model.target_vocab().eos()) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match models::sequence_logprob(model, &source, &sentence) {
                Ok(lp) => Response { id, body: ResponseBody::Logprob { logprob: finite(lp) } },
                Err(e) => fail(e),
            }
        }
        RequestBody::Batch { requests } => {
            if requests.iter().any(|r| matches!(r.body, RequestBody::Batch { .. } | RequestBody::Handshake { .. })) {
                return Response::error(id, codes::BAD_REQUEST, "batches hold only scoring requests");
            }
            let responses = requests.iter().map(|r| respond(model, r)).collect();
            Response { id, body: ResponseBody::Batch { responses } }
        }
    }
}

/// Serves requests line by line until the input ends.
pub fn serve<M, R, W>(model: &M, input: R, mut output: W) -> std::io::Result<()>
where
    M: ConditionalSequenceModel + ?Sized,
    R: BufRead,
    W: Write,
{
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match Request::from_line(&line) {
            Ok(req) => respond(model, &req),
            Err(e) => Response::error(None, codes::BAD_REQUEST, e.to_string()),
        };
        writeln!(output, "{}", response.to_line())?;
        output.flush()?;
    }
    Ok(())
}
