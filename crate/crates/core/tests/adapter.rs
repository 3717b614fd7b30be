use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use pragma::adapter::protocol::{Request, RequestBody, Response, ResponseBody};
use pragma::adapter::{self, batch_score, connect, RemoteModel, ScoreRequest, ScoreResponse, ScorerEndpoint};
use pragma::models::{self, TabularModel};
use pragma::rsa::decode_s1_cip;
use pragma::{fixtures, ConditionalSequenceModel, Error, PragmaticsConfig, Sentence};

/// Serves every connection with `handler`; `None` means stay silent.
fn spawn_server<H>(handler: H) -> String
where
    H: Fn(&Request) -> Option<Response> + Send + Sync + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let handler = Arc::new(handler);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { break };
            let handler = Arc::clone(&handler);
            thread::spawn(move || {
                stream.set_nodelay(true).unwrap();
                let mut out = stream.try_clone().unwrap();
                for line in BufReader::new(stream).lines() {
                    let Ok(line) = line else { break };
                    let req = Request::from_line(&line).unwrap();
                    if let Some(resp) = handler(&req) {
                        if writeln!(out, "{}", resp.to_line()).is_err() {
                            break;
                        }
                    }
                }
            });
        }
    });
    addr
}

fn serve_model(model: TabularModel) -> String {
    spawn_server(move |req| Some(adapter::respond(&model, req)))
}

fn remote(model: TabularModel) -> RemoteModel {
    connect(&ScorerEndpoint::tcp(serve_model(model))).unwrap()
}

fn all_prefixes(model: &TabularModel) -> Vec<(Sentence, Sentence)> {
    model
        .sources()
        .into_iter()
        .flat_map(|src| {
            let eos = model.target_vocab().eos();
            models::enumerate_sentences(model, &src, 4)
                .unwrap()
                .into_iter()
                .flat_map(move |(s, _)| {
                    let src = src.clone();
                    let ids = s.ids_with_eos(eos);
                    (0..ids.len()).map(move |t| (src.clone(), s.truncated(t)))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn handshake_reports_vocabularies_and_tag() {
    let local = fixtures::ambig1_forward();
    let model = remote(local.clone());
    assert_eq!(model.source_vocab(), local.source_vocab());
    assert_eq!(model.target_vocab(), local.target_vocab());
    assert_eq!(model.identity_tag(), local.identity_tag());

    let addr = serve_model(local);
    let tagged = connect(&ScorerEndpoint::tcp(addr).with_identity_tag("mine")).unwrap();
    assert_eq!(tagged.identity_tag(), "mine");
}

#[test]
fn remote_matches_local() {
    for name in fixtures::PAIR_NAMES {
        let (fwd, bwd) = fixtures::pair(name).unwrap();
        for local in [fwd, bwd] {
            let model = remote(local.clone());
            for (src, prefix) in all_prefixes(&local) {
                let want = models::next_token_dist(&local, &src, &prefix).unwrap();
                let got = models::next_token_dist(&model, &src, &prefix).unwrap();
                for t in local.target_vocab().ids() {
                    let (w, g) = (want.logweight(&t), got.logweight(&t));
                    assert!(w == g || (w - g).abs() <= 1e-6, "{name} {t:?}: {w} vs {g}");
                }
            }
        }
    }
}

#[test]
fn remote_sequence_logprob_matches_local() {
    let local = fixtures::chain1_forward();
    let model = remote(local.clone());
    for src in local.sources() {
        for (s, lp) in models::enumerate_sentences(&local, &src, 4).unwrap() {
            let got = models::sequence_logprob(&model, &src, &s).unwrap();
            assert!((got - lp).abs() <= 1e-6);
        }
    }
}

#[test]
fn cyclic_decode_matches_local() {
    let (fwd, bwd) = (fixtures::chain1_forward(), fixtures::chain1_backward());
    let (rf, rb) = (remote(fwd.clone()), remote(bwd.clone()));
    let cfg = PragmaticsConfig::default().with_alpha(1.0).with_max_len(4);
    for src in fwd.sources() {
        let (want, want_trace) = decode_s1_cip(&fwd, &bwd, &src, &cfg).unwrap();
        let (got, got_trace) = decode_s1_cip(&rf, &rb, &src, &cfg).unwrap();
        assert_eq!(got, want);
        assert_eq!(got_trace.steps.len(), want_trace.steps.len());
        for (g, w) in got_trace.steps.iter().zip(&want_trace.steps) {
            assert_eq!(g.chosen, w.chosen);
            assert_eq!(g.candidates.len(), w.candidates.len());
            for (gc, wc) in g.candidates.iter().zip(&w.candidates) {
                assert_eq!(gc.token, wc.token);
                assert_eq!(gc.rollout, wc.rollout);
                for (a, b) in [
                    (gc.base_logprob, wc.base_logprob),
                    (gc.listener_logscore, wc.listener_logscore),
                    (gc.combined, wc.combined),
                ] {
                    assert!(a == b || (a - b).abs() <= 1e-6, "{a} vs {b}");
                }
            }
        }
    }
}

fn logprobs_server(values: Vec<Option<f64>>) -> String {
    let model = fixtures::ambig1_forward();
    spawn_server(move |req| match req.body {
        RequestBody::NextTokenLogprobs { .. } => {
            Some(Response { id: Some(req.id), body: ResponseBody::Logprobs { logprobs: values.clone() } })
        }
        _ => Some(adapter::respond(&model, req)),
    })
}

fn first_step(model: &RemoteModel) -> pragma::Result<pragma::LogDistribution> {
    let src = model.source_vocab().parse_sentence("A").unwrap();
    models::next_token_dist(model, &src, &Sentence::empty_prefix())
}

#[test]
fn small_drift_is_renormalized() {
    let ln = |p: f64| Some(p.ln());
    let addr = logprobs_server(vec![ln(0.6 + 4e-7), ln(0.39), ln(0.01), None]);
    let model = connect(&ScorerEndpoint::tcp(addr)).unwrap();
    let dist = first_step(&model).unwrap();
    assert!(dist.is_normalized(1e-12));
    assert_eq!(dist.logweight(&pragma::TokenId(3)), f64::NEG_INFINITY);
}

#[test]
fn unnormalized_distribution_is_rejected() {
    let ln = |p: f64| Some(p.ln());
    let addr = logprobs_server(vec![ln(0.7), ln(0.39), ln(0.01), None]);
    let model = connect(&ScorerEndpoint::tcp(addr)).unwrap();
    assert!(matches!(first_step(&model), Err(Error::Normalization { .. })));
}

#[test]
fn wrong_length_is_a_protocol_error() {
    let addr = logprobs_server(vec![Some(0.0)]);
    let model = connect(&ScorerEndpoint::tcp(addr)).unwrap();
    assert!(matches!(first_step(&model), Err(Error::Protocol(_))));
}

#[test]
fn silent_scorer_times_out() {
    let model = fixtures::ambig1_forward();
    let addr = spawn_server(move |req| match req.body {
        RequestBody::Handshake { .. } => Some(adapter::respond(&model, req)),
        _ => None,
    });
    let remote = connect(&ScorerEndpoint::tcp(addr).with_timeout_ms(200)).unwrap();
    let start = Instant::now();
    assert!(matches!(first_step(&remote), Err(Error::Timeout(200))));
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn late_responses_are_skipped() {
    let model = fixtures::ambig1_forward();
    let addr = spawn_server(move |req| {
        if req.id == 2 {
            thread::sleep(Duration::from_millis(400));
        }
        Some(adapter::respond(&model, req))
    });
    let remote = connect(&ScorerEndpoint::tcp(addr).with_timeout_ms(150)).unwrap();
    assert!(matches!(first_step(&remote), Err(Error::Timeout(_))));
    thread::sleep(Duration::from_millis(400));
    let dist = first_step(&remote).unwrap();
    assert!((dist.prob(&pragma::TokenId(0)) - 0.6).abs() < 1e-12);
}

#[test]
fn handshake_failures() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let dead = listener.local_addr().unwrap().to_string();
    drop(listener);
    assert!(matches!(connect(&ScorerEndpoint::tcp(dead)), Err(Error::HandshakeFailed(_))));

    let addr = spawn_server(|req| {
        Some(Response {
            id: Some(req.id),
            body: ResponseBody::Handshake {
                protocol: "pragma-score v0".into(),
                source_vocab: vec!["a".into(), "</s>".into()],
                target_vocab: vec!["b".into(), "</s>".into()],
                source_eos_id: 1,
                target_eos_id: 1,
                model_tag: "t".into(),
            },
        })
    });
    assert!(matches!(connect(&ScorerEndpoint::tcp(addr)), Err(Error::HandshakeFailed(_))));

    let addr = spawn_server(|req| Some(Response::error(Some(req.id), "unsupported-protocol", "no")));
    assert!(matches!(connect(&ScorerEndpoint::tcp(addr)), Err(Error::HandshakeFailed(_))));
}

#[test]
fn remote_errors_surface() {
    let model = remote(fixtures::chain1_forward());
    let src = Sentence::complete(vec![pragma::TokenId(0)]);
    // [c, a] never appears in the tables.
    let prefix = Sentence::prefix(vec![pragma::TokenId(2), pragma::TokenId(0)]);
    assert!(matches!(
        models::next_token_dist(&model, &src, &prefix),
        Err(Error::Remote { ref code, .. }) if code == "missing-entry"
    ));
}

#[test]
fn batch_matches_single_calls() {
    let local = fixtures::chain1_forward();
    let model = remote(local.clone());
    let mut reqs = Vec::new();
    for (src, prefix) in all_prefixes(&local) {
        reqs.push(ScoreRequest::NextToken { source: src.clone(), prefix: prefix.clone() });
    }
    for src in local.sources() {
        for (s, _) in models::enumerate_sentences(&local, &src, 4).unwrap() {
            reqs.push(ScoreRequest::Sequence { source: src.clone(), sentence: s });
        }
    }
    let results = batch_score(&model, &reqs).unwrap();
    assert_eq!(results.len(), reqs.len());
    for (req, res) in reqs.iter().zip(results) {
        match (req, res.unwrap()) {
            (ScoreRequest::NextToken { source, prefix }, ScoreResponse::NextToken(d)) => {
                let want = models::next_token_dist(&local, source, prefix).unwrap();
                for t in local.target_vocab().ids() {
                    let (w, g) = (want.logweight(&t), d.logweight(&t));
                    assert!(w == g || (w - g).abs() <= 1e-6);
                }
            }
            (ScoreRequest::Sequence { source, sentence }, ScoreResponse::Sequence(lp)) => {
                let want = models::sequence_logprob(&local, source, sentence).unwrap();
                assert!((lp - want).abs() <= 1e-6);
            }
            other => panic!("mismatched response {other:?}"),
        }
    }
}

#[test]
fn three_sequence_scores_on_ambig() {
    let local = fixtures::ambig1_forward();
    let model = remote(local.clone());
    let (sv, tv) = (local.source_vocab(), local.target_vocab());
    let reqs: Vec<ScoreRequest> = [("A", "x"), ("B", "u"), ("B", "y")]
        .iter()
        .map(|(s, t)| ScoreRequest::Sequence {
            source: sv.parse_sentence(s).unwrap(),
            sentence: tv.parse_sentence(t).unwrap(),
        })
        .collect();
    let batched = batch_score(&model, &reqs).unwrap();
    for (req, (res, p)) in reqs.iter().zip(batched.into_iter().zip([0.39f64, 0.60, 0.39])) {
        let ScoreRequest::Sequence { source, sentence } = req else { unreachable!() };
        let single = models::sequence_logprob(&model, source, sentence).unwrap();
        let Ok(ScoreResponse::Sequence(lp)) = res else { panic!("{res:?}") };
        assert_eq!(lp, single);
        assert!((lp - p.ln()).abs() < 1e-12);
    }
}

#[test]
fn empty_batch() {
    let model = remote(fixtures::ambig1_forward());
    assert!(batch_score(&model, &[]).unwrap().is_empty());
}

#[test]
fn malformed_batch_items_fail_alone() {
    let local = fixtures::ambig1_forward();
    let model = remote(local.clone());
    let a = local.source_vocab().parse_sentence("A").unwrap();
    let reqs = vec![
        ScoreRequest::NextToken { source: a.clone(), prefix: Sentence::empty_prefix() },
        ScoreRequest::NextToken {
            source: Sentence::complete(vec![pragma::TokenId(42)]),
            prefix: Sentence::empty_prefix(),
        },
        ScoreRequest::NextToken { source: a.clone(), prefix: Sentence::complete(vec![pragma::TokenId(0)]) },
        ScoreRequest::Sequence { source: a.clone(), sentence: local.target_vocab().parse_sentence("x").unwrap() },
    ];
    let results = batch_score(&model, &reqs).unwrap();
    assert!(matches!(results[0], Ok(ScoreResponse::NextToken(_))));
    assert!(matches!(results[1], Err(Error::UnknownToken { id: 42, .. })));
    assert!(matches!(results[2], Err(Error::InvalidSentence(_))));
    match &results[3] {
        Ok(ScoreResponse::Sequence(lp)) => assert!((lp - 0.39f64.ln()).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn remote_item_errors_stay_per_item() {
    let local = fixtures::chain1_forward();
    let model = remote(local.clone());
    let src = Sentence::complete(vec![pragma::TokenId(0)]);
    let reqs = vec![
        ScoreRequest::NextToken {
            source: src.clone(),
            prefix: Sentence::prefix(vec![pragma::TokenId(2), pragma::TokenId(0)]),
        },
        ScoreRequest::NextToken { source: src, prefix: Sentence::empty_prefix() },
    ];
    let results = batch_score(&model, &reqs).unwrap();
    assert!(matches!(results[0], Err(Error::Remote { .. })));
    assert!(results[1].is_ok());
}

#[test]
fn golden_transcript_replays() {
    let text = include_str!("data/ambig1.transcript");
    let (mut requests, mut expected) = (String::new(), Vec::new());
    for line in text.lines() {
        if let Some(req) = line.strip_prefix("> ") {
            requests.push_str(req);
            requests.push('\n');
        } else if let Some(resp) = line.strip_prefix("< ") {
            expected.push(resp);
        }
    }
    let mut out = Vec::new();
    adapter::serve(&fixtures::ambig1_forward(), requests.as_bytes(), &mut out).unwrap();
    let got = String::from_utf8(out).unwrap();
    assert_eq!(got.lines().collect::<Vec<_>>(), expected);

    let ResponseBody::Logprobs { logprobs } = Response::from_line(expected[1]).unwrap().body else { panic!() };
    let want = [Some(0.60f64.ln()), Some(0.39f64.ln()), Some(0.01f64.ln()), None];
    for (g, w) in logprobs.iter().zip(want) {
        match (g, w) {
            (Some(g), Some(w)) => assert!((g - w).abs() < 1e-12),
            (None, None) => {}
            other => panic!("{other:?}"),
        }
    }
    let ResponseBody::Logprob { logprob: Some(lp) } = Response::from_line(expected[4]).unwrap().body else { panic!() };
    assert!((lp - 0.39f64.ln()).abs() < 1e-12);
}

#[test]
fn served_sequence_scores_follow_the_chain_rule() {
    for name in fixtures::PAIR_NAMES {
        let (fwd, _) = fixtures::pair(name).unwrap();
        for src in fwd.sources() {
            for (s, _) in models::enumerate_sentences(&fwd, &src, 4).unwrap() {
                let ids = |x: &Sentence| x.tokens().iter().map(|t| t.0).collect::<Vec<_>>();
                let eos = fwd.target_vocab().eos();
                let full = s.ids_with_eos(eos);
                let mut total = 0.0;
                for t in 0..full.len() {
                    let req = Request {
                        id: 1,
                        body: RequestBody::NextTokenLogprobs {
                            source: ids(&src),
                            prefix: full[..t].iter().map(|x| x.0).collect(),
                        },
                    };
                    let ResponseBody::Logprobs { logprobs } = adapter::respond(&fwd, &req).body else { panic!() };
                    total += logprobs[full[t].0 as usize].unwrap();
                }
                let req = Request {
                    id: 2,
                    body: RequestBody::SequenceLogprob {
                        source: ids(&src),
                        sentence: full.iter().map(|x| x.0).collect(),
                    },
                };
                let ResponseBody::Logprob { logprob: Some(lp) } = adapter::respond(&fwd, &req).body else { panic!() };
                assert!((lp - total).abs() < 1e-12, "{name}");
            }
        }
    }
}
