use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use pragma::adapter::{self, ScorerEndpoint, DEFAULT_TIMEOUT_MS};
use pragma::eval::{self, BleuConfig};
use pragma::models::{load_tabular, TabularModel};
use pragma::translate::{DistractorIndex, Mode, TranslationSystem, Translator};
use pragma::{fixtures, oracle, ConditionalSequenceModel, DecodeTrace, PragmaticsConfig, Sentence};

#[derive(Parser)]
#[command(name = "pragma", version, about = "Pragmatic decoding for sequence models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a corpus, one sentence per line.
    Translate(TranslateArgs),
    /// Score translations.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Find distinct sources that share a translation.
    Survey(SurveyArgs),
    /// Compare the approximate cyclic speaker with exact and global decoding.
    Oracle(OracleArgs),
    /// Answer scoring requests for a tabular model over stdio or TCP.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Corpus BLEU of a hypothesis file against a reference file.
    Bleu(BleuArgs),
    /// Round-trip BLEU through an independent back-translator.
    Cycle(CycleArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Rationality weight on the listener term.
    #[arg(long)]
    alpha: Option<f64>,
    /// Next-word candidates scored per step by the cyclic speaker.
    #[arg(long)]
    candidates: Option<usize>,
    /// Beam width used to propose candidates for the global speakers.
    #[arg(long)]
    beam: Option<usize>,
    /// Maximum output length, EOS included.
    #[arg(long = "max-len")]
    max_len: Option<usize>,
}

impl ConfigArgs {
    fn build(&self, default_max_len: Option<usize>) -> PragmaticsConfig {
        let mut cfg = PragmaticsConfig::default();
        if let Some(m) = default_max_len {
            cfg.max_len = m;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(k) = self.candidates {
            cfg.candidate_width_k = k;
        }
        if let Some(b) = self.beam {
            cfg.beam_width = b;
        }
        if let Some(m) = self.max_len {
            cfg.max_len = m;
        }
        cfg
    }
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Speaker: s0, s1-ip, s1-gp, s1-cgp or s1-cip.
    #[arg(long, default_value = "s0")]
    mode: String,
    /// Forward model: a tabular file, tcp://host:port, or stdio:<command>.
    #[arg(long)]
    fwd: String,
    /// Backward model for the cyclic speakers.
    #[arg(long)]
    bwd: Option<String>,
    /// Distractor file: a source and its distractors per line, tab-separated.
    #[arg(long)]
    distractors: Option<PathBuf>,
    /// Deadline for each remote scorer response.
    #[arg(long = "timeout-ms", default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Source sentences, one per line
    #[arg(long)]
    corpus: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-sentence decode traces as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Run manifest; defaults to `<out>.manifest.json`, else stderr.
    /// Run manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct BleuArgs {
    /// Hypotheses, one per line
    #[arg(long)]
    hyp: PathBuf,
    /// References, one per line, aligned with the hypotheses
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Longest n-gram counted
    #[arg(long = "max-order", default_value_t = 4)]
    max_order: usize,
    /// Compare tokens case-insensitively.
    #[arg(long)]
    lowercase: bool,
    /// Per-sentence diagnostic report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct CycleArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Independent back-translator, decoded greedily.
    #[arg(long)]
    back: String,
    /// Source sentences, one per line
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    lowercase: bool,
    /// Per-sentence report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    /// Forward model spec
    #[arg(long)]
    fwd: String,
    /// Backward model spec used to propose alternative sources
    #[arg(long)]
    bwd: String,
    /// Source sentences, one per line
    #[arg(long)]
    corpus: PathBuf,
    /// Back-translations kept per pivot.
    #[arg(long = "n-back", default_value_t = 4)]
    n_back: usize,
    /// Maximum decode length, EOS included
    #[arg(long = "max-len", default_value_t = 50)]
    max_len: usize,
    /// Deadline for each remote scorer response
    #[arg(long = "timeout-ms", default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
    /// Collision records; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Built-in fixture: ambig1, chain1, chain2 or injective.
    #[arg(long, conflicts_with_all = ["fwd", "bwd"])]
    fixture: Option<String>,
    /// Forward tabular file.
    #[arg(long, requires = "bwd")]
    fwd: Option<PathBuf>,
    /// Backward tabular file.
    #[arg(long, requires = "fwd")]
    bwd: Option<PathBuf>,
    /// Sources to decode; every source of the forward model when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    /// Tabular model file.
    #[arg(long)]
    model: PathBuf,
    /// Listen on this TCP address instead of stdio.
    #[arg(long)]
    listen: Option<String>,
}

/// Failure classes with stable exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<pragma::Error> for Failure {
    fn from(e: pragma::Error) -> Self {
        match e {
            pragma::Error::SameBackTranslator(tag) => Failure::Usage(format!(
                "SameBackTranslator: back-translator shares identity tag {tag:?} with the evaluated system"
            )),
            pragma::Error::InvalidConfig(m) => Failure::Usage(format!("invalid configuration: {m}")),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct ModelInfo {
    spec: String,
    identity_tag: String,
}

#[derive(Serialize)]
struct Timing {
    started_unix_ms: u128,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct Outcome {
    line: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Everything needed to reproduce a run. Only `timing` varies between
/// identical invocations.
#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<PragmaticsConfig>,
    models: BTreeMap<String, ModelInfo>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    summary: BTreeMap<String, Value>,
    outcomes: Vec<Outcome>,
    timing: Timing,
}

struct Run {
    manifest: RunManifest,
    started: Instant,
}

impl Run {
    fn start(command: &str) -> Self {
        let started_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        Run {
            manifest: RunManifest {
                tool: "pragma",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                args: std::env::args().skip(1).collect(),
                config: None,
                models: BTreeMap::new(),
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                summary: BTreeMap::new(),
                outcomes: Vec::new(),
                timing: Timing { started_unix_ms, elapsed_ms: 0 },
            },
            started: Instant::now(),
        }
    }

    fn model(&mut self, role: &str, spec: &str, model: &dyn ConditionalSequenceModel) {
        let info = ModelInfo { spec: spec.to_string(), identity_tag: model.identity_tag().to_string() };
        self.manifest.models.insert(role.to_string(), info);
    }

    fn input(&mut self, role: &str, path: &Path) {
        self.manifest.inputs.insert(role.to_string(), path.display().to_string());
    }

    fn output(&mut self, role: &str, path: &Path) {
        self.manifest.outputs.insert(role.to_string(), path.display().to_string());
    }

    fn finish(mut self, path: Option<&Path>, fallback: Option<&Path>) -> CliResult<()> {
        self.manifest.timing.elapsed_ms = self.started.elapsed().as_millis();
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        let target = path.map(Path::to_path_buf).or_else(|| fallback.map(manifest_beside));
        match target {
            Some(p) => fs::write(&p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
            None => io::stderr().write_all(text.as_bytes()).map_err(Failure::from),
        }
    }
}

fn manifest_beside(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(Failure::from),
    }
}

fn load_model(spec: &str, timeout_ms: u64) -> CliResult<Box<dyn ConditionalSequenceModel>> {
    if spec.starts_with("tcp://") || spec.starts_with("stdio:") {
        let endpoint = ScorerEndpoint::parse(spec)?.with_timeout_ms(timeout_ms);
        Ok(Box::new(adapter::connect(&endpoint)?))
    } else {
        let model = load_tabular(spec).map_err(|e| Failure::Runtime(format!("{spec}: {e}")))?;
        Ok(Box::new(model))
    }
}

/// Reads one sentence per line, keeping blank lines so outputs stay aligned.
fn read_lines(path: &Path) -> CliResult<Vec<String>> {
    Ok(read_file(path)?.lines().map(str::to_string).collect())
}

struct System {
    mode: Mode,
    fwd: Box<dyn ConditionalSequenceModel>,
    bwd: Option<Box<dyn ConditionalSequenceModel>>,
    distractors: Option<DistractorIndex>,
    config: PragmaticsConfig,
}

impl System {
    fn load(args: &SystemArgs, run: &mut Run) -> CliResult<Self> {
        let mode: Mode = args.mode.parse().map_err(|e: pragma::Error| Failure::Usage(e.to_string()))?;
        let config = args.config.build(None);
        config.validate()?;
        if mode.needs_distractors() && args.distractors.is_none() {
            return Err(Failure::Usage(format!("MissingDistractors: mode {mode} needs --distractors")));
        }
        if mode.needs_backward() && args.bwd.is_none() {
            return Err(Failure::Usage(format!("MissingBackwardModel: mode {mode} needs --bwd")));
        }
        let fwd = load_model(&args.fwd, args.timeout_ms)?;
        run.model("fwd", &args.fwd, fwd.as_ref());
        let bwd = match (&args.bwd, mode.needs_backward()) {
            (Some(spec), true) => {
                let m = load_model(spec, args.timeout_ms)?;
                run.model("bwd", spec, m.as_ref());
                Some(m)
            }
            _ => None,
        };
        let distractors = match (&args.distractors, mode.needs_distractors()) {
            (Some(path), true) => {
                run.input("distractors", path);
                let index = DistractorIndex::parse(&read_file(path)?, fwd.source_vocab())
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                Some(index)
            }
            _ => None,
        };
        run.manifest.config = Some(config.clone());
        run.manifest.summary.insert("mode".into(), json!(mode.as_str()));
        Ok(Self { mode, fwd, bwd, distractors, config })
    }

    fn translator(&self) -> CliResult<Translator<'_>> {
        Ok(Translator::new(
            self.mode,
            self.fwd.as_ref(),
            self.bwd.as_deref(),
            self.distractors.as_ref(),
            self.config.clone(),
        )?)
    }
}

#[derive(Serialize)]
struct TraceLine<'a> {
    line: usize,
    source: &'a str,
    output: &'a str,
    trace: &'a DecodeTrace,
}

fn translate(args: TranslateArgs) -> CliResult<()> {
    let mut run = Run::start("translate");
    let system = System::load(&args.system, &mut run)?;
    let translator = system.translator()?;
    run.input("corpus", &args.corpus);
    let lines = read_lines(&args.corpus)?;
    let (sv, tv) = (system.fwd.source_vocab(), system.fwd.target_vocab());

    let results: Vec<pragma::Result<(Sentence, DecodeTrace)>> = lines
        .par_iter()
        .map(|line| {
            let source = sv.parse_sentence(line)?;
            translator.translate_traced(&source)
        })
        .collect();

    let mut outputs = String::new();
    let mut traces = String::new();
    let mut failures = Vec::new();
    for (i, (line, result)) in lines.iter().zip(results).enumerate() {
        match result.and_then(|(s, trace)| Ok((tv.render(&s)?, trace))) {
            Ok((text, trace)) => {
                outputs.push_str(&text);
                outputs.push('\n');
                let record = TraceLine { line: i + 1, source: line, output: &text, trace: &trace };
                traces.push_str(&serde_json::to_string(&record).expect("trace serializes"));
                traces.push('\n');
                run.manifest.outcomes.push(Outcome { line: i + 1, status: "ok", output: Some(text), error: None });
            }
            Err(e) => {
                failures.push(format!("line {}: {e}", i + 1));
                run.manifest.outcomes.push(Outcome {
                    line: i + 1,
                    status: "error",
                    output: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    run.manifest.summary.insert("sentences".into(), json!(lines.len()));
    run.manifest.summary.insert("failures".into(), json!(failures.len()));

    if failures.is_empty() {
        write_or_print(args.out.as_deref(), &outputs)?;
        if let Some(p) = &args.out {
            run.output("translations", p);
        }
        if let Some(p) = &args.trace {
            fs::write(p, &traces).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
            run.output("trace", p);
        }
    }
    run.finish(args.manifest.as_deref(), args.out.as_deref())?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(failures.join("\n")))
    }
}

fn bleu(args: BleuArgs) -> CliResult<()> {
    let mut run = Run::start("eval bleu");
    run.input("hypotheses", &args.hyp);
    run.input("references", &args.reference);
    let hyps = read_lines(&args.hyp)?;
    let refs = read_lines(&args.reference)?;
    let config = BleuConfig { max_order: args.max_order, case_sensitive: !args.lowercase, ..BleuConfig::default() };
    let score = eval::bleu_corpus_lines(&hyps, &refs, &config)?;
    run.manifest.summary.insert("bleu".into(), json!(format!("{score:.2}")));
    if let Some(path) = &args.report {
        let mut text = format!("bleu={score:.2}\n");
        for (i, (h, r)) in hyps.iter().zip(&refs).enumerate() {
            let s = eval::sentence_bleu_diagnostic(&config.tokenize(h), &config.tokenize(r), &config);
            text.push_str(&format!("line={}\tsentence_bleu={s:.2}\tnote=diagnostic-only\n", i + 1));
        }
        fs::write(path, text)?;
        run.output("report", path);
    }
    println!("bleu={score:.2}");
    run.finish(args.manifest.as_deref(), args.report.as_deref())
}

struct Greedy {
    model: Box<dyn ConditionalSequenceModel>,
    max_len: usize,
}

impl TranslationSystem for Greedy {
    fn translate(&self, source: &Sentence) -> pragma::Result<Sentence> {
        Translator::greedy(self.model.as_ref(), self.max_len).translate(source)
    }

    fn model_tags(&self) -> Vec<String> {
        vec![self.model.identity_tag().to_string()]
    }

    fn source_vocab(&self) -> &pragma::Vocabulary {
        self.model.source_vocab()
    }

    fn target_vocab(&self) -> &pragma::Vocabulary {
        self.model.target_vocab()
    }
}

fn cycle(args: CycleArgs) -> CliResult<()> {
    let mut run = Run::start("eval cycle");
    let system = System::load(&args.system, &mut run)?;
    let translator = system.translator()?;
    let back = load_model(&args.back, args.system.timeout_ms)?;
    run.model("back", &args.back, back.as_ref());
    let back = Greedy { model: back, max_len: system.config.max_len };
    let config = BleuConfig { case_sensitive: !args.lowercase, ..BleuConfig::default() };

    run.input("corpus", &args.corpus);
    let corpus = eval::parse_corpus(&read_file(&args.corpus)?, system.fwd.source_vocab())
        .map_err(|e| Failure::Runtime(format!("{}: {e}", args.corpus.display())))?;
    let report = eval::cycle_consistency(&translator, &back, &corpus, &config)?;
    for r in &report.records {
        run.manifest.outcomes.push(Outcome {
            line: r.index + 1,
            status: "ok",
            output: Some(r.back_translation.clone()),
            error: None,
        });
    }
    run.manifest.summary.insert("cycle_bleu".into(), json!(format!("{:.2}", report.score)));
    run.manifest.summary.insert("flagged".into(), json!(report.flagged().len()));
    if let Some(path) = &args.report {
        fs::write(path, report.to_text())?;
        run.output("report", path);
    }
    println!("cycle_bleu={:.2}", report.score);
    run.finish(args.manifest.as_deref(), args.report.as_deref())
}

fn survey(args: SurveyArgs) -> CliResult<()> {
    let mut run = Run::start("survey");
    let fwd = load_model(&args.fwd, args.timeout_ms)?;
    let bwd = load_model(&args.bwd, args.timeout_ms)?;
    run.model("fwd", &args.fwd, fwd.as_ref());
    run.model("bwd", &args.bwd, bwd.as_ref());
    run.input("corpus", &args.corpus);
    let corpus = eval::parse_corpus(&read_file(&args.corpus)?, fwd.source_vocab())
        .map_err(|e| Failure::Runtime(format!("{}: {e}", args.corpus.display())))?;
    if args.max_len == 0 {
        return Err(Failure::Usage("max length must be at least 1".into()));
    }
    let pairs = eval::survey_many_to_one(fwd.as_ref(), bwd.as_ref(), &corpus, args.n_back, args.max_len)?;
    let mut text = String::new();
    for p in &pairs {
        text.push_str(&p.render(fwd.source_vocab(), fwd.target_vocab())?);
        text.push('\n');
    }
    let summary = match pairs.len() {
        1 => "1 collision".to_string(),
        n => format!("{n} collisions"),
    };
    text.push_str(&summary);
    text.push('\n');
    run.manifest.summary.insert("collisions".into(), json!(pairs.len()));
    run.manifest.summary.insert("n_back".into(), json!(args.n_back));
    run.manifest.summary.insert("max_len".into(), json!(args.max_len));
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(p) = &args.out {
        run.output("collisions", p);
    }
    run.finish(args.manifest.as_deref(), args.out.as_deref())
}

fn oracle_cmd(args: OracleArgs) -> CliResult<()> {
    let mut run = Run::start("oracle");
    let (fwd, bwd): (TabularModel, TabularModel) = match (&args.fixture, &args.fwd, &args.bwd) {
        (Some(name), _, _) => fixtures::pair(name).ok_or_else(|| {
            Failure::Usage(format!("unknown fixture {name:?}; expected one of {}", fixtures::PAIR_NAMES.join(", ")))
        })?,
        (None, Some(f), Some(b)) => {
            let load = |p: &PathBuf| load_tabular(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())));
            (load(f)?, load(b)?)
        }
        _ => return Err(Failure::Usage("oracle needs --fixture or both --fwd and --bwd".into())),
    };
    let fwd_spec = args
        .fixture
        .as_ref()
        .map_or_else(|| args.fwd.as_ref().unwrap().display().to_string(), |n| format!("fixture:{n}"));
    let bwd_spec = args
        .fixture
        .as_ref()
        .map_or_else(|| args.bwd.as_ref().unwrap().display().to_string(), |n| format!("fixture:{n}"));
    run.model("fwd", &fwd_spec, &fwd);
    run.model("bwd", &bwd_spec, &bwd);
    let config = args.config.build(Some(4));
    config.validate()?;
    run.manifest.config = Some(config.clone());
    let sources = match &args.corpus {
        Some(path) => {
            run.input("corpus", path);
            eval::parse_corpus(&read_file(path)?, fwd.source_vocab())
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?
        }
        None => fwd.sources(),
    };
    let report = oracle::compare(&fwd, &bwd, &sources, &config)?;
    let text = report.to_text(fwd.source_vocab(), fwd.target_vocab())?;
    run.manifest.summary.insert("step_disagreements".into(), json!(report.step_disagreements()));
    run.manifest.summary.insert("exact_disagreements".into(), json!(report.exact_disagreements()));
    run.manifest.summary.insert("global_disagreements".into(), json!(report.global_disagreements()));
    run.manifest.summary.insert("greedy_disagreements".into(), json!(report.greedy_disagreements()));
    run.manifest.summary.insert("full_agreement".into(), json!(report.full_agreement()));
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(p) = &args.out {
        run.output("report", p);
    }
    run.finish(args.manifest.as_deref(), args.out.as_deref())
}

fn serve(args: ServeArgs) -> CliResult<()> {
    let model = load_tabular(&args.model).map_err(|e| Failure::Runtime(format!("{}: {e}", args.model.display())))?;
    match &args.listen {
        None => adapter::serve(&model, io::stdin().lock(), io::stdout().lock())?,
        Some(addr) => {
            let listener = TcpListener::bind(addr)?;
            eprintln!("listening on {}", listener.local_addr()?);
            for stream in listener.incoming() {
                let stream = stream?;
                let reader = BufReader::new(stream.try_clone()?);
                if let Err(e) = adapter::serve(&model, reader, stream) {
                    eprintln!("connection closed: {e}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Translate(a) => translate(a),
        Command::Eval(EvalCommand::Bleu(a)) => bleu(a),
        Command::Eval(EvalCommand::Cycle(a)) => cycle(a),
        Command::Survey(a) => survey(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
