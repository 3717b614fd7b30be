//! C ABI over the pragma decoding library.
//!
//! Every function returns a [`PragmaStatus`]. On failure, a description is
//! available from [`pragma_last_error_message`] on the same thread. Strings
//! returned through out-parameters are owned by the caller and must be
//! released with [`pragma_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pragma::adapter::{self, ScorerEndpoint};
use pragma::eval::{self, BleuConfig};
use pragma::models::{load_tabular, parse_tabular};
use pragma::rsa::DistractorSet;
use pragma::translate::{DistractorIndex, Mode, Translator};
use pragma::{ConditionalSequenceModel, Error, PragmaticsConfig};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PragmaStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A file or text could not be parsed.
    Parse = 3,
    Io = 4,
    /// A configuration value or mode combination is not allowed.
    InvalidConfig = 5,
    /// A sentence or corpus does not fit the model or call.
    InvalidInput = 6,
    /// The model cannot answer, for example a missing table entry.
    Model = 7,
    /// A remote scorer failed or misbehaved.
    Remote = 8,
    /// A bug inside the library; the call had no effect.
    Internal = 99,
}

/// Speaker used by [`pragma_translate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PragmaMode {
    S0 = 0,
    S1Ip = 1,
    S1Gp = 2,
    S1Cgp = 3,
    S1Cip = 4,
}

impl From<PragmaMode> for Mode {
    fn from(m: PragmaMode) -> Self {
        match m {
            PragmaMode::S0 => Mode::S0,
            PragmaMode::S1Ip => Mode::S1Ip,
            PragmaMode::S1Gp => Mode::S1Gp,
            PragmaMode::S1Cgp => Mode::S1Cgp,
            PragmaMode::S1Cip => Mode::S1Cip,
        }
    }
}

/// Decoding knobs; start from [`pragma_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PragmaConfig {
    pub alpha: f64,
    pub candidate_width_k: usize,
    pub beam_width: usize,
    pub max_len: usize,
}

impl From<&PragmaConfig> for PragmaticsConfig {
    fn from(c: &PragmaConfig) -> Self {
        PragmaticsConfig::default()
            .with_alpha(c.alpha)
            .with_candidates(c.candidate_width_k)
            .with_beam(c.beam_width)
            .with_max_len(c.max_len)
    }
}

/// Opaque handle to a loaded or connected model.
pub struct PragmaModel {
    inner: Box<dyn ConditionalSequenceModel>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PragmaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => PragmaStatus::Parse,
            Error::Io(_) => PragmaStatus::Io,
            Error::InvalidConfig(_) | Error::SameBackTranslator(_) => PragmaStatus::InvalidConfig,
            Error::UnknownToken { .. }
            | Error::UnknownSurface(_)
            | Error::InvalidSentence(_)
            | Error::EmptySource
            | Error::NotInDistractors
            | Error::LengthMismatch { .. }
            | Error::EmptyCorpus => PragmaStatus::InvalidInput,
            Error::AllZeroSupport
            | Error::MissingEntry { .. }
            | Error::EnumerationTooLarge { .. }
            | Error::Normalization { .. }
            | Error::IncompatibleModels(_) => PragmaStatus::Model,
            Error::HandshakeFailed(_) | Error::Timeout(_) | Error::Protocol(_) | Error::Remote { .. } => {
                PragmaStatus::Remote
            }
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `body`, records any failure, and converts panics to `Internal`.
fn guard<F: FnOnce() -> FfiResult<()>>(body: F) -> PragmaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PragmaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PragmaStatus::Internal
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(Failure(PragmaStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|_| Failure(PragmaStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// # Safety
/// `p` must be null or point to `n` valid NUL-terminated strings.
unsafe fn str_array<'a>(p: *const *const c_char, n: usize, name: &str) -> FfiResult<Vec<&'a str>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    non_null(p, name)?;
    (0..n).map(|i| str_arg(*p.add(i), name)).collect()
}

fn owned_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s).map(CString::into_raw).map_err(|_| Failure(PragmaStatus::Internal, "string contains NUL".into()))
}

/// # Safety
/// `out` must be valid for a pointer write.
unsafe fn emit_model(out: *mut *mut PragmaModel, inner: Box<dyn ConditionalSequenceModel>) -> FfiResult<()> {
    *out = Box::into_raw(Box::new(PragmaModel { inner }));
    Ok(())
}

/// Loads a tabular model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_model_load(path: *const c_char, out: *mut *mut PragmaModel) -> PragmaStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = str_arg(path, "path")?;
        emit_model(out, Box::new(load_tabular(path)?))
    })
}

/// Parses a tabular model from text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_model_parse(text: *const c_char, out: *mut *mut PragmaModel) -> PragmaStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = str_arg(text, "text")?;
        emit_model(out, Box::new(parse_tabular(text)?))
    })
}

/// Connects to a scorer at `tcp://host:port` or `stdio:<command>`.
///
/// # Safety
/// `endpoint` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_model_connect(
    endpoint: *const c_char,
    timeout_ms: u64,
    out: *mut *mut PragmaModel,
) -> PragmaStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = str_arg(endpoint, "endpoint")?;
        let endpoint = ScorerEndpoint::parse(spec)?.with_timeout_ms(timeout_ms);
        emit_model(out, Box::new(adapter::connect(&endpoint)?))
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pragma_model_free(model: *mut PragmaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copies the model's identity tag into `out`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_model_identity_tag(model: *const PragmaModel, out: *mut *mut c_char) -> PragmaStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        *out = owned_string((*model).inner.identity_tag().to_string())?;
        Ok(())
    })
}

/// Default decoding configuration.
#[no_mangle]
pub extern "C" fn pragma_config_default() -> PragmaConfig {
    let d = PragmaticsConfig::default();
    PragmaConfig {
        alpha: d.alpha,
        candidate_width_k: d.candidate_width_k,
        beam_width: d.beam_width,
        max_len: d.max_len,
    }
}

/// # Safety
/// Pointers as documented on the public entry points.
#[allow(clippy::too_many_arguments)]
unsafe fn translate_impl(
    mode: PragmaMode,
    fwd: *const PragmaModel,
    bwd: *const PragmaModel,
    config: *const PragmaConfig,
    source: *const c_char,
    distractors: Option<(*const *const c_char, usize)>,
    out: *mut *mut c_char,
) -> FfiResult<()> {
    non_null(fwd, "fwd")?;
    non_null(config, "config")?;
    non_null(out, "out")?;
    let mode = Mode::from(mode);
    let fwd = (*fwd).inner.as_ref();
    let bwd = if bwd.is_null() { None } else { Some((*bwd).inner.as_ref()) };
    let config = PragmaticsConfig::from(&*config);
    let sv = fwd.source_vocab();
    let source = sv.parse_sentence(str_arg(source, "source")?)?;

    if mode.needs_backward() && bwd.is_none() {
        return Err(Failure(PragmaStatus::InvalidConfig, format!("mode {mode} needs a backward model")));
    }
    let index = match distractors {
        Some((list, n)) => {
            let sentences = str_array(list, n, "distractors")?
                .into_iter()
                .map(|s| sv.parse_sentence(s))
                .collect::<pragma::Result<Vec<_>>>()?;
            let set = DistractorSet::new(sentences)?;
            set.index_of(&source)?;
            let mut ordered = vec![source.clone()];
            ordered.extend(set.sentences().iter().filter(|s| **s != source).cloned());
            let mut index = DistractorIndex::default();
            index.insert(DistractorSet::new(ordered)?);
            Some(index)
        }
        None if mode.needs_distractors() => {
            return Err(Failure(PragmaStatus::InvalidConfig, format!("mode {mode} needs distractors")));
        }
        None => None,
    };
    let translator = Translator::new(mode, fwd, bwd, index.as_ref(), config)?;
    let (sentence, _) = translator.translate_traced(&source)?;
    *out = owned_string(fwd.target_vocab().render(&sentence)?)?;
    Ok(())
}

/// Translates one whitespace-tokenized sentence. `bwd` may be null for
/// modes that do not use a backward model. Distractor modes fail with
/// `InvalidConfig`; use [`pragma_translate_with_distractors`].
///
/// # Safety
/// Handles must be live, strings NUL-terminated, and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_translate(
    mode: PragmaMode,
    fwd: *const PragmaModel,
    bwd: *const PragmaModel,
    config: *const PragmaConfig,
    source: *const c_char,
    out: *mut *mut c_char,
) -> PragmaStatus {
    guard(|| translate_impl(mode, fwd, bwd, config, source, None, out))
}

/// Translates one sentence against an explicit distractor set, which must
/// contain the source.
///
/// # Safety
/// As [`pragma_translate`]; `distractors` must point to `n_distractors`
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pragma_translate_with_distractors(
    mode: PragmaMode,
    fwd: *const PragmaModel,
    bwd: *const PragmaModel,
    config: *const PragmaConfig,
    source: *const c_char,
    distractors: *const *const c_char,
    n_distractors: usize,
    out: *mut *mut c_char,
) -> PragmaStatus {
    guard(|| translate_impl(mode, fwd, bwd, config, source, Some((distractors, n_distractors)), out))
}

/// Corpus BLEU in `[0, 100]` over whitespace-tokenized lines.
///
/// # Safety
/// `hypotheses` and `references` must each point to `n` NUL-terminated
/// strings; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pragma_bleu_corpus(
    hypotheses: *const *const c_char,
    references: *const *const c_char,
    n: usize,
    max_order: usize,
    out: *mut f64,
) -> PragmaStatus {
    guard(|| {
        non_null(out, "out")?;
        let h: Vec<String> = str_array(hypotheses, n, "hypotheses")?.into_iter().map(String::from).collect();
        let r: Vec<String> = str_array(references, n, "references")?.into_iter().map(String::from).collect();
        let config = BleuConfig { max_order, ..BleuConfig::default() };
        *out = eval::bleu_corpus_lines(&h, &r, &config)?;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn pragma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pragma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
