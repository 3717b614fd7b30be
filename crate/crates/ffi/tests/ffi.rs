use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use pragma_ffi::*;

fn fixture(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(p.display().to_string()).unwrap()
}

fn load(name: &str) -> *mut PragmaModel {
    let mut m = ptr::null_mut();
    let status = unsafe { pragma_model_load(fixture(name).as_ptr(), &mut m) };
    assert_eq!(status, PragmaStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = pragma_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    pragma_string_free(s);
    out
}

fn translate(
    mode: PragmaMode,
    fwd: *const PragmaModel,
    bwd: *const PragmaModel,
    cfg: &PragmaConfig,
    src: &str,
) -> Result<String, PragmaStatus> {
    let src = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { pragma_translate(mode, fwd, bwd, cfg, src.as_ptr(), &mut out) };
    if status == PragmaStatus::Ok {
        Ok(unsafe { take(out) })
    } else {
        assert!(out.is_null());
        Err(status)
    }
}

#[test]
fn default_config() {
    let c = pragma_config_default();
    assert_eq!(c.alpha, 0.1);
    assert_eq!(c.candidate_width_k, 2);
    assert_eq!(c.beam_width, 4);
    assert_eq!(c.max_len, 50);
}

#[test]
fn translate_every_mode_without_distractors() {
    let (fwd, bwd) = (load("ambig1.fwd.tab"), load("ambig1.bwd.tab"));
    let cfg = PragmaConfig { alpha: 1.0, max_len: 4, ..pragma_config_default() };
    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &cfg, "A").unwrap(), "u");
    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &cfg, "B").unwrap(), "u");
    for mode in [PragmaMode::S1Cip, PragmaMode::S1Cgp] {
        assert_eq!(translate(mode, fwd, bwd, &cfg, "A").unwrap(), "x");
        assert_eq!(translate(mode, fwd, bwd, &cfg, "B").unwrap(), "y");
    }
    unsafe {
        pragma_model_free(fwd);
        pragma_model_free(bwd);
    }
}

#[test]
fn distractor_modes() {
    let fwd = load("ambig1.fwd.tab");
    let cfg = PragmaConfig { alpha: 1.0, max_len: 4, ..pragma_config_default() };
    let set = [CString::new("A").unwrap(), CString::new("B").unwrap()];
    let ptrs: Vec<*const c_char> = set.iter().map(|s| s.as_ptr()).collect();
    for mode in [PragmaMode::S1Ip, PragmaMode::S1Gp] {
        for (src, want) in [("A", "x"), ("B", "y")] {
            let src = CString::new(src).unwrap();
            let mut out = ptr::null_mut();
            let status = unsafe {
                pragma_translate_with_distractors(
                    mode,
                    fwd,
                    ptr::null(),
                    &cfg,
                    src.as_ptr(),
                    ptrs.as_ptr(),
                    2,
                    &mut out,
                )
            };
            assert_eq!(status, PragmaStatus::Ok, "{}", last_error());
            assert_eq!(unsafe { take(out) }, want);
        }
        assert_eq!(translate(mode, fwd, ptr::null(), &cfg, "A"), Err(PragmaStatus::InvalidConfig));
    }
    let only_b = [CString::new("B").unwrap()];
    let ptrs: Vec<*const c_char> = only_b.iter().map(|s| s.as_ptr()).collect();
    let src = CString::new("A").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe {
        pragma_translate_with_distractors(
            PragmaMode::S1Ip,
            fwd,
            ptr::null(),
            &cfg,
            src.as_ptr(),
            ptrs.as_ptr(),
            1,
            &mut out,
        )
    };
    assert_eq!(status, PragmaStatus::InvalidInput);
    unsafe { pragma_model_free(fwd) };
}

#[test]
fn error_codes_and_messages() {
    let fwd = load("ambig1.fwd.tab");
    let cfg = PragmaConfig { max_len: 4, ..pragma_config_default() };

    assert_eq!(translate(PragmaMode::S1Cip, fwd, ptr::null(), &cfg, "A"), Err(PragmaStatus::InvalidConfig));
    assert!(last_error().contains("backward"));

    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &cfg, "Q"), Err(PragmaStatus::InvalidInput));
    assert!(last_error().contains("\"Q\""));

    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &cfg, ""), Err(PragmaStatus::InvalidInput));

    let bad = PragmaConfig { alpha: -1.0, ..cfg };
    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &bad, "A"), Err(PragmaStatus::InvalidConfig));

    assert_eq!(translate(PragmaMode::S0, ptr::null(), ptr::null(), &cfg, "A"), Err(PragmaStatus::NullArgument));

    assert_eq!(translate(PragmaMode::S0, fwd, ptr::null(), &cfg, "A"), Ok("u".into()));
    assert!(pragma_last_error_message().is_null());

    let bytes = [0xffu8, 0];
    let mut out = ptr::null_mut();
    let status = unsafe { pragma_translate(PragmaMode::S0, fwd, ptr::null(), &cfg, bytes.as_ptr().cast(), &mut out) };
    assert_eq!(status, PragmaStatus::InvalidUtf8);
    unsafe { pragma_model_free(fwd) };
}

#[test]
fn loading_failures() {
    let mut m = ptr::null_mut();
    let missing = CString::new("/nonexistent/model.tab").unwrap();
    assert_eq!(unsafe { pragma_model_load(missing.as_ptr(), &mut m) }, PragmaStatus::Io);
    assert!(m.is_null());

    let text = CString::new("pragma-tabular v1\nsource:\na\ntarget:\nb\ngiven a | :\n  b 0.5\n").unwrap();
    assert_eq!(unsafe { pragma_model_parse(text.as_ptr(), &mut m) }, PragmaStatus::Model);
    assert!(last_error().contains("not normalized"));

    let text = CString::new("not a model").unwrap();
    assert_eq!(unsafe { pragma_model_parse(text.as_ptr(), &mut m) }, PragmaStatus::Parse);

    let spec = CString::new("stdio:/nonexistent/scorer").unwrap();
    assert_eq!(unsafe { pragma_model_connect(spec.as_ptr(), 1000, &mut m) }, PragmaStatus::Remote);
    let spec = CString::new("model.tab").unwrap();
    assert_eq!(unsafe { pragma_model_connect(spec.as_ptr(), 1000, &mut m) }, PragmaStatus::InvalidConfig);

    assert_eq!(unsafe { pragma_model_load(ptr::null(), &mut m) }, PragmaStatus::NullArgument);
    assert_eq!(unsafe { pragma_model_load(missing.as_ptr(), ptr::null_mut()) }, PragmaStatus::NullArgument);
    unsafe {
        pragma_model_free(ptr::null_mut());
        pragma_string_free(ptr::null_mut());
    }
}

#[test]
fn parsed_model_matches_file_tag() {
    let from_file = load("det1.tab");
    let text = std::fs::read_to_string(fixture("det1.tab").to_str().unwrap()).unwrap();
    let text = CString::new(text).unwrap();
    let mut parsed = ptr::null_mut();
    assert_eq!(unsafe { pragma_model_parse(text.as_ptr(), &mut parsed) }, PragmaStatus::Ok);
    let tag = |m: *const PragmaModel| {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { pragma_model_identity_tag(m, &mut out) }, PragmaStatus::Ok);
        unsafe { take(out) }
    };
    assert_eq!(tag(from_file), tag(parsed));
    assert!(tag(parsed).starts_with("tabular:"));
    unsafe {
        pragma_model_free(from_file);
        pragma_model_free(parsed);
    }
}

fn bleu(h: &[&str], r: &[&str]) -> (PragmaStatus, f64) {
    let h: Vec<CString> = h.iter().map(|s| CString::new(*s).unwrap()).collect();
    let r: Vec<CString> = r.iter().map(|s| CString::new(*s).unwrap()).collect();
    let hp: Vec<*const c_char> = h.iter().map(|s| s.as_ptr()).collect();
    let rp: Vec<*const c_char> = r.iter().map(|s| s.as_ptr()).collect();
    let mut out = -1.0;
    let status = unsafe { pragma_bleu_corpus(hp.as_ptr(), rp.as_ptr(), hp.len(), 4, &mut out) };
    (status, out)
}

#[test]
fn bleu_values() {
    assert_eq!(bleu(&["a b c d"], &["a b c d"]), (PragmaStatus::Ok, 100.0));
    assert_eq!(bleu(&["a b c d"], &["a b c e"]), (PragmaStatus::Ok, 0.0));
    let (status, s) = bleu(&["a b c"], &["a b c d"]);
    assert_eq!(status, PragmaStatus::Ok);
    assert!((s - 71.65).abs() < 0.01);
    assert_eq!(bleu(&[], &[]).0, PragmaStatus::InvalidInput);
}

#[test]
fn errors_are_per_thread() {
    let fwd = load("ambig1.fwd.tab") as usize;
    let cfg = PragmaConfig { max_len: 4, ..pragma_config_default() };
    assert!(translate(PragmaMode::S0, fwd as *const _, ptr::null(), &cfg, "Q").is_err());
    std::thread::spawn(|| assert!(pragma_last_error_message().is_null())).join().unwrap();
    assert!(!pragma_last_error_message().is_null());
    unsafe { pragma_model_free(fwd as *mut _) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pragma.h")).unwrap();
    for name in [
        "pragma_model_load",
        "pragma_model_parse",
        "pragma_model_connect",
        "pragma_model_free",
        "pragma_model_identity_tag",
        "pragma_config_default",
        "pragma_translate",
        "pragma_translate_with_distractors",
        "pragma_bleu_corpus",
        "pragma_last_error_message",
        "pragma_string_free",
        "typedef struct PragmaModel PragmaModel;",
        "PRAGMA_STATUS_OK = 0",
        "PRAGMA_MODE_S1_CIP = 4",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_example_compiles_against_the_header() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile_dir();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = std::process::Command::new(compiler)
            .args(["-x", lang, "-Wall", "-Werror", "-c"])
            .arg(root.join("examples/translate.c"))
            .arg("-I")
            .arg(root.join("include"))
            .arg("-o")
            .arg(dir.join(format!("translate-{lang}.o")))
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} failed"),
            Err(_) => eprintln!("{compiler} not available; skipped"),
        }
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pragma-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
