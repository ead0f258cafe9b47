//! Every registered experiment reproduces its checked-in output byte for byte.
//!
//! Set `GATECOMM_BLESS=1` to rewrite the files after an intended change.

use std::path::PathBuf;
use std::process::Command;

use gatecomm::cli::{registry, run_experiment, Params};

fn golden_path(name: &str, ext: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.{ext}"))
}

fn ext(f: gatecomm::cli::Format) -> &'static str {
    match f {
        gatecomm::cli::Format::Json => "json",
        gatecomm::cli::Format::Csv => "csv",
    }
}

#[test]
fn experiments_match_golden_files() {
    let bless = std::env::var_os("GATECOMM_BLESS").is_some();
    let mut stale = Vec::new();
    for exp in registry() {
        let text = run_experiment(exp.name, &Params::new(0, None)).unwrap().render(exp.default_format);
        let path = golden_path(exp.name, ext(exp.default_format));
        if bless {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if want != text {
            stale.push(exp.name);
        }
    }
    assert!(stale.is_empty(), "outputs differ from golden files: {stale:?}");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for name in ["split-qubit", "rsp-montecarlo", "nisan", "fannes"] {
        let p = Params::new(3, Some(64));
        let many = run_experiment(name, &p).unwrap().render(gatecomm::cli::Format::Json);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| run_experiment(name, &p).unwrap().render(gatecomm::cli::Format::Json));
        assert_eq!(many, one, "{name}");
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gatecomm"))
}

#[test]
fn binary_writes_into_the_output_directory() {
    let dir = std::env::temp_dir().join(format!("gatecomm-cli-{}", std::process::id()));
    let out = bin().args(["run", "coherent-erasure"]).env("GATECOMM_OUT_DIR", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.join("coherent-erasure.csv")).unwrap();
    assert_eq!(written, std::fs::read_to_string(golden_path("coherent-erasure", "csv")).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["run", "backcomm", "--m", "1"]), Some(0));
    assert_eq!(code(&["run", "no-such-experiment"]), Some(2));
    assert_eq!(code(&["run", "backcomm", "--m", "zero"]), Some(2));
    assert_eq!(code(&["region", "1", "2"]), Some(2));
    let out = bin().args(["run", "rsp-montecarlo", "--d", "64", "--kappa", "8", "--trials", "2000", "--seed", "7"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["mean_F"].as_f64().unwrap() > v["bound"].as_f64().unwrap());
    assert_eq!(v["pass"], serde_json::json!(true));
}

#[test]
fn contract_failure_exits_with_one() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["run", "one-time-pad", "--theta", "0.4"]), Some(0));
    // declared error below the real one
    assert_eq!(code(&["run", "one-time-pad", "--theta", "0.4", "--epsilon", "0"]), Some(1));
}
