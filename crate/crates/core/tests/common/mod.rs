//! Golden-file cases for the `coaxfilt` binary.
//!
//! Every case runs in a fresh temp directory seeded with `tests/fixtures/`.
//! stdout, stderr and the listed output files are compared byte-for-byte
//! with `tests/golden/<case>/`. Set `COAXFILT_BLESS=1` to rewrite goldens.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    /// Commands run first (outputs not compared, exit must be 0).
    pub setup: &'static [&'static [&'static str]],
    pub args: &'static [&'static str],
    pub exit: i32,
    /// Files written by `args` that are compared with goldens.
    pub outputs: &'static [&'static str],
}

const GEOM_42: [&str; 6] = ["--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3"];

macro_rules! cmd {
    ($($x:expr),* $(,)?) => { &[$($x),*] };
}

pub const CASES: &[Case] = &[
    Case { name: "model_42mm", setup: &[], args: cmd!["model", "design_42mm.toml", "--out", "m42.csv"], exit: 0, outputs: &["m42.csv"] },
    Case { name: "model_42mm_s2p", setup: &[], args: cmd!["model", "design_42mm.toml", "--out", "m42.s2p"], exit: 0, outputs: &["m42.s2p"] },
    Case { name: "model_zero_length", setup: &[], args: cmd!["model", "design_zero_length.toml", "--out", "z.csv"], exit: 0, outputs: &["z.csv"] },
    Case { name: "model_missing_length", setup: &[], args: cmd!["model", "design_missing_length.toml", "--out", "x.csv"], exit: 2, outputs: &[] },
    Case {
        name: "extract_42mm",
        setup: &[],
        args: cmd!["extract", "measured_42mm.s2p", GEOM_42[0], GEOM_42[1], GEOM_42[2], GEOM_42[3], GEOM_42[4], GEOM_42[5], "--out", "mat42.csv"],
        exit: 0,
        outputs: &["mat42.csv"],
    },
    Case {
        name: "extract_zero_length",
        setup: &[],
        args: cmd!["extract", "measured_42mm.s2p", "--length", "0", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "mat42.csv"],
        exit: 2,
        outputs: &[],
    },
    Case {
        name: "extract_corrupted",
        setup: &[],
        args: cmd!["extract", "corrupted_42mm.s2p", "--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "bad.csv"],
        exit: 3,
        outputs: &[],
    },
    Case {
        name: "extract_noisy",
        setup: &[],
        args: cmd!["extract", "noisy_42mm.s2p", "--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--smooth-window", "21", "--out", "nmat.csv"],
        exit: 0,
        outputs: &["nmat.csv"],
    },
    Case {
        name: "predict_36mm",
        setup: &[cmd!["extract", "measured_42mm.s2p", "--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "mat42.csv"]],
        args: cmd!["predict", "mat42.csv", "--length", "0.036", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "p36.csv", "--compare", "measured_36mm.s2p"],
        exit: 0,
        outputs: &["p36.csv"],
    },
    Case {
        name: "predict_noisy",
        setup: &[cmd!["extract", "noisy_42mm.s2p", "--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--smooth-window", "21", "--out", "nmat.csv"]],
        args: cmd!["predict", "nmat.csv", "--length", "0.036", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "np36.s2p", "--compare", "measured_36mm.s2p"],
        exit: 0,
        outputs: &["np36.s2p"],
    },
    Case {
        name: "predict_noisy_tight_tol",
        setup: &[cmd!["extract", "noisy_42mm.s2p", "--length", "0.042", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--smooth-window", "21", "--out", "nmat.csv"]],
        args: cmd!["predict", "nmat.csv", "--length", "0.036", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--out", "np36.csv", "--compare", "measured_36mm.s2p", "--tol", "0.0001"],
        exit: 4,
        outputs: &[],
    },
    Case {
        name: "predict_out_of_range",
        setup: &[],
        args: cmd!["predict", "material.csv", "--length", "0.036", "--inner-d", "1.27e-3", "--outer-d", "6e-3", "--grid", "1e6:3e10:11", "--out", "x.csv"],
        exit: 2,
        outputs: &[],
    },
    Case { name: "synth_vacuum", setup: &[], args: cmd!["synth", "material_vacuum.csv", "--target-z", "59.9585"], exit: 0, outputs: &[] },
    Case {
        name: "synth_matched",
        setup: &[],
        args: cmd!["synth", "material.csv", "--target-z", "50", "--slope-db-per-ghz", "1", "--f-ref", "1e9", "--inner-d", "1.27e-3"],
        exit: 0,
        outputs: &[],
    },
    Case { name: "synth_const_alpha", setup: &[], args: cmd!["synth", "material_const_alpha.csv", "--slope-db-per-ghz", "1"], exit: 5, outputs: &[] },
    Case {
        name: "check_compliant",
        setup: &[cmd!["model", "design_matched.toml", "--out", "matched.csv"]],
        args: cmd!["check", "matched.csv"],
        exit: 0,
        outputs: &[],
    },
    Case {
        name: "check_65ohm",
        setup: &[cmd!["model", "design_65ohm.toml", "--out", "m65.s2p"]],
        args: cmd!["check", "m65.s2p"],
        exit: 6,
        outputs: &[],
    },
    Case { name: "check_empty_band", setup: &[], args: cmd!["check", "measured_42mm.s2p", "--band-max-hz", "1e6"], exit: 2, outputs: &[] },
    Case { name: "convert_ri_to_db", setup: &[], args: cmd!["convert", "small_ri.s2p", "small_db.s2p", "--to", "db", "--unit", "hz"], exit: 0, outputs: &["small_db.s2p"] },
    Case {
        name: "convert_db_to_ri",
        setup: &[cmd!["convert", "small_ri.s2p", "small_db.s2p", "--to", "db", "--unit", "hz"]],
        args: cmd!["convert", "small_db.s2p", "back.s2p", "--to", "ri", "--unit", "ghz"],
        exit: 0,
        outputs: &["back.s2p"],
    },
    Case { name: "convert_identity", setup: &[], args: cmd!["convert", "small_ri.s2p", "same.s2p", "--to", "ri", "--unit", "ghz"], exit: 0, outputs: &["same.s2p"] },
    Case { name: "convert_malformed", setup: &[], args: cmd!["convert", "malformed.s2p", "x.s2p"], exit: 2, outputs: &[] },
];

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixtures_dir() -> PathBuf {
    crate_dir().join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    crate_dir().join("tests/golden")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coaxfilt")
}

/// Fresh working directory holding a copy of every fixture.
pub fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().expect("tempdir");
    for entry in fs::read_dir(fixtures_dir()).expect("fixtures") {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

pub fn run_in(dir: &Path, args: &[&str]) -> RunOutput {
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn coaxfilt");
    RunOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: out.stderr,
    }
}

pub struct CaseResult {
    pub code: i32,
    /// (label, actual bytes)
    pub artifacts: Vec<(String, Vec<u8>)>,
}

pub fn execute(case: &Case) -> CaseResult {
    let dir = workdir();
    for step in case.setup {
        let r = run_in(dir.path(), step);
        assert_eq!(
            r.code,
            0,
            "{}: setup {:?} failed: {}",
            case.name,
            step,
            String::from_utf8_lossy(&r.stderr)
        );
    }
    let r = run_in(dir.path(), case.args);
    let mut artifacts = vec![
        ("stdout.txt".to_string(), r.stdout),
        ("stderr.txt".to_string(), r.stderr),
    ];
    for name in case.outputs {
        let bytes = fs::read(dir.path().join(name))
            .unwrap_or_else(|e| panic!("{}: missing output {name}: {e}", case.name));
        artifacts.push((name.to_string(), bytes));
    }
    CaseResult { code: r.code, artifacts }
}

/// Compares a case with its goldens; returns a description of every mismatch.
pub fn check_case(case: &Case) -> Vec<String> {
    let res = execute(case);
    let mut problems = Vec::new();
    if res.code != case.exit {
        problems.push(format!("exit code {} (expected {})", res.code, case.exit));
    }
    let dir = golden_dir().join(case.name);
    let bless = std::env::var_os("COAXFILT_BLESS").is_some();
    if bless {
        fs::create_dir_all(&dir).unwrap();
    }
    for (label, actual) in &res.artifacts {
        let path = dir.join(label);
        if bless {
            fs::write(&path, actual).unwrap();
            continue;
        }
        match fs::read(&path) {
            Ok(expected) if &expected == actual => {}
            Ok(_) => problems.push(format!("{label} differs from {}", path.display())),
            Err(e) => problems.push(format!("cannot read {}: {e}", path.display())),
        }
    }
    problems
}
