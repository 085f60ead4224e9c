// SPDX-License-Identifier: Apache-2.0

//! End-to-end driver tests: exit-code contract, output shapes, and the
//! deterministic DOT gallery against its checked-in golden files.

use std::path::Path;
use std::process::{Command, Output};

fn cgames(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgames"))
        .args(args)
        .output()
        .expect("run cgames")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn run_reports_convergence() {
    let out = cgames(&["run", "skip; skip"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "converges: skip");
    let out = cgames(&["run", "bot[U]"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "diverges");
}

#[test]
fn parse_and_type_errors_exit_2() {
    assert_eq!(code(&cgames(&["run", "(skip"])), 2);
    assert_eq!(code(&cgames(&["run", "succ tt"])), 2);
    assert_eq!(code(&cgames(&["interp", "x"])), 2);
    assert_eq!(code(&cgames(&["check", "--conditions", "nonsense", "skip"])), 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    assert_eq!(code(&cgames(&["run", "succ (succ 2)"])), 3);
    assert_eq!(code(&cgames(&["run", "--nat-max", "1", "succ 1"])), 3);
}

#[test]
fn check_reports_conditions() {
    let out = cgames(&["check", "--conditions", "deterministic,visible,wb", "skip; skip"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("deterministic: pass"));
    assert!(text.contains(r#"{"deterministic":true,"visible":true,"wb":true}"#));
    // A parallel program is not sequential: condition failure exits 1.
    let out = cgames(&["check", "--conditions", "sequential", r"\x:U. \y:U. (x || y)"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("sequential: fail"));
}

#[test]
fn compare_modes_and_exit_codes() {
    let out = cgames(&["compare", "--mode", "positional", "skip", "skip; skip"]);
    assert_eq!(code(&out), 0);
    let out = cgames(&["compare", "--mode", "positional", r"\x:U. x", r"\x:U. x; x"]);
    assert_eq!(code(&out), 1);
    let out = cgames(&["compare", "--mode", "positive-iso", "skip", "skip; skip"]);
    assert_eq!(code(&out), 0);
    let out = cgames(&["compare", "--mode", "positive-iso", "tt", "ff"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn interp_emits_json_and_dot() {
    let out = cgames(&["interp", "skip", "--out", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["type"], "Unit");
    let out = cgames(&["interp", "skip", "--out", "dot"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph"));
}

#[test]
fn bundled_adequacy_corpus_agrees() {
    let out = cgames(&["adequacy"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 20);
    assert!(!text.contains("DISAGREE"));
    assert!(!text.contains("inconclusive"));
}

#[test]
fn gallery_matches_goldens_and_is_deterministic() {
    let tmp = std::env::temp_dir().join(format!("cgames-gallery-{}", std::process::id()));
    let tmp2 = tmp.with_extension("again");
    for dir in [&tmp, &tmp2] {
        let out = cgames(&["gallery", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
    let mut names: Vec<String> = std::fs::read_dir(&golden)
        .expect("golden dir")
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in &names {
        let want = std::fs::read_to_string(golden.join(name)).unwrap();
        let got = std::fs::read_to_string(tmp.join(name))
            .unwrap_or_else(|_| panic!("gallery missing {name}"));
        assert_eq!(got, want, "golden mismatch for {name}");
        let again = std::fs::read_to_string(tmp2.join(name)).unwrap();
        assert_eq!(got, again, "nondeterministic output for {name}");
    }
    std::fs::remove_dir_all(&tmp).ok();
    std::fs::remove_dir_all(&tmp2).ok();
}
