// SPDX-License-Identifier: Apache-2.0

//! Denotational interpreter oracles: every expected outcome below is
//! computed independently by the operational semantics (exhaustive
//! reduction-graph search), or by hand for the strategy-shape assertions.

use cgames_core::arena::Budget;
use cgames_core::interp::{converges_denotationally, interpret, result_values};
use cgames_core::lang::{parse, run, RunResult};
use cgames_core::strategy::ValidationLevel;

fn budget() -> Budget {
    Budget::default()
}

fn denote(src: &str) -> cgames_core::interp::Interp {
    let (term, _) = parse(src, &[]).expect(src);
    interpret(&term, &[], &budget()).expect(src)
}

fn vals(src: &str) -> Vec<String> {
    result_values(&denote(src).strategy)
}

#[track_caller]
fn agrees(src: &str) {
    let (term, _) = parse(src, &[]).expect(src);
    let den = converges_denotationally(&interpret(&term, &[], &budget()).expect(src).strategy);
    let ops = matches!(run(&term, &budget()).expect(src), RunResult::Converges(_));
    assert_eq!(den, ops, "adequacy mismatch on {src}");
}

#[test]
fn ground_constants() {
    assert_eq!(vals("skip"), ["ok"]);
    assert_eq!(vals("tt"), ["tt"]);
    assert_eq!(vals("ff"), ["ff"]);
    assert_eq!(vals("1"), ["1"]);
    assert!(vals("bot[U]").is_empty());
    assert!(vals("bot[N]").is_empty());
}

#[test]
fn sequencing_and_conditionals() {
    assert_eq!(vals("skip; tt"), ["tt"]);
    assert_eq!(vals("skip; skip; 2"), ["2"]);
    assert_eq!(vals("if tt then 1 else 0"), ["1"]);
    assert_eq!(vals("if ff then 1 else 0"), ["0"]);
    assert!(vals("bot[U]; tt").is_empty());
    assert!(vals("if bot[B] then 1 else 0").is_empty());
    assert_eq!(vals("if tt then bot[U] else skip"), Vec::<String>::new());
}

#[test]
fn arithmetic() {
    assert_eq!(vals("succ 0"), ["1"]);
    assert_eq!(vals("succ 1"), ["2"]);
    assert_eq!(vals("pred 2"), ["1"]);
    assert_eq!(vals("pred 0"), ["0"]);
    assert_eq!(vals("iszero 0"), ["tt"]);
    assert_eq!(vals("iszero 2"), ["ff"]);
    // Truncation: the successor of nat_max has no answer in the game.
    assert!(vals("succ 2").is_empty());
}

#[test]
fn beta_reduction() {
    assert_eq!(vals(r"(\x:U. x) skip"), ["ok"]);
    assert_eq!(vals(r"(\x:N. succ x) 1"), ["2"]);
    assert_eq!(vals(r"(\x:B. if x then 0 else 1) tt"), ["0"]);
    assert_eq!(vals(r"(\x:U. skip) bot[U]"), ["ok"]);
    assert!(vals(r"(\x:U. x) bot[U]").is_empty());
}

#[test]
fn repeated_argument_use() {
    assert_eq!(vals(r"(\x:U. x; x) skip"), ["ok"]);
    assert_eq!(vals(r"(\x:U. x; x; x) skip"), ["ok"]);
    assert_eq!(vals(r"(\x:N. x) 2"), ["2"]);
}

#[test]
fn let_memoizes() {
    assert_eq!(vals("let x = 1 in succ x"), ["2"]);
    assert_eq!(vals("let x = 1 in x"), ["1"]);
    assert!(vals("let x = bot[N] in 0").is_empty(), "let is strict");
}

#[test]
fn plet_joins_both_sides() {
    assert_eq!(vals("plet x = 1 and y = 2 in x"), ["1"]);
    assert_eq!(vals("plet x = 1 and y = 2 in y"), ["2"]);
    assert!(vals("plet x = skip and y = bot[U] in skip").is_empty());
}

#[test]
fn references() {
    assert_eq!(vals("newref r := 1 in !r"), ["1"]);
    assert_eq!(vals("newref r := 0 in (r := 1; !r)"), ["1"]);
    assert_eq!(vals("newref r := 0 in (r := 2; r := 1; !r)"), ["1"]);
    assert_eq!(vals("newref r := 0 in (r := 1; skip)"), ["ok"]);
}

#[test]
fn semaphores() {
    assert_eq!(vals("newsem s := 0 in (grab s; release s)"), ["ok"]);
    assert!(vals("newsem s := 1 in grab s").is_empty());
    assert!(vals("newsem s := 0 in (grab s; grab s)").is_empty());
}

#[test]
fn bad_variables() {
    assert_eq!(vals(r"!(mkvar (\n:N. skip) 2)"), ["2"]);
    assert_eq!(vals(r"(mkvar (\n:N. skip) 0) := 1"), ["ok"]);
    assert_eq!(vals(r"grab (mksem skip skip)"), ["ok"]);
    assert!(vals(r"grab (mksem bot[U] skip)").is_empty());
}

#[test]
fn fixpoints() {
    assert!(vals(r"Y (\x:U. x)").is_empty());
    assert_eq!(vals(r"(Y (\f:N->N. \n:N. 0)) 1"), ["0"]);
}

#[test]
fn parallel_race_produces_both_outcomes() {
    // x := 1 ∥ y := !x, then branch on y: both schedules are present in the
    // strategy, so both final values appear.
    let src = "newref x := 0 in newref y := 0 in \
               (((x := 1) || (y := !x)); !y)";
    assert_eq!(vals(src), ["0", "1"]);
}

#[test]
fn interpretations_validate_as_prestrategies() {
    for src in [
        "skip",
        "succ 1",
        r"(\x:U. x) skip",
        "let x = 1 in succ x",
        "newref r := 0 in (r := 1; !r)",
        "plet x = 1 and y = 2 in x",
        "newsem s := 0 in (grab s; release s)",
    ] {
        let it = denote(src);
        it.strategy
            .validate(ValidationLevel::prestrategy())
            .unwrap_or_else(|e| panic!("{src}: {e}"));
    }
}

#[test]
fn adequacy_on_a_mixed_sample() {
    for src in [
        "skip",
        "bot[U]",
        "skip; skip",
        "if iszero 1 then skip else bot[U]",
        r"(\x:U. x; x) skip",
        "newref r := 0 in (r := 1; if iszero !r then bot[U] else skip)",
        "newsem s := 0 in (grab s; release s; grab s)",
        "newsem s := 0 in (grab s; grab s)",
        "plet x = skip and y = skip in skip",
        r"Y (\x:U. x)",
    ] {
        agrees(src);
    }
}
