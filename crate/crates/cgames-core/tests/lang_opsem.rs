// SPDX-License-Identifier: Apache-2.0

//! Parser, typing and operational-semantics oracles: each expected value or
//! verdict below was computed by hand from the reduction rules.

use cgames_core::arena::{Budget, Ty};
use cgames_core::lang::{parse, run, LangError, RunResult, Term};

fn budget() -> Budget {
    Budget { nat_max: 8, ..Budget::default() }
}

fn go(src: &str) -> RunResult {
    let (term, _) = parse(src, &[]).expect(src);
    run(&term, &budget()).expect(src)
}

fn converges_to(src: &str, v: Term) {
    match go(src) {
        RunResult::Converges(w) => assert_eq!(w, v, "{src}"),
        RunResult::Diverges => panic!("{src}: diverged"),
    }
}

fn diverges(src: &str) {
    assert_eq!(go(src), RunResult::Diverges, "{src}");
}

#[test]
fn beta_and_ground_constants() {
    converges_to(r"(\x:U. x) skip", Term::Skip);
    converges_to(r"(\x:N. succ x) 1", Term::Num(2));
    converges_to("skip; tt", Term::Tt);
    converges_to("if tt then 1 else 0", Term::Num(1));
    converges_to("if ff then 1 else 0", Term::Num(0));
    converges_to("pred 0", Term::Num(0));
    converges_to("pred 3", Term::Num(2));
    converges_to("iszero (pred 1)", Term::Tt);
    converges_to("let x = succ 1 in succ x", Term::Num(3));
}

#[test]
fn typing_rejects_ill_formed_terms() {
    assert!(matches!(parse("skip skip", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse("if 1 then tt else ff", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse("succ tt", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse("x", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse(r"(\x:U. x) tt", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse("grab tt", &[]), Err(LangError::Type(_))));
    assert!(matches!(parse("let f = \\x:U. x in skip", &[]), Err(LangError::Type(_))));
}

#[test]
fn parse_errors_are_reported() {
    assert!(matches!(parse("if tt then", &[]), Err(LangError::Parse(_, _))));
    assert!(matches!(parse("(skip", &[]), Err(LangError::Parse(_, _))));
    assert!(matches!(parse("skip )", &[]), Err(LangError::Parse(_, _))));
}

#[test]
fn context_typing_and_types() {
    let ctx = vec![("f".to_string(), Ty::Arrow(Box::new(Ty::Unit), Box::new(Ty::Unit)))];
    let (_, t) = parse("f skip", &ctx).unwrap();
    assert_eq!(t, Ty::Unit);
    let (_, t) = parse(r"\g:(U->U)->U. g (\u:U. u)", &[]).unwrap();
    assert_eq!(
        t,
        Ty::Arrow(
            Box::new(Ty::Arrow(
                Box::new(Ty::Arrow(Box::new(Ty::Unit), Box::new(Ty::Unit))),
                Box::new(Ty::Unit)
            )),
            Box::new(Ty::Unit)
        )
    );
}

#[test]
fn references_read_back_the_written_value() {
    converges_to("newref r := 0 in (r := 1; !r)", Term::Num(1));
    converges_to("newref r := 5 in !r", Term::Num(5));
    converges_to("newref r := 0 in (r := 2; r := 3; !r)", Term::Num(3));
}

#[test]
fn semaphores_block_and_unblock() {
    converges_to("newsem s := 0 in (grab s; release s)", Term::Skip);
    diverges("newsem s := 1 in grab s");
    diverges("newsem s := 0 in (grab s; grab s)");
    diverges("newsem s := 0 in release s");
}

#[test]
fn bad_variables_delegate_to_methods() {
    converges_to(r"(mkvar (\n:N. skip) 5) := 3", Term::Skip);
    converges_to(r"!(mkvar (\n:N. skip) 5)", Term::Num(5));
    converges_to(r"grab (mksem skip skip)", Term::Skip);
    converges_to(r"release (mksem skip skip)", Term::Skip);
}

#[test]
fn fixpoints_unfold_and_loop() {
    diverges(r"Y (\x:U. x)");
    // A recursion that terminates without calling itself.
    converges_to(r"(Y (\f:N->N. \n:N. if iszero n then 0 else 0)) 1", Term::Num(0));
}

#[test]
fn bot_diverges() {
    diverges("bot[U]");
    diverges("skip; bot[B]");
}

#[test]
fn plet_evaluates_both_sides() {
    converges_to("plet x = succ 0 and y = succ 1 in succ y", Term::Num(3));
    diverges("plet x = skip and y = bot[U] in skip");
}

#[test]
fn parallel_races_may_converge_either_way() {
    // A race `x := 1 ∥ y := !x` can read the reference before or after the
    // write, so both continuations are may-reachable.
    let base = "newref x := 0 in newref y := 0 in \
                (((x := 1) || (y := !x)); if iszero !y then {W} else {L})";
    converges_to(&base.replace("{W}", "tt").replace("{L}", "bot[B]"), Term::Tt);
    converges_to(&base.replace("{W}", "bot[B]").replace("{L}", "ff"), Term::Ff);
}

#[test]
fn internal_choice_sugar() {
    converges_to("skip +| bot[U]", Term::Skip);
    converges_to("bot[U] +| skip", Term::Skip);
    diverges("bot[U] +| bot[U]");
}

#[test]
fn assume_not_and_equality_sugar() {
    converges_to("assume tt", Term::Skip);
    diverges("assume ff");
    converges_to("not tt", Term::Ff);
    converges_to("not ff", Term::Tt);
    converges_to("tt == tt", Term::Tt);
    converges_to("tt == ff", Term::Ff);
    converges_to("skip == skip", Term::Tt);
    converges_to("2 == 2", Term::Tt);
    converges_to("1 == 2", Term::Ff);
    converges_to("0 == 3", Term::Ff);
    converges_to("3 == 0", Term::Ff);
}

#[test]
fn case_sugar() {
    converges_to("case 1 of { 0 -> tt | 1 -> ff }", Term::Ff);
    converges_to("case succ 1 of { 2 -> 7 | 1 -> 9 }", Term::Num(7));
    diverges("case 2 of { 0 -> tt | 1 -> ff }");
}

#[test]
fn nat_overflow_is_a_budget_error() {
    let (term, _) = parse("succ 1", &[]).unwrap();
    let small = Budget { nat_max: 1, ..Budget::default() };
    assert!(matches!(run(&term, &small), Err(LangError::Budget(_))));
}

#[test]
fn coordination_through_interference() {
    // Two threads that must interleave across an assumption barrier:
    // converges only because the scheduler may run the writer first.
    let src = format!(
        "({}) skip skip",
        r"\x:U. \y:U. newref r := 0 in ((assume (iszero !r); x; r := 1) || (assume (not (iszero !r)); y))"
    );
    converges_to(&src, Term::Skip);
}

#[test]
fn stuck_assumption_diverges() {
    diverges("newref r := 0 in (assume (not (iszero !r)); skip)");
}

#[test]
fn corpus_parsing() {
    let text = "-- name: one\nskip\n-- expect: converge\n\n-- name: two\nbot[U]\n-- expect: diverge\n";
    let entries = cgames_core::lang::parse_corpus(text);
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0].name, "one");
    assert_eq!(entries[0].expect, "converge");
    assert_eq!(entries[1].source, "bot[U]");
}
