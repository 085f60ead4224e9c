// SPDX-License-Identifier: Apache-2.0

//! Positional-collapse oracles. Expected positions and relations are
//! enumerated by hand from the arenas; the multiset counts are checked
//! against an independent binomial computation.

use std::collections::BTreeSet;

use cgames_core::arena::{Arena, Budget, Flavor};
use cgames_core::es::{BitSet, EsBuilder, EventId};
use cgames_core::interp::interpret;
use cgames_core::lang::parse;
use cgames_core::positions::{
    arena_positions, canonicalize, collapse, deadlock_free_check, functoriality_check,
    positionally_equivalent, relational_compose, wb_play_reaching, PositionsError, Relation,
};
use cgames_core::strategy::{compose, copycat, positive_iso, Sequent, Strategy};

const MAX: usize = 5_000;
const CAP: usize = 50_000;
const STATES: usize = 200_000;

fn set(a: &Arena, events: &[EventId]) -> BitSet {
    BitSet::from_iter(a.es.len(), events.iter().copied())
}

/// Build a strategy over `seq` from (game event, predecessor list) rows;
/// strategy event ids are row indices.
fn strat(seq: Sequent, rows: &[(EventId, &[usize])]) -> Strategy {
    let mut b = EsBuilder::new();
    for (i, (g, preds)) in rows.iter().enumerate() {
        let e = b.event(format!("e{i}"), seq.game.pol(*g), Some(seq.game.qa(*g)));
        assert_eq!(e, i);
        for &p in *preds {
            b.edge(p, e);
        }
    }
    let display = rows.iter().map(|&(g, _)| g).collect();
    Strategy::from_parts(seq, b.build().unwrap(), display).unwrap()
}

fn ev(a: &Arena, node: usize) -> EventId {
    a.event_at(node, &[]).unwrap()
}

#[test]
fn ground_canonical_forms() {
    let b = Arena::ground_b(MAX);
    let qtt = canonicalize(&b, &set(&b, &[0, 1])).unwrap();
    let qff = canonicalize(&b, &set(&b, &[0, 2])).unwrap();
    assert_eq!(qtt, "q(tt)");
    assert_eq!(qff, "q(ff)");
    assert_ne!(qtt, qff);
    assert_eq!(canonicalize(&b, &set(&b, &[])).unwrap(), "");
    assert!(matches!(
        canonicalize(&b, &set(&b, &[0])),
        Err(PositionsError::Incomplete(0))
    ));
    // {tt} alone is not down-closed, hence not a configuration.
    assert!(matches!(
        canonicalize(&b, &set(&b, &[1])),
        Err(PositionsError::NotConfiguration)
    ));
}

#[test]
fn index_permuted_copies_canonicalize_equally() {
    let bu = Arena::ground_u(MAX).bang(2, MAX).unwrap();
    let copy = |c: u32| -> BitSet {
        BitSet::from_iter(
            bu.es.len(),
            [bu.event_at(0, &[c]).unwrap(), bu.event_at(1, &[c]).unwrap()],
        )
    };
    let p0 = canonicalize(&bu, &copy(0)).unwrap();
    let p1 = canonicalize(&bu, &copy(1)).unwrap();
    assert_eq!(p0, p1);
    assert_eq!(p0, "q(ok)");
    // The same pair of configurations is related by an arena symmetry.
    let pairs: Vec<(EventId, EventId)> = vec![
        (bu.event_at(0, &[0]).unwrap(), bu.event_at(0, &[1]).unwrap()),
        (bu.event_at(1, &[0]).unwrap(), bu.event_at(1, &[1]).unwrap()),
    ];
    assert!(bu.symmetry_member(&pairs, Flavor::Full));
}

/// Number of multisets of size 1..=w over n elements: Σₖ C(n+k-1, k).
fn multisets_up_to(n: usize, w: usize) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        let mut r = 1usize;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }
    (1..=w).map(|k| binom(n + k - 1, k)).sum()
}

#[test]
fn replicated_positions_are_multisets() {
    for base in [Arena::ground_u(MAX), Arena::ground_b(MAX)] {
        let n = arena_positions(&base, CAP).len() - 1; // drop the empty position
        for w in 1..=3 {
            let bang = base.bang(w, MAX).unwrap();
            let nonempty = arena_positions(&bang, CAP)
                .into_iter()
                .filter(|p| !p.is_empty())
                .count();
            assert_eq!(nonempty, multisets_up_to(n, w), "width {w}");
        }
    }
}

#[test]
fn copycat_collapse_is_the_diagonal() {
    for a in [Arena::ground_u(MAX), Arena::ground_b(MAX), Arena::ground_n(&Budget::default())] {
        let cc = copycat(&a, MAX).unwrap();
        let expected: Relation =
            arena_positions(&a, CAP).into_iter().map(|p| (p.clone(), p)).collect();
        assert_eq!(collapse(&cc, CAP).unwrap(), expected);
    }
}

#[test]
fn one_call_and_two_calls_are_positionally_different() {
    let budget = Budget::default();
    let d = |src: &str| {
        let (t, _) = parse(src, &[]).unwrap();
        interpret(&t, &[], &budget).unwrap().strategy
    };
    let once = d(r"\x:U. x");
    let twice = d(r"\x:U. x; x");
    assert!(!positionally_equivalent(&once, &twice, CAP).unwrap());
    assert!(positionally_equivalent(&once, &once, CAP).unwrap());
}

/// Sequential and parallel evaluation of two commands: same positions,
/// different causal shapes.
fn eval_pair() -> (Strategy, Strategy) {
    let u = Arena::ground_u(MAX);
    let uu = u.par(&u, MAX).unwrap();
    let seq_game = || Sequent::new(uu.clone(), u.clone(), MAX).unwrap();
    let g = seq_game();
    let (lq1, lok1, lq2, lok2) = (
        g.from_left[ev(&uu, 0)],
        g.from_left[ev(&uu, 1)],
        g.from_left[ev(&uu, 2)],
        g.from_left[ev(&uu, 3)],
    );
    let (rq, rok) = (g.from_right[ev(&u, 0)], g.from_right[ev(&u, 1)]);
    let sequential = strat(
        seq_game(),
        &[
            (rq, &[]),
            (lq1, &[0]),
            (lok1, &[1]),
            (lq2, &[2]),
            (lok2, &[3]),
            (rok, &[4]),
        ],
    );
    let parallel = strat(
        seq_game(),
        &[
            (rq, &[]),
            (lq1, &[0]),
            (lq2, &[0]),
            (lok1, &[1]),
            (lok2, &[2]),
            (rok, &[3, 4]),
        ],
    );
    (sequential, parallel)
}

#[test]
fn evaluation_order_is_quotiented_out() {
    let (sequential, parallel) = eval_pair();
    assert!(positionally_equivalent(&sequential, &parallel, CAP).unwrap());
    assert!(!positive_iso(&sequential, &parallel));
}

/// The deadlocking pair: a strict identity `σ : ⊢ 𝕌⊸𝕌` composed with a
/// tester `τ : 𝕌⊸𝕌 ⊢ ℕ` that calls the function but answers the
/// function's own query only after the function has returned.
fn deadlock_pair() -> (Strategy, Strategy) {
    let u = Arena::ground_u(MAX);
    let b = u.affine_arrow(&u, MAX).unwrap();
    let n = Arena::ground_n(&Budget::default());
    // b nodes: 0 = codomain q⁻, 1 = codomain ok⁺, 2 = domain q⁺, 3 = domain ok⁻.
    let sseq = Sequent::new(Arena::empty(MAX), b.clone(), MAX).unwrap();
    let (q, ok, qd, okd) = (
        sseq.from_right[ev(&b, 0)],
        sseq.from_right[ev(&b, 1)],
        sseq.from_right[ev(&b, 2)],
        sseq.from_right[ev(&b, 3)],
    );
    let sigma = strat(sseq, &[(q, &[]), (qd, &[0]), (okd, &[1]), (ok, &[2])]);

    let tseq = Sequent::new(b.clone(), n.clone(), MAX).unwrap();
    let (lq, lok, lqd, lokd) = (
        tseq.from_left[ev(&b, 0)],
        tseq.from_left[ev(&b, 1)],
        tseq.from_left[ev(&b, 2)],
        tseq.from_left[ev(&b, 3)],
    );
    let (nq, n0) = (tseq.from_right[ev(&n, 0)], tseq.from_right[ev(&n, 1)]);
    let tau = strat(
        tseq,
        &[
            (nq, &[]),
            (lq, &[0]),
            (lqd, &[1]),
            (lok, &[1]),
            (lokd, &[2, 3]),
            (n0, &[3]),
        ],
    );
    (sigma, tau)
}

#[test]
fn deadlocking_composition_loses_positions() {
    let (sigma, tau) = deadlock_pair();
    // Relationally, the full function position mediates an answer…
    let rs = collapse(&sigma, CAP).unwrap();
    let rt = collapse(&tau, CAP).unwrap();
    assert!(rs.contains(&("".into(), "q(ok,q(ok))".into())));
    assert!(rt.contains(&("q(ok,q(ok))".into(), "q(0)".into())));
    let rel = relational_compose(&rs, &rt);
    assert!(rel.contains(&("".into(), "q(0)".into())));
    // …but the actual composition deadlocks: no answer is ever reached.
    let comp = compose(&sigma, &tau, STATES).unwrap();
    let rc = collapse(&comp, CAP).unwrap();
    let only_empty: Relation = [("".into(), "".into())].into_iter().collect();
    assert_eq!(rc, only_empty);
    assert!(!functoriality_check(&sigma, &tau, CAP, STATES).unwrap());
    assert!(!deadlock_free_check(&sigma, &tau, CAP));
}

#[test]
fn copycat_compositions_are_deadlock_free_and_functorial() {
    let (sigma, tau) = deadlock_pair();
    let u = Arena::ground_u(MAX);
    let b = u.affine_arrow(&u, MAX).unwrap();
    // Either factor against copycat on the shared game is deadlock-free.
    assert!(deadlock_free_check(&sigma, &copycat(&b, MAX).unwrap(), CAP));
    assert!(deadlock_free_check(&copycat(&b, MAX).unwrap(), &tau, CAP));
    assert!(functoriality_check(&sigma, &copycat(&b, MAX).unwrap(), CAP, STATES).unwrap());
    // The evaluation pair against copycat as well.
    let (sequential, parallel) = eval_pair();
    for s in [&sequential, &parallel] {
        assert!(deadlock_free_check(s, &copycat(&u, MAX).unwrap(), CAP));
        assert!(functoriality_check(s, &copycat(&u, MAX).unwrap(), CAP, STATES).unwrap());
    }
}

#[test]
fn collapse_is_invariant_under_positive_iso() {
    // Two strategies that call a replicated argument at different copy
    // indices while answering independently: positively isomorphic, and the
    // copy index is erased by the collapse.
    let u = Arena::ground_u(MAX);
    let bu = u.bang(2, MAX).unwrap();
    let mk = |c: u32| {
        let seq = Sequent::new(bu.clone(), u.clone(), MAX).unwrap();
        let lq = seq.from_left[bu.event_at(0, &[c]).unwrap()];
        let (rq, rok) = (seq.from_right[ev(&u, 0)], seq.from_right[ev(&u, 1)]);
        strat(seq, &[(rq, &[]), (lq, &[0]), (rok, &[0])])
    };
    let (s0, s1) = (mk(0), mk(1));
    assert!(positive_iso(&s0, &s1));
    assert_eq!(collapse(&s0, CAP).unwrap(), collapse(&s1, CAP).unwrap());
}

#[test]
fn complete_configurations_are_reached_by_wb_plays() {
    use cgames_core::conditions::is_complete_config;
    let budget = Budget::default();
    for src in ["skip; skip", r"\x:U. x; x", "if tt then 1 else 0", "let x = 1 in succ x"] {
        let (t, _) = parse(src, &[]).unwrap();
        let s = interpret(&t, &[], &budget).unwrap().strategy;
        let mut seen = 0;
        for x in s.configurations(CAP) {
            if !is_complete_config(&s, &x) {
                continue;
            }
            let play = wb_play_reaching(&s, &x, 1_000_000)
                .unwrap_or_else(|| panic!("{src}: no wb play for a complete configuration"));
            assert_eq!(play.len(), x.len());
            let replayed: BTreeSet<EventId> = play.iter().copied().collect();
            assert_eq!(replayed, x.iter().collect::<BTreeSet<_>>());
            seen += 1;
        }
        assert!(seen >= 1, "{src}: no complete configurations");
    }
}
