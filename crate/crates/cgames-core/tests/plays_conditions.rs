// SPDX-License-Identifier: Apache-2.0

//! Ground-truth tests for plays (views, visibility, bracketing) and for the
//! semantic conditions on causal strategies.

use cgames_core::arena::Arena;
use cgames_core::conditions;
use cgames_core::es::{EsBuilder, EventId, Polarity};
use cgames_core::plays;
use cgames_core::strategy::{copycat, positive_iso, promotion, Sequent, Strategy, ValidationLevel};

const MAXE: usize = 5_000;
const MAX: usize = 100_000;
const CAP: usize = 50_000;

/// Build a strategy from a list of game events with their causal
/// dependencies (indices into the list) and extra conflicts.
fn build(seq: Sequent, moves: &[(EventId, &[usize])], conflicts: &[(usize, usize)]) -> Strategy {
    let mut eb = EsBuilder::new();
    let ids: Vec<EventId> = moves
        .iter()
        .map(|(g, _)| eb.event(seq.game.lbl(*g), seq.game.pol(*g), seq.game.es.qa(*g)))
        .collect();
    for (i, (_, preds)) in moves.iter().enumerate() {
        for &p in *preds {
            eb.edge(ids[p], ids[i]);
        }
    }
    for &(a, b) in conflicts {
        eb.conflict(ids[a], ids[b]);
    }
    let es = eb.build().unwrap();
    let display = moves.iter().map(|(g, _)| *g).collect();
    Strategy::from_parts(seq, es, display).unwrap()
}

/// The strategy on `U ∥ U ⊢ U` that interrogates both components in
/// parallel and answers once both are done.
fn parallel_strategy() -> Strategy {
    let left = Arena::ground_u(MAXE).par(&Arena::ground_u(MAXE), MAXE).unwrap();
    let seq = Sequent::new(left, Arena::ground_u(MAXE), MAX).unwrap();
    let (qr, okr) = (seq.from_right[0], seq.from_right[1]);
    let (ql0, okl0, ql1, okl1) =
        (seq.from_left[0], seq.from_left[1], seq.from_left[2], seq.from_left[3]);
    build(
        seq,
        &[
            (qr, &[]),
            (ql0, &[0]),
            (ql1, &[0]),
            (okl0, &[1]),
            (okl1, &[2]),
            (okr, &[3, 4]),
        ],
        &[],
    )
}

#[test]
fn parallel_strategy_is_parallel_innocent_and_wb() {
    let s = parallel_strategy();
    s.validate(ValidationLevel::strategy()).unwrap();
    assert!(conditions::deterministic(&s));
    assert!(conditions::pre_innocent(&s));
    assert!(conditions::visible(&s, CAP));
    assert!(conditions::parallel_innocent(&s, CAP));
    assert!(conditions::causally_wb(&s, CAP));
    assert!(conditions::well_bracketed(&s, CAP, 16));
    // Two gccs through each component: 1 + 2·3 chains in total.
    assert_eq!(conditions::gccs(&s, CAP).len(), 7);
    // It interrogates the components concurrently: not sequential.
    assert!(!conditions::sequential(&s, CAP, 16));
}

#[test]
fn joint_wait_fails_innocence_and_visibility() {
    // On ⊢ U ∥ U: receive both questions, answer only the first — the
    // answer merges two Opponent branches and its thread to the second
    // question loses the pointer to its own.
    let right = Arena::ground_u(MAXE).par(&Arena::ground_u(MAXE), MAXE).unwrap();
    let seq = Sequent::new(Arena::empty(MAXE), right, MAX).unwrap();
    let (q0, ok0, q1) = (seq.from_right[0], seq.from_right[1], seq.from_right[2]);
    let s = build(seq, &[(q0, &[]), (q1, &[]), (ok0, &[0, 1])], &[]);
    assert!(conditions::deterministic(&s));
    assert!(!conditions::pre_innocent(&s));
    assert!(!conditions::visible(&s, CAP));
    assert!(!conditions::parallel_innocent(&s, CAP));
    assert!(!conditions::causally_wb(&s, CAP));
}

#[test]
fn internal_choice_fails_determinism() {
    // On ⊢ B: answer tt or ff by an internal coin flip.
    let seq = Sequent::new(Arena::empty(MAXE), Arena::ground_b(MAXE), MAX).unwrap();
    let (q, tt, ff) = (seq.from_right[0], seq.from_right[1], seq.from_right[2]);
    let s = build(seq, &[(q, &[]), (tt, &[0]), (ff, &[0])], &[(1, 2)]);
    assert!(!conditions::deterministic(&s));
    assert!(conditions::pre_innocent(&s));
    assert!(conditions::visible(&s, CAP));
    assert!(!conditions::parallel_innocent(&s, CAP));
}

#[test]
fn asking_without_waiting_fails_causal_bracketing() {
    // On U ∥ U ⊢ U: ask both components but answer without waiting for
    // either reply — the forked threads merge with open questions.
    let left = Arena::ground_u(MAXE).par(&Arena::ground_u(MAXE), MAXE).unwrap();
    let seq = Sequent::new(left, Arena::ground_u(MAXE), MAX).unwrap();
    let (qr, okr) = (seq.from_right[0], seq.from_right[1]);
    let (ql0, ql1) = (seq.from_left[0], seq.from_left[2]);
    let s = build(seq, &[(qr, &[]), (ql0, &[0]), (ql1, &[0]), (okr, &[1, 2])], &[]);
    assert!(conditions::parallel_innocent(&s, CAP));
    assert!(!conditions::causally_wb(&s, CAP));
}

#[test]
fn copycat_is_sequential_deterministic_and_wb() {
    let cc = copycat(&Arena::ground_u(MAXE), MAX).unwrap();
    assert!(conditions::deterministic(&cc));
    assert!(conditions::parallel_innocent(&cc, CAP));
    assert!(conditions::sequential(&cc, CAP, 16));
    assert!(conditions::causally_wb(&cc, CAP));
    assert!(conditions::well_bracketed(&cc, CAP, 16));
    assert!(conditions::complete_strategy(&cc, CAP));
    // The unfolding of a 4-chain: its 5 prefixes.
    assert_eq!(plays::unfold_nonalt(&cc, CAP, 16).len(), 5);
}

#[test]
fn eager_answer_breaks_nonalternating_bracketing() {
    // On ⊢ U ⊸ U: call the argument but answer the outer question without
    // waiting for the inner answer — a wait violation.
    let right = Arena::ground_u(MAXE).affine_arrow(&Arena::ground_u(MAXE), MAXE).unwrap();
    let seq = Sequent::new(Arena::empty(MAXE), right, MAX).unwrap();
    let (qb, okb, qa, oka) = (
        seq.from_right[0],
        seq.from_right[1],
        seq.from_right[2],
        seq.from_right[3],
    );
    let eager = build(
        seq.clone(),
        &[(qb, &[]), (qa, &[0]), (okb, &[1]), (oka, &[1])],
        &[],
    );
    let play = vec![0, 1, 2];
    assert!(plays::is_play(&eager, &play, false));
    assert!(!plays::wb_nonalternating(&eager, &play));
    assert!(!plays::wb_strategy(&eager, false, CAP, 16));

    let patient = build(
        seq,
        &[(qb, &[]), (qa, &[0]), (oka, &[1]), (okb, &[2])],
        &[],
    );
    assert!(plays::wb_strategy(&patient, false, CAP, 16));
    assert!(conditions::causally_wb(&patient, CAP));
}

#[test]
fn pviews_drop_the_other_thread() {
    let s = parallel_strategy();
    // qR · qL0 · qL1 · okL0 — the view of okL0 forgets the second thread.
    let play = vec![0, 1, 2, 3];
    assert!(plays::is_play(&s, &play, false));
    assert_eq!(plays::justifiers(&s, &play), vec![None, None, None, Some(1)]);
    assert_eq!(plays::pview(&s, &play), vec![0, 1, 3]);
    // The full interleaving is P-visible and complete.
    let full = vec![0, 1, 2, 3, 4, 5];
    assert!(plays::p_visible(&s, &full));
    assert!(plays::complete(&s, &full));
    assert!(!plays::complete(&s, &vec![0, 1]));
}

/// The game ⊢ ((U ⊸ U) ⊸ U) ⊸ U, deep enough for view escapes.
fn nested_seq() -> Sequent {
    let u = || Arena::ground_u(MAXE);
    let a1 = u().affine_arrow(&u(), MAXE).unwrap();
    let a2 = a1.affine_arrow(&u(), MAXE).unwrap();
    let a3 = a2.affine_arrow(&u(), MAXE).unwrap();
    Sequent::new(Arena::empty(MAXE), a3, MAX).unwrap()
}

#[test]
fn pvisibility_fails_when_an_answer_escapes_the_view() {
    let seq = nested_seq();
    // Events by depth: q0⁻ ok0⁺ | q1⁺ ok1⁻ | q2⁻ ok2⁺ | q3⁺ ok3⁻.
    let g: Vec<EventId> = (0..8).map(|i| seq.from_right[i]).collect();
    let pols: Vec<Polarity> = g.iter().map(|&e| seq.game.pol(e)).collect();
    assert_eq!(
        pols,
        vec![
            Polarity::Neg,
            Polarity::Pos,
            Polarity::Pos,
            Polarity::Neg,
            Polarity::Neg,
            Polarity::Pos,
            Polarity::Pos,
            Polarity::Neg
        ]
    );
    // Chain q0 q1 q2 q3 ok1 ok2: after Opponent closes q1, Player's answer
    // to q2 points outside the P-view.
    let s = build(
        seq,
        &[
            (g[0], &[]),
            (g[2], &[0]),
            (g[4], &[1]),
            (g[6], &[2]),
            (g[3], &[3]),
            (g[5], &[4]),
        ],
        &[],
    );
    let play: Vec<usize> = (0..6).collect();
    assert!(plays::is_play(&s, &play, true));
    assert!(!plays::p_visible(&s, &play));
    // The same play also breaks alternating bracketing: ok1 ignores the
    // pending q3.
    assert!(!plays::wb_alternating(&s, &play));
}

#[test]
fn nested_copycat_play_is_visible_and_bracketed() {
    let seq = nested_seq();
    let g: Vec<EventId> = (0..8).map(|i| seq.from_right[i]).collect();
    // The innermost-out closure q0 q1 q2 q3 ok3 ok2 ok1 ok0.
    let s = build(
        seq,
        &[
            (g[0], &[]),
            (g[2], &[0]),
            (g[4], &[1]),
            (g[6], &[2]),
            (g[7], &[3]),
            (g[5], &[4]),
            (g[3], &[5]),
            (g[1], &[6]),
        ],
        &[],
    );
    let play: Vec<usize> = (0..8).collect();
    assert!(plays::is_play(&s, &play, true));
    assert!(plays::p_visible(&s, &play));
    assert!(plays::wb_alternating(&s, &play));
    assert!(plays::wb_nonalternating(&s, &play));
    assert!(plays::complete(&s, &play));
    assert!(!plays::complete(&s, &play[..4].to_vec()));
}

#[test]
fn pruning_discards_the_incompletable_branch() {
    // On U ⊢ B: either interrogate the argument and get stuck, or answer tt.
    let seq = Sequent::new(Arena::ground_u(MAXE), Arena::ground_b(MAXE), MAX).unwrap();
    let (qr, tt) = (seq.from_right[0], seq.from_right[1]);
    let (ql, okl) = (seq.from_left[0], seq.from_left[1]);
    let s = build(
        seq.clone(),
        &[(qr, &[]), (ql, &[0]), (okl, &[1]), (tt, &[0])],
        &[(1, 3)],
    );
    assert!(!conditions::complete_strategy(&s, CAP));
    let pruned = conditions::wb_prune(&s, CAP);
    assert!(conditions::complete_strategy(&pruned, CAP));
    let expected = build(seq, &[(qr, &[]), (tt, &[0])], &[]);
    assert!(positive_iso(&pruned, &expected));
    assert!(!positive_iso(&pruned, &s));
}

/// The strategy answering the unit question, on ⊢ U.
fn skip_strategy() -> Strategy {
    let seq = Sequent::new(Arena::empty(MAXE), Arena::ground_u(MAXE), MAX).unwrap();
    let (q, ok) = (seq.from_right[0], seq.from_right[1]);
    build(seq, &[(q, &[]), (ok, &[0])], &[])
}

#[test]
fn meager_form_of_promoted_skip() {
    let p = promotion(&skip_strategy(), 2, MAX).unwrap();
    let rf = conditions::meager_form(&p);
    assert_eq!(rf.es.len(), 2);
    assert_eq!(conditions::meager_size(&p), 1);
    let back = conditions::expand(&rf, MAX).unwrap();
    assert!(positive_iso(&back, &p));
}

#[test]
fn meager_form_of_replicated_copycat_roundtrips() {
    let bang = Arena::ground_u(MAXE).bang(2, MAXE).unwrap();
    let cc = copycat(&bang, MAX).unwrap();
    let rf = conditions::meager_form(&cc);
    assert_eq!(rf.es.len(), 4);
    let back = conditions::expand(&rf, MAX).unwrap();
    assert!(positive_iso(&back, &cc));
    // Unreplicated games are their own meager form.
    let ccb = copycat(&Arena::ground_b(MAXE), MAX).unwrap();
    let rfb = conditions::meager_form(&ccb);
    assert_eq!(rfb.es.len(), ccb.es.len());
    assert!(positive_iso(&conditions::expand(&rfb, MAX).unwrap(), &ccb));
}

#[test]
fn meager_form_is_lossy_outside_the_bracketed_fragment() {
    // On ⊢ !U: answer copy 0 only after copy 1 was also opened. The meager
    // form cannot see the cross-copy dependency and forgets the answer.
    let bang = Arena::ground_u(MAXE).bang(2, MAXE).unwrap();
    let seq = Sequent::new(Arena::empty(MAXE), bang, MAX).unwrap();
    let q0 = seq.game.event_at(0, &[0]).unwrap();
    let q1 = seq.game.event_at(0, &[1]).unwrap();
    let ok0 = seq.game.event_at(1, &[0]).unwrap();
    let s = build(seq, &[(q0, &[]), (q1, &[]), (ok0, &[0, 1])], &[]);
    let rf = conditions::meager_form(&s);
    assert_eq!(rf.es.len(), 1);
    let back = conditions::expand(&rf, MAX).unwrap();
    assert!(!positive_iso(&back, &s));
}
