// SPDX-License-Identifier: Apache-2.0

//! Oracle tests for strategies: copycat, interaction, composition, and the
//! replication combinators.

use cgames_core::arena::{Arena, Budget};
use cgames_core::es::{EsBuilder, Polarity, QA};
use cgames_core::strategy::{
    compose, copycat, der, dig, interact, mon, pairing, positive_iso, promotion, tensor,
    Sequent, Strategy, ValidationLevel,
};

fn budget() -> Budget {
    Budget::default()
}

const MAX: usize = 100_000;

/// The strategy answering the unit question immediately: `⊢ U`.
fn skip_strategy() -> Strategy {
    let b = budget();
    let seq = Sequent::new(Arena::empty(b.max_events), Arena::ground_u(b.max_events), MAX).unwrap();
    let mut eb = EsBuilder::new();
    let q = eb.event("q", Polarity::Neg, Some(QA::Question));
    let a = eb.event("ok", Polarity::Pos, Some(QA::Answer));
    eb.edge(q, a);
    let es = eb.build().unwrap();
    let display = vec![seq.from_right[0], seq.from_right[1]];
    Strategy::from_parts(seq, es, display).unwrap()
}

/// The divergent strategy on `⊢ U`: receives the question, never answers.
fn bot_strategy() -> Strategy {
    let b = budget();
    let seq = Sequent::new(Arena::empty(b.max_events), Arena::ground_u(b.max_events), MAX).unwrap();
    let mut eb = EsBuilder::new();
    eb.event("q", Polarity::Neg, Some(QA::Question));
    let es = eb.build().unwrap();
    let display = vec![seq.from_right[0]];
    Strategy::from_parts(seq, es, display).unwrap()
}

#[test]
fn copycat_on_unit_validates() {
    let b = budget();
    let cc = copycat(&Arena::ground_u(b.max_events), MAX).unwrap();
    assert_eq!(cc.es.len(), 4);
    cc.validate(ValidationLevel::full()).unwrap();
    // Unique minimal event: the right-hand question.
    let mins = cc.es.minimal();
    assert_eq!(mins.len(), 1);
    assert_eq!(cc.pol(mins[0]), Polarity::Neg);
}

#[test]
fn copycat_on_bool_keeps_answer_conflict() {
    let b = budget();
    let cc = copycat(&Arena::ground_b(b.max_events), MAX).unwrap();
    assert_eq!(cc.es.len(), 6);
    cc.validate(ValidationLevel::strategy()).unwrap();
    // The two left-side answers remain in conflict.
    let configs = cc.es.configurations(usize::MAX);
    // {}, {qR}, {qR,qL}, {.. ttL}, {.. ffL}, {.. ttL ttR}, {.. ffL ffR}: 7.
    assert_eq!(configs.len(), 7);
}

#[test]
fn skip_and_bot_validate() {
    skip_strategy().validate(ValidationLevel::full()).unwrap();
    bot_strategy().validate(ValidationLevel::full()).unwrap();
}

#[test]
fn interaction_of_skip_with_copycat() {
    let b = budget();
    let skip = skip_strategy();
    let cc = copycat(&Arena::ground_u(b.max_events), MAX).unwrap();
    let inter = interact(&skip, &cc, MAX).unwrap();
    // Moves: qC (τ alone), then q-sync, ok-sync, then okC: a 4-chain; states
    // are its 5 prefixes.
    assert_eq!(inter.states.len(), 5);
    assert_eq!(inter.primes.len(), 4);
}

#[test]
fn copycat_neutrality_on_unit() {
    let b = budget();
    let skip = skip_strategy();
    let cc = copycat(&Arena::ground_u(b.max_events), MAX).unwrap();
    let comp = compose(&skip, &cc, MAX).unwrap();
    comp.validate(ValidationLevel::strategy()).unwrap();
    assert!(positive_iso(&comp, &skip));
    assert!(!positive_iso(&comp, &bot_strategy()));
}

#[test]
fn bot_composition_deadlocks_the_answer() {
    let b = budget();
    // bot ⊙ cc: still diverges — only the question appears.
    let bot = bot_strategy();
    let cc = copycat(&Arena::ground_u(b.max_events), MAX).unwrap();
    let comp = compose(&bot, &cc, MAX).unwrap();
    assert!(positive_iso(&comp, &bot));
}

#[test]
fn copycat_composes_to_copycat() {
    let b = budget();
    for arena in [Arena::ground_u(b.max_events), Arena::ground_b(b.max_events)] {
        let cc = copycat(&arena, MAX).unwrap();
        let comp = compose(&cc, &cc, MAX).unwrap();
        comp.validate(ValidationLevel::strategy()).unwrap();
        assert!(positive_iso(&comp, &cc));
    }
}

#[test]
fn tensor_of_skips() {
    let t = tensor(&skip_strategy(), &skip_strategy(), MAX).unwrap();
    t.validate(ValidationLevel::strategy()).unwrap();
    assert_eq!(t.es.len(), 4);
    // The two answers are causally independent.
    let mins = t.es.minimal();
    assert_eq!(mins.len(), 2);
}

#[test]
fn pairing_of_skip_and_bot() {
    let p = pairing(&skip_strategy(), &bot_strategy(), MAX).unwrap();
    p.validate(ValidationLevel::strategy()).unwrap();
    assert_eq!(p.es.len(), 3);
    // The two initial questions are in conflict (the game is U & U).
    let mins = p.es.minimal();
    assert_eq!(mins.len(), 2);
    assert!(p.es.conflicts(mins[0], mins[1]));
}

#[test]
fn promotion_replicates_disjointly() {
    let w = 2;
    let p = promotion(&skip_strategy(), w, MAX).unwrap();
    p.validate(ValidationLevel::strategy()).unwrap();
    assert_eq!(p.es.len(), 2 * w);
    // No causal links or conflicts across copies.
    let mins = p.es.minimal();
    assert_eq!(mins.len(), w);
    assert!(!p.es.conflicts(mins[0], mins[1]));
}

#[test]
fn dereliction_after_promotion_is_identity() {
    let b = budget();
    let w = b.bang_width;
    let skip = skip_strategy();
    let promoted = promotion(&skip, w, MAX).unwrap();
    let d = der(&Arena::ground_u(b.max_events), w, MAX).unwrap();
    let comp = compose(&promoted, &d, MAX).unwrap();
    comp.validate(ValidationLevel::strategy()).unwrap();
    assert!(positive_iso(&comp, &skip));
}

#[test]
fn dig_and_mon_validate_as_strategies() {
    let b = budget();
    let u = Arena::ground_u(b.max_events);
    let d = dig(&u, 2, MAX).unwrap();
    d.validate(ValidationLevel::strategy()).unwrap();
    assert_eq!(d.es.len(), 2 * (2 * 2 * 2)); // two events per !!U event
    let m = mon(&u, &Arena::ground_b(b.max_events), 2, MAX).unwrap();
    m.validate(ValidationLevel::strategy()).unwrap();
}

#[test]
fn composition_is_associative_on_copycats() {
    let b = budget();
    let u = Arena::ground_u(b.max_events);
    let cc = copycat(&u, MAX).unwrap();
    let skip = skip_strategy();
    let left = compose(&compose(&skip, &cc, MAX).unwrap(), &cc, MAX).unwrap();
    let right = compose(&skip, &compose(&cc, &cc, MAX).unwrap(), MAX).unwrap();
    assert!(positive_iso(&left, &right));
}
