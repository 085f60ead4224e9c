// SPDX-License-Identifier: Apache-2.0

//! Oracle and property tests for event structures and arenas.

use cgames_core::arena::{interpret_type, Arena, Budget, Flavor, Ty};
use cgames_core::es::{BitSet, EsBuilder, EventStructure, Polarity, QA};
use proptest::prelude::*;

fn budget() -> Budget {
    Budget::default()
}

// ------------------------------------------------------------------ es basics

fn chain(n: usize) -> EventStructure {
    let mut b = EsBuilder::new();
    let mut prev = None;
    for i in 0..n {
        let pol = if i % 2 == 0 { Polarity::Neg } else { Polarity::Pos };
        let e = b.event(format!("e{i}"), pol, None);
        if let Some(p) = prev {
            b.edge(p, e);
        }
        prev = Some(e);
    }
    b.build().unwrap()
}

#[test]
fn chain_configurations_count() {
    // A causal chain of n events has exactly n+1 configurations (its prefixes).
    for n in 0..6 {
        let es = chain(n);
        assert_eq!(es.configurations(usize::MAX).len(), n + 1);
    }
}

#[test]
fn conflict_inheritance() {
    // a -> b, a' with a # a' must give b # a' by inheritance.
    let mut bld = EsBuilder::new();
    let a = bld.event("a", Polarity::Neg, None);
    let b = bld.event("b", Polarity::Pos, None);
    let a2 = bld.event("a2", Polarity::Neg, None);
    bld.edge(a, b);
    bld.conflict(a, a2);
    let es = bld.build().unwrap();
    assert!(es.conflicts(b, a2));
    assert!(es.is_minimal_conflict(a, a2));
    assert!(!es.is_minimal_conflict(b, a2));
    // Configurations: {}, {a}, {a2}, {a,b} — 4 total.
    assert_eq!(es.configurations(usize::MAX).len(), 4);
}

#[test]
fn cycle_detected() {
    let mut b = EsBuilder::new();
    let x = b.event("x", Polarity::Neg, None);
    let y = b.event("y", Polarity::Pos, None);
    b.edge(x, y);
    b.edge(y, x);
    assert!(b.build().is_err());
}

#[test]
fn product_independent_diamond() {
    // Two independent events in parallel: 4 configurations of the compound.
    let single = chain(1);
    let (par, _, _) = single.parallel(&single);
    assert_eq!(par.configurations(usize::MAX).len(), 4);
    // Product places the minimal events in conflict: 3 configurations.
    let (prod, _, _) = single.product(&single);
    assert_eq!(prod.configurations(usize::MAX).len(), 3);
}

#[test]
fn dual_flips_polarity() {
    let es = chain(2);
    let d = es.dual();
    assert_eq!(d.pol(0), Polarity::Pos);
    assert_eq!(d.pol(1), Polarity::Neg);
    assert!(d.le(0, 1));
}

#[test]
fn residual_of_configuration() {
    let mut b = EsBuilder::new();
    let a = b.event("a", Polarity::Neg, None);
    let c = b.event("c", Polarity::Pos, None);
    let d = b.event("d", Polarity::Neg, None);
    b.edge(a, c);
    b.conflict(c, d);
    let es = b.build().unwrap();
    let x = BitSet::from_iter(es.len(), [a]);
    let (rem, map) = es.residual(&x).unwrap();
    // After {a}: c is minimal, d still available and in conflict with c.
    assert_eq!(rem.len(), 2);
    let (nc, nd) = (map[c].unwrap(), map[d].unwrap());
    assert!(rem.conflicts(nc, nd));
    // Residual of a non-configuration is rejected.
    let bad = BitSet::from_iter(es.len(), [c]);
    assert!(es.residual(&bad).is_err());
}

#[test]
fn json_round_trip() {
    let es = chain(3);
    let v = es.to_json();
    let back = EventStructure::from_json(&v).unwrap();
    assert_eq!(back.len(), es.len());
    for e in es.events() {
        assert_eq!(back.label(e), es.label(e));
        assert_eq!(back.pol(e), es.pol(e));
    }
    assert_eq!(back.to_json(), v);
}

#[test]
fn dot_output_shape() {
    let es = chain(2);
    let dot = es.to_dot("chain");
    assert!(dot.contains("digraph"));
    assert!(dot.contains("->"));
}

// -------------------------------------------------------------- es properties

proptest! {
    #[test]
    fn prop_configurations_are_down_closed_consistent(
        edges in proptest::collection::vec((0usize..7, 0usize..7), 0..10),
        conflicts in proptest::collection::vec((0usize..7, 0usize..7), 0..5),
    ) {
        let mut b = EsBuilder::new();
        for i in 0..7 {
            b.event(format!("e{i}"), if i % 2 == 0 { Polarity::Neg } else { Polarity::Pos }, None);
        }
        for (x, y) in edges {
            if x < y { b.edge(x, y); } // keep it acyclic
        }
        for (x, y) in conflicts {
            if x != y { b.conflict(x, y); }
        }
        // A conflict between causally ordered events makes some event
        // self-conflicting after inheritance; the builder rejects that.
        let es = match b.build() {
            Ok(es) => es,
            Err(cgames_core::es::EsError::SelfConflict(_)) => return Ok(()),
            Err(e) => panic!("unexpected build error: {e}"),
        };
        es.validate().unwrap();
        let configs = es.configurations(usize::MAX);
        for x in &configs {
            prop_assert!(es.is_configuration(x));
        }
        // Every configuration except the empty one covers another one.
        for x in &configs {
            if !x.is_empty() {
                let found = configs.iter().any(|y| es.covering(y, x).is_some());
                prop_assert!(found);
            }
        }
    }
}

// --------------------------------------------------------------- arena oracles

#[test]
fn ground_arena_sizes() {
    let b = budget();
    assert_eq!(Arena::ground_u(b.max_events).es.len(), 2);
    assert_eq!(Arena::ground_b(b.max_events).es.len(), 3);
    assert_eq!(Arena::ground_n(&b).es.len(), 2 + b.nat_max);
    // ref = (&_{n<=nat_max} U) & N: per value a write question and ok,
    // plus read and its answers.
    assert_eq!(Arena::ref_arena(&b).es.len(), 2 * (b.nat_max + 1) + 2 + b.nat_max);
    assert_eq!(Arena::sem_arena(&b).es.len(), 4);
    for a in [
        Arena::ground_u(b.max_events),
        Arena::ground_b(b.max_events),
        Arena::ground_n(&b),
        Arena::ref_arena(&b),
        Arena::sem_arena(&b),
    ] {
        a.validate().unwrap();
        assert!(a.negative);
    }
}

#[test]
fn bool_answers_conflict() {
    let b = Arena::ground_b(budget().max_events);
    let configs = b.es.configurations(usize::MAX);
    // {}, {q}, {q,tt}, {q,ff}
    assert_eq!(configs.len(), 4);
}

#[test]
fn ref_arena_components_conflict() {
    let b = budget();
    let r = Arena::ref_arena(&b);
    let mins = r.es.minimal();
    assert_eq!(mins.len(), b.nat_max + 2);
    for &x in &mins {
        for &y in &mins {
            assert_eq!(x != y, r.es.conflicts(x, y));
        }
    }
}

#[test]
fn arrow_type_event_counts() {
    let b = budget();
    let w = b.bang_width;
    // U -> U is !U -o U: the U codomain plus w copies of the dualized U.
    let a = interpret_type(&Ty::Arrow(Box::new(Ty::Unit), Box::new(Ty::Unit)), &b).unwrap();
    assert_eq!(a.es.len(), 2 + 2 * w);
    a.validate().unwrap();
    // (U -> U) -> U adds a layer: 2 + w * (2 + 2w).
    let ty2 = Ty::Arrow(
        Box::new(Ty::Arrow(Box::new(Ty::Unit), Box::new(Ty::Unit))),
        Box::new(Ty::Unit),
    );
    let a2 = interpret_type(&ty2, &b).unwrap();
    assert_eq!(a2.es.len(), 2 + w * (2 + 2 * w));
    a2.validate().unwrap();
    assert!(a2.negative && a2.is_pointed());
}

#[test]
fn bang_shares_one_layer_across_roots() {
    let b = budget();
    // !(U & U): within a copy the two sides conflict; across copies they do not.
    let u = Arena::ground_u(b.max_events);
    let uu = u.product(&u, b.max_events).unwrap();
    let banged = uu.bang(2, b.max_events).unwrap();
    banged.validate().unwrap();
    assert_eq!(banged.es.len(), 8);
    let q_left: Vec<_> = banged
        .es
        .events()
        .filter(|&e| banged.lbl(e) == "q" && banged.es.preds(e).is_empty())
        .collect();
    assert_eq!(q_left.len(), 4);
    for &x in &q_left {
        for &y in &q_left {
            if x == y {
                continue;
            }
            let same_copy = banged.indices_of(x) == banged.indices_of(y);
            let same_node = banged.node_of(x) == banged.node_of(y);
            // Conflict exactly between the two sides of the same copy.
            assert_eq!(banged.es.conflicts(x, y), same_copy && !same_node, "{x} vs {y}");
        }
    }
}

#[test]
fn bang_symmetry_flavors() {
    let b = budget();
    let bu = Arena::ground_u(b.max_events).bang(2, b.max_events).unwrap();
    // Events: q[0], ok[0], q[1], ok[1].
    let q0 = bu.es.events().find(|&e| bu.lbl(e) == "q" && bu.indices_of(e) == [0]).unwrap();
    let q1 = bu.es.events().find(|&e| bu.lbl(e) == "q" && bu.indices_of(e) == [1]).unwrap();
    let ok0 = bu.es.succ(q0)[0];
    let ok1 = bu.es.succ(q1)[0];
    // Swapping the two copies is a full symmetry.
    let swap = vec![(q0, q1), (q1, q0), (ok0, ok1), (ok1, ok0)];
    assert!(bu.symmetry_member(&swap, Flavor::Full));
    // The copy is opened by the negative question, so the swap moves
    // negative indices: a negative-flavor member but not a positive one.
    assert!(bu.symmetry_member(&swap, Flavor::Negative));
    assert!(!bu.symmetry_member(&swap, Flavor::Positive));
    // Identity is in every flavor.
    let ident = vec![(q0, q0), (ok0, ok0)];
    for fl in [Flavor::Full, Flavor::Positive, Flavor::Negative] {
        assert!(bu.symmetry_member(&ident, fl));
    }
    // A label-breaking bijection is rejected.
    assert!(!bu.symmetry_member(&[(q0, ok0), (ok0, q0)], Flavor::Full));
    // An order-breaking one too: answers must follow their own question.
    assert!(!bu.symmetry_member(&[(q0, q0), (q1, q1), (ok0, ok1), (ok1, ok0)], Flavor::Full));
}

#[test]
fn layer_instance_consistency_rejects_copy_splitting() {
    let b = budget();
    // In !(U & U) the two sides of one copy share the layer instance; a map
    // sending them into different copies of the target is not a symmetry.
    let u = Arena::ground_u(b.max_events);
    let uu = u.product(&u, b.max_events).unwrap();
    let banged = uu.bang(3, b.max_events).unwrap();
    let find = |node_label_first: bool, ix: u32| {
        banged
            .es
            .events()
            .find(|&e| {
                banged.lbl(e) == "q"
                    && banged.indices_of(e) == [ix]
                    && ((banged.node_of(e) == 0) == node_label_first)
            })
            .unwrap()
    };
    let (qa0, qb1) = (find(true, 0), find(false, 1));
    let (qa1, qb2) = (find(true, 1), find(false, 2));
    // {qa@0, qb@1} and {qa@1, qb@2} are both configurations; mapping
    // componentwise is a full symmetry.
    let theta = vec![(qa0, qa1), (qb1, qb2)];
    assert!(banged.symmetry_member(&theta, Flavor::Full));
    // Mapping qa@0 to qa@1 but qb@1 to qb@1 keeps both targets consistent
    // but breaks nothing either: {qa@1, qb@1}? That pair conflicts, so the
    // target is not a configuration — rejected.
    let bad = vec![(qa0, qa1), (qb1, find(false, 1))];
    assert!(!banged.symmetry_member(&bad, Flavor::Full));
}

#[test]
fn positive_factorization_round_trip() {
    let b = budget();
    let bu = Arena::ground_u(b.max_events).bang(2, b.max_events).unwrap();
    let q0 = bu.es.events().find(|&e| bu.lbl(e) == "q" && bu.indices_of(e) == [0]).unwrap();
    let q1 = bu.es.events().find(|&e| bu.lbl(e) == "q" && bu.indices_of(e) == [1]).unwrap();
    let ok0 = bu.es.succ(q0)[0];
    let ok1 = bu.es.succ(q1)[0];
    let swap = vec![(q0, q1), (q1, q0), (ok0, ok1), (ok1, ok0)];
    let (neg, pos) = bu.positive_factor(&swap).unwrap();
    assert!(bu.symmetry_member(&neg, Flavor::Negative));
    assert!(bu.symmetry_member(&pos, Flavor::Positive));
    // The two factors compose back to the original map.
    let mid: std::collections::HashMap<_, _> = neg.iter().copied().collect();
    let top: std::collections::HashMap<_, _> = pos.iter().copied().collect();
    for &(e, f) in &swap {
        assert_eq!(top[&mid[&e]], f);
    }
}

#[test]
fn general_arrow_cross_copy_conflicts() {
    let b = budget();
    // U -o (U || U): the domain question is copied under each codomain
    // question; the two copies share their minimal ancestor, hence conflict.
    let u = Arena::ground_u(b.max_events);
    let upar = u.par(&u, b.max_events).unwrap();
    let arr = u.arrow(&upar, b.max_events).unwrap();
    arr.validate().unwrap();
    assert_eq!(arr.es.len(), 8);
    let domain_qs: Vec<_> = arr
        .es
        .events()
        .filter(|&e| arr.lbl(e) == "q" && arr.pol(e) == Polarity::Pos)
        .collect();
    assert_eq!(domain_qs.len(), 2);
    assert!(arr.es.conflicts(domain_qs[0], domain_qs[1]));
    // U -o (U & U): conflict across copies comes by inheritance instead.
    let uand = u.product(&u, b.max_events).unwrap();
    let arr2 = u.arrow(&uand, b.max_events).unwrap();
    arr2.validate().unwrap();
    let domain_qs2: Vec<_> = arr2
        .es
        .events()
        .filter(|&e| arr2.lbl(e) == "q" && arr2.pol(e) == Polarity::Pos)
        .collect();
    assert!(arr2.es.conflicts(domain_qs2[0], domain_qs2[1]));
}

#[test]
fn validator_rejects_races_and_shape_violations() {
    use cgames_core::arena::MeagerArena;
    // A race: minimal conflict between events of opposite polarity.
    let mut m = MeagerArena::default();
    m.nodes.push(cgames_core::arena::MeagerNode {
        label: "x".into(),
        pol: Polarity::Neg,
        qa: QA::Question,
        parent: None,
        children: vec![],
        own_layers: vec![],
        side: cgames_core::arena::Side::Sole,
    });
    m.nodes.push(cgames_core::arena::MeagerNode {
        label: "y".into(),
        pol: Polarity::Pos,
        qa: QA::Question,
        parent: None,
        children: vec![],
        own_layers: vec![],
        side: cgames_core::arena::Side::Sole,
    });
    m.roots = vec![0, 1];
    m.min_conflicts.push((0, 1));
    let arena = Arena::from_meager(m, 100).unwrap();
    assert!(arena.validate().is_err());
}

#[test]
fn budget_caps_materialization() {
    let b = budget();
    let u = Arena::ground_u(b.max_events);
    assert!(matches!(
        u.bang(100, 10),
        Err(cgames_core::arena::ArenaError::Budget(..))
    ));
}

#[test]
fn type_display_round() {
    let ty = Ty::Arrow(
        Box::new(Ty::Arrow(Box::new(Ty::Nat), Box::new(Ty::Bool))),
        Box::new(Ty::Unit),
    );
    assert_eq!(ty.to_string(), "(N -> B) -> U");
}
