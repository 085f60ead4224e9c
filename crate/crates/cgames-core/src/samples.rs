// SPDX-License-Identifier: Apache-2.0

//! Hand-built reference strategies used by the gallery, the comparison
//! examples and the test suites: the sequential/parallel evaluation pair on
//! `𝕌⊸𝕌⊸𝕌`, and the function testers whose composition with the strict
//! identity either answers or deadlocks.

use crate::arena::{Arena, Budget};
use crate::es::{EsBuilder, EventId};
use crate::strategy::{Sequent, Strategy, StrategyError};

/// Build a strategy over `seq` from (game event, predecessors) rows; the
/// strategy event ids are the row indices.
pub fn strategy_from_rows(
    seq: Sequent,
    rows: &[(EventId, &[usize])],
) -> Result<Strategy, StrategyError> {
    let mut b = EsBuilder::new();
    for (i, (g, preds)) in rows.iter().enumerate() {
        b.event(format!("e{i}"), seq.game.pol(*g), Some(seq.game.qa(*g)));
        for &p in *preds {
            b.edge(p, i);
        }
    }
    let display = rows.iter().map(|&(g, _)| g).collect();
    Strategy::from_parts(seq, b.build()?, display)
}

/// The affine arena `𝕌 ⊸ 𝕌 ⊸ 𝕌`. Nodes: 0 = result question, 1 = result
/// answer, 2/3 = second argument, 4/5 = first argument.
pub fn two_arg_arena(max_events: usize) -> Result<Arena, StrategyError> {
    let u = Arena::ground_u(max_events);
    let inner = u.affine_arrow(&u, max_events)?;
    Ok(u.affine_arrow(&inner, max_events)?)
}

fn two_arg_events(seq: &Sequent) -> [EventId; 6] {
    let a = &seq.right;
    [0, 1, 2, 3, 4, 5].map(|n| seq.from_right[a.event_at(n, &[]).unwrap()])
}

/// Run both arguments in sequence, then answer.
pub fn sequential_eval(max_events: usize) -> Result<Strategy, StrategyError> {
    let seq = Sequent::new(Arena::empty(max_events), two_arg_arena(max_events)?, max_events)?;
    let [q, ok, q2, ok2, q1, ok1] = two_arg_events(&seq);
    strategy_from_rows(
        seq,
        &[(q, &[]), (q1, &[0]), (ok1, &[1]), (q2, &[2]), (ok2, &[3]), (ok, &[4])],
    )
}

/// Run both arguments in parallel, answer once both have.
pub fn parallel_eval(max_events: usize) -> Result<Strategy, StrategyError> {
    let seq = Sequent::new(Arena::empty(max_events), two_arg_arena(max_events)?, max_events)?;
    let [q, ok, q2, ok2, q1, ok1] = two_arg_events(&seq);
    strategy_from_rows(
        seq,
        &[(q, &[]), (q1, &[0]), (q2, &[0]), (ok1, &[1]), (ok2, &[2]), (ok, &[3, 4])],
    )
}

/// The strict identity on `⊢ 𝕌⊸𝕌` (affine): call the argument, forward its
/// answer.
pub fn strict_identity(max_events: usize) -> Result<Strategy, StrategyError> {
    let u = Arena::ground_u(max_events);
    let b = u.affine_arrow(&u, max_events)?;
    let seq = Sequent::new(Arena::empty(max_events), b.clone(), max_events)?;
    let ev = |n: usize| seq.from_right[b.event_at(n, &[]).unwrap()];
    let (q, ok, qd, okd) = (ev(0), ev(1), ev(2), ev(3));
    strategy_from_rows(seq, &[(q, &[]), (qd, &[0]), (okd, &[1]), (ok, &[2])])
}

/// A tester `fun ⊢ ℕ` for a function arena (codomain nodes 0/1, domain
/// question/answer at nodes 2/3 replicated over `width` copies): call the
/// function, then either answer its argument queries immediately and report
/// `1` once it returns (`secured`), or withhold every argument answer until
/// the function has returned and report `0` — which deadlocks against any
/// strict function.
pub fn function_tester(
    fun: &Arena,
    width: usize,
    secured: bool,
    budget: &Budget,
) -> Result<Strategy, StrategyError> {
    let max = budget.max_events;
    let n = Arena::ground_n(budget);
    let seq = Sequent::new(fun.clone(), n.clone(), max)?;
    let nq = seq.from_right[n.event_at(0, &[]).unwrap()];
    let value = if secured { 1 } else { 0 };
    let nv = seq.from_right[n.event_at(1 + value, &[]).unwrap()];
    let lq = seq.from_left[fun.event_at(0, &[]).unwrap()];
    let lok = seq.from_left[fun.event_at(1, &[]).unwrap()];
    let mut rows: Vec<(EventId, Vec<usize>)> = vec![(nq, vec![]), (lq, vec![0])];
    let ret = rows.len();
    rows.push((lok, vec![1]));
    for c in 0..width {
        let dq = seq.from_left[fun.event_at(2, &[c as u32]).unwrap()];
        let dok = seq.from_left[fun.event_at(3, &[c as u32]).unwrap()];
        rows.push((dq, vec![1]));
        let dq_row = rows.len() - 1;
        let mut preds = vec![dq_row];
        if !secured {
            preds.push(ret);
        }
        rows.push((dok, preds));
    }
    rows.push((nv, vec![ret]));
    let borrowed: Vec<(EventId, &[usize])> =
        rows.iter().map(|(g, p)| (*g, p.as_slice())).collect();
    strategy_from_rows(seq, &borrowed)
}

/// The strategy on `⊢ ℕ` answering a single value, and the one never
/// answering: expected composites of the two testers with the identity.
pub fn nat_answer(value: Option<usize>, budget: &Budget) -> Result<Strategy, StrategyError> {
    let max = budget.max_events;
    let n = Arena::ground_n(budget);
    let seq = Sequent::new(Arena::empty(max), n.clone(), max)?;
    let q = seq.from_right[n.event_at(0, &[]).unwrap()];
    match value {
        Some(v) => {
            let a = seq.from_right[n.event_at(1 + v, &[]).unwrap()];
            strategy_from_rows(seq, &[(q, &[]), (a, &[0])])
        }
        None => strategy_from_rows(seq, &[(q, &[])]),
    }
}
