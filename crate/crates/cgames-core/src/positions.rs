// SPDX-License-Identifier: Apache-2.0

//! Positions: canonical symmetry classes of complete configurations, the
//! positional collapse of a strategy as a relation, relational composition,
//! and the deadlock-free property as an executable check.
//!
//! A *position* is the canonical form of a complete configuration of a
//! concrete arena: a forest of (meager label, multiset of canonical
//! subtrees) with copy indices erased. Canonical forms are serialized as
//! sorted nested strings, so equality of positions is string equality; two
//! configurations canonicalize identically exactly when they are related by
//! a label-preserving forest isomorphism, i.e. an arena symmetry.

use std::collections::BTreeSet;

use crate::arena::Arena;
use crate::conditions::is_complete_config;
use crate::es::{BitSet, EventId, Polarity, QA};
use crate::plays::{is_play, wb_nonalternating, Play};
use crate::strategy::{compose, Strategy, StrategyError};

#[derive(Debug, thiserror::Error)]
pub enum PositionsError {
    #[error("set is not a configuration of the arena")]
    NotConfiguration,
    #[error("configuration is not complete: question {0} is unanswered")]
    Incomplete(EventId),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Canonical string form of a complete configuration.
pub type Position = String;

/// The positional collapse of a strategy on `A ⊢ B`: a set of pairs of
/// positions of `A` and `B`.
pub type Relation = BTreeSet<(Position, Position)>;

// -------------------------------------------------------- canonical forms

fn serialize(a: &Arena, e: EventId, children: &[Vec<EventId>]) -> String {
    // Configurations are shallow (arena depth), so recursion is safe.
    let mut subs: Vec<String> =
        children[e].iter().map(|&c| serialize(a, c, children)).collect();
    subs.sort();
    if subs.is_empty() {
        a.lbl(e).to_string()
    } else {
        format!("{}({})", a.lbl(e), subs.join(","))
    }
}

fn forest(a: &Arena, x: &BitSet) -> (Vec<EventId>, Vec<Vec<EventId>>) {
    let mut roots = Vec::new();
    let mut children = vec![Vec::new(); a.es.len()];
    for e in x.iter() {
        match a.parent(e) {
            Some(p) => children[p].push(e),
            None => roots.push(e),
        }
    }
    (roots, children)
}

/// Is every question of `x` answered within `x`?
pub fn is_complete(a: &Arena, x: &BitSet) -> bool {
    x.iter().all(|q| {
        a.qa(q) != QA::Question
            || x.iter().any(|e| a.qa(e) == QA::Answer && a.parent(e) == Some(q))
    })
}

/// Canonicalize a complete configuration of a concrete arena.
pub fn canonicalize(a: &Arena, x: &BitSet) -> Result<Position, PositionsError> {
    if !a.es.is_configuration(x) {
        return Err(PositionsError::NotConfiguration);
    }
    if let Some(q) = x.iter().find(|&q| {
        a.qa(q) == QA::Question
            && !x.iter().any(|e| a.qa(e) == QA::Answer && a.parent(e) == Some(q))
    }) {
        return Err(PositionsError::Incomplete(q));
    }
    let (roots, children) = forest(a, x);
    let mut tops: Vec<String> = roots.iter().map(|&r| serialize(a, r, &children)).collect();
    tops.sort();
    Ok(tops.join(" "))
}

/// All positions of an arena: canonical forms of its complete
/// configurations, enumerated up to `cap` configurations.
pub fn arena_positions(a: &Arena, cap: usize) -> BTreeSet<Position> {
    a.es
        .configurations(cap)
        .iter()
        .filter(|x| is_complete(a, x))
        .map(|x| canonicalize(a, x).expect("complete configuration"))
        .collect()
}

// ------------------------------------------------------------ collapse ∫σ

/// The positional collapse of a strategy: the canonical pairs of its
/// configurations whose display is complete.
pub fn collapse(sigma: &Strategy, cap: usize) -> Result<Relation, PositionsError> {
    let seq = &sigma.seq;
    let mut rel = Relation::new();
    for x in sigma.configurations(cap) {
        if !is_complete_config(sigma, &x) {
            continue;
        }
        let mut xl = BitSet::new(seq.left.es.len());
        let mut xr = BitSet::new(seq.right.es.len());
        for e in x.iter() {
            let g = sigma.display[e];
            match seq.to_left[g] {
                Some(l) => xl.insert(l),
                None => xr.insert(seq.to_right[g].expect("right event")),
            }
        }
        rel.insert((canonicalize(&seq.left, &xl)?, canonicalize(&seq.right, &xr)?));
    }
    Ok(rel)
}

/// Do two strategies on the same sequent reach exactly the same complete
/// positions?
pub fn positionally_equivalent(
    sigma: &Strategy,
    tau: &Strategy,
    cap: usize,
) -> Result<bool, PositionsError> {
    Ok(collapse(sigma, cap)? == collapse(tau, cap)?)
}

/// Ordinary composition of relations through matching middle positions.
pub fn relational_compose(r: &Relation, s: &Relation) -> Relation {
    let mut out = Relation::new();
    for (a, b) in r {
        for (b2, c) in s {
            if b == b2 {
                out.insert((a.clone(), c.clone()));
            }
        }
    }
    out
}

/// Does the collapse commute with composition: `∫(τ⊙σ) = (∫τ)⊙(∫σ)`? Holds
/// for visible well-bracketed strategies; fails when the interaction hides
/// a causal deadlock that relational composition cannot see.
pub fn functoriality_check(
    sigma: &Strategy,
    tau: &Strategy,
    cap: usize,
    max_states: usize,
) -> Result<bool, PositionsError> {
    let comp = compose(sigma, tau, max_states)?;
    Ok(collapse(&comp, cap)? == relational_compose(&collapse(sigma, cap)?, &collapse(tau, cap)?))
}

// ------------------------------------------------------ deadlock freedom

/// All bijections between `xs` and `ys` that pair events of the same arena
/// node, capped in number.
fn node_matchings(
    b: &Arena,
    xs: &[EventId],
    ys: &[EventId],
    cap: usize,
) -> Vec<Vec<(EventId, EventId)>> {
    if xs.len() != ys.len() {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for &x in xs {
        let mut next = Vec::new();
        for m in &out {
            for &y in ys {
                if b.node_of(y) == b.node_of(x) && !m.iter().any(|&(_, y2)| y2 == y) {
                    let mut m2 = m.clone();
                    m2.push((x, y));
                    next.push(m2);
                }
            }
            if next.len() > cap {
                return next;
            }
        }
        out = next;
    }
    out
}

/// Is the merged causal order of a matching pair acyclic? Vertices are the
/// events of both configurations with θ-paired middle events merged; edges
/// are the two strategies' immediate causal dependencies.
fn secured(
    sigma: &Strategy,
    tau: &Strategy,
    xs: &BitSet,
    xt: &BitSet,
    theta: &[(EventId, EventId)],
    mid_s: &[(usize, EventId)],
    mid_t: &[(usize, EventId)],
) -> bool {
    // Vertex per σ-event; τ-events either merge into their θ-partner's
    // vertex or get fresh ones.
    let ns = sigma.es.len();
    let nt = tau.es.len();
    let mut vert_s = vec![usize::MAX; ns];
    let mut vert_t = vec![usize::MAX; nt];
    let mut n = 0;
    for e in xs.iter() {
        vert_s[e] = n;
        n += 1;
    }
    for &(bs, bt) in theta {
        let s = mid_s.iter().find(|&&(_, x)| x == bs).expect("middle σ event").0;
        let t = mid_t.iter().find(|&&(_, x)| x == bt).expect("middle τ event").0;
        vert_t[t] = vert_s[s];
    }
    for e in xt.iter() {
        if vert_t[e] == usize::MAX {
            vert_t[e] = n;
            n += 1;
        }
    }
    let mut adj = vec![Vec::new(); n];
    for e in xs.iter() {
        for &p in sigma.es.preds(e) {
            if xs.contains(p) {
                adj[vert_s[p]].push(vert_s[e]);
            }
        }
    }
    for e in xt.iter() {
        for &p in tau.es.preds(e) {
            if xt.contains(p) {
                adj[vert_t[p]].push(vert_t[e]);
            }
        }
    }
    // Cycle detection by iterative coloring.
    let mut color = vec![0u8; n];
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        color[start] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    true
}

/// The deadlock-free property of a composable pair `σ : A ⊢ B`,
/// `τ : B ⊢ C`: every pair of configurations whose middle projections match
/// up to an arena symmetry of `B` is secured — the composite bijection's
/// causal order is acyclic. Holds whenever both strategies are visible.
pub fn deadlock_free_check(sigma: &Strategy, tau: &Strategy, cap: usize) -> bool {
    let b = &sigma.seq.right;
    for xs in sigma.configurations(cap) {
        // Middle projection of the σ-side, as (strategy event, B event).
        let mid_s: Vec<(usize, EventId)> = xs
            .iter()
            .filter_map(|e| sigma.seq.to_right[sigma.display[e]].map(|r| (e, r)))
            .collect();
        for xt in tau.configurations(cap) {
            let mid_t: Vec<(usize, EventId)> = xt
                .iter()
                .filter_map(|e| tau.seq.to_left[tau.display[e]].map(|l| (e, l)))
                .collect();
            if mid_s.len() != mid_t.len() {
                continue;
            }
            let bs: Vec<EventId> = mid_s.iter().map(|&(_, x)| x).collect();
            let bt: Vec<EventId> = mid_t.iter().map(|&(_, x)| x).collect();
            for theta in node_matchings(b, &bs, &bt, 10_000) {
                if !b.symmetry_member(&theta, crate::arena::Flavor::Full) {
                    continue;
                }
                if !secured(sigma, tau, &xs, &xt, &theta, &mid_s, &mid_t) {
                    return false;
                }
            }
        }
    }
    true
}

// --------------------------------------------------------- reach by plays

/// Search for a well-bracketed non-alternating play of `σ` whose event set
/// is exactly `x`. For visible well-bracketed strategies such a play exists
/// for every complete displayed configuration.
pub fn wb_play_reaching(sigma: &Strategy, x: &BitSet, fuel: usize) -> Option<Play> {
    let events: Vec<EventId> = x.iter().collect();
    let mut play: Play = Vec::new();
    let mut used = BitSet::new(sigma.es.len());
    let mut steps = 0usize;
    fn dfs(
        sigma: &Strategy,
        events: &[EventId],
        x: &BitSet,
        play: &mut Play,
        used: &mut BitSet,
        steps: &mut usize,
        fuel: usize,
    ) -> bool {
        if play.len() == events.len() {
            return wb_nonalternating(sigma, play);
        }
        if *steps >= fuel {
            return false;
        }
        *steps += 1;
        for &e in events {
            if used.contains(e) {
                continue;
            }
            if sigma.es.preds(e).iter().any(|&p| x.contains(p) && !used.contains(p)) {
                continue;
            }
            if play.is_empty() && sigma.pol(e) != Polarity::Neg {
                continue;
            }
            play.push(e);
            used.insert(e);
            if is_play(sigma, play, false)
                && dfs(sigma, events, x, play, used, steps, fuel)
            {
                return true;
            }
            play.pop();
            used.remove(e);
        }
        false
    }
    if dfs(sigma, &events, x, &mut play, &mut used, &mut steps, fuel) {
        Some(play)
    } else {
        None
    }
}
