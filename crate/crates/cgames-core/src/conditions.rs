// SPDX-License-Identifier: Apache-2.0

//! Semantic conditions on causal strategies: determinism, innocence,
//! visibility, sequentiality, the two well-bracketing disciplines, pruning
//! to the complete part, and the meager/expanded normal forms.
//!
//! All checks are exhaustive over the (finite, budgeted) strategy and are
//! meant as executable definitions rather than efficient decision
//! procedures.

use std::collections::{BTreeMap, HashMap};

use crate::es::{BitSet, EsBuilder, EventId, Polarity, QA};
use crate::plays;
use crate::strategy::{Strategy, StrategyError};

// --------------------------------------------------------------- determinism

/// Causal determinism: every down-closed finite set of strategy events whose
/// negative part is consistent is itself consistent.
///
/// With binary conflict this reduces to pairs: a violation exists iff some
/// conflict `e # f` has no conflicting pair of *negative* events inside
/// `[e] ∪ [f]` — any larger down-closed witness contains such a pair, and
/// the pair's own down-closure is a witness.
pub fn deterministic(sigma: &Strategy) -> bool {
    for e in sigma.es.events() {
        for f in sigma.es.events() {
            if e < f && sigma.es.conflicts(e, f) {
                let mut union = sigma.es.down_set(e).clone();
                union.union_with(sigma.es.down_set(f));
                let negs: Vec<EventId> =
                    union.iter().filter(|&g| sigma.pol(g) == Polarity::Neg).collect();
                let neg_conflict = negs
                    .iter()
                    .any(|&a| negs.iter().any(|&b| a < b && sigma.es.conflicts(a, b)));
                if !neg_conflict {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------- gccs

/// All grounded causal chains: immediate-causality chains starting from a
/// minimal event. Every nonempty prefix of a chain is again one, so the
/// enumeration lists each explicitly. Capped in number.
pub fn gccs(sigma: &Strategy, cap: usize) -> Vec<Vec<EventId>> {
    let mut out: Vec<Vec<EventId>> = Vec::new();
    let mut stack: Vec<Vec<EventId>> =
        sigma.es.minimal().into_iter().map(|m| vec![m]).collect();
    while let Some(chain) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        let last = *chain.last().unwrap();
        for &s in sigma.es.succ(last) {
            let mut ext = chain.clone();
            ext.push(s);
            stack.push(ext);
        }
        out.push(chain);
    }
    out
}

/// All grounded causal chains whose last element is `m`.
fn gccs_ending_at(sigma: &Strategy, m: EventId) -> Vec<Vec<EventId>> {
    let preds = sigma.es.preds(m);
    if preds.is_empty() {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for &p in preds {
        for mut chain in gccs_ending_at(sigma, p) {
            chain.push(m);
            out.push(chain);
        }
    }
    out
}

/// Visibility: the display of every grounded causal chain is a game
/// configuration (in particular down-closed — no chain loses the pointer to
/// a move it depends on).
pub fn visible(sigma: &Strategy, cap: usize) -> bool {
    let game = &sigma.seq.game;
    for chain in gccs(sigma, cap) {
        let displayed =
            BitSet::from_iter(game.es.len(), chain.iter().map(|&e| sigma.display[e]));
        if !game.es.is_configuration(&displayed) {
            return false;
        }
    }
    true
}

/// Pre-innocence: whenever two distinct grounded causal chains merge at a
/// positive event, the earliest place they disagree is a pair of positive
/// events — Player may merge its own threads, but never two Opponent
/// branches.
pub fn pre_innocent(sigma: &Strategy) -> bool {
    for m in sigma.es.events() {
        if sigma.pol(m) != Polarity::Pos {
            continue;
        }
        let chains = gccs_ending_at(sigma, m);
        for i in 0..chains.len() {
            for j in i + 1..chains.len() {
                let (a, b) = (&chains[i], &chains[j]);
                let k = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
                // Both chains end at m, so neither is a prefix of the other.
                if sigma.pol(a[k]) != Polarity::Pos || sigma.pol(b[k]) != Polarity::Pos {
                    return false;
                }
            }
        }
    }
    true
}

/// Parallel innocence: causal determinism + pre-innocence + visibility.
pub fn parallel_innocent(sigma: &Strategy, cap: usize) -> bool {
    deterministic(sigma) && pre_innocent(sigma) && visible(sigma, cap)
}

// -------------------------------------------------------------- sequentiality

/// Sequentiality of a strategy, through its unfolding into plays:
///
/// * *reachable sequentiality*: after an alternating play, the strategy
///   never volunteers a second consecutive Player move;
/// * *sequential determinism*: after an alternating play ending negatively,
///   at most one Player move is offered;
/// * *sequential visibility*: every alternating play is P-visible.
pub fn sequential(sigma: &Strategy, max_plays: usize, max_len: usize) -> bool {
    for t in plays::unfold_alt(sigma, max_plays, max_len) {
        if !plays::p_visible(sigma, &t) {
            return false;
        }
        let x = BitSet::from_iter(sigma.es.len(), t.iter().copied());
        let offered: Vec<EventId> = sigma
            .es
            .enabled(&x)
            .into_iter()
            .filter(|&e| sigma.pol(e) == Polarity::Pos)
            .collect();
        if offered.is_empty() {
            continue;
        }
        match t.last() {
            // Plays start negatively, so the empty play offers no move.
            None => continue,
            Some(&l) => {
                // A positive extension of an alternating play must alternate.
                if sigma.pol(l) == Polarity::Pos {
                    return false;
                }
                if offered.len() > 1 {
                    return false;
                }
            }
        }
    }
    true
}

// ------------------------------------------------------- causal bracketing

/// Does `answer` answer `question` in the game (its displayed move sits
/// directly under the displayed question)?
fn answers(sigma: &Strategy, answer: EventId, question: EventId) -> bool {
    sigma.qa(answer) == QA::Answer
        && sigma.seq.game.parent(sigma.display[answer]) == Some(sigma.display[question])
}

/// Causal well-bracketing for parallel-innocent strategies: every grounded
/// causal chain is well-bracketed as an alternating play (*wb-threads*),
/// and whenever two disjoint causal paths connect a negative event to a
/// common positive one, each path answers its own questions internally
/// (*globularity* — forked threads are closed before merging).
pub fn causally_wb(sigma: &Strategy, cap: usize) -> bool {
    for chain in gccs(sigma, cap) {
        if !plays::wb_alternating(sigma, &chain) {
            return false;
        }
    }
    for m0 in sigma.es.events() {
        if sigma.pol(m0) != Polarity::Neg {
            continue;
        }
        for m in sigma.es.events() {
            if sigma.pol(m) != Polarity::Pos || !sigma.es.lt(m0, m) {
                continue;
            }
            let interiors = interior_paths(sigma, m0, m);
            for i in 0..interiors.len() {
                for j in i + 1..interiors.len() {
                    let (x, y) = (&interiors[i], &interiors[j]);
                    if x.iter().any(|e| y.contains(e)) {
                        continue;
                    }
                    if !closed_interior(sigma, x) || !closed_interior(sigma, y) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The interiors (endpoints excluded) of all immediate-causality paths from
/// `a` to `b`, excluding the direct link `a ⋖ b`.
fn interior_paths(sigma: &Strategy, a: EventId, b: EventId) -> Vec<Vec<EventId>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<EventId>> = vec![vec![a]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        for &s in sigma.es.succ(last) {
            if s == b {
                if path.len() > 1 {
                    out.push(path[1..].to_vec());
                }
            } else if sigma.es.lt(s, b) {
                let mut ext = path.clone();
                ext.push(s);
                stack.push(ext);
            }
        }
    }
    out
}

/// Every question in the path interior is answered by a member of the same
/// interior.
fn closed_interior(sigma: &Strategy, interior: &[EventId]) -> bool {
    interior.iter().all(|&q| {
        sigma.qa(q) != QA::Question || interior.iter().any(|&a| answers(sigma, a, q))
    })
}

/// Well-bracketing of an arbitrary causal strategy through its
/// non-alternating unfolding: the strategy is never the first to break the
/// fork/wait discipline.
pub fn well_bracketed(sigma: &Strategy, max_plays: usize, max_len: usize) -> bool {
    plays::wb_strategy(sigma, false, max_plays, max_len)
}

// ----------------------------------------------------------------- pruning

/// Is `x` complete: every displayed question is answered within `x`?
pub fn is_complete_config(sigma: &Strategy, x: &BitSet) -> bool {
    x.iter().all(|q| {
        sigma.qa(q) != QA::Question || x.iter().any(|a| answers(sigma, a, q))
    })
}

/// The greatest +-covered subconfiguration of `x`: repeatedly drop negative
/// events that are maximal in `x`.
pub fn plus_covered(sigma: &Strategy, x: &BitSet) -> BitSet {
    let mut y = x.clone();
    loop {
        let trailing: Vec<EventId> = y
            .iter()
            .filter(|&e| {
                sigma.pol(e) == Polarity::Neg
                    && !sigma.es.succ(e).iter().any(|&s| y.contains(s))
            })
            .collect();
        if trailing.is_empty() {
            return y;
        }
        for e in trailing {
            y.remove(e);
        }
    }
}

/// Every +-covered configuration extends to a complete one.
pub fn complete_strategy(sigma: &Strategy, cap: usize) -> bool {
    let configs = sigma.configurations(cap);
    let completes: Vec<&BitSet> =
        configs.iter().filter(|x| is_complete_config(sigma, x)).collect();
    configs.iter().all(|x| {
        let p = plus_covered(sigma, x);
        p != *x || completes.iter().any(|y| x.is_subset(y))
    })
}

/// Prune to the complete part: keep the events of those configurations
/// whose +-covered core extends to a complete configuration. The result is
/// a well-bracketed strategy witnessing the same complete behaviour.
pub fn wb_prune(sigma: &Strategy, cap: usize) -> Strategy {
    let configs = sigma.configurations(cap);
    let completes: Vec<&BitSet> =
        configs.iter().filter(|x| is_complete_config(sigma, x)).collect();
    let mut keep = BitSet::new(sigma.es.len());
    for x in &configs {
        let p = plus_covered(sigma, x);
        if completes.iter().any(|y| p.is_subset(y)) {
            keep.union_with(x);
        }
    }
    restrict_events(sigma, &keep)
}

/// Restrict a strategy to a down-closed subset of its events.
pub fn restrict_events(sigma: &Strategy, keep: &BitSet) -> Strategy {
    let mut map: Vec<Option<EventId>> = vec![None; sigma.es.len()];
    let mut eb = EsBuilder::new();
    let mut display = Vec::new();
    for e in sigma.es.events() {
        if keep.contains(e) {
            let id = eb.event(sigma.es.label(e), sigma.pol(e), sigma.es.qa(e));
            map[e] = Some(id);
            display.push(sigma.display[e]);
        }
    }
    for e in sigma.es.events() {
        if let Some(ne) = map[e] {
            for &p in sigma.es.preds(e) {
                if let Some(np) = map[p] {
                    eb.edge(np, ne);
                }
            }
        }
    }
    for (a, b) in sigma.es.minimal_conflicts() {
        if let (Some(na), Some(nb)) = (map[a], map[b]) {
            eb.conflict(na, nb);
        }
    }
    let es = eb.build().expect("restriction of a valid event structure");
    Strategy::from_parts(sigma.seq.clone(), es, display)
        .expect("restriction preserves strategy shape")
}

// ------------------------------------------------------------- meager form

/// The meager form: keep exactly the events all of whose negative causal
/// dependencies display at copy index 0. For well-bracketed innocent
/// strategies this is a faithful skeleton of the full behaviour.
pub fn meager_form(sigma: &Strategy) -> Strategy {
    let game = &sigma.seq.game;
    let mut keep = BitSet::new(sigma.es.len());
    for e in sigma.es.events() {
        let ok = sigma.es.down_set(e).iter().all(|f| {
            sigma.pol(f) != Polarity::Neg || game.ind(sigma.display[f]) == 0
        });
        if ok {
            keep.insert(e);
        }
    }
    restrict_events(sigma, &keep)
}

/// The size of a strategy: the number of positive events of its meager
/// form.
pub fn meager_size(sigma: &Strategy) -> usize {
    let m = meager_form(sigma);
    m.es.events().filter(|&e| m.pol(e) == Polarity::Pos).count()
}

// -------------------------------------------------------------- expansion

/// Expand a meager strategy back to a replicated one. Events are pairs
/// `(m, α)` of a meager event and an *exponential slice* `α` choosing a
/// copy index for every negative question below `m`; causality and conflict
/// compare slices where both are defined. Negative questions display at the
/// index the slice chooses; positive questions receive fresh indices from a
/// per-(parent, node) counter, which realizes an injective choice up to
/// positive isomorphism. Exceeding the replication width of the game is an
/// error.
pub fn expand(sigma: &Strategy, max_events: usize) -> Result<Strategy, StrategyError> {
    let game = &sigma.seq.game;
    // Copy-index capacity of a game event's node.
    let capacity = |g: EventId| -> u64 {
        game.meager.nodes[game.node_of(g)]
            .own_layers
            .iter()
            .map(|&l| game.meager.layer_widths[l] as u64)
            .product()
    };

    type Slice = BTreeMap<EventId, u32>;
    // Enumerate the slices over each meager event's negative questions.
    let mut events: Vec<(EventId, Slice)> = Vec::new();
    for m in sigma.es.events() {
        let domain: Vec<EventId> = sigma
            .es
            .down_set(m)
            .iter()
            .filter(|&n| sigma.pol(n) == Polarity::Neg && sigma.qa(n) == QA::Question)
            .collect();
        let mut slices: Vec<Slice> = vec![Slice::new()];
        for &n in &domain {
            let w = capacity(sigma.display[n]);
            let mut next = Vec::new();
            for s in &slices {
                for v in 0..w {
                    let mut s2 = s.clone();
                    s2.insert(n, v as u32);
                    next.push(s2);
                }
            }
            slices = next;
        }
        for s in slices {
            events.push((m, s));
            if events.len() > max_events {
                return Err(StrategyError::Budget(events.len(), max_events));
            }
        }
    }

    // Topological order: by causal depth of the underlying meager event.
    events.sort_by_key(|(m, _)| sigma.es.down_set(*m).len());

    let le = |a: &(EventId, Slice), b: &(EventId, Slice)| -> bool {
        sigma.es.le(a.0, b.0) && a.1.iter().all(|(n, v)| b.1.get(n) == Some(v))
    };

    let mut eb = EsBuilder::new();
    let ids: Vec<EventId> = events
        .iter()
        .map(|(m, _)| eb.event(sigma.es.label(*m), sigma.pol(*m), sigma.es.qa(*m)))
        .collect();
    for i in 0..events.len() {
        for j in 0..events.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&events[i], &events[j]);
            if le(a, b) {
                eb.edge(ids[i], ids[j]);
            } else if !le(b, a) && sigma.es.conflicts(a.0, b.0) {
                let agree = a.1.iter().all(|(n, v)| match b.1.get(n) {
                    Some(w) => v == w,
                    None => true,
                });
                if i < j && agree {
                    eb.conflict(ids[i], ids[j]);
                }
            }
        }
    }
    let es = eb.build()?;

    // Display, processing causes first. Positive questions draw indices
    // from a counter per (displayed parent, node).
    let mut display: Vec<EventId> = vec![usize::MAX; events.len()];
    let mut counters: HashMap<(Option<EventId>, usize), u64> = HashMap::new();
    let mut seen: HashMap<(EventId, Slice), usize> = HashMap::new();
    for (i, (m, slice)) in events.iter().enumerate() {
        let g = sigma.display[*m];
        let node = game.node_of(g);
        // Locate the expanded event displaying to the game parent.
        let parent_disp: Option<EventId> = match game.parent(g) {
            Some(gp) => {
                let p = sigma
                    .es
                    .down_set(*m)
                    .iter()
                    .find(|&p| sigma.display[p] == gp)
                    .ok_or_else(|| {
                        StrategyError::Invalid("displayed parent not below event".into())
                    })?;
                let pslice: Slice = slice
                    .iter()
                    .filter(|(n, _)| sigma.es.le(**n, p))
                    .map(|(n, v)| (*n, *v))
                    .collect();
                let pi = *seen
                    .get(&(p, pslice))
                    .ok_or_else(|| StrategyError::Invalid("parent slice missing".into()))?;
                Some(display[pi])
            }
            None => None,
        };
        let prefix: Vec<u32> = match parent_disp {
            Some(pd) => game.indices_of(pd).to_vec(),
            None => Vec::new(),
        };
        let cap = capacity(g);
        let v: u64 = match (sigma.qa(*m), sigma.pol(*m)) {
            (QA::Answer, _) => 0,
            (QA::Question, Polarity::Neg) => u64::from(slice[m]),
            (QA::Question, Polarity::Pos) => {
                let key = (parent_disp, node);
                let c = counters.entry(key).or_insert(0);
                let v = *c;
                *c += 1;
                if v >= cap {
                    return Err(StrategyError::Width(format!(
                        "node {} exhausted its {} copies during expansion",
                        game.meager.nodes[node].label, cap
                    )));
                }
                v
            }
        };
        // Decompose the composite index over the node's own layers.
        let own = &game.meager.nodes[node].own_layers;
        let mut digits = vec![0u32; own.len()];
        let mut rest = v;
        for (k, &l) in own.iter().enumerate().rev() {
            let w = game.meager.layer_widths[l] as u64;
            digits[k] = (rest % w) as u32;
            rest /= w;
        }
        let mut address = prefix;
        address.extend(digits);
        display[i] = game
            .event_at(node, &address)
            .ok_or_else(|| StrategyError::Invalid("expanded address outside game".into()))?;
        seen.insert((*m, slice.clone()), i);
    }
    Strategy::from_parts(sigma.seq.clone(), es, display)
}
