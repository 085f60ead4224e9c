// SPDX-License-Identifier: Apache-2.0

//! Finite prime event structures with binary conflict.
//!
//! An event structure here is a finite set of events carrying:
//!  - a causal strict partial order, stored as the immediate-causality
//!    relation `↦` plus a cached transitive closure;
//!  - an irreflexive symmetric binary conflict relation, closed under
//!    inheritance (`e1 # e2` and `e2 ≤ e2'` imply `e1 # e2'`);
//!  - a polarity per event (`−` for the environment, `+` for the program);
//!  - an optional Question/Answer label (present on arenas and on anything
//!    displayed into an arena).
//!
//! Configurations are the down-closed, pairwise conflict-free finite sets of
//! events; they are represented as bitsets over the owning structure.
//! Structures are immutable once built, so they can be shared freely.

use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

pub type EventId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "+")]
    Pos,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Neg => Polarity::Pos,
            Polarity::Pos => Polarity::Neg,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Neg => write!(f, "-"),
            Polarity::Pos => write!(f, "+"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QA {
    #[serde(rename = "Q")]
    Question,
    #[serde(rename = "A")]
    Answer,
}

/// A plain bitset over event ids of one structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> BitSet {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(w, o)| w & !o == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(w, o)| w & o != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            (0..64).filter_map(move |b| if (w >> b) & 1 == 1 { Some(wi * 64 + b) } else { None })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_iter(n: usize, it: impl IntoIterator<Item = usize>) -> BitSet {
        let mut s = BitSet::new(n);
        for i in it {
            s.insert(i);
        }
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EsError {
    #[error("causality cycle through event {0}")]
    Cycle(EventId),
    #[error("self-conflict on event {0}")]
    SelfConflict(EventId),
    #[error("event id {0} out of range")]
    BadId(EventId),
    #[error("{0}")]
    BadConfiguration(String),
    #[error("event budget exceeded: {0} events (max {1})")]
    Budget(usize, usize),
}

/// A finite event structure; immutable after construction.
#[derive(Debug, Clone)]
pub struct EventStructure {
    labels: Vec<String>,
    pol: Vec<Polarity>,
    qa: Vec<Option<QA>>,
    imm: Vec<Vec<EventId>>,
    preds: Vec<Vec<EventId>>,
    /// `up[e]` contains every `f` with `e ≤ f` (reflexive).
    up: Vec<BitSet>,
    /// `down[e]` contains every `f` with `f ≤ e` (reflexive).
    down: Vec<BitSet>,
    /// Fully inherited conflict, symmetric and irreflexive.
    conflict: Vec<BitSet>,
    /// The conflict pairs given at construction time, before inheritance.
    seed_conflicts: Vec<(EventId, EventId)>,
}

/// Mutable builder; `build` runs the validators and freezes the structure.
#[derive(Debug, Clone, Default)]
pub struct EsBuilder {
    labels: Vec<String>,
    pol: Vec<Polarity>,
    qa: Vec<Option<QA>>,
    edges: Vec<(EventId, EventId)>,
    conflicts: Vec<(EventId, EventId)>,
}

impl EsBuilder {
    pub fn new() -> EsBuilder {
        EsBuilder::default()
    }

    pub fn event(&mut self, label: impl Into<String>, pol: Polarity, qa: Option<QA>) -> EventId {
        self.labels.push(label.into());
        self.pol.push(pol);
        self.qa.push(qa);
        self.labels.len() - 1
    }

    /// Record an immediate-causality edge `a ↦ b`.
    pub fn edge(&mut self, a: EventId, b: EventId) {
        self.edges.push((a, b));
    }

    /// Record a (minimal) conflict; inheritance is computed by `build`.
    pub fn conflict(&mut self, a: EventId, b: EventId) {
        self.conflicts.push((a, b));
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn build(self) -> Result<EventStructure, EsError> {
        let n = self.labels.len();
        for &(a, b) in self.edges.iter() {
            if a >= n || b >= n {
                return Err(EsError::BadId(a.max(b)));
            }
        }
        for &(a, b) in self.conflicts.iter() {
            if a >= n || b >= n {
                return Err(EsError::BadId(a.max(b)));
            }
            if a == b {
                return Err(EsError::SelfConflict(a));
            }
        }
        let mut imm: Vec<Vec<EventId>> = vec![Vec::new(); n];
        let mut preds: Vec<Vec<EventId>> = vec![Vec::new(); n];
        for &(a, b) in self.edges.iter() {
            if !imm[a].contains(&b) {
                imm[a].push(b);
                preds[b].push(a);
            }
        }
        for v in imm.iter_mut().chain(preds.iter_mut()) {
            v.sort_unstable();
        }
        // Topological order; detects cycles ("finite causes" is then automatic).
        let mut indeg: Vec<usize> = preds.iter().map(|p| p.len()).collect();
        let mut queue: VecDeque<EventId> = (0..n).filter(|&e| indeg[e] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(e) = queue.pop_front() {
            topo.push(e);
            for &f in &imm[e] {
                indeg[f] -= 1;
                if indeg[f] == 0 {
                    queue.push_back(f);
                }
            }
        }
        if topo.len() != n {
            let culprit = (0..n).find(|&e| indeg[e] > 0).unwrap_or(0);
            return Err(EsError::Cycle(culprit));
        }
        // Transitive closure.
        let mut down: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for &e in &topo {
            let mut d = BitSet::new(n);
            for &p in &preds[e] {
                d.union_with(&down[p]);
            }
            d.insert(e);
            down[e] = d;
        }
        let mut up: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for &e in topo.iter().rev() {
            let mut u = BitSet::new(n);
            for &s in &imm[e] {
                u.union_with(&up[s]);
            }
            u.insert(e);
            up[e] = u;
        }
        // Conflict inheritance: a # b propagates to everything above b (and
        // symmetrically), then check irreflexivity of the result.
        let mut conflict: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for &(a, b) in self.conflicts.iter() {
            for ea in up[a].iter() {
                conflict[ea].union_with(&up[b]);
            }
            for eb in up[b].iter() {
                conflict[eb].union_with(&up[a]);
            }
        }
        for e in 0..n {
            if conflict[e].contains(e) {
                return Err(EsError::SelfConflict(e));
            }
        }
        Ok(EventStructure {
            labels: self.labels,
            pol: self.pol,
            qa: self.qa,
            imm,
            preds,
            up,
            down,
            conflict,
            seed_conflicts: self.conflicts,
        })
    }
}

impl EventStructure {
    pub fn empty() -> EventStructure {
        EsBuilder::new().build().expect("empty structure")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        0..self.len()
    }

    pub fn label(&self, e: EventId) -> &str {
        &self.labels[e]
    }

    pub fn pol(&self, e: EventId) -> Polarity {
        self.pol[e]
    }

    pub fn qa(&self, e: EventId) -> Option<QA> {
        self.qa[e]
    }

    /// Immediate causal successors of `e`.
    pub fn succ(&self, e: EventId) -> &[EventId] {
        &self.imm[e]
    }

    /// Immediate causal predecessors of `e`.
    pub fn preds(&self, e: EventId) -> &[EventId] {
        &self.preds[e]
    }

    pub fn le(&self, a: EventId, b: EventId) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: EventId, b: EventId) -> bool {
        a != b && self.le(a, b)
    }

    pub fn conflicts(&self, a: EventId, b: EventId) -> bool {
        self.conflict[a].contains(b)
    }

    pub fn conflict_set(&self, a: EventId) -> &BitSet {
        &self.conflict[a]
    }

    /// The reflexive down-set `[e]` as a bitset.
    pub fn down_set(&self, e: EventId) -> &BitSet {
        &self.down[e]
    }

    pub fn up_set(&self, e: EventId) -> &BitSet {
        &self.up[e]
    }

    pub fn minimal(&self) -> Vec<EventId> {
        self.events().filter(|&e| self.preds[e].is_empty()).collect()
    }

    pub fn maximal(&self) -> Vec<EventId> {
        self.events().filter(|&e| self.imm[e].is_empty()).collect()
    }

    /// Minimal-conflict pairs: `a # b` with `[a] ∪ [b] \ {a,b}` conflict-free
    /// and no strictly smaller conflicting pair below.
    pub fn minimal_conflicts(&self) -> Vec<(EventId, EventId)> {
        let mut out = Vec::new();
        for a in self.events() {
            for b in self.conflict[a].iter() {
                if a < b && self.is_minimal_conflict(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_minimal_conflict(&self, a: EventId, b: EventId) -> bool {
        if !self.conflicts(a, b) {
            return false;
        }
        for a2 in self.down[a].iter() {
            for b2 in self.down[b].iter() {
                if (a2 != a || b2 != b) && self.conflicts(a2, b2) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_down_closed(&self, x: &BitSet) -> bool {
        x.iter().all(|e| self.down[e].is_subset(x))
    }

    pub fn is_consistent(&self, x: &BitSet) -> bool {
        x.iter().all(|e| !self.conflict[e].intersects(x))
    }

    pub fn is_configuration(&self, x: &BitSet) -> bool {
        self.is_down_closed(x) && self.is_consistent(x)
    }

    /// Events enabled at configuration `x` (their addition stays a configuration).
    pub fn enabled(&self, x: &BitSet) -> Vec<EventId> {
        self.events()
            .filter(|&e| {
                !x.contains(e)
                    && self.preds[e].iter().all(|&p| x.contains(p))
                    && !self.conflict[e].intersects(x)
            })
            .collect()
    }

    /// All configurations of size at most `size_cap`, enumerated breadth-first
    /// over coverings without duplicates.
    pub fn configurations(&self, size_cap: usize) -> Vec<BitSet> {
        let mut seen: HashSet<BitSet> = HashSet::new();
        let empty = BitSet::new(self.len());
        let mut queue = VecDeque::from([empty.clone()]);
        seen.insert(empty);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            out.push(x.clone());
            if x.len() >= size_cap {
                continue;
            }
            for e in self.enabled(&x) {
                let mut y = x.clone();
                y.insert(e);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        out
    }

    /// `covering(x, y)` is true iff `y = x ∪ {e}` for a single enabled `e`;
    /// returns that event.
    pub fn covering(&self, x: &BitSet, y: &BitSet) -> Option<EventId> {
        if !x.is_subset(y) || y.len() != x.len() + 1 {
            return None;
        }
        let e = y.iter().find(|&e| !x.contains(e))?;
        if self.is_configuration(y) {
            Some(e)
        } else {
            None
        }
    }

    /// Tagged disjoint union; no conflict across the components.
    pub fn parallel(&self, other: &EventStructure) -> (EventStructure, Vec<EventId>, Vec<EventId>) {
        self.combine(other, false)
    }

    /// Like `parallel` but with every cross-component pair in conflict.
    pub fn product(&self, other: &EventStructure) -> (EventStructure, Vec<EventId>, Vec<EventId>) {
        self.combine(other, true)
    }

    fn combine(
        &self,
        other: &EventStructure,
        cross_conflict: bool,
    ) -> (EventStructure, Vec<EventId>, Vec<EventId>) {
        let mut b = EsBuilder::new();
        let left: Vec<EventId> = self
            .events()
            .map(|e| b.event(format!("1.{}", self.labels[e]), self.pol[e], self.qa[e]))
            .collect();
        let right: Vec<EventId> = other
            .events()
            .map(|e| b.event(format!("2.{}", other.labels[e]), other.pol[e], other.qa[e]))
            .collect();
        for e in self.events() {
            for &s in &self.imm[e] {
                b.edge(left[e], left[s]);
            }
        }
        for e in other.events() {
            for &s in &other.imm[e] {
                b.edge(right[e], right[s]);
            }
        }
        for &(x, y) in &self.seed_conflicts {
            b.conflict(left[x], left[y]);
        }
        for &(x, y) in &other.seed_conflicts {
            b.conflict(right[x], right[y]);
        }
        if cross_conflict {
            // Conflict between the minimal events of each side inherits to
            // every cross pair.
            for e in self.minimal() {
                for f in other.minimal() {
                    b.conflict(left[e], right[f]);
                }
            }
        }
        (b.build().expect("combine of valid structures"), left, right)
    }

    /// Same events, flipped polarities.
    pub fn dual(&self) -> EventStructure {
        let mut d = self.clone();
        for p in d.pol.iter_mut() {
            *p = p.flip();
        }
        d
    }

    /// The residual after configuration `x`: events outside `x` and not in
    /// conflict with it, with restricted order and conflict. Returns the
    /// structure plus the map old id → new id.
    pub fn residual(&self, x: &BitSet) -> Result<(EventStructure, Vec<Option<EventId>>), EsError> {
        if !self.is_configuration(x) {
            return Err(EsError::BadConfiguration(
                "residual taken at a non-configuration".into(),
            ));
        }
        let keep: Vec<EventId> = self
            .events()
            .filter(|&e| !x.contains(e) && !self.conflict[e].intersects(x))
            .collect();
        let mut map: Vec<Option<EventId>> = vec![None; self.len()];
        let mut b = EsBuilder::new();
        for &e in &keep {
            map[e] = Some(b.event(self.labels[e].clone(), self.pol[e], self.qa[e]));
        }
        for &e in &keep {
            // Immediate causality in the residual is the restriction of ≤; an
            // edge survives when its source survives, and deeper ancestors in
            // `x` simply vanish (they are already played).
            for &s in &self.imm[e] {
                if let Some(ns) = map[s] {
                    b.edge(map[e].unwrap(), ns);
                }
            }
        }
        for &(a, c) in &self.seed_conflicts {
            if let (Some(na), Some(nc)) = (map[a], map[c]) {
                b.conflict(na, nc);
            }
        }
        Ok((b.build()?, map))
    }

    /// Sanity validator used by tests: re-checks the definitional axioms.
    pub fn validate(&self) -> Result<(), String> {
        for e in self.events() {
            if self.conflict[e].contains(e) {
                return Err(format!("event {e} conflicts with itself"));
            }
            for f in self.conflict[e].iter() {
                if !self.conflict[f].contains(e) {
                    return Err(format!("conflict not symmetric on ({e},{f})"));
                }
                for g in self.up[f].iter() {
                    if !self.conflict[e].contains(g) {
                        return Err(format!("conflict not inherited: {e}#{f} but not {e}#{g}"));
                    }
                }
            }
        }
        Ok(())
    }

    // ---------------------------------------------------------------- JSON/DOT

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "events": self.events().map(|e| serde_json::json!({
                "id": e,
                "pol": self.pol[e],
                "qa": self.qa[e],
                "label": self.labels[e],
            })).collect::<Vec<_>>(),
            "imm_causality": self
                .events()
                .flat_map(|e| self.imm[e].iter().map(move |&s| vec![e, s]))
                .collect::<Vec<_>>(),
            "conflict": self.minimal_conflicts().iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<EventStructure, EsError> {
        let mut b = EsBuilder::new();
        let events = v["events"].as_array().cloned().unwrap_or_default();
        for ev in &events {
            let pol = if ev["pol"] == "+" { Polarity::Pos } else { Polarity::Neg };
            let qa = match ev["qa"].as_str() {
                Some("Q") => Some(QA::Question),
                Some("A") => Some(QA::Answer),
                _ => None,
            };
            b.event(ev["label"].as_str().unwrap_or("").to_string(), pol, qa);
        }
        for e in v["imm_causality"].as_array().cloned().unwrap_or_default() {
            b.edge(e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
        }
        for c in v["conflict"].as_array().cloned().unwrap_or_default() {
            b.conflict(c[0].as_u64().unwrap() as usize, c[1].as_u64().unwrap() as usize);
        }
        b.build()
    }

    /// DOT rendering: solid arrows for immediate causality, wavy-styled
    /// (dashed, unconstrained) edges for minimal conflict.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("digraph \"{name}\" {{\n"));
        s.push_str("  rankdir=TB;\n  node [shape=plaintext];\n");
        for e in self.events() {
            let qa = match self.qa[e] {
                Some(QA::Question) => "Q",
                Some(QA::Answer) => "A",
                None => "",
            };
            s.push_str(&format!(
                "  e{e} [label=\"{}{}{}\"];\n",
                self.labels[e].replace('"', "'"),
                self.pol[e],
                qa
            ));
        }
        for e in self.events() {
            for &f in &self.imm[e] {
                s.push_str(&format!("  e{e} -> e{f};\n"));
            }
        }
        for (a, b) in self.minimal_conflicts() {
            s.push_str(&format!(
                "  e{a} -> e{b} [dir=none, style=dashed, constraint=false, color=gray];\n"
            ));
        }
        s.push_str("}\n");
        s
    }
}
