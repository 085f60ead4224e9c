// SPDX-License-Identifier: Apache-2.0

//! Arenas: forestial alternating race-free event structures with
//! Question/Answer labels, copy indices, and polarized symmetry.
//!
//! An arena is generated from a *meager* skeleton: a forest of labelled
//! nodes, plus a set of minimal-conflict pairs between nodes. Replication is
//! expressed by *bang layers*: a layer is attached to a set of nodes (the
//! roots of the replicated subforest) and carries a finite width. The full
//! arena materializes every address `(node, copy indices)`, one index per
//! layer on the node's root path.
//!
//! `lbl` of an event is its meager node (forgetting indices); `ind` is the
//! index of the event's own layer when the event opens a copy, `0` otherwise.
//! Symmetries between configurations are the label-preserving order-isos that
//! reindex copies consistently; the positive (resp. negative) flavor fixes
//! the indices of negative (resp. positive) events.

use crate::es::{BitSet, EsBuilder, EsError, EventId, EventStructure, Polarity, QA};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub type NodeId = usize;
pub type LayerId = usize;

/// Finite truncation parameters for every ℕ-indexed construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub bang_width: usize,
    pub nat_max: usize,
    pub unroll_depth: usize,
    pub run_fuel: usize,
    pub max_events: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { bang_width: 2, nat_max: 2, unroll_depth: 3, run_fuel: 10_000, max_events: 5_000 }
    }
}

/// Which side of a sequent `A ⊢ B` a node belongs to (if any).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Sole,
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct MeagerNode {
    pub label: String,
    pub pol: Polarity,
    pub qa: QA,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Layers opened at this node, outermost first.
    pub own_layers: Vec<LayerId>,
    pub side: Side,
}

/// The skeleton: a forest plus minimal conflicts and layer widths.
#[derive(Debug, Clone, Default)]
pub struct MeagerArena {
    pub nodes: Vec<MeagerNode>,
    pub roots: Vec<NodeId>,
    /// Minimal-conflict pairs between nodes; a pair applies to a pair of full
    /// events iff their copy indices agree on all shared layers.
    pub min_conflicts: Vec<(NodeId, NodeId)>,
    pub layer_widths: Vec<usize>,
}

impl MeagerArena {
    fn add_node(
        &mut self,
        label: impl Into<String>,
        pol: Polarity,
        qa: QA,
        parent: Option<NodeId>,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(MeagerNode {
            label: label.into(),
            pol,
            qa,
            parent,
            children: Vec::new(),
            own_layers: Vec::new(),
            side: Side::Sole,
        });
        match parent {
            Some(p) => self.nodes[p].children.push(id),
            None => self.roots.push(id),
        }
        id
    }

    fn add_layer(&mut self, width: usize) -> LayerId {
        self.layer_widths.push(width);
        self.layer_widths.len() - 1
    }

    /// Layers along the root path of `node`, outermost first.
    pub fn layer_path(&self, node: NodeId) -> Vec<LayerId> {
        let mut path = match self.nodes[node].parent {
            Some(p) => self.layer_path(p),
            None => Vec::new(),
        };
        path.extend(&self.nodes[node].own_layers);
        path
    }

    /// Copy a subforest from `other` under `parent`, remapping layers freshly.
    /// Returns the node map.
    fn graft(
        &mut self,
        other: &MeagerArena,
        parent: Option<NodeId>,
        flip: bool,
    ) -> Vec<NodeId> {
        let mut layer_map: HashMap<LayerId, LayerId> = HashMap::new();
        for (l, &w) in other.layer_widths.iter().enumerate() {
            layer_map.insert(l, self.add_layer(w));
        }
        let mut node_map: Vec<NodeId> = vec![usize::MAX; other.nodes.len()];
        // Parents precede children in node order by construction.
        for (i, n) in other.nodes.iter().enumerate() {
            let p = match n.parent {
                Some(p) => Some(node_map[p]),
                None => parent,
            };
            let pol = if flip { n.pol.flip() } else { n.pol };
            let id = self.add_node(n.label.clone(), pol, n.qa, p);
            self.nodes[id].own_layers = n.own_layers.iter().map(|l| layer_map[l]).collect();
            self.nodes[id].side = n.side;
            node_map[i] = id;
        }
        for &(a, b) in &other.min_conflicts {
            self.min_conflicts.push((node_map[a], node_map[b]));
        }
        node_map
    }
}

/// A materialized arena under a budget.
#[derive(Debug, Clone)]
pub struct Arena {
    pub meager: MeagerArena,
    pub es: EventStructure,
    /// Address of each full event: meager node plus one index per path layer.
    addr: Vec<(NodeId, Vec<u32>)>,
    index: HashMap<(NodeId, Vec<u32>), EventId>,
    /// Cached layer path per node.
    node_layers: Vec<Vec<LayerId>>,
    pub negative: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ArenaError {
    #[error(transparent)]
    Es(#[from] EsError),
    #[error("arena validation failed: {0}")]
    Invalid(String),
    #[error("affine arrow requires a pointed codomain")]
    NotPointed,
    #[error("event budget exceeded while materializing arena ({0} events, max {1})")]
    Budget(usize, usize),
}

/// A symmetry-membership query between two configurations of one arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Full,
    Positive,
    Negative,
}

impl Arena {
    // ------------------------------------------------------------ assembly

    pub fn from_meager(meager: MeagerArena, max_events: usize) -> Result<Arena, ArenaError> {
        let node_layers: Vec<Vec<LayerId>> =
            (0..meager.nodes.len()).map(|n| meager.layer_path(n)).collect();
        // Enumerate addresses, parents first (node order has parents first).
        let mut b = EsBuilder::new();
        let mut addr: Vec<(NodeId, Vec<u32>)> = Vec::new();
        let mut index: HashMap<(NodeId, Vec<u32>), EventId> = HashMap::new();
        let order: Vec<NodeId> = (0..meager.nodes.len()).collect();
        for &n in &order {
            let node = &meager.nodes[n];
            let parent_addrs: Vec<Vec<u32>> = match node.parent {
                Some(p) => addr
                    .iter()
                    .filter(|(m, _)| *m == p)
                    .map(|(_, ix)| ix.clone())
                    .collect(),
                None => vec![Vec::new()],
            };
            for pa in parent_addrs {
                let mut stack: Vec<Vec<u32>> = vec![pa.clone()];
                for &l in &node.own_layers {
                    let w = meager.layer_widths[l];
                    let mut next = Vec::new();
                    for pre in &stack {
                        for i in 0..w {
                            let mut ix = pre.clone();
                            ix.push(i as u32);
                            next.push(ix);
                        }
                    }
                    stack = next;
                }
                for ix in stack {
                    if b.len() >= max_events {
                        return Err(ArenaError::Budget(b.len() + 1, max_events));
                    }
                    let e = b.event(node.label.clone(), node.pol, Some(node.qa));
                    if let Some(p) = node.parent {
                        let pid = index[&(p, ix[..node_layers[p].len()].to_vec())];
                        b.edge(pid, e);
                    }
                    index.insert((n, ix.clone()), e);
                    addr.push((n, ix));
                }
            }
        }
        // Minimal conflicts: indices must agree on shared layers.
        let events_of_node: HashMap<NodeId, Vec<EventId>> = {
            let mut m: HashMap<NodeId, Vec<EventId>> = HashMap::new();
            for (e, (n, _)) in addr.iter().enumerate() {
                m.entry(*n).or_default().push(e);
            }
            m
        };
        for &(n1, n2) in &meager.min_conflicts {
            let (l1, l2) = (&node_layers[n1], &node_layers[n2]);
            let shared: Vec<(usize, usize)> = l1
                .iter()
                .enumerate()
                .filter_map(|(i, l)| l2.iter().position(|m| m == l).map(|j| (i, j)))
                .collect();
            for &e1 in events_of_node.get(&n1).map(|v| v.as_slice()).unwrap_or(&[]) {
                for &e2 in events_of_node.get(&n2).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let (i1, i2) = (&addr[e1].1, &addr[e2].1);
                    if shared.iter().all(|&(i, j)| i1[i] == i2[j]) {
                        b.conflict(e1, e2);
                    }
                }
            }
        }
        let es = b.build()?;
        let negative = meager.roots.iter().all(|&r| meager.nodes[r].pol == Polarity::Neg);
        Ok(Arena { meager, es, addr, index, node_layers, negative })
    }

    pub fn node_of(&self, e: EventId) -> NodeId {
        self.addr[e].0
    }

    pub fn indices_of(&self, e: EventId) -> &[u32] {
        &self.addr[e].1
    }

    pub fn event_at(&self, node: NodeId, ix: &[u32]) -> Option<EventId> {
        self.index.get(&(node, ix.to_vec())).copied()
    }

    pub fn side(&self, e: EventId) -> Side {
        self.meager.nodes[self.addr[e].0].side
    }

    pub fn lbl(&self, e: EventId) -> &str {
        &self.meager.nodes[self.addr[e].0].label
    }

    /// The copy index: composite index over the event's own layers, 0 when
    /// the event opens no copy.
    pub fn ind(&self, e: EventId) -> u32 {
        let (n, ix) = &self.addr[e];
        let own = &self.meager.nodes[*n].own_layers;
        if own.is_empty() {
            return 0;
        }
        let base = self.node_layers[*n].len() - own.len();
        let mut acc: u32 = 0;
        for (k, &l) in own.iter().enumerate() {
            acc = acc * self.meager.layer_widths[l] as u32 + ix[base + k];
        }
        acc
    }

    /// Unique arena predecessor (arenas are forestial).
    pub fn parent(&self, e: EventId) -> Option<EventId> {
        self.es.preds(e).first().copied()
    }

    pub fn pol(&self, e: EventId) -> Polarity {
        self.es.pol(e)
    }

    pub fn qa(&self, e: EventId) -> QA {
        self.es.qa(e).expect("arena events carry QA")
    }

    pub fn is_pointed(&self) -> bool {
        self.es.minimal().len() == 1 && self.meager.nodes[self.meager.roots[0]].own_layers.is_empty()
    }

    /// Strict: all minimal events pairwise conflicting.
    pub fn is_strict(&self) -> bool {
        let min = self.es.minimal();
        min.iter()
            .all(|&a| min.iter().all(|&b| a == b || self.es.conflicts(a, b)))
    }

    // ------------------------------------------------------------- validators

    /// Arena laws: forestial, alternating, race-free; Question/Answer laws:
    /// parents are questions, answers maximal, answers of a question conflict.
    pub fn validate(&self) -> Result<(), ArenaError> {
        for e in self.es.events() {
            if self.es.preds(e).len() > 1 {
                return Err(ArenaError::Invalid(format!("event {e} has two predecessors")));
            }
            if let Some(p) = self.parent(e) {
                if self.es.pol(p) == self.es.pol(e) {
                    return Err(ArenaError::Invalid(format!("non-alternating edge {p} -> {e}")));
                }
                if self.qa(p) != QA::Question {
                    return Err(ArenaError::Invalid(format!("event {e} hangs under an answer")));
                }
            }
            if self.qa(e) == QA::Answer && !self.es.succ(e).is_empty() {
                return Err(ArenaError::Invalid(format!("answer {e} is not maximal")));
            }
        }
        for (a, b) in self.es.minimal_conflicts() {
            if self.es.pol(a) != self.es.pol(b) {
                return Err(ArenaError::Invalid(format!("race between {a} and {b}")));
            }
        }
        // Answer-linear: two answers to the same question conflict.
        for e in self.es.events() {
            if self.qa(e) != QA::Answer {
                continue;
            }
            for f in self.es.events() {
                if f != e
                    && self.qa(f) == QA::Answer
                    && self.parent(e) == self.parent(f)
                    && self.parent(e).is_some()
                    && !self.es.conflicts(e, f)
                {
                    return Err(ArenaError::Invalid(format!(
                        "answers {e} and {f} to one question are consistent"
                    )));
                }
            }
        }
        if self.negative {
            for r in self.es.minimal() {
                if self.es.pol(r) != Polarity::Neg {
                    return Err(ArenaError::Invalid(format!("positive minimal event {r}")));
                }
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------- symmetry

    /// Membership test for a configuration bijection in the symmetry family
    /// of the given flavor. The bijection is given as pairs `(source, target)`.
    pub fn symmetry_member(&self, pairs: &[(EventId, EventId)], flavor: Flavor) -> bool {
        let n = self.es.len();
        let x = BitSet::from_iter(n, pairs.iter().map(|p| p.0));
        let y = BitSet::from_iter(n, pairs.iter().map(|p| p.1));
        if x.len() != pairs.len() || y.len() != pairs.len() {
            return false;
        }
        if !self.es.is_configuration(&x) || !self.es.is_configuration(&y) {
            return false;
        }
        let map: HashMap<EventId, EventId> = pairs.iter().copied().collect();
        for &(e, f) in pairs {
            if self.node_of(e) != self.node_of(f) {
                return false;
            }
            // Order-iso on a forest = parent-preserving bijection.
            match (self.parent(e), self.parent(f)) {
                (None, None) => {}
                (Some(pe), Some(pf)) => {
                    if map.get(&pe) != Some(&pf) {
                        return false;
                    }
                }
                _ => return false,
            }
            match flavor {
                Flavor::Full => {}
                Flavor::Positive => {
                    if self.pol(e) == Polarity::Neg && self.ind(e) != self.ind(f) {
                        return false;
                    }
                }
                Flavor::Negative => {
                    if self.pol(e) == Polarity::Pos && self.ind(e) != self.ind(f) {
                        return false;
                    }
                }
            }
        }
        // Copy-reindexing consistency: for any two source events, index
        // agreement on every shared layer must be mirrored by the targets.
        for &(e1, f1) in pairs {
            for &(e2, f2) in pairs {
                let l1 = &self.node_layers[self.node_of(e1)];
                let l2 = &self.node_layers[self.node_of(e2)];
                for (i, l) in l1.iter().enumerate() {
                    if let Some(j) = l2.iter().position(|m| m == l) {
                        let src_eq = self.indices_of(e1)[i] == self.indices_of(e2)[j];
                        let tgt_eq = self.indices_of(f1)[i] == self.indices_of(f2)[j];
                        if src_eq != tgt_eq {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Factor a full symmetry as negative-then-positive through the
    /// intermediate configuration that keeps positive indices from the source
    /// and negative indices from the target.
    pub fn positive_factor(
        &self,
        pairs: &[(EventId, EventId)],
    ) -> Option<(Vec<(EventId, EventId)>, Vec<(EventId, EventId)>)> {
        if !self.symmetry_member(pairs, Flavor::Full) {
            return None;
        }
        let map: HashMap<EventId, EventId> = pairs.iter().copied().collect();
        // Build intermediate addresses event by event, walking down the forest.
        let mut mid: HashMap<EventId, EventId> = HashMap::new();
        let mut order: Vec<EventId> = pairs.iter().map(|p| p.0).collect();
        order.sort_by_key(|&e| self.es.down_set(e).len());
        for &e in &order {
            let f = map[&e];
            let n = self.node_of(e);
            let own = self.meager.nodes[n].own_layers.len();
            let total = self.node_layers[n].len();
            let mut ix: Vec<u32> = match self.parent(e) {
                Some(pe) => {
                    let pm = mid[&pe];
                    self.indices_of(pm).to_vec()
                }
                None => Vec::new(),
            };
            let use_target = self.pol(e) == Polarity::Neg;
            for k in (total - own)..total {
                let v = if use_target { self.indices_of(f)[k] } else { self.indices_of(e)[k] };
                ix.push(v);
            }
            let m = self.event_at(n, &ix)?;
            mid.insert(e, m);
        }
        let theta_neg: Vec<(EventId, EventId)> = order.iter().map(|&e| (e, mid[&e])).collect();
        let theta_pos: Vec<(EventId, EventId)> = order.iter().map(|&e| (mid[&e], map[&e])).collect();
        if self.symmetry_member(&theta_neg, Flavor::Negative)
            && self.symmetry_member(&theta_pos, Flavor::Positive)
        {
            Some((theta_neg, theta_pos))
        } else {
            None
        }
    }

    // --------------------------------------------------------- constructions

    pub fn ground_u(max_events: usize) -> Arena {
        let mut m = MeagerArena::default();
        let q = m.add_node("q", Polarity::Neg, QA::Question, None);
        m.add_node("ok", Polarity::Pos, QA::Answer, Some(q));
        Arena::from_meager(m, max_events).expect("ground U")
    }

    pub fn ground_b(max_events: usize) -> Arena {
        let mut m = MeagerArena::default();
        let q = m.add_node("q", Polarity::Neg, QA::Question, None);
        let t = m.add_node("tt", Polarity::Pos, QA::Answer, Some(q));
        let f = m.add_node("ff", Polarity::Pos, QA::Answer, Some(q));
        m.min_conflicts.push((t, f));
        Arena::from_meager(m, max_events).expect("ground B")
    }

    pub fn ground_n(budget: &Budget) -> Arena {
        let mut m = MeagerArena::default();
        let q = m.add_node("q", Polarity::Neg, QA::Question, None);
        let vals: Vec<NodeId> = (0..=budget.nat_max)
            .map(|k| m.add_node(format!("{k}"), Polarity::Pos, QA::Answer, Some(q)))
            .collect();
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                m.min_conflicts.push((vals[i], vals[j]));
            }
        }
        Arena::from_meager(m, budget.max_events).expect("ground N")
    }

    /// The reference arena `(&_{n ≤ nat_max} 𝕌) & ℕ` with write/read names.
    pub fn ref_arena(budget: &Budget) -> Arena {
        let mut m = MeagerArena::default();
        let mut roots = Vec::new();
        for k in 0..=budget.nat_max {
            let w = m.add_node(format!("w{k}"), Polarity::Neg, QA::Question, None);
            m.add_node("ok", Polarity::Pos, QA::Answer, Some(w));
            roots.push(w);
        }
        let r = m.add_node("read", Polarity::Neg, QA::Question, None);
        let vals: Vec<NodeId> = (0..=budget.nat_max)
            .map(|k| m.add_node(format!("{k}"), Polarity::Pos, QA::Answer, Some(r)))
            .collect();
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                m.min_conflicts.push((vals[i], vals[j]));
            }
        }
        roots.push(r);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                m.min_conflicts.push((roots[i], roots[j]));
            }
        }
        Arena::from_meager(m, budget.max_events).expect("ref arena")
    }

    /// The semaphore arena `𝕌 & 𝕌` with grab/release names.
    pub fn sem_arena(budget: &Budget) -> Arena {
        let mut m = MeagerArena::default();
        let g = m.add_node("g", Polarity::Neg, QA::Question, None);
        m.add_node("ok", Polarity::Pos, QA::Answer, Some(g));
        let r = m.add_node("rl", Polarity::Neg, QA::Question, None);
        m.add_node("ok", Polarity::Pos, QA::Answer, Some(r));
        m.min_conflicts.push((g, r));
        Arena::from_meager(m, budget.max_events).expect("sem arena")
    }

    pub fn empty(max_events: usize) -> Arena {
        Arena::from_meager(MeagerArena::default(), max_events).expect("empty arena")
    }

    pub fn dual(&self) -> Arena {
        let mut m = self.meager.clone();
        for n in m.nodes.iter_mut() {
            n.pol = n.pol.flip();
        }
        Arena::from_meager(m, usize::MAX).expect("dual")
    }

    fn mark_side(m: &mut MeagerArena, nodes: &[NodeId], side: Side) {
        for &n in nodes {
            m.nodes[n].side = side;
        }
    }

    /// Simple parallel composition (also the tensor on arenas).
    pub fn par(&self, other: &Arena, max_events: usize) -> Result<Arena, ArenaError> {
        let mut m = MeagerArena::default();
        m.graft(&self.meager, None, false);
        m.graft(&other.meager, None, false);
        Arena::from_meager(m, max_events)
    }

    /// Product `A & B`: parallel with all cross root pairs in conflict.
    pub fn product(&self, other: &Arena, max_events: usize) -> Result<Arena, ArenaError> {
        let mut m = MeagerArena::default();
        let lm = m.graft(&self.meager, None, false);
        let rm = m.graft(&other.meager, None, false);
        for &a in &self.meager.roots {
            for &b in &other.meager.roots {
                m.min_conflicts.push((lm[a], rm[b]));
            }
        }
        Arena::from_meager(m, max_events)
    }

    /// The sequent game `A ⊢ B = A^⊥ ∥ B`, sides recorded per node.
    pub fn sequent(left: &Arena, right: &Arena, max_events: usize) -> Result<Arena, ArenaError> {
        let mut m = MeagerArena::default();
        let lm = m.graft(&left.meager, None, true);
        let rm = m.graft(&right.meager, None, false);
        Arena::mark_side(&mut m, &lm, Side::Left);
        Arena::mark_side(&mut m, &rm, Side::Right);
        Arena::from_meager(m, max_events)
    }

    /// The exponential: one fresh shared layer of the given width over the
    /// whole forest.
    pub fn bang(&self, width: usize, max_events: usize) -> Result<Arena, ArenaError> {
        let mut m = MeagerArena::default();
        m.graft(&self.meager, None, false);
        let layer = m.add_layer(width);
        let roots = m.roots.clone();
        for r in roots {
            m.nodes[r].own_layers.insert(0, layer);
        }
        Arena::from_meager(m, max_events)
    }

    /// Affine arrow `A ⊸ B` for pointed `B`: `A^⊥` grafted under the unique
    /// minimal event of `B`.
    pub fn affine_arrow(&self, codomain: &Arena, max_events: usize) -> Result<Arena, ArenaError> {
        if !codomain.is_pointed() {
            return Err(ArenaError::NotPointed);
        }
        let mut m = MeagerArena::default();
        let rm = m.graft(&codomain.meager, None, false);
        let root = rm[codomain.meager.roots[0]];
        let lm = m.graft(&self.meager, Some(root), true);
        Arena::mark_side(&mut m, &lm, Side::Left);
        Arena::mark_side(&mut m, &rm, Side::Right);
        Arena::from_meager(m, max_events)
    }

    /// General arrow `A ⊸ B`: one copy of `A^⊥` under every minimal event of
    /// `B`. Cross-copy conflicts: copies under conflicting minimals conflict
    /// by inheritance; copies under consistent minimals conflict exactly when
    /// they share a minimal `A`-ancestor or their `A`-events conflict.
    pub fn arrow(&self, codomain: &Arena, max_events: usize) -> Result<Arena, ArenaError> {
        if codomain.is_pointed() {
            return self.affine_arrow(codomain, max_events);
        }
        let mut m = MeagerArena::default();
        let rm = m.graft(&codomain.meager, None, false);
        Arena::mark_side(&mut m, &rm, Side::Right);
        let b_minimals: Vec<NodeId> = codomain
            .meager
            .roots
            .iter()
            .filter(|&&r| codomain.meager.nodes[r].own_layers.is_empty())
            .copied()
            .collect();
        if b_minimals.len() != codomain.meager.roots.len() {
            return Err(ArenaError::Invalid(
                "general arrow into a replicated codomain is not supported".into(),
            ));
        }
        let mut copies: Vec<Vec<NodeId>> = Vec::new();
        for &bm in &b_minimals {
            let cm = m.graft(&self.meager, Some(rm[bm]), true);
            Arena::mark_side(&mut m, &cm, Side::Left);
            copies.push(cm);
        }
        for i in 0..copies.len() {
            for j in i + 1..copies.len() {
                let (b1, b2) = (b_minimals[i], b_minimals[j]);
                let conflicting = codomain
                    .meager
                    .min_conflicts
                    .iter()
                    .any(|&(x, y)| (x, y) == (b1, b2) || (y, x) == (b1, b2));
                if conflicting {
                    continue; // inherited through the grafting
                }
                for &r in &self.meager.roots {
                    m.min_conflicts.push((copies[i][r], copies[j][r]));
                }
                for &(x, y) in &self.meager.min_conflicts {
                    m.min_conflicts.push((copies[i][x], copies[j][y]));
                    m.min_conflicts.push((copies[i][y], copies[j][x]));
                }
            }
        }
        Arena::from_meager(m, max_events)
    }

    // ---------------------------------------------------------------- export

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.es.to_json();
        let events = v["events"].as_array_mut().unwrap();
        for (e, ev) in events.iter_mut().enumerate() {
            let obj = ev.as_object_mut().unwrap();
            obj.insert("meager_label".into(), serde_json::json!(self.lbl(e)));
            obj.insert("copy_indices".into(), serde_json::json!(self.indices_of(e)));
            obj.insert("ind".into(), serde_json::json!(self.ind(e)));
            obj.insert(
                "side".into(),
                serde_json::json!(match self.side(e) {
                    Side::Sole => "sole",
                    Side::Left => "left",
                    Side::Right => "right",
                }),
            );
        }
        v
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("digraph \"{name}\" {{\n  rankdir=TB;\n  node [shape=plaintext];\n"));
        for e in self.es.events() {
            let ix = self
                .indices_of(e)
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let sub = if ix.is_empty() { String::new() } else { format!("[{ix}]") };
            s.push_str(&format!(
                "  e{e} [label=\"{}{}{}\"];\n",
                self.lbl(e).replace('"', "'"),
                self.pol(e),
                sub
            ));
        }
        for e in self.es.events() {
            for &f in self.es.succ(e) {
                s.push_str(&format!("  e{e} -> e{f};\n"));
            }
        }
        for (a, b) in self.es.minimal_conflicts() {
            s.push_str(&format!(
                "  e{a} -> e{b} [dir=none, style=dashed, constraint=false, color=gray];\n"
            ));
        }
        s.push_str("}\n");
        s
    }
}

// --------------------------------------------------------------------- types

/// Surface types of the object language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Unit,
    Bool,
    Nat,
    Ref,
    Sem,
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn is_ground(&self) -> bool {
        matches!(self, Ty::Unit | Ty::Bool | Ty::Nat)
    }
}

impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ty::Unit => write!(f, "U"),
            Ty::Bool => write!(f, "B"),
            Ty::Nat => write!(f, "N"),
            Ty::Ref => write!(f, "ref"),
            Ty::Sem => write!(f, "sem"),
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

/// Interpret a type as a negative arena under the budget: `⟦A → B⟧ = !⟦A⟧ ⊸ ⟦B⟧`.
pub fn interpret_type(ty: &Ty, budget: &Budget) -> Result<Arena, ArenaError> {
    interpret_type_width(ty, budget, budget.bang_width)
}

/// Same, with an explicit width for every bang layer introduced at arrows.
pub fn interpret_type_width(ty: &Ty, budget: &Budget, width: usize) -> Result<Arena, ArenaError> {
    match ty {
        Ty::Unit => Ok(Arena::ground_u(budget.max_events)),
        Ty::Bool => Ok(Arena::ground_b(budget.max_events)),
        Ty::Nat => Ok(Arena::ground_n(budget)),
        Ty::Ref => Ok(Arena::ref_arena(budget)),
        Ty::Sem => Ok(Arena::sem_arena(budget)),
        Ty::Arrow(a, b) => {
            let ia = interpret_type_width(a, budget, width)?;
            let ib = interpret_type_width(b, budget, width)?;
            let banged = ia.bang(width, budget.max_events)?;
            banged.arrow(&ib, budget.max_events)
        }
    }
}
