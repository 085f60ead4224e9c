// SPDX-License-Identifier: Apache-2.0

//! Causal strategies on sequent games, their validation, interaction and
//! composition, and the replication (exponential) machinery.
//!
//! A strategy on `A ⊢ B` is an event structure `S` together with a display
//! map into the game `A^⊥ ∥ B` sending configurations to configurations,
//! injectively on each configuration. Strategies proper are additionally
//! receptive (they accept every enabled Opponent move), courteous (the only
//! causal links they add beyond the game's flow from negative to positive
//! events), and negative (they start with Opponent moves).
//!
//! Interaction of `σ : A ⊢ B` and `τ : B ⊢ C` is computed as the family of
//! reachable *secured* pairs `(x, y)` of configurations agreeing on `B`,
//! explored move by move from the empty pair: `A`-moves advance `x` alone,
//! `C`-moves advance `y` alone, and `B`-moves advance both in lockstep.
//! Reachability by single moves is exactly securedness (acyclicity of causal
//! dependence across the two sides). Interaction events are the members of
//! the family with a top move; composition keeps those whose top move is not
//! synchronized on `B` and displays them into `A ⊢ C`.

use crate::arena::{Arena, ArenaError};
use crate::es::{BitSet, EsBuilder, EsError, EventId, EventStructure, Polarity, QA};
use crate::es::Polarity::{Neg, Pos};
use std::collections::{HashMap, HashSet, VecDeque};

/// A sequent game `left ⊢ right`, with translation tables between the
/// compound game `left^⊥ ∥ right` and its two components.
///
/// The compound is assembled by grafting the left arena first, so a game
/// node `n` belongs to the left component iff `n` is below the left node
/// count, and copy-index vectors carry over unchanged.
#[derive(Debug, Clone)]
pub struct Sequent {
    pub left: Arena,
    pub right: Arena,
    pub game: Arena,
    pub to_left: Vec<Option<EventId>>,
    pub to_right: Vec<Option<EventId>>,
    pub from_left: Vec<EventId>,
    pub from_right: Vec<EventId>,
}

#[derive(Debug, thiserror::Error)]
pub enum StrategyError {
    #[error(transparent)]
    Es(#[from] EsError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("strategy validation failed: {0}")]
    Invalid(String),
    #[error("interaction state budget exceeded ({0} states, max {1})")]
    Budget(usize, usize),
    #[error("games do not match on the shared component: {0}")]
    Mismatch(String),
    #[error("replication width exhausted: {0}")]
    Width(String),
}

impl Sequent {
    pub fn new(left: Arena, right: Arena, max_events: usize) -> Result<Sequent, StrategyError> {
        let game = Arena::sequent(&left, &right, max_events)?;
        let n_left_nodes = left.meager.nodes.len();
        let mut to_left = vec![None; game.es.len()];
        let mut to_right = vec![None; game.es.len()];
        let mut from_left = vec![usize::MAX; left.es.len()];
        let mut from_right = vec![usize::MAX; right.es.len()];
        for e in game.es.events() {
            let (n, ix) = (game.node_of(e), game.indices_of(e));
            if n < n_left_nodes {
                let u = left.event_at(n, ix).expect("left address");
                to_left[e] = Some(u);
                from_left[u] = e;
            } else {
                let u = right.event_at(n - n_left_nodes, ix).expect("right address");
                to_right[e] = Some(u);
                from_right[u] = e;
            }
        }
        Ok(Sequent { left, right, game, to_left, to_right, from_left, from_right })
    }

    pub fn is_left(&self, g: EventId) -> bool {
        self.to_left[g].is_some()
    }
}

/// A (pre)strategy: an event structure displayed into a sequent game.
#[derive(Debug, Clone)]
pub struct Strategy {
    pub seq: Sequent,
    pub es: EventStructure,
    /// Display map: strategy event to game event.
    pub display: Vec<EventId>,
}

/// How much of the strategy definition to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationLevel {
    /// Rule-abiding + local injectivity (prestrategy conditions).
    pub prestrategy: bool,
    /// Receptive, courteous, negative (strategy conditions).
    pub strategy: bool,
    /// Thin and symmetry-receptive against the display-generated symmetry
    /// oracle. Quadratic in the configuration family; meant for small
    /// strategies.
    pub symmetry: bool,
    /// Cap on enumerated configurations for the family-level checks.
    pub config_cap: usize,
}

impl ValidationLevel {
    pub fn prestrategy() -> ValidationLevel {
        ValidationLevel { prestrategy: true, strategy: false, symmetry: false, config_cap: 20_000 }
    }
    pub fn strategy() -> ValidationLevel {
        ValidationLevel { prestrategy: true, strategy: true, symmetry: false, config_cap: 20_000 }
    }
    pub fn full() -> ValidationLevel {
        ValidationLevel { prestrategy: true, strategy: true, symmetry: true, config_cap: 2_000 }
    }
}

impl Strategy {
    pub fn from_parts(
        seq: Sequent,
        es: EventStructure,
        display: Vec<EventId>,
    ) -> Result<Strategy, StrategyError> {
        if display.len() != es.len() {
            return Err(StrategyError::Invalid("display length mismatch".into()));
        }
        let s = Strategy { seq, es, display };
        for e in s.es.events() {
            let g = s.display[e];
            if g >= s.seq.game.es.len() {
                return Err(StrategyError::Invalid(format!("display of {e} out of range")));
            }
            if s.es.pol(e) != s.seq.game.pol(g) {
                return Err(StrategyError::Invalid(format!("display of {e} flips polarity")));
            }
        }
        Ok(s)
    }

    pub fn pol(&self, e: EventId) -> Polarity {
        self.es.pol(e)
    }

    pub fn qa(&self, e: EventId) -> QA {
        self.seq.game.qa(self.display[e])
    }

    /// Display a set of strategy events as a set of game events.
    pub fn display_set(&self, x: &BitSet) -> BitSet {
        BitSet::from_iter(self.seq.game.es.len(), x.iter().map(|e| self.display[e]))
    }

    /// All configurations of the strategy, capped.
    pub fn configurations(&self, cap: usize) -> Vec<BitSet> {
        self.es.configurations(cap)
    }

    // ------------------------------------------------------------ validation

    pub fn validate(&self, level: ValidationLevel) -> Result<(), StrategyError> {
        let game = &self.seq.game;
        if level.prestrategy {
            // Local injectivity: two consistent events never share a display.
            for e in self.es.events() {
                for f in self.es.events() {
                    if e < f && self.display[e] == self.display[f] && !self.es.conflicts(e, f) {
                        return Err(StrategyError::Invalid(format!(
                            "consistent events {e},{f} display to the same game event"
                        )));
                    }
                }
            }
            // Rule-abiding: displayed down-sets are game configurations (this
            // gives it for all configurations, display being ∪-compatible).
            for e in self.es.events() {
                let dx = self.display_set(self.es.down_set(e));
                if !game.es.is_configuration(&dx) {
                    return Err(StrategyError::Invalid(format!(
                        "display of the causal history of {e} is not a game configuration"
                    )));
                }
            }
        }
        if level.strategy {
            // Negative: minimal strategy events are Opponent moves.
            for e in self.es.minimal() {
                if self.pol(e) != Neg {
                    return Err(StrategyError::Invalid(format!("minimal event {e} is positive")));
                }
            }
            // Courteous: immediate links absent from the game go - to +.
            for e in self.es.events() {
                for &f in self.es.succ(e) {
                    let (ge, gf) = (self.display[e], self.display[f]);
                    let in_game = game.es.succ(ge).contains(&gf);
                    if !in_game && !(self.pol(e) == Neg && self.pol(f) == Pos) {
                        return Err(StrategyError::Invalid(format!(
                            "discourteous link {e} -> {f}"
                        )));
                    }
                }
            }
            // Receptive: every enabled Opponent move of the displayed
            // configuration has a unique preimage extension.
            for x in self.configurations(level.config_cap) {
                let dx = self.display_set(&x);
                for g in game.es.enabled(&dx) {
                    if game.pol(g) != Neg {
                        continue;
                    }
                    let mut count = 0;
                    for s in self.es.enabled(&x) {
                        if self.display[s] == g {
                            count += 1;
                        }
                    }
                    if count != 1 {
                        return Err(StrategyError::Invalid(format!(
                            "receptivity fails at game event {g} ({count} preimages)"
                        )));
                    }
                }
            }
        }
        if level.symmetry {
            self.validate_symmetry(level.config_cap)?;
        }
        Ok(())
    }

    /// Display-generated symmetry oracle: order-isos between strategy
    /// configurations whose displayed bijection is a game symmetry.
    pub fn symmetry_oracle(&self, pairs: &[(EventId, EventId)]) -> bool {
        let n = self.es.len();
        let x = BitSet::from_iter(n, pairs.iter().map(|p| p.0));
        let y = BitSet::from_iter(n, pairs.iter().map(|p| p.1));
        if x.len() != pairs.len()
            || y.len() != pairs.len()
            || !self.es.is_configuration(&x)
            || !self.es.is_configuration(&y)
        {
            return false;
        }
        let map: HashMap<EventId, EventId> = pairs.iter().copied().collect();
        for &(e, f) in pairs {
            for &(e2, f2) in pairs {
                if self.es.le(e, e2) != self.es.le(f, f2) {
                    return false;
                }
            }
            let _ = (map[&e], f);
        }
        let displayed: Vec<(EventId, EventId)> =
            pairs.iter().map(|&(e, f)| (self.display[e], self.display[f])).collect();
        self.seq.game.symmetry_member(&displayed, crate::arena::Flavor::Full)
    }

    /// Thin + symmetry-receptivity against the display-generated oracle.
    fn validate_symmetry(&self, cap: usize) -> Result<(), StrategyError> {
        let configs = self.configurations(cap);
        // Enumerate small members of the oracle family by extension.
        let mut family: Vec<Vec<(EventId, EventId)>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<(EventId, EventId)>> = vec![Vec::new()];
        let mut guard = 0usize;
        while let Some(theta) = frontier.pop() {
            guard += 1;
            if guard > cap {
                break;
            }
            let x = BitSet::from_iter(self.es.len(), theta.iter().map(|p| p.0));
            let dom: HashSet<EventId> = theta.iter().map(|p| p.0).collect();
            let cod: HashSet<EventId> = theta.iter().map(|p| p.1).collect();
            for s in self.es.enabled(&x) {
                if dom.contains(&s) {
                    continue;
                }
                let mut extensions: Vec<Vec<(EventId, EventId)>> = Vec::new();
                for t in self.es.events() {
                    if cod.contains(&t) {
                        continue;
                    }
                    let mut cand = theta.clone();
                    cand.push((s, t));
                    if self.symmetry_oracle(&cand) {
                        extensions.push(cand);
                    }
                }
                // Thin: a positive extension on the left admits at most one
                // symmetric extension on the right.
                if self.pol(s) == Pos && extensions.len() > 1 {
                    return Err(StrategyError::Invalid(format!(
                        "thinness fails: positive event {s} has {} symmetric images",
                        extensions.len()
                    )));
                }
                // Symmetry-receptivity: a negative extension must be matched.
                if self.pol(s) == Neg && !theta.is_empty() && extensions.is_empty() {
                    return Err(StrategyError::Invalid(format!(
                        "symmetry-receptivity fails at negative event {s}"
                    )));
                }
                for ext in extensions {
                    if !family.contains(&ext) {
                        family.push(ext.clone());
                        frontier.push(ext);
                    }
                }
            }
        }
        let _ = configs;
        Ok(())
    }

    // ---------------------------------------------------------------- export

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.es.to_json();
        let obj = v.as_object_mut().unwrap();
        obj.insert(
            "display".into(),
            serde_json::json!(self
                .es
                .events()
                .map(|e| serde_json::json!([e, self.display[e]]))
                .collect::<Vec<_>>()),
        );
        obj.insert("game".into(), self.seq.game.to_json());
        v
    }

    pub fn to_dot(&self, name: &str) -> String {
        let game = &self.seq.game;
        let mut s = String::new();
        s.push_str(&format!("digraph \"{name}\" {{\n  rankdir=TB;\n  node [shape=plaintext];\n"));
        for e in self.es.events() {
            let g = self.display[e];
            let ix = game
                .indices_of(g)
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let sub = if ix.is_empty() { String::new() } else { format!("[{ix}]") };
            s.push_str(&format!(
                "  e{e} [label=\"{}{}{}\"];\n",
                game.lbl(g).replace('"', "'"),
                game.pol(g),
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

// ----------------------------------------------------------------- copycats

/// A structure-preserving injection of the right arena into the left arena,
/// giving a copycat-shaped strategy: for each right event `b` the strategy
/// holds an Opponent/Player pair at `b` and `φ(b)`, forwarding each move to
/// its twin once received.
pub fn relabeled_copycat(
    seq: Sequent,
    phi: &dyn Fn(EventId) -> EventId,
) -> Result<Strategy, StrategyError> {
    let nb = seq.right.es.len();
    let mut b = EsBuilder::new();
    let mut right_ev = vec![usize::MAX; nb];
    let mut left_ev = vec![usize::MAX; nb];
    let mut display = Vec::new();
    for e in 0..nb {
        let gr = seq.from_right[e];
        let gl = seq.from_left[phi(e)];
        let re = b.event(
            format!("r{e}"),
            seq.game.pol(gr),
            Some(seq.game.qa(gr)),
        );
        display.push(gr);
        let le = b.event(
            format!("l{e}"),
            seq.game.pol(gl),
            Some(seq.game.qa(gl)),
        );
        display.push(gl);
        right_ev[e] = re;
        left_ev[e] = le;
        // The negative twin enables the positive one.
        if seq.game.pol(gr) == Neg {
            b.edge(re, le);
        } else {
            b.edge(le, re);
        }
    }
    for e in 0..nb {
        if let Some(p) = seq.right.parent(e) {
            b.edge(right_ev[p], right_ev[e]);
            b.edge(left_ev[p], left_ev[e]);
        }
    }
    for (x, y) in seq.right.es.minimal_conflicts() {
        for &(ex, ey) in
            &[(right_ev[x], right_ev[y]), (left_ev[x], left_ev[y]), (right_ev[x], left_ev[y]), (left_ev[x], right_ev[y])]
        {
            b.conflict(ex, ey);
        }
    }
    let es = b.build()?;
    Strategy::from_parts(seq, es, display)
}

/// The copycat strategy on `A ⊢ A`.
pub fn copycat(a: &Arena, max_events: usize) -> Result<Strategy, StrategyError> {
    let seq = Sequent::new(a.clone(), a.clone(), max_events)?;
    relabeled_copycat(seq, &|e| e)
}

// --------------------------------------------------------------- interaction

/// One advance of the interaction: a `σ`-only move, a `τ`-only move, or a
/// synchronized pair on the shared component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Sig(EventId),
    Tau(EventId),
    Sync(EventId, EventId),
}

/// The interaction `τ ⊛ σ`: the family of reachable secured matching pairs,
/// its prime members (those with a top move), and the induced event
/// structure on primes.
#[derive(Debug)]
pub struct Interaction {
    /// All reachable states as configuration pairs `(x ⊆ S, y ⊆ T)`.
    pub states: Vec<(BitSet, BitSet)>,
    state_index: HashMap<(Vec<u64>, Vec<u64>), usize>,
    /// Prime states and their top moves.
    pub primes: Vec<(usize, Move)>,
    /// Event structure on the primes, ordered by state inclusion.
    pub es: EventStructure,
}

fn key(x: &BitSet, y: &BitSet) -> (Vec<u64>, Vec<u64>) {
    (x.words().to_vec(), y.words().to_vec())
}

/// Compute the interaction of `σ : A ⊢ B` with `τ : B ⊢ C`.
pub fn interact(
    sigma: &Strategy,
    tau: &Strategy,
    max_states: usize,
) -> Result<Interaction, StrategyError> {
    let bs = &sigma.seq.right;
    let bt = &tau.seq.left;
    if bs.es.len() != bt.es.len() {
        return Err(StrategyError::Mismatch(format!(
            "shared arenas have {} vs {} events",
            bs.es.len(),
            bt.es.len()
        )));
    }
    let (ns, nt) = (sigma.es.len(), tau.es.len());
    // Per strategy event: the shared-component event it synchronizes on.
    let sig_mid: Vec<Option<EventId>> =
        (0..ns).map(|s| sigma.seq.to_right[sigma.display[s]]).collect();
    let tau_mid: Vec<Option<EventId>> =
        (0..nt).map(|t| tau.seq.to_left[tau.display[t]]).collect();

    let mut states: Vec<(BitSet, BitSet)> = Vec::new();
    let mut state_index: HashMap<(Vec<u64>, Vec<u64>), usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let empty = (BitSet::new(ns), BitSet::new(nt));
    state_index.insert(key(&empty.0, &empty.1), 0);
    states.push(empty);
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        let (x, y) = states[i].clone();
        let mut nexts: Vec<(BitSet, BitSet)> = Vec::new();
        let en_x = sigma.es.enabled(&x);
        let en_y = tau.es.enabled(&y);
        for &s in &en_x {
            match sig_mid[s] {
                None => {
                    let mut nx = x.clone();
                    nx.insert(s);
                    nexts.push((nx, y.clone()));
                }
                Some(b) => {
                    for &t in &en_y {
                        if tau_mid[t] == Some(b) {
                            let mut nx = x.clone();
                            nx.insert(s);
                            let mut ny = y.clone();
                            ny.insert(t);
                            nexts.push((nx, ny));
                        }
                    }
                }
            }
        }
        for &t in &en_y {
            if tau_mid[t].is_none() {
                let mut ny = y.clone();
                ny.insert(t);
                nexts.push((x.clone(), ny));
            }
        }
        for st in nexts {
            let k = key(&st.0, &st.1);
            if !state_index.contains_key(&k) {
                if states.len() >= max_states {
                    return Err(StrategyError::Budget(states.len() + 1, max_states));
                }
                state_index.insert(k, states.len());
                states.push(st);
                queue.push_back(states.len() - 1);
            }
        }
    }

    // Covering predecessors of a state: removable maximal moves.
    let undo_moves = |x: &BitSet, y: &BitSet| -> Vec<Move> {
        let mut moves = Vec::new();
        for s in x.iter() {
            if x.iter().any(|s2| s2 != s && sigma.es.le(s, s2)) {
                continue; // not maximal in x
            }
            match sig_mid[s] {
                None => moves.push(Move::Sig(s)),
                Some(b) => {
                    for t in y.iter() {
                        if tau_mid[t] == Some(b)
                            && !y.iter().any(|t2| t2 != t && tau.es.le(t, t2))
                        {
                            // The partner must be the matching maximal τ event
                            // at the same shared position.
                            let same_pos = {
                                let mut x2 = x.clone();
                                x2.remove(s);
                                let mut y2 = y.clone();
                                y2.remove(t);
                                state_index.contains_key(&key(&x2, &y2))
                            };
                            if same_pos {
                                moves.push(Move::Sync(s, t));
                            }
                        }
                    }
                }
            }
        }
        for t in y.iter() {
            if tau_mid[t].is_none() && !y.iter().any(|t2| t2 != t && tau.es.le(t, t2)) {
                moves.push(Move::Tau(t));
            }
        }
        // Keep only moves whose removal lands back in the family.
        moves.retain(|m| {
            let (mut x2, mut y2) = (x.clone(), y.clone());
            match *m {
                Move::Sig(s) => x2.remove(s),
                Move::Tau(t) => y2.remove(t),
                Move::Sync(s, t) => {
                    x2.remove(s);
                    y2.remove(t);
                }
            }
            state_index.contains_key(&key(&x2, &y2))
        });
        moves
    };

    let mut primes: Vec<(usize, Move)> = Vec::new();
    for (i, (x, y)) in states.iter().enumerate() {
        if x.is_empty() && y.is_empty() {
            continue;
        }
        let moves = undo_moves(x, y);
        if moves.len() == 1 {
            primes.push((i, moves[0]));
        }
    }
    primes.sort_by_key(|&(i, _)| states[i].0.len() + states[i].1.len());

    // Event structure on primes: order by componentwise inclusion, conflict
    // when the union is not reachable.
    let np = primes.len();
    let below = |a: usize, b: usize| -> bool {
        let (xa, ya) = &states[primes[a].0];
        let (xb, yb) = &states[primes[b].0];
        xa.is_subset(xb) && ya.is_subset(yb)
    };
    let mut b = EsBuilder::new();
    for (pi, &(si, m)) in primes.iter().enumerate() {
        let _ = si;
        let (pol, qa, lab) = match m {
            Move::Sig(s) => (
                sigma.pol(s),
                sigma.qa(s),
                format!("s:{}", sigma.seq.game.lbl(sigma.display[s])),
            ),
            Move::Tau(t) => (
                tau.pol(t),
                tau.qa(t),
                format!("t:{}", tau.seq.game.lbl(tau.display[t])),
            ),
            Move::Sync(s, _t) => (
                sigma.pol(s),
                sigma.qa(s),
                format!("b:{}", sigma.seq.game.lbl(sigma.display[s])),
            ),
        };
        let e = b.event(lab, pol, Some(qa));
        debug_assert_eq!(e, pi);
    }
    for i in 0..np {
        for j in 0..np {
            if i != j && below(i, j) {
                // Immediate edge when nothing sits strictly between.
                let imm = !(0..np).any(|k| k != i && k != j && below(i, k) && below(k, j));
                if imm {
                    b.edge(i, j);
                }
            }
        }
    }
    for i in 0..np {
        for j in i + 1..np {
            if below(i, j) || below(j, i) {
                continue;
            }
            let (xi, yi) = &states[primes[i].0];
            let (xj, yj) = &states[primes[j].0];
            let mut ux = xi.clone();
            ux.union_with(xj);
            let mut uy = yi.clone();
            uy.union_with(yj);
            if !state_index.contains_key(&key(&ux, &uy)) {
                b.conflict(i, j);
            }
        }
    }
    let es = b.build()?;
    Ok(Interaction { states, state_index, primes, es })
}

impl Interaction {
    pub fn has_state(&self, x: &BitSet, y: &BitSet) -> bool {
        self.state_index.contains_key(&key(x, y))
    }
}

/// Compose `σ : A ⊢ B` with `τ : B ⊢ C` into a strategy on `A ⊢ C` by hiding
/// the synchronized moves of the interaction.
pub fn compose(
    sigma: &Strategy,
    tau: &Strategy,
    max_states: usize,
) -> Result<Strategy, StrategyError> {
    let inter = interact(sigma, tau, max_states)?;
    compose_from_interaction(sigma, tau, &inter)
}

pub fn compose_from_interaction(
    sigma: &Strategy,
    tau: &Strategy,
    inter: &Interaction,
) -> Result<Strategy, StrategyError> {
    let seq = Sequent::new(
        sigma.seq.left.clone(),
        tau.seq.right.clone(),
        usize::MAX,
    )?;
    // Visible primes: top move not synchronized.
    let visible: Vec<usize> = inter
        .primes
        .iter()
        .enumerate()
        .filter(|(_, &(_, m))| !matches!(m, Move::Sync(..)))
        .map(|(pi, _)| pi)
        .collect();
    let vis_pos: HashMap<usize, usize> =
        visible.iter().enumerate().map(|(k, &pi)| (pi, k)).collect();
    let mut b = EsBuilder::new();
    let mut display = Vec::new();
    for &pi in &visible {
        let (_, m) = inter.primes[pi];
        let g = match m {
            Move::Sig(s) => {
                let a = sigma.seq.to_left[sigma.display[s]].expect("visible σ move is on A");
                seq.from_left[a]
            }
            Move::Tau(t) => {
                let c = tau.seq.to_right[tau.display[t]].expect("visible τ move is on C");
                seq.from_right[c]
            }
            Move::Sync(..) => unreachable!(),
        };
        b.event(seq.game.lbl(g).to_string(), seq.game.pol(g), Some(seq.game.qa(g)));
        display.push(g);
    }
    // Order: restriction of the interaction order to visible primes.
    for (k, &pi) in visible.iter().enumerate() {
        for (l, &pj) in visible.iter().enumerate() {
            if k != l && inter.es.lt(pi, pj) {
                let imm = !visible
                    .iter()
                    .any(|&pk| pk != pi && pk != pj && inter.es.lt(pi, pk) && inter.es.lt(pk, pj));
                if imm {
                    b.edge(k, l);
                }
            }
        }
    }
    // Conflict: inherited from the interaction.
    for (k, &pi) in visible.iter().enumerate() {
        for (l, &pj) in visible.iter().enumerate() {
            if k < l && inter.es.conflicts(pi, pj) {
                b.conflict(k, l);
            }
        }
    }
    let _ = vis_pos;
    let es = b.build()?;
    Strategy::from_parts(seq, es, display)
}

// -------------------------------------------------------- basic constructions

/// Relabel a strategy onto a new sequent through a game-event translation.
pub fn remap(
    sigma: &Strategy,
    seq: Sequent,
    f: &dyn Fn(EventId) -> EventId,
) -> Result<Strategy, StrategyError> {
    let display = sigma.display.iter().map(|&g| f(g)).collect();
    Strategy::from_parts(seq, sigma.es.clone(), display)
}

/// Tensor `σ ⊗ τ : A₁ ∥ A₂ ⊢ B₁ ∥ B₂`: side-by-side, no interaction.
pub fn tensor(sigma: &Strategy, tau: &Strategy, max_events: usize) -> Result<Strategy, StrategyError> {
    let left = sigma.seq.left.par(&tau.seq.left, max_events)?;
    let right = sigma.seq.right.par(&tau.seq.right, max_events)?;
    let seq = Sequent::new(left, right, max_events)?;
    let (es, lmap, rmap) = sigma.es.parallel(&tau.es);
    // Component embeddings: the parallel arena keeps node ids offset by the
    // left operand's node count and indices unchanged.
    let nl_nodes = sigma.seq.left.meager.nodes.len();
    let nr_nodes = sigma.seq.right.meager.nodes.len();
    let mut display = vec![usize::MAX; es.len()];
    for e in sigma.es.events() {
        let g = sigma.display[e];
        let ng = match sigma.seq.to_left[g] {
            Some(a) => {
                let (n, ix) = (sigma.seq.left.node_of(a), sigma.seq.left.indices_of(a));
                seq.from_left[seq.left.event_at(n, ix).unwrap()]
            }
            None => {
                let bb = sigma.seq.to_right[g].unwrap();
                let (n, ix) = (sigma.seq.right.node_of(bb), sigma.seq.right.indices_of(bb));
                seq.from_right[seq.right.event_at(n, ix).unwrap()]
            }
        };
        display[lmap[e]] = ng;
    }
    for e in tau.es.events() {
        let g = tau.display[e];
        let ng = match tau.seq.to_left[g] {
            Some(a) => {
                let (n, ix) = (tau.seq.left.node_of(a), tau.seq.left.indices_of(a));
                seq.from_left[seq.left.event_at(n + nl_nodes, ix).unwrap()]
            }
            None => {
                let bb = tau.seq.to_right[g].unwrap();
                let (n, ix) = (tau.seq.right.node_of(bb), tau.seq.right.indices_of(bb));
                seq.from_right[seq.right.event_at(n + nr_nodes, ix).unwrap()]
            }
        };
        display[rmap[e]] = ng;
    }
    Strategy::from_parts(seq, es, display)
}

/// Pairing `⟨σ, τ⟩ : Γ ⊢ A & B` of two pointed strategies on a shared
/// context: disjoint union with the two initial moves in conflict.
pub fn pairing(sigma: &Strategy, tau: &Strategy, max_events: usize) -> Result<Strategy, StrategyError> {
    let right = sigma.seq.right.product(&tau.seq.right, max_events)?;
    let seq = Sequent::new(sigma.seq.left.clone(), right, max_events)?;
    let (mut es, lmap, rmap) = sigma.es.parallel(&tau.es);
    // Cross conflict between the two summands, seeded at their initial moves.
    {
        let mut b = EsBuilder::new();
        for e in es.events() {
            b.event(es.label(e).to_string(), es.pol(e), es.qa(e));
        }
        for e in es.events() {
            for &f in es.succ(e) {
                b.edge(e, f);
            }
        }
        for (x, y) in es.minimal_conflicts() {
            b.conflict(x, y);
        }
        for &sm in &sigma.es.minimal() {
            for &tm in &tau.es.minimal() {
                b.conflict(lmap[sm], rmap[tm]);
            }
        }
        es = b.build()?;
    }
    let nr_nodes = sigma.seq.right.meager.nodes.len();
    let mut display = vec![usize::MAX; es.len()];
    for e in sigma.es.events() {
        let g = sigma.display[e];
        let ng = match sigma.seq.to_left[g] {
            Some(a) => seq.from_left[a],
            None => {
                let bb = sigma.seq.to_right[g].unwrap();
                let (n, ix) = (sigma.seq.right.node_of(bb), sigma.seq.right.indices_of(bb));
                seq.from_right[seq.right.event_at(n, ix).unwrap()]
            }
        };
        display[lmap[e]] = ng;
    }
    for e in tau.es.events() {
        let g = tau.display[e];
        let ng = match tau.seq.to_left[g] {
            Some(a) => seq.from_left[a],
            None => {
                let bb = tau.seq.to_right[g].unwrap();
                let (n, ix) = (tau.seq.right.node_of(bb), tau.seq.right.indices_of(bb));
                seq.from_right[seq.right.event_at(n + nr_nodes, ix).unwrap()]
            }
        };
        display[rmap[e]] = ng;
    }
    Strategy::from_parts(seq, es, display)
}

// ------------------------------------------------------------- exponentials

/// Dereliction `!A ⊢ A`: copycat through copy 0 of the replicated side.
pub fn der(a: &Arena, w: usize, max_events: usize) -> Result<Strategy, StrategyError> {
    let banged = a.bang(w, max_events)?;
    let seq = Sequent::new(banged, a.clone(), max_events)?;
    let phi: Vec<EventId> = a
        .es
        .events()
        .map(|e| {
            let (n, ix) = (a.node_of(e), a.indices_of(e));
            let mut jx = vec![0u32];
            jx.extend_from_slice(ix);
            seq.left.event_at(n, &jx).expect("copy 0 address")
        })
        .collect();
    relabeled_copycat(seq, &|e| phi[e])
}

/// Digging `!A ⊢ !!A`: copycat through the pairing `(i, j) ↦ i·w + j` of
/// copy indices, the left side being replicated at width `w²`.
pub fn dig(a: &Arena, w: usize, max_events: usize) -> Result<Strategy, StrategyError> {
    let left = a.bang(w * w, max_events)?;
    let right = a.bang(w, max_events)?.bang(w, max_events)?;
    let seq = Sequent::new(left, right.clone(), max_events)?;
    let phi: Vec<EventId> = right
        .es
        .events()
        .map(|e| {
            let (n, ix) = (right.node_of(e), right.indices_of(e));
            let mut jx = vec![ix[0] * w as u32 + ix[1]];
            jx.extend_from_slice(&ix[2..]);
            seq.left.event_at(n, &jx).expect("paired address")
        })
        .collect();
    relabeled_copycat(seq, &|e| phi[e])
}

/// Monoidality `!(A ∥ B) ⊢ !A ∥ !B`: copycat on identical addresses (the
/// shared replication layer on the left splits into one layer per side).
pub fn mon(a: &Arena, b: &Arena, w: usize, max_events: usize) -> Result<Strategy, StrategyError> {
    let left = a.par(b, max_events)?.bang(w, max_events)?;
    let right = a.bang(w, max_events)?.par(&b.bang(w, max_events)?, max_events)?;
    let seq = Sequent::new(left, right.clone(), max_events)?;
    let phi: Vec<EventId> = right
        .es
        .events()
        .map(|e| {
            let (n, ix) = (right.node_of(e), right.indices_of(e));
            seq.left.event_at(n, ix).expect("shared address")
        })
        .collect();
    relabeled_copycat(seq, &|e| phi[e])
}

/// Curry `σ : (Γ ∥ D) ⊢ B` into `Γ ⊢ D ⊸ B` (`B` pointed). Pure display
/// translation: the domain part moves under the codomain's initial move.
pub fn curry(
    sigma: &Strategy,
    gamma: &Arena,
    dom: &Arena,
    max_events: usize,
) -> Result<Strategy, StrategyError> {
    let b_arena = sigma.seq.right.clone();
    let arrow = dom.affine_arrow(&b_arena, max_events)?;
    let seq = Sequent::new(gamma.clone(), arrow, max_events)?;
    let n_gamma = gamma.meager.nodes.len();
    let n_b = b_arena.meager.nodes.len();
    let old = &sigma.seq;
    let f = |g: EventId| -> EventId {
        match old.to_left[g] {
            Some(l) => {
                let (n, ix) = (old.left.node_of(l), old.left.indices_of(l));
                if n < n_gamma {
                    seq.from_left[seq.left.event_at(n, ix).expect("context address")]
                } else {
                    // Domain part: arrow nodes place it after the codomain.
                    let an = n_b + (n - n_gamma);
                    seq.from_right[seq.right.event_at(an, ix).expect("domain address")]
                }
            }
            None => {
                let r = old.to_right[g].unwrap();
                let (n, ix) = (old.right.node_of(r), old.right.indices_of(r));
                seq.from_right[seq.right.event_at(n, ix).expect("codomain address")]
            }
        }
    };
    remap(sigma, seq.clone(), &f)
}

/// Uncurry `σ : Γ ⊢ D ⊸ B` into `(Γ ∥ D) ⊢ B`.
pub fn uncurry(
    sigma: &Strategy,
    gamma: &Arena,
    dom: &Arena,
    codomain: &Arena,
    max_events: usize,
) -> Result<Strategy, StrategyError> {
    let left = gamma.par(dom, max_events)?;
    let seq = Sequent::new(left, codomain.clone(), max_events)?;
    let n_gamma = gamma.meager.nodes.len();
    let n_b = codomain.meager.nodes.len();
    let old = &sigma.seq;
    let f = |g: EventId| -> EventId {
        match old.to_left[g] {
            Some(l) => {
                let (n, ix) = (old.left.node_of(l), old.left.indices_of(l));
                seq.from_left[seq.left.event_at(n, ix).expect("context address")]
            }
            None => {
                let r = old.to_right[g].unwrap();
                let (n, ix) = (old.right.node_of(r), old.right.indices_of(r));
                if n < n_b {
                    seq.from_right[seq.right.event_at(n, ix).expect("codomain address")]
                } else {
                    let ln = n_gamma + (n - n_b);
                    seq.from_left[seq.left.event_at(ln, ix).expect("domain address")]
                }
            }
        }
    };
    remap(sigma, seq.clone(), &f)
}

/// Widths of the outermost replication layer of each root, grouped by layer.
fn root_layers(a: &Arena) -> Result<Vec<crate::arena::LayerId>, StrategyError> {
    let mut layers = Vec::new();
    for &r in &a.meager.roots {
        match a.meager.nodes[r].own_layers.first() {
            Some(&l) => {
                if !layers.contains(&l) {
                    layers.push(l);
                }
            }
            None => {
                return Err(StrategyError::Width(format!(
                    "root '{}' is not replicated",
                    a.meager.nodes[r].label
                )))
            }
        }
    }
    Ok(layers)
}

/// Promotion `σ† : Γ' ⊢ !A` of `σ : Γ ⊢ A` at width `w`: `w` disjoint copies
/// of `σ`, with the context widths multiplied by `w` and copy `i` using the
/// context index block `i·ws .. (i+1)·ws` of each layer.
pub fn promotion(sigma: &Strategy, w: usize, max_events: usize) -> Result<Strategy, StrategyError> {
    let old_left = &sigma.seq.left;
    let ctx_layers = root_layers(old_left)?;
    let mut widened = old_left.meager.clone();
    for &l in &ctx_layers {
        widened.layer_widths[l] *= w;
    }
    let left = Arena::from_meager(widened, max_events)?;
    let right = sigma.seq.right.bang(w, max_events)?;
    let seq = Sequent::new(left, right, max_events)?;
    let ns = sigma.es.len();
    let mut b = EsBuilder::new();
    let mut display = Vec::new();
    for copy in 0..w {
        for e in sigma.es.events() {
            let g = sigma.display[e];
            let ng = match sigma.seq.to_left[g] {
                Some(l) => {
                    let (n, ix) = (old_left.node_of(l), old_left.indices_of(l));
                    let layer = old_left.meager.layer_path(n)[0];
                    let ws = old_left.meager.layer_widths[layer] as u32;
                    let mut jx = ix.to_vec();
                    jx[0] += copy as u32 * ws;
                    seq.from_left[seq.left.event_at(n, &jx).expect("widened address")]
                }
                None => {
                    let r = sigma.seq.to_right[g].unwrap();
                    let (n, ix) = (sigma.seq.right.node_of(r), sigma.seq.right.indices_of(r));
                    let mut jx = vec![copy as u32];
                    jx.extend_from_slice(ix);
                    seq.from_right[seq.right.event_at(n, &jx).expect("replicated address")]
                }
            };
            b.event(
                format!("{}.{}", copy, sigma.es.label(e)),
                sigma.es.pol(e),
                sigma.es.qa(e),
            );
            display.push(ng);
        }
        for e in sigma.es.events() {
            for &f in sigma.es.succ(e) {
                b.edge(copy * ns + e, copy * ns + f);
            }
        }
        for (x, y) in sigma.es.minimal_conflicts() {
            b.conflict(copy * ns + x, copy * ns + y);
        }
    }
    let es = b.build()?;
    Strategy::from_parts(seq, es, display)
}

/// Transport a strategy onto a game with the same skeletons but (weakly)
/// larger replication widths; addresses carry over unchanged.
pub fn cast(
    sigma: &Strategy,
    left: Arena,
    right: Arena,
    max_events: usize,
) -> Result<Strategy, StrategyError> {
    let seq = Sequent::new(left, right, max_events)?;
    let old = &sigma.seq;
    let f = |g: EventId| -> EventId {
        match old.to_left[g] {
            Some(l) => {
                let (n, ix) = (old.left.node_of(l), old.left.indices_of(l));
                seq.from_left[seq.left.event_at(n, ix).expect("cast left address")]
            }
            None => {
                let r = old.to_right[g].unwrap();
                let (n, ix) = (old.right.node_of(r), old.right.indices_of(r));
                seq.from_right[seq.right.event_at(n, ix).expect("cast right address")]
            }
        }
    };
    remap(sigma, seq.clone(), &f)
}

// ----------------------------------------------------------- positive isomorphy

/// Test whether two strategies on the same game are isomorphic with displays
/// matching up to positive symmetry (copy indices of Player moves may
/// differ; Opponent indices and everything structural must agree).
pub fn positive_iso(sigma: &Strategy, tau: &Strategy) -> bool {
    if sigma.es.len() != tau.es.len() {
        return false;
    }
    if sigma.seq.game.es.len() != tau.seq.game.es.len() {
        return false;
    }
    let n = sigma.es.len();
    // Match events in order of causal depth with backtracking.
    let mut order: Vec<EventId> = sigma.es.events().collect();
    order.sort_by_key(|&e| sigma.es.down_set(e).len());
    let mut assign: Vec<Option<EventId>> = vec![None; n];
    let mut used: Vec<bool> = vec![false; n];
    fn compatible(
        sigma: &Strategy,
        tau: &Strategy,
        order: &[EventId],
        assign: &[Option<EventId>],
        k: usize,
        cand: EventId,
    ) -> bool {
        let e = order[k];
        let (g, h) = (sigma.display[e], tau.display[cand]);
        let ga = &sigma.seq.game;
        let ha = &tau.seq.game;
        if ga.node_of(g) != ha.node_of(h) {
            return false;
        }
        if sigma.pol(e) == Neg && ga.ind(g) != ha.ind(h) {
            return false;
        }
        for j in 0..k {
            let f = order[j];
            let fc = match assign[f] {
                Some(x) => x,
                None => continue,
            };
            if sigma.es.le(f, e) != tau.es.le(fc, cand)
                || sigma.es.le(e, f) != tau.es.le(cand, fc)
                || sigma.es.conflicts(e, f) != tau.es.conflicts(cand, fc)
            {
                return false;
            }
            // Copy-index patterns on shared layers must transfer — but only
            // between consistent events: symmetries act per configuration,
            // and conflicting events never share one.
            if sigma.es.conflicts(e, f) {
                continue;
            }
            let (gf, hf) = (sigma.display[f], tau.display[fc]);
            let ln_e = ga.meager.layer_path(ga.node_of(g));
            let ln_f = ga.meager.layer_path(ga.node_of(gf));
            for (i, l) in ln_e.iter().enumerate() {
                if let Some(jj) = ln_f.iter().position(|m| m == l) {
                    let src = ga.indices_of(g)[i] == ga.indices_of(gf)[jj];
                    let tgt = ha.indices_of(h)[i] == ha.indices_of(hf)[jj];
                    if src != tgt {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn search(
        sigma: &Strategy,
        tau: &Strategy,
        order: &[EventId],
        assign: &mut Vec<Option<EventId>>,
        used: &mut Vec<bool>,
        k: usize,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let e = order[k];
        for cand in 0..tau.es.len() {
            if used[cand] {
                continue;
            }
            if !compatible(sigma, tau, order, assign, k, cand) {
                continue;
            }
            assign[e] = Some(cand);
            used[cand] = true;
            if search(sigma, tau, order, assign, used, k + 1) {
                return true;
            }
            assign[e] = None;
            used[cand] = false;
        }
        false
    }
    search(sigma, tau, &order, &mut assign, &mut used, 0)
}
