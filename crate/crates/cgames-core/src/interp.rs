// SPDX-License-Identifier: Apache-2.0

//! Denotational interpreter: compositional translation of terms into causal
//! strategies.
//!
//! A term `x₁:A₁, …, xₖ:Aₖ ⊢ M : B` denotes a strategy on the sequent
//! `!⟦A₁⟧ ∥ … ∥ !⟦Aₖ⟧ ⊢ ⟦B⟧`. Replication widths of the context components
//! are tracked per interpretation and grow through substitution (each
//! argument occurrence receives a disjoint block of copy indices); after
//! every combinator application the interpretation is *compacted*, renaming
//! the used copy indices onto an initial segment so widths stay proportional
//! to the number of uses actually displayed.
//!
//! Primitive combinators (sequencing, conditionals, arithmetic, memory and
//! semaphore access, `let` and the parallel `plet`) are built directly as
//! event structures over their game; `newref`/`newsem` compose the body
//! against an inductively grown reference cell (resp. lock) strategy.

use std::collections::{BTreeMap, BTreeSet};

use crate::arena::{interpret_type_width, Arena, Budget, NodeId, Ty};
use crate::es::{EsBuilder, EventId, Polarity, QA};
use crate::lang::{LangError, Term};
use crate::strategy::{
    compose, copycat, promotion, relabeled_copycat, tensor, uncurry, Sequent, Strategy,
    StrategyError,
};

/// An interpreted term: a strategy over a context of separately replicated
/// components, together with the component arenas, their current widths and
/// the term's type.
#[derive(Debug, Clone)]
pub struct Interp {
    pub strategy: Strategy,
    pub comps: Vec<Arena>,
    pub widths: Vec<usize>,
    pub ty: Ty,
}

fn states_cap(budget: &Budget) -> usize {
    budget.max_events.saturating_mul(40)
}

/// The base arena of a context component (uniform internal widths).
pub fn comp_arena(ty: &Ty, budget: &Budget) -> Result<Arena, LangError> {
    Ok(interpret_type_width(ty, budget, budget.bang_width)?)
}

/// Node-id offset of each component inside a context game.
fn bases(comps: &[Arena]) -> Vec<usize> {
    let mut out = Vec::with_capacity(comps.len() + 1);
    let mut acc = 0;
    for c in comps {
        out.push(acc);
        acc += c.meager.nodes.len();
    }
    out.push(acc);
    out
}

fn comp_of(bases: &[usize], node: NodeId) -> usize {
    match bases.binary_search(&(node + 1)) {
        Ok(i) | Err(i) => i - 1,
    }
}

/// The context game `!A₁ ∥ … ∥ !Aₖ` at the given widths (left-associated).
pub fn ctx_game(comps: &[Arena], widths: &[usize], max: usize) -> Result<Arena, LangError> {
    let mut acc: Option<Arena> = None;
    for (c, &w) in comps.iter().zip(widths) {
        let b = c.bang(w, max)?;
        acc = Some(match acc {
            None => b,
            Some(a) => a.par(&b, max)?,
        });
    }
    Ok(match acc {
        Some(a) => a,
        None => Arena::empty(max),
    })
}

/// Game event on the left at `(node, indices)`.
fn lg(seq: &Sequent, node: NodeId, ix: &[u32]) -> Result<EventId, LangError> {
    let e = seq
        .left
        .event_at(node, ix)
        .ok_or_else(|| StrategyError::Invalid(format!("no left event at node {node} ix {ix:?}")))?;
    Ok(seq.from_left[e])
}

/// Game event on the right at `(node, indices)`.
fn rg(seq: &Sequent, node: NodeId, ix: &[u32]) -> Result<EventId, LangError> {
    let e = seq
        .right
        .event_at(node, ix)
        .ok_or_else(|| StrategyError::Invalid(format!("no right event at node {node} ix {ix:?}")))?;
    Ok(seq.from_right[e])
}

/// Incremental strategy builder: events are game events plus immediate
/// causal predecessors; conflicts are added explicitly between branches.
struct Sb {
    seq: Sequent,
    b: EsBuilder,
    display: Vec<EventId>,
}

impl Sb {
    fn new(seq: Sequent) -> Sb {
        Sb { seq, b: EsBuilder::new(), display: Vec::new() }
    }

    fn ev(&mut self, g: EventId, preds: &[usize]) -> usize {
        let id = self.display.len();
        self.b.event(
            format!("{}#{}", self.seq.game.lbl(g), id),
            self.seq.game.pol(g),
            Some(self.seq.game.qa(g)),
        );
        for &p in preds {
            self.b.edge(p, id);
        }
        self.display.push(g);
        id
    }

    fn confl(&mut self, a: usize, b: usize) {
        self.b.conflict(a, b);
    }

    fn fan(&mut self, evs: &[usize]) {
        for i in 0..evs.len() {
            for j in i + 1..evs.len() {
                self.confl(evs[i], evs[j]);
            }
        }
    }

    fn done(self) -> Result<Strategy, LangError> {
        Ok(Strategy::from_parts(self.seq, self.b.build()?, self.display)?)
    }
}

/// Answer nodes of a ground arena (children of its root question).
fn values(x: &Arena) -> Vec<NodeId> {
    x.meager.nodes[0].children.clone()
}

// ------------------------------------------------------ primitive strategies

/// `q⁻ · v⁺` on `Γ ⊢ X`: a ground constant.
fn const_strategy(
    left: Arena,
    right: Arena,
    answer: NodeId,
    max: usize,
) -> Result<Strategy, LangError> {
    let seq = Sequent::new(left, right, max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    sb.ev(rg(&sb.seq, answer, &[])?, &[q]);
    sb.done()
}

/// The empty response: receptive on the right roots, never answers.
fn bot_strategy(left: Arena, right: Arena, max: usize) -> Result<Strategy, LangError> {
    let seq = Sequent::new(left, right, max)?;
    let roots: Vec<NodeId> = seq.right.meager.roots.clone();
    let mut sb = Sb::new(seq);
    let mut evs = Vec::new();
    for &r in &roots {
        let g = rg(&sb.seq, r, &[])?;
        evs.push((sb.ev(g, &[]), g));
    }
    for i in 0..evs.len() {
        for j in i + 1..evs.len() {
            if sb.seq.game.es.conflicts(evs[i].1, evs[j].1) {
                sb.confl(evs[i].0, evs[j].0);
            }
        }
    }
    sb.done()
}

/// The variable `xᵢ`: copycat between the right game and copy 0 of the `i`-th
/// context component.
fn var_strategy(comps: &[Arena], i: usize, max: usize) -> Result<Interp, LangError> {
    let widths = vec![1usize; comps.len()];
    let left = ctx_game(comps, &widths, max)?;
    let right = comps[i].clone();
    let seq = Sequent::new(left, right, max)?;
    let base = bases(comps)[i];
    let mut phi = Vec::with_capacity(seq.right.es.len());
    for e in 0..seq.right.es.len() {
        let n = seq.right.node_of(e);
        let mut ix = vec![0u32];
        ix.extend_from_slice(seq.right.indices_of(e));
        let l = seq
            .left
            .event_at(base + n, &ix)
            .ok_or_else(|| StrategyError::Invalid("variable address".into()))?;
        phi.push(l);
    }
    let ty_placeholder = Ty::Unit; // overwritten by the caller
    let strategy = relabeled_copycat(seq, &|e| phi[e])?;
    Ok(Interp { strategy, comps: comps.to_vec(), widths, ty: ty_placeholder })
}

/// `seq : !𝕌 ∥ !X ⊢ X` — evaluate the unit argument, then the continuation.
fn seq_comb(x: &Arena, budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let u = Arena::ground_u(max);
    let comps = [u, x.clone()];
    let b = bases(&comps);
    let left = ctx_game(&comps, &[1, 1], max)?;
    let seq = Sequent::new(left, x.clone(), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let q1 = sb.ev(lg(&sb.seq, b[0], &[0])?, &[q]);
    let ok = sb.ev(lg(&sb.seq, b[0] + 1, &[0])?, &[q1]);
    let q2 = sb.ev(lg(&sb.seq, b[1], &[0])?, &[ok]);
    let mut fan = Vec::new();
    for a in values(x) {
        let vn = sb.ev(lg(&sb.seq, b[1] + a, &[0])?, &[q2]);
        sb.ev(rg(&sb.seq, a, &[])?, &[vn]);
        fan.push(vn);
    }
    sb.fan(&fan);
    sb.done()
}

/// `if : !𝔹 ∥ !X ∥ !X ⊢ X`.
fn if_comb(x: &Arena, budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let bool_a = Arena::ground_b(max);
    let comps = [bool_a, x.clone(), x.clone()];
    let b = bases(&comps);
    let left = ctx_game(&comps, &[1, 1, 1], max)?;
    let seq = Sequent::new(left, x.clone(), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let qb = sb.ev(lg(&sb.seq, b[0], &[0])?, &[q]);
    let tt = sb.ev(lg(&sb.seq, b[0] + 1, &[0])?, &[qb]);
    let ff = sb.ev(lg(&sb.seq, b[0] + 2, &[0])?, &[qb]);
    sb.confl(tt, ff);
    for (branch, comp) in [(tt, 1), (ff, 2)] {
        let qx = sb.ev(lg(&sb.seq, b[comp], &[0])?, &[branch]);
        let mut fan = Vec::new();
        for a in values(x) {
            let vn = sb.ev(lg(&sb.seq, b[comp] + a, &[0])?, &[qx]);
            sb.ev(rg(&sb.seq, a, &[])?, &[vn]);
            fan.push(vn);
        }
        sb.fan(&fan);
    }
    sb.done()
}

/// A unary arithmetic combinator `!ℕ ⊢ Y`: map each received value `k` to an
/// answer node of `Y` (or no answer, leaving the branch open).
fn arith_comb(
    right: Arena,
    out: impl Fn(usize) -> Option<NodeId>,
    budget: &Budget,
) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let nat = Arena::ground_n(budget);
    let comps = [nat];
    let left = ctx_game(&comps, &[1], max)?;
    let seq = Sequent::new(left, right, max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let qn = sb.ev(lg(&sb.seq, 0, &[0])?, &[q]);
    let mut fan = Vec::new();
    for k in 0..=budget.nat_max {
        let vn = sb.ev(lg(&sb.seq, 1 + k, &[0])?, &[qn]);
        if let Some(a) = out(k) {
            sb.ev(rg(&sb.seq, a, &[])?, &[vn]);
        }
        fan.push(vn);
    }
    sb.fan(&fan);
    sb.done()
}

/// `assign : !ref ∥ !ℕ ⊢ 𝕌` — evaluate the value, write it, acknowledge.
fn assign_comb(budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [Arena::ref_arena(budget), Arena::ground_n(budget)];
    let b = bases(&comps);
    let left = ctx_game(&comps, &[1, 1], max)?;
    let seq = Sequent::new(left, Arena::ground_u(max), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let qn = sb.ev(lg(&sb.seq, b[1], &[0])?, &[q]);
    let mut fan = Vec::new();
    for k in 0..=budget.nat_max {
        let vn = sb.ev(lg(&sb.seq, b[1] + 1 + k, &[0])?, &[qn]);
        let wk = sb.ev(lg(&sb.seq, b[0] + 2 * k, &[0])?, &[vn]);
        let okl = sb.ev(lg(&sb.seq, b[0] + 2 * k + 1, &[0])?, &[wk]);
        sb.ev(rg(&sb.seq, 1, &[])?, &[okl]);
        fan.push(vn);
    }
    sb.fan(&fan);
    sb.done()
}

/// `deref : !ref ⊢ ℕ`.
fn deref_comb(budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [Arena::ref_arena(budget)];
    let left = ctx_game(&comps, &[1], max)?;
    let seq = Sequent::new(left, Arena::ground_n(budget), max)?;
    let read = 2 * (budget.nat_max + 1);
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let rd = sb.ev(lg(&sb.seq, read, &[0])?, &[q]);
    let mut fan = Vec::new();
    for m in 0..=budget.nat_max {
        let vn = sb.ev(lg(&sb.seq, read + 1 + m, &[0])?, &[rd]);
        sb.ev(rg(&sb.seq, 1 + m, &[])?, &[vn]);
        fan.push(vn);
    }
    sb.fan(&fan);
    sb.done()
}

/// `grab`/`release` : `!sem ⊢ 𝕌`, hitting the indicated root of the lock
/// arena (0 = grab, 2 = release).
fn sem_comb(root: NodeId, budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [Arena::sem_arena(budget)];
    let left = ctx_game(&comps, &[1], max)?;
    let seq = Sequent::new(left, Arena::ground_u(max), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let op = sb.ev(lg(&sb.seq, root, &[0])?, &[q]);
    let ok = sb.ev(lg(&sb.seq, root + 1, &[0])?, &[op]);
    sb.ev(rg(&sb.seq, 1, &[])?, &[ok]);
    sb.done()
}

/// `mksem : !𝕌 ∥ !𝕌 ⊢ sem` — route grab to the first method, release to the
/// second.
fn mksem_comb(budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [Arena::ground_u(max), Arena::ground_u(max)];
    let b = bases(&comps);
    let left = ctx_game(&comps, &[1, 1], max)?;
    let seq = Sequent::new(left, Arena::sem_arena(budget), max)?;
    let mut sb = Sb::new(seq);
    let mut roots = Vec::new();
    for (root, comp) in [(0usize, 0usize), (2, 1)] {
        let g = sb.ev(rg(&sb.seq, root, &[])?, &[]);
        let qm = sb.ev(lg(&sb.seq, b[comp], &[0])?, &[g]);
        let ok = sb.ev(lg(&sb.seq, b[comp] + 1, &[0])?, &[qm]);
        sb.ev(rg(&sb.seq, root + 1, &[])?, &[ok]);
        roots.push(g);
    }
    sb.confl(roots[0], roots[1]);
    sb.done()
}

/// `mkvar : !(ℕ→𝕌) ∥ !ℕ ⊢ ref` — writes call the method with the written
/// value, reads evaluate the read expression.
fn mkvar_comb(w_arena: &Arena, budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [w_arena.clone(), Arena::ground_n(budget)];
    let b = bases(&comps);
    // W = !ℕ ⊸ 𝕌: nodes q(0), ok(1), domain q(2), domain values 3…
    let wd_layer = w_arena.meager.nodes[2].own_layers[0];
    let wd = w_arena.meager.layer_widths[wd_layer];
    let left = ctx_game(&comps, &[1, 1], max)?;
    let seq = Sequent::new(left, Arena::ref_arena(budget), max)?;
    let read = 2 * (budget.nat_max + 1);
    let mut sb = Sb::new(seq);
    let mut roots = Vec::new();
    for k in 0..=budget.nat_max {
        let wk = sb.ev(rg(&sb.seq, 2 * k, &[])?, &[]);
        let qw = sb.ev(lg(&sb.seq, b[0], &[0])?, &[wk]);
        for i in 0..wd {
            let qd = sb.ev(lg(&sb.seq, b[0] + 2, &[0, i as u32])?, &[qw]);
            sb.ev(lg(&sb.seq, b[0] + 3 + k, &[0, i as u32])?, &[qd]);
        }
        let okw = sb.ev(lg(&sb.seq, b[0] + 1, &[0])?, &[qw]);
        sb.ev(rg(&sb.seq, 2 * k + 1, &[])?, &[okw]);
        roots.push(wk);
    }
    let rd = sb.ev(rg(&sb.seq, read, &[])?, &[]);
    let qn = sb.ev(lg(&sb.seq, b[1], &[0])?, &[rd]);
    let mut fan = Vec::new();
    for m in 0..=budget.nat_max {
        let vn = sb.ev(lg(&sb.seq, b[1] + 1 + m, &[0])?, &[qn]);
        sb.ev(rg(&sb.seq, read + 1 + m, &[])?, &[vn]);
        fan.push(vn);
    }
    sb.fan(&fan);
    roots.push(rd);
    sb.fan(&roots);
    sb.done()
}

/// `let : !X ∥ !(X→Y) ⊢ Y` — evaluate `X` once, memoize its value for every
/// domain copy of the continuation.
fn let_comb(x: &Arena, f_arena: &Arena, y: &Arena, budget: &Budget) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [x.clone(), f_arena.clone()];
    let b = bases(&comps);
    let ny = y.meager.nodes.len();
    // F = !X ⊸ Y: Y nodes 0…ny-1, then X with its root carrying the bang.
    let wd_layer = f_arena.meager.nodes[ny].own_layers[0];
    let wd = f_arena.meager.layer_widths[wd_layer];
    let left = ctx_game(&comps, &[1, 1], max)?;
    let seq = Sequent::new(left, y.clone(), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let qx = sb.ev(lg(&sb.seq, b[0], &[0])?, &[q]);
    let mut vfan = Vec::new();
    for v in values(x) {
        let vn = sb.ev(lg(&sb.seq, b[0] + v, &[0])?, &[qx]);
        let qf = sb.ev(lg(&sb.seq, b[1], &[0])?, &[vn]);
        for i in 0..wd {
            let qd = sb.ev(lg(&sb.seq, b[1] + ny, &[0, i as u32])?, &[qf]);
            sb.ev(lg(&sb.seq, b[1] + ny + v, &[0, i as u32])?, &[qd]);
        }
        let mut wfan = Vec::new();
        for w in values(y) {
            let wn = sb.ev(lg(&sb.seq, b[1] + w, &[0])?, &[qf]);
            sb.ev(rg(&sb.seq, w, &[])?, &[wn]);
            wfan.push(wn);
        }
        sb.fan(&wfan);
        vfan.push(vn);
    }
    sb.fan(&vfan);
    sb.done()
}

/// `plet : !X ∥ !X ∥ !(X→X→Y) ⊢ Y` — fork both bindings, call the
/// continuation once both values arrived.
fn plet_comb(
    x: &Arena,
    f_arena: &Arena,
    y: &Arena,
    budget: &Budget,
) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let comps = [x.clone(), x.clone(), f_arena.clone()];
    let b = bases(&comps);
    let ny = y.meager.nodes.len();
    let nx = x.meager.nodes.len();
    // F = !X ⊸ (!X ⊸ Y): Y at 0…, inner domain X at ny…, outer at ny+nx….
    let wd2_layer = f_arena.meager.nodes[ny].own_layers[0];
    let wd2 = f_arena.meager.layer_widths[wd2_layer];
    let wd1_layer = f_arena.meager.nodes[ny + nx].own_layers[0];
    let wd1 = f_arena.meager.layer_widths[wd1_layer];
    let left = ctx_game(&comps, &[1, 1, 1], max)?;
    let seq = Sequent::new(left, y.clone(), max)?;
    let mut sb = Sb::new(seq);
    let q = sb.ev(rg(&sb.seq, 0, &[])?, &[]);
    let qx1 = sb.ev(lg(&sb.seq, b[0], &[0])?, &[q]);
    let qx2 = sb.ev(lg(&sb.seq, b[1], &[0])?, &[q]);
    let mut v_evs = Vec::new();
    let mut w_evs = Vec::new();
    for v in values(x) {
        v_evs.push((v, sb.ev(lg(&sb.seq, b[0] + v, &[0])?, &[qx1])));
    }
    for w in values(x) {
        w_evs.push((w, sb.ev(lg(&sb.seq, b[1] + w, &[0])?, &[qx2])));
    }
    sb.fan(&v_evs.iter().map(|&(_, e)| e).collect::<Vec<_>>());
    sb.fan(&w_evs.iter().map(|&(_, e)| e).collect::<Vec<_>>());
    for &(v, ve) in &v_evs {
        for &(w, we) in &w_evs {
            let qf = sb.ev(lg(&sb.seq, b[2], &[0])?, &[ve, we]);
            for i in 0..wd1 {
                let qd = sb.ev(lg(&sb.seq, b[2] + ny + nx, &[0, i as u32])?, &[qf]);
                sb.ev(lg(&sb.seq, b[2] + ny + nx + v, &[0, i as u32])?, &[qd]);
            }
            for j in 0..wd2 {
                let qd = sb.ev(lg(&sb.seq, b[2] + ny, &[0, j as u32])?, &[qf]);
                sb.ev(lg(&sb.seq, b[2] + ny + w, &[0, j as u32])?, &[qd]);
            }
            let mut ufan = Vec::new();
            for u in values(y) {
                let un = sb.ev(lg(&sb.seq, b[2] + u, &[0])?, &[qf]);
                sb.ev(rg(&sb.seq, u, &[])?, &[un]);
                ufan.push(un);
            }
            sb.fan(&ufan);
        }
    }
    sb.done()
}

// ------------------------------------------------------------ memory cells

/// Demanded operations per copy index of a bound reference/semaphore: the
/// operation roots the body's strategy actually displays at each copy.
type Demand = BTreeMap<u32, BTreeSet<NodeId>>;

fn demanded_ops(it: &Interp, comp: usize) -> Demand {
    let b = bases(&it.comps);
    let mut out: Demand = BTreeMap::new();
    for e in it.strategy.es.events() {
        let g = it.strategy.display[e];
        if let Some(l) = it.strategy.seq.to_left[g] {
            let n = it.strategy.seq.left.node_of(l);
            if n >= b[comp] && n < b[comp + 1] {
                let rel = n - b[comp];
                if it.comps[comp].meager.nodes[rel].parent.is_none() {
                    let copy = it.strategy.seq.left.indices_of(l)[0];
                    out.entry(copy).or_default().insert(rel);
                }
            }
        }
    }
    out
}

/// Whether an operation is enabled in the given state, and the resulting
/// (answer node, next state); `None` blocks the play at the question.
fn cell_step(is_sem: bool, op: NodeId, state: usize, budget: &Budget) -> Option<(NodeId, usize)> {
    if is_sem {
        match (op, state) {
            (0, 0) => Some((1, 1)),          // grab an open lock
            (2, s) if s > 0 => Some((3, 0)), // release a held lock
            _ => None,
        }
    } else {
        let read = 2 * (budget.nat_max + 1);
        if op == read {
            Some((read + 1 + state, state))
        } else {
            Some((op + 1, op / 2)) // write k, acknowledge
        }
    }
}

/// The reference-cell (or lock) strategy on `⊢ !ref` (resp. `⊢ !sem`): a
/// tree of sequential plays threading the current contents, restricted to
/// the operations the composed body can actually perform.
fn cell_strategy(
    base: &Arena,
    width: usize,
    demand: &Demand,
    init: usize,
    is_sem: bool,
    budget: &Budget,
) -> Result<Strategy, LangError> {
    let max = budget.max_events;
    let seq = Sequent::new(Arena::empty(max), base.bang(width, max)?, max)?;
    let mut sb = Sb::new(seq);
    // Depth-first growth of the play tree; siblings conflict pairwise.
    struct Frame {
        state: usize,
        used: Vec<u32>,
        parent: Option<usize>,
    }
    fn grow(
        sb: &mut Sb,
        f: Frame,
        demand: &Demand,
        is_sem: bool,
        budget: &Budget,
    ) -> Result<Vec<usize>, LangError> {
        let mut children = Vec::new();
        for (&copy, ops) in demand {
            if f.used.contains(&copy) {
                continue;
            }
            for &op in ops {
                if sb.display.len() >= budget.max_events {
                    return Err(LangError::Budget(format!(
                        "memory cell exceeds {} events",
                        budget.max_events
                    )));
                }
                let preds: Vec<usize> = f.parent.into_iter().collect();
                let o = sb.ev(rg(&sb.seq, op, &[copy])?, &preds);
                children.push(o);
                if let Some((ans, next)) = cell_step(is_sem, op, f.state, budget) {
                    let a = sb.ev(rg(&sb.seq, ans, &[copy])?, &[o]);
                    let mut used = f.used.clone();
                    used.push(copy);
                    grow(sb, Frame { state: next, used, parent: Some(a) }, demand, is_sem, budget)?;
                }
            }
        }
        // Sibling operations are mutually exclusive continuations of the
        // same play; conflicts between deeper branches are inherited.
        sb.fan(&children);
        Ok(children)
    }
    grow(
        &mut sb,
        Frame { state: init, used: Vec::new(), parent: None },
        demand,
        is_sem,
        budget,
    )?;
    sb.done()
}

/// A free-standing memory cell (or lock) strategy on `⊢ !ref` / `⊢ !sem`,
/// serving every operation at every copy index.
pub fn cell(init: u64, width: usize, is_sem: bool, budget: &Budget) -> Result<Strategy, LangError> {
    let base = if is_sem { Arena::sem_arena(budget) } else { Arena::ref_arena(budget) };
    let ops: BTreeSet<NodeId> = base
        .meager
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.parent.is_none() && n.qa == QA::Question)
        .map(|(i, _)| i)
        .collect();
    let demand: Demand = (0..width as u32).map(|c| (c, ops.clone())).collect();
    cell_strategy(&base, width, &demand, init as usize, is_sem, budget)
}

// ------------------------------------------------------------- application

/// How an argument enters a combinator application.
enum Arg {
    /// The whole context, passed through by copycat at the given widths.
    Id(Vec<usize>),
    /// A promoted interpretation `σ†` at the given replication width.
    Bang(Interp, usize),
}

/// Compose `comb : G₁ ∥ … ∥ Gₖ ⊢ Y` with the tupled arguments, where `Gⱼ`
/// is the context game itself (for `Id`) or `!Xⱼ` (for `Bang`). Copy-index
/// blocks of the shared context are assigned per argument and the result is
/// compacted.
fn apply(
    comps: &[Arena],
    args: Vec<Arg>,
    comb: &Strategy,
    ty: Ty,
    budget: &Budget,
) -> Result<Interp, LangError> {
    let max = budget.max_events;
    let k = comps.len();
    // Per-argument strategies and context block widths.
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut strats: Vec<Strategy> = Vec::new();
    for a in &args {
        match a {
            Arg::Id(w) => {
                let g = ctx_game(comps, w, max)?;
                strats.push(copycat(&g, max)?);
                parts.push(w.clone());
            }
            Arg::Bang(it, p) => {
                strats.push(promotion(&it.strategy, *p, max)?);
                parts.push(it.widths.iter().map(|w| w * p).collect());
            }
        }
    }
    let mut fold: Option<Strategy> = None;
    for s in strats {
        fold = Some(match fold {
            None => s,
            Some(f) => tensor(&f, &s, max)?,
        });
    }
    let fold = fold.expect("combinator application needs at least one argument");
    let mut w_tot = vec![0usize; k];
    for p in &parts {
        for c in 0..k {
            w_tot[c] += p[c];
        }
    }
    for w in w_tot.iter_mut() {
        if *w == 0 {
            *w = 1;
        }
    }
    let mut offsets = vec![vec![0usize; k]; parts.len()];
    for j in 1..parts.len() {
        for c in 0..k {
            offsets[j][c] = offsets[j - 1][c] + parts[j - 1][c];
        }
    }
    // Relabel the tuple's left side into the merged context: composition
    // with the copy-index contraction is a pure relabeling because the
    // contraction is a copycat up to re-addressing.
    let new_left = ctx_game(comps, &w_tot, max)?;
    let new_seq = Sequent::new(new_left, fold.seq.right.clone(), max)?;
    let tot: usize = comps.iter().map(|c| c.meager.nodes.len()).sum();
    let cb = bases(comps);
    let mut display = Vec::with_capacity(fold.es.len());
    for e in fold.es.events() {
        let g = fold.display[e];
        let ng = match fold.seq.to_left[g] {
            Some(l) => {
                let n = fold.seq.left.node_of(l);
                let (j, within) = (n / tot, n % tot);
                let c = comp_of(&cb, within);
                let mut ix = fold.seq.left.indices_of(l).to_vec();
                ix[0] += offsets[j][c] as u32;
                lg(&new_seq, within, &ix)?
            }
            None => {
                let r = fold.seq.to_right[g].expect("tuple event is on the game");
                rg(&new_seq, fold.seq.right.node_of(r), fold.seq.right.indices_of(r))?
            }
        };
        display.push(ng);
    }
    let tuple = Strategy::from_parts(new_seq, fold.es.clone(), display)?;
    let composed = compose(&tuple, comb, states_cap(budget))?;
    compact(
        Interp { strategy: composed, comps: comps.to_vec(), widths: w_tot, ty },
        budget,
    )
}

/// Rename the used copy indices of every context component onto an initial
/// segment and shrink the widths accordingly.
fn compact(it: Interp, budget: &Budget) -> Result<Interp, LangError> {
    let max = budget.max_events;
    let k = it.comps.len();
    if k == 0 {
        return Ok(it);
    }
    let cb = bases(&it.comps);
    let mut used: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); k];
    for e in it.strategy.es.events() {
        let g = it.strategy.display[e];
        if let Some(l) = it.strategy.seq.to_left[g] {
            let n = it.strategy.seq.left.node_of(l);
            let c = comp_of(&cb, n);
            used[c].insert(it.strategy.seq.left.indices_of(l)[0]);
        }
    }
    let new_widths: Vec<usize> = used.iter().map(|u| u.len().max(1)).collect();
    let identity = new_widths == it.widths
        && used
            .iter()
            .all(|u| u.iter().copied().eq(0..u.len() as u32));
    if identity {
        return Ok(it);
    }
    let maps: Vec<BTreeMap<u32, u32>> = used
        .iter()
        .map(|u| u.iter().enumerate().map(|(r, &i)| (i, r as u32)).collect())
        .collect();
    let new_left = ctx_game(&it.comps, &new_widths, max)?;
    let new_seq = Sequent::new(new_left, it.strategy.seq.right.clone(), max)?;
    let mut display = Vec::with_capacity(it.strategy.es.len());
    for e in it.strategy.es.events() {
        let g = it.strategy.display[e];
        let ng = match it.strategy.seq.to_left[g] {
            Some(l) => {
                let n = it.strategy.seq.left.node_of(l);
                let c = comp_of(&cb, n);
                let mut ix = it.strategy.seq.left.indices_of(l).to_vec();
                ix[0] = maps[c][&ix[0]];
                lg(&new_seq, n, &ix)?
            }
            None => {
                let r = it.strategy.seq.to_right[g].expect("event is on the game");
                rg(
                    &new_seq,
                    it.strategy.seq.right.node_of(r),
                    it.strategy.seq.right.indices_of(r),
                )?
            }
        };
        display.push(ng);
    }
    let strategy = Strategy::from_parts(new_seq, it.strategy.es.clone(), display)?;
    Ok(Interp { strategy, comps: it.comps, widths: new_widths, ty: it.ty })
}

/// Domain replication width of a function strategy, read off its game.
fn domain_width(right: &Arena, codomain_nodes: usize) -> Result<usize, LangError> {
    let root = codomain_nodes;
    let layer = *right.meager.nodes[root]
        .own_layers
        .first()
        .ok_or_else(|| StrategyError::Width("function domain is not replicated".into()))?;
    Ok(right.meager.layer_widths[layer])
}

/// Check that an argument's game matches the expected domain component
/// (widths included); mismatches arise when a function abstracted at a wide
/// domain is fed where a uniform-width argument is expected.
fn check_same_game(actual: &Arena, expected: &Arena) -> Result<(), LangError> {
    let a = &actual.meager;
    let b = &expected.meager;
    let ok = a.nodes.len() == b.nodes.len()
        && a.layer_widths == b.layer_widths
        && a.nodes
            .iter()
            .zip(&b.nodes)
            .all(|(x, y)| x.pol == y.pol && x.qa == y.qa && x.parent == y.parent);
    if ok {
        Ok(())
    } else {
        Err(LangError::Strategy(StrategyError::Width(
            "argument game does not match the function's domain width".into(),
        )))
    }
}

// -------------------------------------------------------------- interpreter

/// Interpret a typed term over the given context.
pub fn interpret(
    term: &Term,
    ctx: &[(String, Ty)],
    budget: &Budget,
) -> Result<Interp, LangError> {
    // The recursive translation has large stack frames (one per syntactic
    // construct, unoptimized); run it on a thread with a roomy stack so the
    // caller's stack size does not matter.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(64 * 1024 * 1024)
            .spawn_scoped(s, || {
                let mut env: Vec<(String, Ty)> = ctx.to_vec();
                let mut comps: Vec<Arena> = Vec::new();
                for (_, t) in ctx {
                    comps.push(comp_arena(t, budget)?);
                }
                go(term, &mut env, &mut comps, budget)
            })
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread panicked")
    })
}

fn ground_arena(ty: &Ty, budget: &Budget) -> Result<Arena, LangError> {
    comp_arena(ty, budget)
}

fn go(
    term: &Term,
    env: &mut Vec<(String, Ty)>,
    comps: &mut Vec<Arena>,
    budget: &Budget,
) -> Result<Interp, LangError> {
    use Term as T;
    let max = budget.max_events;
    let widths1 = vec![1usize; comps.len()];
    match term {
        T::Var(x) => {
            let i = env
                .iter()
                .rposition(|(y, _)| y == x)
                .ok_or_else(|| LangError::Type(format!("unbound variable {x}")))?;
            let mut it = var_strategy(comps, i, max)?;
            it.ty = env[i].1.clone();
            Ok(it)
        }
        T::Skip => {
            let left = ctx_game(comps, &widths1, max)?;
            Ok(Interp {
                strategy: const_strategy(left, Arena::ground_u(max), 1, max)?,
                comps: comps.clone(),
                widths: widths1,
                ty: Ty::Unit,
            })
        }
        T::Tt | T::Ff => {
            let left = ctx_game(comps, &widths1, max)?;
            let node = if matches!(term, T::Tt) { 1 } else { 2 };
            Ok(Interp {
                strategy: const_strategy(left, Arena::ground_b(max), node, max)?,
                comps: comps.clone(),
                widths: widths1,
                ty: Ty::Bool,
            })
        }
        T::Num(n) => {
            if *n as usize > budget.nat_max {
                return Err(LangError::Budget(format!(
                    "literal {n} exceeds nat_max {}",
                    budget.nat_max
                )));
            }
            let left = ctx_game(comps, &widths1, max)?;
            Ok(Interp {
                strategy: const_strategy(left, Arena::ground_n(budget), 1 + *n as usize, max)?,
                comps: comps.clone(),
                widths: widths1,
                ty: Ty::Nat,
            })
        }
        T::Bot(t) => {
            let left = ctx_game(comps, &widths1, max)?;
            let right = comp_arena(t, budget)?;
            Ok(Interp {
                strategy: bot_strategy(left, right, max)?,
                comps: comps.clone(),
                widths: widths1,
                ty: t.clone(),
            })
        }
        T::Seq(m, n) => {
            let im = go(m, env, comps, budget)?;
            let in_ = go(n, env, comps, budget)?;
            let ty = in_.ty.clone();
            let x = ground_arena(&ty, budget)?;
            let comb = seq_comb(&x, budget)?;
            apply(comps, vec![Arg::Bang(im, 1), Arg::Bang(in_, 1)], &comb, ty, budget)
        }
        T::If(c, a, b) => {
            let ic = go(c, env, comps, budget)?;
            let ia = go(a, env, comps, budget)?;
            let ib = go(b, env, comps, budget)?;
            let ty = ia.ty.clone();
            let x = ground_arena(&ty, budget)?;
            let comb = if_comb(&x, budget)?;
            apply(
                comps,
                vec![Arg::Bang(ic, 1), Arg::Bang(ia, 1), Arg::Bang(ib, 1)],
                &comb,
                ty,
                budget,
            )
        }
        T::Succ(m) => {
            let im = go(m, env, comps, budget)?;
            let comb = arith_comb(
                Arena::ground_n(budget),
                |k| {
                    if k + 1 <= budget.nat_max {
                        Some(1 + k + 1)
                    } else {
                        None
                    }
                },
                budget,
            )?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Nat, budget)
        }
        T::Pred(m) => {
            let im = go(m, env, comps, budget)?;
            let comb =
                arith_comb(Arena::ground_n(budget), |k| Some(1 + k.saturating_sub(1)), budget)?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Nat, budget)
        }
        T::IsZero(m) => {
            let im = go(m, env, comps, budget)?;
            let comb = arith_comb(
                Arena::ground_b(max),
                |k| Some(if k == 0 { 1 } else { 2 }),
                budget,
            )?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Bool, budget)
        }
        T::Assign(m, n) => {
            let im = go(m, env, comps, budget)?;
            let in_ = go(n, env, comps, budget)?;
            let comb = assign_comb(budget)?;
            apply(comps, vec![Arg::Bang(im, 1), Arg::Bang(in_, 1)], &comb, Ty::Unit, budget)
        }
        T::Deref(m) => {
            let im = go(m, env, comps, budget)?;
            let comb = deref_comb(budget)?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Nat, budget)
        }
        T::Grab(m) => {
            let im = go(m, env, comps, budget)?;
            let comb = sem_comb(0, budget)?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Unit, budget)
        }
        T::Release(m) => {
            let im = go(m, env, comps, budget)?;
            let comb = sem_comb(2, budget)?;
            apply(comps, vec![Arg::Bang(im, 1)], &comb, Ty::Unit, budget)
        }
        T::MkSem(m, n) => {
            let im = go(m, env, comps, budget)?;
            let in_ = go(n, env, comps, budget)?;
            let comb = mksem_comb(budget)?;
            apply(comps, vec![Arg::Bang(im, 1), Arg::Bang(in_, 1)], &comb, Ty::Sem, budget)
        }
        T::MkVar(m, n) => {
            let im = go(m, env, comps, budget)?;
            let in_ = go(n, env, comps, budget)?;
            let w_arena = im.strategy.seq.right.clone();
            let comb = mkvar_comb(&w_arena, budget)?;
            apply(comps, vec![Arg::Bang(im, 1), Arg::Bang(in_, 1)], &comb, Ty::Ref, budget)
        }
        T::Lam(x, t, m) => {
            env.push((x.clone(), t.clone()));
            comps.push(comp_arena(t, budget)?);
            let im = go(m, env, comps, budget)?;
            env.pop();
            comps.pop();
            lambda(im, t.clone(), budget)
        }
        T::App(m, n) => {
            let im = go(m, env, comps, budget)?;
            let in_ = go(n, env, comps, budget)?;
            let (dom_ty, cod_ty) = match &im.ty {
                Ty::Arrow(a, b) => ((**a).clone(), (**b).clone()),
                t => return Err(LangError::Type(format!("applying a {t}"))),
            };
            let y_arena = comp_arena(&cod_ty, budget)?;
            let wd = domain_width(&im.strategy.seq.right, y_arena.meager.nodes.len())?;
            let x_arena = comp_arena(&dom_ty, budget)?;
            let dom = x_arena.bang(wd, max)?;
            check_same_game(&im.strategy.seq.right, &dom.affine_arrow(&y_arena, max)?)?;
            check_same_game(&in_.strategy.seq.right, &x_arena)?;
            let gamma = im.strategy.seq.left.clone();
            let comb = uncurry(&im.strategy, &gamma, &dom, &y_arena, max)?;
            let wm = im.widths.clone();
            apply(
                comps,
                vec![Arg::Id(wm), Arg::Bang(in_, wd)],
                &comb,
                cod_ty,
                budget,
            )
        }
        T::Let(x, n, m) => {
            let in_ = go(n, env, comps, budget)?;
            let x_ty = in_.ty.clone();
            let lam = T::Lam(x.clone(), x_ty.clone(), m.clone());
            let il = go(&lam, env, comps, budget)?;
            let y_ty = match &il.ty {
                Ty::Arrow(_, b) => (**b).clone(),
                _ => unreachable!(),
            };
            let x_arena = ground_arena(&x_ty, budget)?;
            let y_arena = ground_arena(&y_ty, budget)?;
            let f_arena = il.strategy.seq.right.clone();
            let comb = let_comb(&x_arena, &f_arena, &y_arena, budget)?;
            apply(
                comps,
                vec![Arg::Bang(in_, 1), Arg::Bang(il, 1)],
                &comb,
                y_ty,
                budget,
            )
        }
        T::Plet(x, n1, y, n2, m) => {
            let i1 = go(n1, env, comps, budget)?;
            let i2 = go(n2, env, comps, budget)?;
            let x_ty = i1.ty.clone();
            let lam = T::Lam(
                x.clone(),
                x_ty.clone(),
                Box::new(T::Lam(y.clone(), x_ty.clone(), m.clone())),
            );
            let il = go(&lam, env, comps, budget)?;
            let y_ty = match &il.ty {
                Ty::Arrow(_, g) => match &**g {
                    Ty::Arrow(_, b) => (**b).clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let x_arena = ground_arena(&x_ty, budget)?;
            let y_arena = ground_arena(&y_ty, budget)?;
            let f_arena = il.strategy.seq.right.clone();
            let comb = plet_comb(&x_arena, &f_arena, &y_arena, budget)?;
            apply(
                comps,
                vec![Arg::Bang(i1, 1), Arg::Bang(i2, 1), Arg::Bang(il, 1)],
                &comb,
                y_ty,
                budget,
            )
        }
        T::Fix(m) => {
            let ty = crate::lang::typecheck(env, term)?;
            let mut unrolled = T::Bot(ty);
            for _ in 0..budget.unroll_depth {
                unrolled = T::App(m.clone(), Box::new(unrolled));
            }
            go(&unrolled, env, comps, budget)
        }
        T::NewRef(x, n, m) => {
            if *n as usize > budget.nat_max {
                return Err(LangError::Budget(format!(
                    "initial value {n} exceeds nat_max {}",
                    budget.nat_max
                )));
            }
            new_cell(x, *n as usize, m, false, env, comps, budget)
        }
        T::NewSem(x, n, m) => new_cell(x, (*n != 0) as usize, m, true, env, comps, budget),
        T::Loc(_) => Err(LangError::Type("location has no denotation".into())),
    }
}

/// Curry the last context component into the function's domain.
fn lambda(im: Interp, binder_ty: Ty, budget: &Budget) -> Result<Interp, LangError> {
    let max = budget.max_events;
    let it = compact(im, budget)?;
    let k = it.comps.len();
    let wx = it.widths[k - 1];
    let x_ty = it.ty.clone(); // body type; the bound variable's arena is comps[k-1]
    let wd = wx.max(budget.bang_width);
    let it = if wx < wd {
        // Widen the bound component so common-case domains have the uniform
        // replication width.
        let mut widths = it.widths.clone();
        widths[k - 1] = wd;
        let left = ctx_game(&it.comps, &widths, max)?;
        let strategy = crate::strategy::cast(
            &it.strategy,
            left,
            it.strategy.seq.right.clone(),
            max,
        )?;
        Interp { strategy, widths, ..it }
    } else {
        it
    };
    let gamma = ctx_game(&it.comps[..k - 1], &it.widths[..k - 1], max)?;
    let dom = it.comps[k - 1].bang(wd, max)?;
    let strategy = crate::strategy::curry(&it.strategy, &gamma, &dom, max)?;
    Ok(Interp {
        strategy,
        comps: it.comps[..k - 1].to_vec(),
        widths: it.widths[..k - 1].to_vec(),
        ty: Ty::Arrow(Box::new(binder_ty), Box::new(x_ty)),
    })
}

/// Interpret `newref`/`newsem`: compose the body against a grown cell.
fn new_cell(
    x: &str,
    init: usize,
    m: &Term,
    is_sem: bool,
    env: &mut Vec<(String, Ty)>,
    comps: &mut Vec<Arena>,
    budget: &Budget,
) -> Result<Interp, LangError> {
    let max = budget.max_events;
    let ty = if is_sem { Ty::Sem } else { Ty::Ref };
    env.push((x.to_string(), ty.clone()));
    comps.push(comp_arena(&ty, budget)?);
    let im = go(m, env, comps, budget)?;
    env.pop();
    comps.pop();
    let im = compact(im, budget)?;
    let k = im.comps.len();
    let wx = im.widths[k - 1];
    let demand = demanded_ops(&im, k - 1);
    let cell = cell_strategy(&im.comps[k - 1], wx, &demand, init, is_sem, budget)?;
    let prefix = ctx_game(&im.comps[..k - 1], &im.widths[..k - 1], max)?;
    let cc = copycat(&prefix, max)?;
    let feeder = tensor(&cc, &cell, max)?;
    let composed = compose(&feeder, &im.strategy, states_cap(budget))?;
    compact(
        Interp {
            strategy: composed,
            comps: im.comps[..k - 1].to_vec(),
            widths: im.widths[..k - 1].to_vec(),
            ty: im.ty,
        },
        budget,
    )
}

// --------------------------------------------------------------- observables

/// A closed ground strategy may converge iff it contains a Player answer.
pub fn converges_denotationally(s: &Strategy) -> bool {
    s.es
        .events()
        .any(|e| s.pol(e) == Polarity::Pos && s.qa(e) == QA::Answer)
}

/// Outcome of comparing operational and denotational convergence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adequacy {
    /// Both sides agree on may-convergence.
    Agree { converges: bool },
    /// The two semantics disagree — a genuine failure.
    Disagree { operational: bool, denotational: bool },
    /// Fuel or budget ran out on one side; no verdict.
    Inconclusive(String),
}

/// Compare `run`'s may-convergence with the existence of a Player answer in
/// the interpretation, for a closed term of ground type.
pub fn adequacy_check(term: &Term, budget: &Budget) -> Adequacy {
    let operational = match crate::lang::run(term, budget) {
        Ok(crate::lang::RunResult::Converges(_)) => true,
        Ok(crate::lang::RunResult::Diverges) => false,
        Err(e) => return Adequacy::Inconclusive(format!("operational: {e}")),
    };
    let denotational = match interpret(term, &[], budget) {
        Ok(it) => converges_denotationally(&it.strategy),
        Err(e) => return Adequacy::Inconclusive(format!("denotational: {e}")),
    };
    if operational == denotational {
        Adequacy::Agree { converges: operational }
    } else {
        Adequacy::Disagree { operational, denotational }
    }
}

/// The set of answer labels a closed ground strategy can produce.
pub fn result_values(s: &Strategy) -> Vec<String> {
    let mut out: Vec<String> = s
        .es
        .events()
        .filter(|&e| s.pol(e) == Polarity::Pos && s.qa(e) == QA::Answer)
        .map(|e| s.seq.game.lbl(s.display[e]).to_string())
        .collect();
    out.sort();
    out.dedup();
    out
}
