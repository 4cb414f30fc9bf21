//! Circulations with lower and upper arc capacities.
//!
//! Feasibility is decided two ways: by checking Hoffman's cut condition
//! `ℓ(δ^in(W)) ≤ u(δ^out(W))` on every node subset (the reference oracle), and
//! by the usual reduction to a single-source max-flow problem, which also
//! yields an explicit circulation and, on failure, a violated cut.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{ExtendedRational, NumError, Rational};
use crate::graphcore::{mask_to_set, Digraph, NodeSet};

/// Subset enumeration refuses digraphs with more nodes than this by default.
pub const DEFAULT_SUBSET_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CirculationError {
    SizeLimit {
        limit: usize,
        nodes: usize,
    },
    ArcCountMismatch {
        arcs: usize,
        bounds: usize,
    },
    /// `ℓ > u`, `ℓ = +∞` or `u = -∞` on this arc.
    InvalidBound(usize),
    Num(NumError),
}

impl fmt::Display for CirculationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirculationError::SizeLimit { limit, nodes } => {
                write!(f, "{nodes} nodes exceed the subset-enumeration limit {limit}; use the flow-based check")
            }
            CirculationError::ArcCountMismatch { arcs, bounds } => {
                write!(f, "{bounds} capacity entries for {arcs} arcs")
            }
            CirculationError::InvalidBound(a) => write!(f, "invalid capacity bounds on arc {a}"),
            CirculationError::Num(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for CirculationError {}

impl From<NumError> for CirculationError {
    fn from(e: NumError) -> Self {
        CirculationError::Num(e)
    }
}

/// Arc-indexed lower and upper capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityBounds {
    lower: Vec<ExtendedRational>,
    upper: Vec<ExtendedRational>,
}

impl CapacityBounds {
    pub fn new(lower: Vec<ExtendedRational>, upper: Vec<ExtendedRational>) -> Result<Self, CirculationError> {
        if lower.len() != upper.len() {
            return Err(CirculationError::ArcCountMismatch { arcs: lower.len(), bounds: upper.len() });
        }
        for (a, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l > u || *l == ExtendedRational::PosInf || *u == ExtendedRational::NegInf {
                return Err(CirculationError::InvalidBound(a));
            }
        }
        Ok(CapacityBounds { lower, upper })
    }

    pub fn lower(&self) -> &[ExtendedRational] {
        &self.lower
    }

    pub fn upper(&self) -> &[ExtendedRational] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    fn check_against(&self, d: &Digraph) -> Result<(), CirculationError> {
        if self.len() != d.arc_count() {
            return Err(CirculationError::ArcCountMismatch { arcs: d.arc_count(), bounds: self.len() });
        }
        Ok(())
    }
}

/// An arc flow with conservation at every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circulation {
    pub flow: Vec<Rational>,
}

impl Circulation {
    pub fn conserves_flow(&self, d: &Digraph) -> bool {
        if self.flow.len() != d.arc_count() {
            return false;
        }
        let mut balance = vec![Rational::zero(); d.node_count()];
        for (&(u, v), f) in d.arcs().iter().zip(&self.flow) {
            balance[u] -= f;
            balance[v] += f;
        }
        balance.iter().all(Rational::is_zero)
    }

    pub fn within_bounds(&self, cb: &CapacityBounds) -> bool {
        self.flow.len() == cb.len()
            && self.flow.iter().zip(cb.lower.iter().zip(&cb.upper)).all(|(f, (l, u))| {
                let f = ExtendedRational::Finite(f.clone());
                *l <= f && f <= *u
            })
    }

    pub fn is_valid(&self, d: &Digraph, cb: &CapacityBounds) -> bool {
        self.conserves_flow(d) && self.within_bounds(cb)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoffmanVerdict {
    Feasible,
    /// `witness` is a node set W with `ℓ(δ^in(W)) > u(δ^out(W))`.
    Infeasible {
        witness: NodeSet,
    },
}

impl HoffmanVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, HoffmanVerdict::Feasible)
    }
}

/// Both sides of Hoffman's condition for `set`: `(ℓ(δ^in(W)), u(δ^out(W)))`.
pub fn hoffman_sides(
    d: &Digraph,
    cb: &CapacityBounds,
    set: &NodeSet,
) -> Result<(ExtendedRational, ExtendedRational), CirculationError> {
    cb.check_against(d)?;
    let mut lhs = ExtendedRational::zero();
    let mut rhs = ExtendedRational::zero();
    for (a, &(u, v)) in d.arcs().iter().enumerate() {
        match (set.contains(&u), set.contains(&v)) {
            (false, true) => lhs = lhs.checked_add(&cb.lower[a])?,
            (true, false) => rhs = rhs.checked_add(&cb.upper[a])?,
            _ => {}
        }
    }
    Ok((lhs, rhs))
}

pub fn violates_hoffman(d: &Digraph, cb: &CapacityBounds, set: &NodeSet) -> Result<bool, CirculationError> {
    let (lhs, rhs) = hoffman_sides(d, cb, set)?;
    Ok(lhs > rhs)
}

/// Reference oracle: tests Hoffman's condition on all `2^n` subsets.
pub fn hoffman_feasible_subsets(d: &Digraph, cb: &CapacityBounds) -> Result<HoffmanVerdict, CirculationError> {
    hoffman_feasible_subsets_with_limit(d, cb, DEFAULT_SUBSET_LIMIT)
}

pub fn hoffman_feasible_subsets_with_limit(
    d: &Digraph,
    cb: &CapacityBounds,
    limit: usize,
) -> Result<HoffmanVerdict, CirculationError> {
    cb.check_against(d)?;
    let n = d.node_count();
    if n > limit || n >= 64 {
        return Err(CirculationError::SizeLimit { limit, nodes: n });
    }
    for mask in 1u64..(1u64 << n).saturating_sub(1).max(1) {
        let mut lhs = ExtendedRational::zero();
        let mut rhs = ExtendedRational::zero();
        for (a, &(u, v)) in d.arcs().iter().enumerate() {
            let (iu, iv) = (mask >> u & 1 == 1, mask >> v & 1 == 1);
            if !iu && iv {
                lhs = lhs.checked_add(&cb.lower[a])?;
            } else if iu && !iv {
                rhs = rhs.checked_add(&cb.upper[a])?;
            }
        }
        if lhs > rhs {
            return Ok(HoffmanVerdict::Infeasible { witness: mask_to_set(mask, n) });
        }
    }
    Ok(HoffmanVerdict::Feasible)
}

/// Residual network over rationals; `None` capacity is unbounded.
struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<Option<Rational>>,
    flow: Vec<Rational>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork { head: Vec::new(), cap: Vec::new(), flow: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds `u -> v` with the given capacity and its zero-capacity reverse; returns the forward index.
    fn add_edge(&mut self, u: usize, v: usize, cap: Option<Rational>) -> usize {
        let e = self.head.len();
        self.head.push(v);
        self.cap.push(cap);
        self.flow.push(Rational::zero());
        self.adj[u].push(e);
        self.head.push(u);
        self.cap.push(Some(Rational::zero()));
        self.flow.push(Rational::zero());
        self.adj[v].push(e + 1);
        e
    }

    fn residual(&self, e: usize) -> Option<Rational> {
        self.cap[e].as_ref().map(|c| c - &self.flow[e])
    }

    fn has_residual(&self, e: usize) -> bool {
        match &self.cap[e] {
            None => true,
            Some(c) => &self.flow[e] < c,
        }
    }

    /// Nodes reachable from `s` in the residual graph, with BFS parent edges.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if !seen[v] && self.has_residual(e) {
                    seen[v] = true;
                    parent[v] = Some(e);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Edmonds–Karp. Every augmenting path is bounded by a finite source or sink edge.
    fn max_flow(&mut self, s: usize, t: usize) -> Rational {
        let mut total = Rational::zero();
        loop {
            let parent = self.bfs(s);
            if parent[t].is_none() {
                return total;
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = t;
            while v != s {
                let e = parent[v].expect("on path");
                if let Some(r) = self.residual(e) {
                    bottleneck = Some(match bottleneck {
                        Some(b) if b <= r => b,
                        _ => r,
                    });
                }
                v = self.head[e ^ 1];
            }
            let amount = bottleneck.expect("source edges are finite");
            let mut v = t;
            while v != s {
                let e = parent[v].expect("on path");
                self.flow[e] += &amount;
                self.flow[e ^ 1] -= &amount;
                v = self.head[e ^ 1];
            }
            total += amount;
        }
    }
}

enum FlowOutcome {
    Feasible(Circulation),
    Infeasible(NodeSet),
}

fn solve_by_flow(d: &Digraph, cb: &CapacityBounds) -> Result<FlowOutcome, CirculationError> {
    cb.check_against(d)?;
    let n = d.node_count();
    let (src, snk) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    let mut excess = vec![Rational::zero(); n];
    // (base flow, forward edge, backward edge) per arc
    let mut arc_edges = Vec::with_capacity(d.arc_count());
    for (a, &(u, v)) in d.arcs().iter().enumerate() {
        let (lo, hi) = (&cb.lower[a], &cb.upper[a]);
        let base = match (lo, hi) {
            (ExtendedRational::Finite(l), _) => l.clone(),
            (_, ExtendedRational::Finite(h)) => h.clone(),
            _ => Rational::zero(),
        };
        let fwd_cap = hi.finite().map(|h| h - &base);
        let bwd_cap = lo.finite().map(|l| &base - l);
        let fwd = net.add_edge(u, v, fwd_cap);
        let bwd = match &bwd_cap {
            Some(c) if c.is_zero() => None,
            _ => Some(net.add_edge(v, u, bwd_cap)),
        };
        excess[v] += &base;
        excess[u] -= &base;
        arc_edges.push((base, fwd, bwd));
    }
    let mut demand = Rational::zero();
    for (v, ex) in excess.iter().enumerate() {
        if ex.is_positive() {
            net.add_edge(src, v, Some(ex.clone()));
            demand += ex;
        } else if ex.is_negative() {
            net.add_edge(v, snk, Some(-ex));
        }
    }
    let value = net.max_flow(src, snk);
    if value == demand {
        let flow = arc_edges
            .into_iter()
            .map(|(base, fwd, bwd)| {
                let mut f = base + &net.flow[fwd];
                if let Some(b) = bwd {
                    f -= &net.flow[b];
                }
                f
            })
            .collect();
        return Ok(FlowOutcome::Feasible(Circulation { flow }));
    }
    let parent = net.bfs(src);
    let witness: NodeSet = (0..n).filter(|&v| parent[v].is_some()).collect();
    debug_assert!(violates_hoffman(d, cb, &witness).unwrap_or(false));
    Ok(FlowOutcome::Infeasible(witness))
}

/// Flow-based feasibility; the witness is the source side of a minimum cut.
pub fn hoffman_feasible_flow(d: &Digraph, cb: &CapacityBounds) -> Result<HoffmanVerdict, CirculationError> {
    Ok(match solve_by_flow(d, cb)? {
        FlowOutcome::Feasible(_) => HoffmanVerdict::Feasible,
        FlowOutcome::Infeasible(witness) => HoffmanVerdict::Infeasible { witness },
    })
}

/// An exact circulation within the bounds, if one exists.
pub fn find_circulation(d: &Digraph, cb: &CapacityBounds) -> Result<Option<Circulation>, CirculationError> {
    Ok(match solve_by_flow(d, cb)? {
        FlowOutcome::Feasible(c) => Some(c),
        FlowOutcome::Infeasible(_) => None,
    })
}

/// Like [`find_circulation`] but keeps the violated cut on failure.
pub fn circulation_or_cut(d: &Digraph, cb: &CapacityBounds) -> Result<Result<Circulation, NodeSet>, CirculationError> {
    Ok(match solve_by_flow(d, cb)? {
        FlowOutcome::Feasible(c) => Ok(c),
        FlowOutcome::Infeasible(w) => Err(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{clique_digraph, path_split, Graph};
    use ExtendedRational::{NegInf, PosInf};

    fn fin(n: i64, d: i64) -> ExtendedRational {
        ExtendedRational::Finite(Rational::new(n, d).unwrap())
    }

    fn both(d: &Digraph, cb: &CapacityBounds) -> (HoffmanVerdict, HoffmanVerdict) {
        (hoffman_feasible_subsets(d, cb).unwrap(), hoffman_feasible_flow(d, cb).unwrap())
    }

    #[test]
    fn two_cycle_unit() {
        let d = Digraph::new(2, [(0, 1), (1, 0)]).unwrap();
        let cb = CapacityBounds::new(vec![fin(1, 1); 2], vec![fin(1, 1); 2]).unwrap();
        let (a, b) = both(&d, &cb);
        assert!(a.is_feasible() && b.is_feasible());
        let c = find_circulation(&d, &cb).unwrap().unwrap();
        assert_eq!(c.flow, crate::exactnum::rat_vec(&[1, 1]));
    }

    #[test]
    fn single_arc_infeasible() {
        let d = Digraph::new(2, [(0, 1)]).unwrap();
        let cb = CapacityBounds::new(vec![fin(1, 1)], vec![fin(1, 1)]).unwrap();
        let w: NodeSet = [1].into_iter().collect();
        assert_eq!(hoffman_feasible_subsets(&d, &cb).unwrap(), HoffmanVerdict::Infeasible { witness: w.clone() });
        match hoffman_feasible_flow(&d, &cb).unwrap() {
            HoffmanVerdict::Infeasible { witness } => assert!(violates_hoffman(&d, &cb, &witness).unwrap()),
            HoffmanVerdict::Feasible => panic!("expected infeasible"),
        }
        assert_eq!(find_circulation(&d, &cb).unwrap(), None);
    }

    #[test]
    fn zero_capacities() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let cb = CapacityBounds::new(vec![fin(0, 1); 3], vec![fin(0, 1); 3]).unwrap();
        assert!(hoffman_feasible_flow(&d, &cb).unwrap().is_feasible());
        assert_eq!(find_circulation(&d, &cb).unwrap().unwrap().flow, crate::exactnum::rat_vec(&[0, 0, 0]));
    }

    #[test]
    fn split_digraph_pinned_path() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let sd = path_split(&d, 0, 2).unwrap();
        let m = sd.digraph.arc_count();
        let mut lo = vec![NegInf; m];
        let mut hi = vec![PosInf; m];
        for v in 0..3 {
            lo[sd.internal_arc(v)] = fin(1, 1);
            hi[sd.internal_arc(v)] = fin(1, 1);
        }
        lo[sd.return_arc()] = fin(1, 1);
        hi[sd.return_arc()] = fin(1, 1);
        let cb = CapacityBounds::new(lo, hi).unwrap();
        let (a, b) = both(&sd.digraph, &cb);
        assert!(a.is_feasible() && b.is_feasible());
        let c = find_circulation(&sd.digraph, &cb).unwrap().unwrap();
        assert!(c.is_valid(&sd.digraph, &cb));
    }

    #[test]
    fn clique_digraph_half_cycles() {
        let g = Graph::complete(2);
        let cd = clique_digraph(&g);
        let m = cd.digraph.arc_count();
        let mut lo = vec![fin(0, 1); m];
        let mut hi = vec![PosInf; m];
        hi[cd.return_arc()] = fin(1, 1);
        for v in 0..2 {
            for a in [cd.source_arc_copy1(v), cd.sink_arc_copy2(v)] {
                lo[a] = fin(1, 2);
                hi[a] = fin(1, 2);
            }
        }
        let cb = CapacityBounds::new(lo, hi).unwrap();
        let c = find_circulation(&cd.digraph, &cb).unwrap().unwrap();
        assert!(c.is_valid(&cd.digraph, &cb));
        // The explicit witness: half a unit around s -> v¹ -> w² -> t -> s and s -> w¹ -> v² -> t -> s.
        let mut explicit = vec![Rational::zero(); m];
        let half = Rational::new(1, 2).unwrap();
        for (a, &(u, w)) in cd.digraph.arcs().iter().enumerate() {
            let on_cycle = matches!((u, w), (4, 0) | (0, 3) | (3, 5) | (4, 1) | (1, 2) | (2, 5));
            if on_cycle {
                explicit[a] = half.clone();
            }
        }
        explicit[cd.return_arc()] = Rational::one();
        assert!(Circulation { flow: explicit }.is_valid(&cd.digraph, &cb));
    }

    #[test]
    fn bounds_validation() {
        assert_eq!(CapacityBounds::new(vec![fin(2, 1)], vec![fin(1, 1)]), Err(CirculationError::InvalidBound(0)));
        assert_eq!(CapacityBounds::new(vec![PosInf], vec![PosInf]), Err(CirculationError::InvalidBound(0)));
        assert!(CapacityBounds::new(vec![NegInf], vec![NegInf]).is_err());
        let d = Digraph::new(21, []).unwrap();
        let cb = CapacityBounds::new(vec![], vec![]).unwrap();
        assert!(matches!(hoffman_feasible_subsets(&d, &cb), Err(CirculationError::SizeLimit { .. })));
        assert!(hoffman_feasible_flow(&d, &cb).unwrap().is_feasible());
    }
}
