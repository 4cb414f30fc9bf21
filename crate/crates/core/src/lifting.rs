//! Liftings into the extensions, and a randomized section-enforcement check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circulation::{circulation_or_cut, CapacityBounds, Circulation, CirculationError};
use crate::descriptions::{
    orbisack_vars, qxy_system, qxy_vars, qxyz_system, DescriptionError, InequalitySystem, LinearConstraint, Relation,
};
use crate::exactnum::{ExtendedRational, Rational};
use crate::families::{edge_vars, node_vars};
use crate::graphcore::{
    clique_digraph, matching_double, path_split, CliqueArc, CliqueDigraph, CloneLabel, Digraph, DoubledGraph, Graph,
    GraphError, NodeSet, SplitArc, SplitDigraph,
};
use crate::orbisack::{lift_y, lift_z, OrbMatrix, OrbisackError};
use crate::verify::{dd_vertices_with_cap, VerifyError};

/// Ambient dimension cap for the vertex enumeration inside section checks.
pub const SECTION_DIM_CAP: usize = 32;
/// Odd-set membership in the perfect matching polytope enumerates subsets of this many nodes at most.
pub const MAX_DOUBLED_NODES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftError {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// `x` violates the constraint with this tag of the domain system.
    NotInDomain(String),
    TooLarge {
        limit: usize,
        found: usize,
    },
    Graph(GraphError),
    Circulation(CirculationError),
    Orbisack(OrbisackError),
    Description(DescriptionError),
    Verify(VerifyError),
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::DimensionMismatch { expected, found } => {
                write!(f, "point has {found} coordinates, expected {expected}")
            }
            LiftError::NotInDomain(tag) => write!(f, "point violates domain constraint '{tag}'"),
            LiftError::TooLarge { limit, found } => write!(f, "instance too large: {found} > {limit}"),
            LiftError::Graph(e) => e.fmt(f),
            LiftError::Circulation(e) => e.fmt(f),
            LiftError::Orbisack(e) => e.fmt(f),
            LiftError::Description(e) => e.fmt(f),
            LiftError::Verify(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for LiftError {}

macro_rules! from_err {
    ($($t:ty => $v:ident),*) => {$(
        impl From<$t> for LiftError {
            fn from(e: $t) -> Self {
                LiftError::$v(e)
            }
        }
    )*};
}

from_err!(GraphError => Graph, CirculationError => Circulation, OrbisackError => Orbisack,
    DescriptionError => Description, VerifyError => Verify);

/// Why no extension point could be produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Node set violating Hoffman's condition.
    Cut(NodeSet),
    /// First row whose `z` interval is empty.
    Row(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    Point(Vec<Rational>),
    MarkedInfeasible(Witness),
}

pub trait Lifting {
    /// Variables of the original space.
    fn vars(&self) -> Vec<String>;

    /// Inequalities describing the set `R` the lifting is defined on.
    fn domain_system(&self) -> InequalitySystem;

    fn lift(&self, x: &[Rational]) -> Result<LiftOutcome, LiftError>;

    /// The projection `σ` back to the original space.
    fn project(&self, y: &[Rational]) -> Vec<Rational>;

    /// Whether `y` lies in the extension `Q`.
    fn in_extension(&self, y: &[Rational]) -> bool;
}

fn unit(len: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    v[i] = Rational::one();
    v
}

fn check_domain(l: &dyn Lifting, x: &[Rational]) -> Result<(), LiftError> {
    let dom = l.domain_system();
    if x.len() != dom.dim() {
        return Err(LiftError::DimensionMismatch { expected: dom.dim(), found: x.len() });
    }
    match dom.constraints.iter().find(|c| !c.is_satisfied_by(x)) {
        Some(c) => Err(LiftError::NotInDomain(c.tag.clone())),
        None => Ok(()),
    }
}

fn push(sys: &mut InequalitySystem, c: LinearConstraint) {
    sys.push(c).expect("domain coefficient length");
}

/// Matchings: `λ(x) = (x, x, 1 - x(δ(v)))` on G̃, extension the perfect matching polytope of G̃.
pub struct MatchingLifting {
    pub graph: Graph,
    pub doubled: DoubledGraph,
    odd_sets: Vec<u64>,
}

impl MatchingLifting {
    pub fn new(graph: Graph) -> Result<Self, LiftError> {
        let doubled = matching_double(&graph);
        let n2 = doubled.graph.node_count();
        if n2 > MAX_DOUBLED_NODES {
            return Err(LiftError::TooLarge { limit: MAX_DOUBLED_NODES, found: n2 });
        }
        let odd_sets = (1u64..(1u64 << n2)).filter(|m| m.count_ones() % 2 == 1 && m.count_ones() >= 3).collect();
        Ok(MatchingLifting { graph, doubled, odd_sets })
    }
}

impl Lifting for MatchingLifting {
    fn vars(&self) -> Vec<String> {
        edge_vars(&self.graph)
    }

    fn domain_system(&self) -> InequalitySystem {
        let m = self.graph.edge_count();
        let mut sys = InequalitySystem::new(self.vars());
        for (e, (u, v)) in self.graph.edges().iter().enumerate() {
            push(
                &mut sys,
                LinearConstraint::new(unit(m, e), Relation::Ge, Rational::zero(), format!("nonneg {u}-{v}")),
            );
        }
        for v in self.graph.nodes() {
            let mut coef = vec![Rational::zero(); m];
            for e in self.graph.incident_edges(v) {
                coef[e] = Rational::one();
            }
            push(&mut sys, LinearConstraint::new(coef, Relation::Le, Rational::one(), format!("degree {v}")));
        }
        sys
    }

    fn lift(&self, x: &[Rational]) -> Result<LiftOutcome, LiftError> {
        check_domain(self, x)?;
        let m = self.graph.edge_count();
        let mut y = vec![Rational::zero(); 2 * m + self.graph.node_count()];
        for e in 0..m {
            y[self.doubled.copy1_edge(e)] = x[e].clone();
            y[self.doubled.copy2_edge(e)] = x[e].clone();
        }
        for v in self.graph.nodes() {
            let deg: Rational = self.graph.incident_edges(v).iter().map(|&e| &x[e]).sum();
            y[self.doubled.link_edge(v)] = Rational::one() - &deg;
        }
        Ok(LiftOutcome::Point(y))
    }

    fn project(&self, y: &[Rational]) -> Vec<Rational> {
        y[..self.graph.edge_count()].to_vec()
    }

    fn in_extension(&self, y: &[Rational]) -> bool {
        let g = &self.doubled.graph;
        if y.len() != g.edge_count() || y.iter().any(Rational::is_negative) {
            return false;
        }
        let degrees_ok = g.nodes().all(|v| g.incident_edges(v).iter().map(|&e| &y[e]).sum::<Rational>().is_one());
        degrees_ok
            && self.odd_sets.iter().all(|&mask| {
                let cut: Rational = g
                    .edges()
                    .iter()
                    .zip(y)
                    .filter(|((u, v), _)| (mask >> u & 1) != (mask >> v & 1))
                    .map(|(_, val)| val)
                    .sum();
                cut >= Rational::one()
            })
    }
}

/// s-t path sets: circulations in D̃ with the internal arc of `v` pinned to `x_v`.
pub struct PathSetLifting {
    pub digraph: Digraph,
    pub split: SplitDigraph,
}

impl PathSetLifting {
    pub fn new(digraph: Digraph, s: usize, t: usize) -> Result<Self, LiftError> {
        let split = path_split(&digraph, s, t)?;
        Ok(PathSetLifting { digraph, split })
    }

    /// Capacities `ℓ*`, `u*`, with internal arcs replaced by `x` when given.
    pub fn bounds(&self, x: Option<&[Rational]>) -> CapacityBounds {
        let (lower, upper) = self
            .split
            .kinds
            .iter()
            .map(|k| match (k, x) {
                (SplitArc::Real(_), _) => (ExtendedRational::NegInf, ExtendedRational::PosInf),
                (SplitArc::Internal(v), Some(x)) => (x[*v].clone().into(), x[*v].clone().into()),
                (SplitArc::Internal(_), None) => (ExtendedRational::zero(), ExtendedRational::PosInf),
                (SplitArc::Return, _) => (Rational::one().into(), Rational::one().into()),
            })
            .unzip();
        CapacityBounds::new(lower, upper).expect("well-formed bounds")
    }
}

impl Lifting for PathSetLifting {
    fn vars(&self) -> Vec<String> {
        node_vars(self.digraph.node_count())
    }

    fn domain_system(&self) -> InequalitySystem {
        let n = self.digraph.node_count();
        let mut sys = InequalitySystem::new(self.vars());
        let (s, t) = (self.split.s, self.split.t);
        push(&mut sys, LinearConstraint::new(unit(n, s), Relation::Eq, Rational::one(), format!("source {s}")));
        push(&mut sys, LinearConstraint::new(unit(n, t), Relation::Eq, Rational::one(), format!("sink {t}")));
        for v in 0..n {
            push(&mut sys, LinearConstraint::new(unit(n, v), Relation::Ge, Rational::zero(), format!("nonneg {v}")));
        }
        sys
    }

    fn lift(&self, x: &[Rational]) -> Result<LiftOutcome, LiftError> {
        check_domain(self, x)?;
        Ok(match circulation_or_cut(&self.split.digraph, &self.bounds(Some(x)))? {
            Ok(c) => LiftOutcome::Point(c.flow),
            Err(w) => LiftOutcome::MarkedInfeasible(Witness::Cut(w)),
        })
    }

    fn project(&self, y: &[Rational]) -> Vec<Rational> {
        (0..self.digraph.node_count()).map(|v| y[self.split.internal_arc(v)].clone()).collect()
    }

    fn in_extension(&self, y: &[Rational]) -> bool {
        Circulation { flow: y.to_vec() }.is_valid(&self.split.digraph, &self.bounds(None))
    }
}

/// Cliques of size at most two: circulations in D with `(s,v¹)`, `(v²,t)` pinned to `x_v / 2`.
pub struct SmallCliqueLifting {
    pub graph: Graph,
    pub digraph: CliqueDigraph,
}

impl SmallCliqueLifting {
    pub fn new(graph: Graph) -> Self {
        let digraph = clique_digraph(&graph);
        SmallCliqueLifting { graph, digraph }
    }

    pub fn bounds(&self, x: Option<&[Rational]>) -> CapacityBounds {
        let half = Rational::new(1, 2).expect("nonzero");
        let (lower, upper) = self
            .digraph
            .kinds
            .iter()
            .map(|k| {
                let pinned = match k {
                    CliqueArc::FromSource(CloneLabel::Copy1(v)) | CliqueArc::ToSink(CloneLabel::Copy2(v)) => Some(*v),
                    _ => None,
                };
                match (k, pinned, x) {
                    (_, Some(v), Some(x)) => {
                        let val: ExtendedRational = (&x[v] * &half).into();
                        (val.clone(), val)
                    }
                    (CliqueArc::Return, _, _) => (ExtendedRational::zero(), Rational::one().into()),
                    _ => (ExtendedRational::zero(), ExtendedRational::PosInf),
                }
            })
            .unzip();
        CapacityBounds::new(lower, upper).expect("well-formed bounds")
    }
}

impl Lifting for SmallCliqueLifting {
    fn vars(&self) -> Vec<String> {
        node_vars(self.graph.node_count())
    }

    fn domain_system(&self) -> InequalitySystem {
        let n = self.graph.node_count();
        let mut sys = InequalitySystem::new(self.vars());
        for v in 0..n {
            push(&mut sys, LinearConstraint::new(unit(n, v), Relation::Ge, Rational::zero(), format!("nonneg {v}")));
        }
        sys
    }

    fn lift(&self, x: &[Rational]) -> Result<LiftOutcome, LiftError> {
        check_domain(self, x)?;
        Ok(match circulation_or_cut(&self.digraph.digraph, &self.bounds(Some(x)))? {
            Ok(c) => LiftOutcome::Point(c.flow),
            Err(w) => LiftOutcome::MarkedInfeasible(Witness::Cut(w)),
        })
    }

    fn project(&self, y: &[Rational]) -> Vec<Rational> {
        self.graph.nodes().map(|v| &y[self.digraph.source_arc_copy1(v)] + &y[self.digraph.sink_arc_copy2(v)]).collect()
    }

    fn in_extension(&self, y: &[Rational]) -> bool {
        Circulation { flow: y.to_vec() }.is_valid(&self.digraph.digraph, &self.bounds(None))
    }
}

/// Orbisack: `x ↦ (x, y)` with the min-recursion `y`, extension described by the `(x, y)` system.
pub struct OrbisackLifting {
    pub p: usize,
    extension: InequalitySystem,
}

impl OrbisackLifting {
    pub fn new(p: usize) -> Result<Self, LiftError> {
        Ok(OrbisackLifting { p, extension: qxy_system(p)? })
    }
}

impl Lifting for OrbisackLifting {
    fn vars(&self) -> Vec<String> {
        orbisack_vars(self.p)
    }

    fn domain_system(&self) -> InequalitySystem {
        let n = 2 * self.p;
        let mut sys = InequalitySystem::new(self.vars());
        for k in 0..n {
            let (i, j) = (k / 2 + 1, k % 2 + 1);
            push(
                &mut sys,
                LinearConstraint::new(unit(n, k), Relation::Ge, Rational::zero(), format!("lower x_{i}_{j}")),
            );
            push(
                &mut sys,
                LinearConstraint::new(unit(n, k), Relation::Le, Rational::one(), format!("upper x_{i}_{j}")),
            );
        }
        sys
    }

    fn lift(&self, x: &[Rational]) -> Result<LiftOutcome, LiftError> {
        check_domain(self, x)?;
        let mut out = x.to_vec();
        out.extend(lift_y(&OrbMatrix::from_flat(x)?)?.y);
        Ok(LiftOutcome::Point(out))
    }

    fn project(&self, y: &[Rational]) -> Vec<Rational> {
        y[..2 * self.p].to_vec()
    }

    fn in_extension(&self, y: &[Rational]) -> bool {
        y.len() == self.extension.dim() && self.extension.is_satisfied_by(y)
    }
}

/// `(x, y) ↦ (x̃, y, z)` with `z` at the lower end of its interval, extension described by the `(x̃, y, z)` system.
pub struct QxyLifting {
    pub p: usize,
    extension: InequalitySystem,
}

impl QxyLifting {
    pub fn new(p: usize) -> Result<Self, LiftError> {
        Ok(QxyLifting { p, extension: qxyz_system(p)? })
    }
}

impl Lifting for QxyLifting {
    fn vars(&self) -> Vec<String> {
        qxy_vars(self.p)
    }

    fn domain_system(&self) -> InequalitySystem {
        InequalitySystem::new(self.vars())
    }

    fn lift(&self, xy: &[Rational]) -> Result<LiftOutcome, LiftError> {
        check_domain(self, xy)?;
        let p = self.p;
        let x = OrbMatrix::from_flat(&xy[..2 * p])?;
        let y = &xy[2 * p..];
        let z = match lift_z(&x, y)?.z {
            Ok(z) => z,
            Err(row) => return Ok(LiftOutcome::MarkedInfeasible(Witness::Row(row))),
        };
        let mut out = Vec::with_capacity(4 * p);
        for i in 1..=p {
            out.push(&(x.get(i, 1) - &y[i - 1]) - &z[i - 1]);
            out.push(x.get(i, 2) - &z[i - 1]);
        }
        out.extend(y.iter().cloned());
        out.extend(z);
        Ok(LiftOutcome::Point(out))
    }

    fn project(&self, v: &[Rational]) -> Vec<Rational> {
        let p = self.p;
        let (y, z) = (&v[2 * p..3 * p], &v[3 * p..]);
        let mut out = Vec::with_capacity(3 * p);
        for i in 0..p {
            out.push(&(&v[2 * i] + &y[i]) + &z[i]);
            out.push(&v[2 * i + 1] + &z[i]);
        }
        out.extend(y.iter().cloned());
        out
    }

    fn in_extension(&self, v: &[Rational]) -> bool {
        v.len() == self.extension.dim() && self.extension.is_satisfied_by(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionFailure {
    Infeasible(Witness),
    NotInExtension(Vec<Rational>),
    ProjectionMismatch(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub point: Vec<Rational>,
    pub failure: SectionFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionReport {
    pub vertices: usize,
    pub samples: usize,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl SectionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Lifts a point and checks `σ(λ(x)) = x` and `λ(x) ∈ Q`.
pub fn check_point(l: &dyn Lifting, x: &[Rational]) -> Result<Option<SectionFailure>, LiftError> {
    Ok(match l.lift(x)? {
        LiftOutcome::MarkedInfeasible(w) => Some(SectionFailure::Infeasible(w)),
        LiftOutcome::Point(y) => {
            if l.project(&y) != x {
                Some(SectionFailure::ProjectionMismatch(y))
            } else if !l.in_extension(&y) {
                Some(SectionFailure::NotInExtension(y))
            } else {
                None
            }
        }
    })
}

/// Random convex combination of up to four vertices, weights in `1..=16`.
pub fn random_combination(rng: &mut impl Rng, vertices: &[Vec<Rational>]) -> Vec<Rational> {
    let k = rng.gen_range(1..=vertices.len().min(4));
    let picks: Vec<(usize, i64)> = (0..k).map(|_| (rng.gen_range(0..vertices.len()), rng.gen_range(1..=16))).collect();
    let total: i64 = picks.iter().map(|(_, w)| w).sum();
    let mut out = vec![Rational::zero(); vertices[0].len()];
    for (i, w) in picks {
        let wt = Rational::new(w, total).expect("positive total");
        for (o, c) in out.iter_mut().zip(&vertices[i]) {
            *o += &(&wt * c);
        }
    }
    out
}

/// Checks the lifting on every vertex of `{x ∈ R : candidate}` and on `samples`
/// random convex combinations of them.
pub fn check_section_enforcing(
    l: &dyn Lifting,
    candidate: &InequalitySystem,
    samples: usize,
    seed: u64,
) -> Result<SectionReport, LiftError> {
    let domain = l.domain_system();
    if candidate.vars != domain.vars {
        return Err(LiftError::DimensionMismatch { expected: domain.dim(), found: candidate.dim() });
    }
    let region = domain.merged(candidate)?;
    let vertices = dd_vertices_with_cap(&region, SECTION_DIM_CAP)?.into_points();
    let mut report = SectionReport { vertices: vertices.len(), samples: 0, checked: 0, counterexample: None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = (0..if vertices.is_empty() { 0 } else { samples }).map(|_| random_combination(&mut rng, &vertices));
    for (idx, x) in vertices.iter().cloned().chain(sampled).enumerate() {
        report.checked += 1;
        if idx >= report.vertices {
            report.samples += 1;
        }
        if let Some(failure) = check_point(l, &x)? {
            report.counterexample = Some(Counterexample { point: x, failure });
            break;
        }
    }
    Ok(report)
}
