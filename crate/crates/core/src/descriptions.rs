//! Linear systems and the generators for the families' descriptions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{dot, Rational};
use crate::families::{edge_vars, node_vars};
use crate::graphcore::{
    bipartite_components, bipartite_count, mask_to_set, neighbors, non_neighbors, successors, Digraph, Graph,
    GraphError, NodeSet,
};

/// Subset-indexed families are generated only up to this many nodes.
pub const MAX_SUBSET_NODES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DescriptionError {
    Graph(GraphError),
    TooLarge {
        limit: usize,
        found: usize,
    },
    /// Orbisack-type systems need `p >= 1`.
    EmptyOrder,
    LengthMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for DescriptionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescriptionError::Graph(e) => e.fmt(f),
            DescriptionError::TooLarge { limit, found } => write!(f, "{found} nodes exceed the limit {limit}"),
            DescriptionError::EmptyOrder => f.write_str("p must be at least 1"),
            DescriptionError::LengthMismatch { expected, found } => {
                write!(f, "coefficient vector of length {found}, expected {expected}")
            }
        }
    }
}

impl core::error::Error for DescriptionError {}

impl From<GraphError> for DescriptionError {
    fn from(e: GraphError) -> Self {
        DescriptionError::Graph(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        match s {
            "<=" => Some(Relation::Le),
            ">=" => Some(Relation::Ge),
            "=" | "==" => Some(Relation::Eq),
            _ => None,
        }
    }
}

/// `coef · x  rel  rhs`, densely indexed by the owning system's variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearConstraint {
    pub coef: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
    pub tag: String,
}

impl LinearConstraint {
    pub fn new(coef: Vec<Rational>, rel: Relation, rhs: Rational, tag: impl Into<String>) -> Self {
        LinearConstraint { coef, rel, rhs, tag: tag.into() }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coef, x)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    pub fn is_tight_at(&self, x: &[Rational]) -> bool {
        self.lhs(x) == self.rhs
    }

    /// The same constraint written as `≤` (equations become `≤` on their own row).
    pub fn as_le(&self) -> (Vec<Rational>, Rational) {
        match self.rel {
            Relation::Ge => (self.coef.iter().map(|c| -c).collect(), -&self.rhs),
            _ => (self.coef.clone(), self.rhs.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalitySystem {
    pub vars: Vec<String>,
    pub constraints: Vec<LinearConstraint>,
}

impl InequalitySystem {
    pub fn new(vars: Vec<String>) -> Self {
        InequalitySystem { vars, constraints: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Appends `c` unless an identical constraint is already present.
    pub fn push(&mut self, c: LinearConstraint) -> Result<(), DescriptionError> {
        if c.coef.len() != self.vars.len() {
            return Err(DescriptionError::LengthMismatch { expected: self.vars.len(), found: c.coef.len() });
        }
        if !self.constraints.contains(&c) {
            self.constraints.push(c);
        }
        Ok(())
    }

    fn add(&mut self, coef: Vec<Rational>, rel: Relation, rhs: i64, tag: String) {
        self.push(LinearConstraint::new(coef, rel, Rational::from_int(rhs), tag))
            .expect("generator coefficient length");
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    pub fn violated_by<'a>(&'a self, x: &'a [Rational]) -> impl Iterator<Item = usize> + 'a {
        self.constraints.iter().enumerate().filter(|(_, c)| !c.is_satisfied_by(x)).map(|(i, _)| i)
    }

    /// Constraints whose tag does not start with `prefix`.
    pub fn without_tag_prefix(&self, prefix: &str) -> InequalitySystem {
        InequalitySystem {
            vars: self.vars.clone(),
            constraints: self.constraints.iter().filter(|c| !c.tag.starts_with(prefix)).cloned().collect(),
        }
    }

    /// Union of two systems over the same variables.
    pub fn merged(&self, other: &InequalitySystem) -> Result<InequalitySystem, DescriptionError> {
        let mut out = self.clone();
        for c in &other.constraints {
            out.push(c.clone())?;
        }
        Ok(out)
    }
}

fn sparse(len: usize, terms: impl IntoIterator<Item = (usize, i64)>) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for (i, c) in terms {
        v[i] += &Rational::from_int(c);
    }
    v
}

fn fmt_set(set: &NodeSet) -> String {
    let items: Vec<String> = set.iter().map(|v| format!("{v}")).collect();
    format!("{{{}}}", items.join(","))
}

fn check_subset_size(n: usize) -> Result<(), DescriptionError> {
    if n > MAX_SUBSET_NODES {
        return Err(DescriptionError::TooLarge { limit: MAX_SUBSET_NODES, found: n });
    }
    Ok(())
}

/// Nonnegativity, degree constraints `x(δ(v)) ≤ 1`, and the odd-set
/// constraints `x(E[S]) ≤ (|S|-1)/2` for odd `|S| ≥ 3`.
pub fn blossom_system(g: &Graph) -> Result<InequalitySystem, DescriptionError> {
    let n = g.node_count();
    check_subset_size(n)?;
    let m = g.edge_count();
    let mut sys = InequalitySystem::new(edge_vars(g));
    for (e, (u, v)) in g.edges().iter().enumerate() {
        sys.add(sparse(m, [(e, 1)]), Relation::Ge, 0, format!("nonneg {u}-{v}"));
    }
    for v in g.nodes() {
        let coef = sparse(m, g.incident_edges(v).into_iter().map(|e| (e, 1)));
        sys.add(coef, Relation::Le, 1, format!("degree {v}"));
    }
    for mask in 0u64..(1u64 << n) {
        let size = mask.count_ones() as i64;
        if size < 3 || size % 2 == 0 {
            continue;
        }
        let s = mask_to_set(mask, n);
        let coef = sparse(m, g.induced_edges(&s).into_iter().map(|e| (e, 1)));
        sys.add(coef, Relation::Le, (size - 1) / 2, format!("odd-set S={}", fmt_set(&s)));
    }
    Ok(sys)
}

/// `x_s = x_t = 1`, `x ≥ 0` and `x(T) - x(succ(T)) ≤ 0` for nonempty `T ⊆ V∖{t}`.
pub fn vande_vate_system(d: &Digraph, s: usize, t: usize) -> Result<InequalitySystem, DescriptionError> {
    d.check_path_instance(s, t)?;
    let n = d.node_count();
    check_subset_size(n)?;
    let mut sys = InequalitySystem::new(node_vars(n));
    sys.add(sparse(n, [(s, 1)]), Relation::Eq, 1, format!("source {s}"));
    sys.add(sparse(n, [(t, 1)]), Relation::Eq, 1, format!("sink {t}"));
    for v in 0..n {
        sys.add(sparse(n, [(v, 1)]), Relation::Ge, 0, format!("nonneg {v}"));
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != t).collect();
    for mask in 1u64..(1u64 << others.len()) {
        let set: NodeSet = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        let succ = successors(d, &set)?;
        let coef = sparse(n, set.iter().map(|&v| (v, 1)).chain(succ.iter().map(|&w| (w, -1))));
        sys.add(coef, Relation::Le, 0, format!("succ T={}", fmt_set(&set)));
    }
    Ok(sys)
}

/// All stable sets of `g` (including the empty set), in mask order.
pub fn stable_sets(g: &Graph) -> Result<Vec<NodeSet>, DescriptionError> {
    let n = g.node_count();
    check_subset_size(n)?;
    let adj_mask: Vec<u64> = {
        let mut a = vec![0u64; n];
        for &(u, v) in g.edges() {
            a[u] |= 1 << v;
            a[v] |= 1 << u;
        }
        a
    };
    Ok((0u64..(1u64 << n))
        .filter(|&mask| (0..n).all(|v| mask >> v & 1 == 0 || adj_mask[v] & mask == 0))
        .map(|mask| mask_to_set(mask, n))
        .collect())
}

/// `2x(T) + x(N̄(T)) ≤ 2` for stable `T`, plus `x ≥ 0`.
///
/// With `irredundant`, only stable sets whose non-neighbourhood induces a
/// subgraph without bipartite components are kept.
pub fn small_clique_system(g: &Graph, irredundant: bool) -> Result<InequalitySystem, DescriptionError> {
    let n = g.node_count();
    let mut sys = InequalitySystem::new(node_vars(n));
    for t in stable_sets(g)? {
        let nn = non_neighbors(g, &t)?;
        if irredundant && bipartite_count(&g.induced_subgraph(&nn)) > 0 {
            continue;
        }
        let coef = sparse(n, t.iter().map(|&v| (v, 2)).chain(nn.iter().map(|&v| (v, 1))));
        sys.add(coef, Relation::Le, 2, format!("stable T={}", fmt_set(&t)));
    }
    for v in 0..n {
        sys.add(sparse(n, [(v, 1)]), Relation::Ge, 0, format!("nonneg {v}"));
    }
    Ok(sys)
}

/// The index sets behind the edge-polytope description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePolytopeFamilies {
    /// Nonempty shores of bipartite components.
    pub shores: Vec<NodeSet>,
    /// Stable sets whose facet test raises β by exactly one.
    pub facet_stable_sets: Vec<NodeSet>,
    pub isolated: NodeSet,
    /// Non-isolated nodes whose removal does not raise β.
    pub nonneg_nodes: NodeSet,
}

pub fn edge_polytope_families(g: &Graph) -> Result<EdgePolytopeFamilies, DescriptionError> {
    let beta = bipartite_count(g);
    let shores: Vec<NodeSet> =
        bipartite_components(g).shores.into_iter().flat_map(|(a, b)| [a, b]).filter(|s| !s.is_empty()).collect();
    let mut facet_stable_sets = Vec::new();
    for t in stable_sets(g)? {
        let nb = neighbors(g, &t)?;
        let nn = non_neighbors(g, &t)?;
        let reduced = g.filter_edges(|u, v| {
            let inside = nb.contains(&u) && nb.contains(&v);
            let across = (nb.contains(&u) && nn.contains(&v)) || (nb.contains(&v) && nn.contains(&u));
            !(inside || across)
        });
        if bipartite_count(&reduced) == beta + 1 {
            facet_stable_sets.push(t);
        }
    }
    let isolated = g.isolated_nodes();
    let nonneg_nodes =
        g.nodes().filter(|v| !isolated.contains(v) && bipartite_count(&g.without_node(*v)) <= beta).collect();
    Ok(EdgePolytopeFamilies { shores, facet_stable_sets, isolated, nonneg_nodes })
}

/// `x(V) = 2`; `x(T) - x(N(T)) = 0` for shores; `≤ 0` for the facet stable
/// sets; `x_v = 0` on isolated nodes; `x_v ≥ 0` on the remaining facet nodes.
pub fn edge_polytope_system(g: &Graph) -> Result<InequalitySystem, DescriptionError> {
    let n = g.node_count();
    let fam = edge_polytope_families(g)?;
    let mut sys = InequalitySystem::new(node_vars(n));
    sys.add(sparse(n, (0..n).map(|v| (v, 1))), Relation::Eq, 2, String::from("total"));
    let shore_row = |t: &NodeSet| -> Result<Vec<Rational>, DescriptionError> {
        let nb = neighbors(g, t)?;
        Ok(sparse(n, t.iter().map(|&v| (v, 1)).chain(nb.iter().map(|&w| (w, -1)))))
    };
    for t in &fam.shores {
        sys.add(shore_row(t)?, Relation::Eq, 0, format!("shore T={}", fmt_set(t)));
    }
    for t in &fam.facet_stable_sets {
        sys.add(shore_row(t)?, Relation::Le, 0, format!("stable T={}", fmt_set(t)));
    }
    for &v in &fam.isolated {
        sys.add(sparse(n, [(v, 1)]), Relation::Eq, 0, format!("isolated {v}"));
    }
    for &v in &fam.nonneg_nodes {
        sys.add(sparse(n, [(v, 1)]), Relation::Ge, 0, format!("nonneg {v}"));
    }
    Ok(sys)
}

/// Variables `x_i_j` (1-based row `i`, column `j`) in row-major order.
pub fn orbisack_vars(p: usize) -> Vec<String> {
    (1..=p).flat_map(|i| [format!("x_{i}_1"), format!("x_{i}_2")]).collect()
}

/// Variables of the `(x, y)` extension: `x` row-major, then `y_1..y_p`.
pub fn qxy_vars(p: usize) -> Vec<String> {
    let mut v = orbisack_vars(p);
    v.extend((1..=p).map(|i| format!("y_{i}")));
    v
}

/// Variables of the `(x̃, y, z)` extension: `xt` row-major, then `y`, then `z`.
pub fn qxyz_vars(p: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=p).flat_map(|i| [format!("xt_{i}_1"), format!("xt_{i}_2")]).collect();
    v.extend((1..=p).map(|i| format!("y_{i}")));
    v.extend((1..=p).map(|i| format!("z_{i}")));
    v
}

/// Describes the convex hull of the `(x̃, y, z)` lifts of orbisack vertices.
pub fn qxyz_system(p: usize) -> Result<InequalitySystem, DescriptionError> {
    if p == 0 {
        return Err(DescriptionError::EmptyOrder);
    }
    let len = 4 * p;
    let xt = |i: usize, j: usize| 2 * (i - 1) + (j - 1);
    let y = |i: usize| 2 * p + (i - 1);
    let z = |i: usize| 3 * p + (i - 1);
    let mut sys = InequalitySystem::new(qxyz_vars(p));
    for j in 1..=2 {
        for i in 1..=p {
            let coef = sparse(len, core::iter::once((xt(i, j), 1)).chain((1..i).map(|k| (y(k), -1))));
            sys.add(coef, Relation::Le, 0, format!("xt{j} row {i}"));
        }
    }
    for i in 1..=p {
        let coef = sparse(len, (1..=i).map(|k| (y(k), 1)).chain([(z(i), 1)]));
        sys.add(coef, Relation::Le, 1, format!("yz row {i}"));
    }
    for i in 1..=p {
        for (name, idx) in [("xt_1", xt(i, 1)), ("xt_2", xt(i, 2)), ("y", y(i)), ("z", z(i))] {
            sys.add(sparse(len, [(idx, 1)]), Relation::Ge, 0, format!("nonneg {name} row {i}"));
        }
    }
    Ok(sys)
}

/// Describes the convex hull of the `(x, y)` lifts of orbisack vertices.
pub fn qxy_system(p: usize) -> Result<InequalitySystem, DescriptionError> {
    if p == 0 {
        return Err(DescriptionError::EmptyOrder);
    }
    let len = 3 * p;
    let x = |i: usize, j: usize| 2 * (i - 1) + (j - 1);
    let y = |i: usize| 2 * p + (i - 1);
    let prefix = |i: usize, sign: i64| (1..i).map(move |k| (y(k), sign));
    let mut sys = InequalitySystem::new(qxy_vars(p));
    for i in 1..=p {
        sys.add(sparse(len, [(x(i, 1), 1)]), Relation::Le, 1, format!("xy1 row {i}"));
        sys.add(sparse(len, [(x(i, 2), 1)]), Relation::Ge, 0, format!("xy2 row {i}"));
        sys.add(sparse(len, [(y(i), 1)]), Relation::Ge, 0, format!("xy3 row {i}"));
        // y_i - x_i1 + x_i2 + Σ_{k<i} y_k ≥ 0
        let c4 = sparse(len, [(y(i), 1), (x(i, 1), -1), (x(i, 2), 1)].into_iter().chain(prefix(i, 1)));
        sys.add(c4, Relation::Ge, 0, format!("xy4 row {i}"));
        sys.add(sparse(len, [(y(i), 1), (x(i, 1), -1)]), Relation::Le, 0, format!("xy5 row {i}"));
        sys.add(sparse(len, [(y(i), 1), (x(i, 2), 1)]), Relation::Le, 1, format!("xy6 row {i}"));
        // y_i - x_i1 + x_i2 - Σ_{k<i} y_k ≤ 0
        let c7 = sparse(len, [(y(i), 1), (x(i, 1), -1), (x(i, 2), 1)].into_iter().chain(prefix(i, -1)));
        sys.add(c7, Relation::Le, 0, format!("xy7 row {i}"));
        let c8 = sparse(len, core::iter::once((y(i), 1)).chain(prefix(i, 1)));
        sys.add(c8, Relation::Le, 1, format!("xy8 row {i}"));
    }
    Ok(sys)
}

/// Distinct constraint tags, handy for reports.
pub fn tag_classes(sys: &InequalitySystem) -> BTreeSet<String> {
    sys.constraints.iter().map(|c| c.tag.split(' ').next().unwrap_or("").into()).collect()
}
