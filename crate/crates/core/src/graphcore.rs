//! Graphs, digraphs and the auxiliary constructions built from them.
//!
//! Nodes are dense indices `0..n`. Auxiliary graphs keep a [`CloneLabel`] per
//! node so callers can address `v₁`, `v^out`, `s`, ... symbolically.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{RatMatrix, Rational};

pub type NodeSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    UnknownNode(usize),
    Loop(usize),
    DuplicateEdge(usize, usize),
    NotAcyclic,
    NotASource(usize),
    SameNodes(usize),
    TooLarge { limit: usize, found: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownNode(v) => write!(f, "unknown node {v}"),
            GraphError::Loop(v) => write!(f, "loop at node {v}"),
            GraphError::DuplicateEdge(u, v) => write!(f, "parallel edge/arc {u}-{v}"),
            GraphError::NotAcyclic => f.write_str("digraph is not acyclic"),
            GraphError::NotASource(v) => write!(f, "node {v} has incoming arcs"),
            GraphError::SameNodes(v) => write!(f, "s and t are both node {v}"),
            GraphError::TooLarge { limit, found } => {
                write!(f, "instance too large: {found} exceeds limit {limit}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Simple undirected graph. Edges are stored as `(min, max)` in insertion order;
/// the edge index is the position in that list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::UnknownNode(w));
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            list.push(e);
        }
        Ok(Graph { n, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn nodes(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.contains(&e)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn isolated_nodes(&self) -> NodeSet {
        let adj = self.adjacency();
        self.nodes().filter(|&v| adj[v].is_empty()).collect()
    }

    /// Indices of edges with exactly one end in `set` (δ).
    pub fn cut_edges(&self, set: &NodeSet) -> Vec<usize> {
        self.edge_indices(|u, v| set.contains(&u) != set.contains(&v))
    }

    /// Indices of edges with both ends in `set` (E[·]).
    pub fn induced_edges(&self, set: &NodeSet) -> Vec<usize> {
        self.edge_indices(|u, v| set.contains(&u) && set.contains(&v))
    }

    /// Indices of edges joining `a` and `b` ((·:·)).
    pub fn edges_between(&self, a: &NodeSet, b: &NodeSet) -> Vec<usize> {
        self.edge_indices(|u, v| (a.contains(&u) && b.contains(&v)) || (a.contains(&v) && b.contains(&u)))
    }

    /// Indices of edges incident to `v`.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        self.edge_indices(|a, b| a == v || b == v)
    }

    fn edge_indices(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Vec<usize> {
        self.edges.iter().enumerate().filter(|(_, &(u, v))| keep(u, v)).map(|(i, _)| i).collect()
    }

    /// Same node set, only the edges for which `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Graph {
        Graph { n: self.n, edges: self.edges.iter().copied().filter(|&(u, v)| keep(u, v)).collect() }
    }

    /// Subgraph induced by `set`, relabelled to `0..|set|` in increasing node order.
    pub fn induced_subgraph(&self, set: &NodeSet) -> Graph {
        let index: Vec<Option<usize>> = {
            let mut idx = vec![None; self.n];
            for (i, &v) in set.iter().enumerate() {
                if v < self.n {
                    idx[v] = Some(i);
                }
            }
            idx
        };
        let edges = self.edges.iter().filter_map(|&(u, v)| Some((index[u]?, index[v]?))).collect();
        Graph { n: set.len(), edges }
    }

    pub fn without_node(&self, v: usize) -> Graph {
        let rest: NodeSet = self.nodes().filter(|&w| w != v).collect();
        self.induced_subgraph(&rest)
    }

    pub fn is_stable(&self, set: &NodeSet) -> bool {
        self.induced_edges(set).is_empty()
    }

    /// Node-edge incidence matrix (`|V| x |E|`).
    pub fn incidence_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.n, self.edges.len());
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            m.set(u, j, Rational::one());
            m.set(v, j, Rational::one());
        }
        m
    }

    fn check_nodes(&self, set: &NodeSet) -> Result<(), GraphError> {
        match set.iter().find(|&&v| v >= self.n) {
            Some(&v) => Err(GraphError::UnknownNode(v)),
            None => Ok(()),
        }
    }
}

/// Simple digraph; arcs keep insertion order and the arc index is the position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::UnknownNode(w));
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            list.push((u, v));
        }
        Ok(Digraph { n, arcs: list })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn nodes(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn arc_index(&self, u: usize, v: usize) -> Option<usize> {
        self.arcs.iter().position(|&a| a == (u, v))
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().enumerate().filter(move |(_, a)| a.0 == v).map(|(i, _)| i)
    }

    pub fn in_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().enumerate().filter(move |(_, a)| a.1 == v).map(|(i, _)| i)
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_arcs(v).count()
    }

    /// A topological order, or `None` if there is a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        let mut out = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            indeg[v] += 1;
            out[u].push(v);
        }
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Checks the preconditions shared by path-set constructions.
    pub fn check_path_instance(&self, s: usize, t: usize) -> Result<(), GraphError> {
        for v in [s, t] {
            if v >= self.n {
                return Err(GraphError::UnknownNode(v));
            }
        }
        if s == t {
            return Err(GraphError::SameNodes(s));
        }
        if !self.is_acyclic() {
            return Err(GraphError::NotAcyclic);
        }
        if self.in_degree(s) > 0 {
            return Err(GraphError::NotASource(s));
        }
        Ok(())
    }
}

/// Provenance of a node in an auxiliary graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CloneLabel {
    Copy1(usize),
    Copy2(usize),
    In(usize),
    Out(usize),
    Source,
    Sink,
}

impl fmt::Display for CloneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CloneLabel::Copy1(v) => write!(f, "{v}^1"),
            CloneLabel::Copy2(v) => write!(f, "{v}^2"),
            CloneLabel::In(v) => write!(f, "{v}^in"),
            CloneLabel::Out(v) => write!(f, "{v}^out"),
            CloneLabel::Source => f.write_str("s"),
            CloneLabel::Sink => f.write_str("t"),
        }
    }
}

/// Graph G̃: two copies of G plus a linking edge `{v₁, v₂}` per node.
///
/// Node `v` of copy 1 is `v`, of copy 2 is `n + v`. Edges of copy 1 come first
/// (same order as in G), then copy 2, then the links in node order.
#[derive(Clone, Debug)]
pub struct DoubledGraph {
    pub graph: Graph,
    pub labels: Vec<CloneLabel>,
    base_nodes: usize,
    base_edges: usize,
}

impl DoubledGraph {
    pub fn node(&self, label: CloneLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn copy1_edge(&self, e: usize) -> usize {
        e
    }

    pub fn copy2_edge(&self, e: usize) -> usize {
        self.base_edges + e
    }

    pub fn link_edge(&self, v: usize) -> usize {
        2 * self.base_edges + v
    }

    pub fn base_node_count(&self) -> usize {
        self.base_nodes
    }

    pub fn base_edge_count(&self) -> usize {
        self.base_edges
    }
}

pub fn matching_double(g: &Graph) -> DoubledGraph {
    let n = g.node_count();
    let mut edges = Vec::with_capacity(2 * g.edge_count() + n);
    edges.extend(g.edges().iter().copied());
    edges.extend(g.edges().iter().map(|&(u, v)| (n + u, n + v)));
    edges.extend((0..n).map(|v| (v, n + v)));
    let labels = (0..n).map(CloneLabel::Copy1).chain((0..n).map(CloneLabel::Copy2)).collect();
    DoubledGraph { graph: Graph { n: 2 * n, edges }, labels, base_nodes: n, base_edges: g.edge_count() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitArc {
    /// `(v^out, w^in)` for the original arc with this index.
    Real(usize),
    /// `(v^in, v^out)`.
    Internal(usize),
    /// `(t^out, s^in)`.
    Return,
}

/// The split digraph D̃ of a path instance. `v^in = 2v`, `v^out = 2v + 1`;
/// arcs: real arcs in the original order, then internal arcs by node, then return.
#[derive(Clone, Debug)]
pub struct SplitDigraph {
    pub digraph: Digraph,
    pub labels: Vec<CloneLabel>,
    pub kinds: Vec<SplitArc>,
    pub s: usize,
    pub t: usize,
    base_arcs: usize,
}

impl SplitDigraph {
    pub fn in_node(v: usize) -> usize {
        2 * v
    }

    pub fn out_node(v: usize) -> usize {
        2 * v + 1
    }

    pub fn internal_arc(&self, v: usize) -> usize {
        self.base_arcs + v
    }

    pub fn return_arc(&self) -> usize {
        self.kinds.len() - 1
    }
}

pub fn path_split(d: &Digraph, s: usize, t: usize) -> Result<SplitDigraph, GraphError> {
    d.check_path_instance(s, t)?;
    let n = d.node_count();
    let mut arcs = Vec::with_capacity(d.arc_count() + n + 1);
    let mut kinds = Vec::with_capacity(arcs.capacity());
    for (i, &(v, w)) in d.arcs().iter().enumerate() {
        arcs.push((SplitDigraph::out_node(v), SplitDigraph::in_node(w)));
        kinds.push(SplitArc::Real(i));
    }
    for v in 0..n {
        arcs.push((SplitDigraph::in_node(v), SplitDigraph::out_node(v)));
        kinds.push(SplitArc::Internal(v));
    }
    arcs.push((SplitDigraph::out_node(t), SplitDigraph::in_node(s)));
    kinds.push(SplitArc::Return);
    let labels = (0..n).flat_map(|v| [CloneLabel::In(v), CloneLabel::Out(v)]).collect();
    Ok(SplitDigraph { digraph: Digraph { n: 2 * n, arcs }, labels, kinds, s, t, base_arcs: d.arc_count() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueArc {
    /// `(t, s)`.
    Return,
    /// `(s, v¹)` or `(s, v²)`.
    FromSource(CloneLabel),
    /// `(v¹, t)` or `(v², t)`.
    ToSink(CloneLabel),
    /// `(v¹, w²)` for the edge with this index, `forward` meaning `v < w`.
    Edge { edge: usize, forward: bool },
}

/// Digraph D for the small-clique extension. `v¹ = v`, `v² = n + v`, `s = 2n`, `t = 2n + 1`.
///
/// Arc order: `(t,s)`; `(s,v¹)` for all v; `(s,v²)` for all v; `(v¹,t)`; `(v²,t)`;
/// then `(v¹,w²), (w¹,v²)` per edge `{v,w}`.
#[derive(Clone, Debug)]
pub struct CliqueDigraph {
    pub digraph: Digraph,
    pub labels: Vec<CloneLabel>,
    pub kinds: Vec<CliqueArc>,
    base_nodes: usize,
}

impl CliqueDigraph {
    pub fn source(&self) -> usize {
        2 * self.base_nodes
    }

    pub fn sink(&self) -> usize {
        2 * self.base_nodes + 1
    }

    pub fn return_arc(&self) -> usize {
        0
    }

    /// Index of `(s, v¹)`.
    pub fn source_arc_copy1(&self, v: usize) -> usize {
        1 + v
    }

    /// Index of `(s, v²)`.
    pub fn source_arc_copy2(&self, v: usize) -> usize {
        1 + self.base_nodes + v
    }

    /// Index of `(v¹, t)`.
    pub fn sink_arc_copy1(&self, v: usize) -> usize {
        1 + 2 * self.base_nodes + v
    }

    /// Index of `(v², t)`.
    pub fn sink_arc_copy2(&self, v: usize) -> usize {
        1 + 3 * self.base_nodes + v
    }

    pub fn base_node_count(&self) -> usize {
        self.base_nodes
    }
}

pub fn clique_digraph(g: &Graph) -> CliqueDigraph {
    let n = g.node_count();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut arcs = vec![(t, s)];
    let mut kinds = vec![CliqueArc::Return];
    for v in 0..n {
        arcs.push((s, v));
        kinds.push(CliqueArc::FromSource(CloneLabel::Copy1(v)));
    }
    for v in 0..n {
        arcs.push((s, n + v));
        kinds.push(CliqueArc::FromSource(CloneLabel::Copy2(v)));
    }
    for v in 0..n {
        arcs.push((v, t));
        kinds.push(CliqueArc::ToSink(CloneLabel::Copy1(v)));
    }
    for v in 0..n {
        arcs.push((n + v, t));
        kinds.push(CliqueArc::ToSink(CloneLabel::Copy2(v)));
    }
    for (i, &(v, w)) in g.edges().iter().enumerate() {
        arcs.push((v, n + w));
        kinds.push(CliqueArc::Edge { edge: i, forward: true });
        arcs.push((w, n + v));
        kinds.push(CliqueArc::Edge { edge: i, forward: false });
    }
    let labels = (0..n)
        .map(CloneLabel::Copy1)
        .chain((0..n).map(CloneLabel::Copy2))
        .chain([CloneLabel::Source, CloneLabel::Sink])
        .collect();
    CliqueDigraph { digraph: Digraph { n: 2 * n + 2, arcs }, labels, kinds, base_nodes: n }
}

/// All heads of arcs leaving `set`; `set` itself is not implicitly included.
pub fn successors(d: &Digraph, set: &NodeSet) -> Result<NodeSet, GraphError> {
    if let Some(&v) = set.iter().find(|&&v| v >= d.node_count()) {
        return Err(GraphError::UnknownNode(v));
    }
    Ok(d.arcs().iter().filter(|(u, _)| set.contains(u)).map(|&(_, w)| w).collect())
}

/// N(T): nodes outside `set` adjacent to some node of `set`.
pub fn neighbors(g: &Graph, set: &NodeSet) -> Result<NodeSet, GraphError> {
    g.check_nodes(set)?;
    let mut out = NodeSet::new();
    for &(u, v) in g.edges() {
        if set.contains(&u) && !set.contains(&v) {
            out.insert(v);
        }
        if set.contains(&v) && !set.contains(&u) {
            out.insert(u);
        }
    }
    Ok(out)
}

/// N̄(T): nodes outside `set` adjacent to no node of `set`.
pub fn non_neighbors(g: &Graph, set: &NodeSet) -> Result<NodeSet, GraphError> {
    let nb = neighbors(g, set)?;
    Ok(g.nodes().filter(|v| !set.contains(v) && !nb.contains(v)).collect())
}

/// Bipartite connected components with their two shores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteComponents {
    pub count: usize,
    /// One pair per bipartite component; an isolated node gives `({v}, {})`.
    pub shores: Vec<(NodeSet, NodeSet)>,
}

pub fn bipartite_components(g: &Graph) -> BipartiteComponents {
    let adj = g.adjacency();
    let mut color: Vec<Option<bool>> = vec![None; g.node_count()];
    let mut shores = Vec::new();
    for start in g.nodes() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut sides = (NodeSet::new(), NodeSet::new());
        let mut bipartite = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].expect("queued nodes are colored");
            if cu {
                sides.1.insert(u);
            } else {
                sides.0.insert(u);
            }
            for &w in &adj[u] {
                match color[w] {
                    None => {
                        color[w] = Some(!cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => bipartite = false,
                    Some(_) => {}
                }
            }
        }
        if bipartite {
            shores.push(sides);
        }
    }
    BipartiteComponents { count: shores.len(), shores }
}

/// Number of bipartite connected components, β(G).
pub fn bipartite_count(g: &Graph) -> usize {
    bipartite_components(g).count
}

/// Expands a bitmask over `0..n` to a node set.
pub fn mask_to_set(mask: u64, n: usize) -> NodeSet {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}
