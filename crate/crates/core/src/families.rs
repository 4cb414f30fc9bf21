//! Brute-force vertex sets of the combinatorial polytopes.
//!
//! These are the ground truth for every completeness check, so they are
//! written for obviousness rather than speed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::Rational;
use crate::graphcore::{Digraph, Graph, GraphError};

/// Matchings are enumerated only for graphs with at most this many edges.
pub const MAX_MATCHING_EDGES: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    Graph(GraphError),
    TooLarge { limit: usize, found: usize },
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::Graph(e) => e.fmt(f),
            FamilyError::TooLarge { limit, found } => {
                write!(f, "instance too large for enumeration: {found} > {limit}")
            }
            FamilyError::LengthMismatch { expected, found } => {
                write!(f, "point of length {found} in a {expected}-variable set")
            }
        }
    }
}

impl core::error::Error for FamilyError {}

impl From<GraphError> for FamilyError {
    fn from(e: GraphError) -> Self {
        FamilyError::Graph(e)
    }
}

/// A finite point set over named coordinates. Points are kept sorted and unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub vars: Vec<String>,
    points: Vec<Vec<Rational>>,
}

impl VRep {
    pub fn new(vars: Vec<String>, points: impl IntoIterator<Item = Vec<Rational>>) -> Result<Self, FamilyError> {
        let mut set = BTreeSet::new();
        for p in points {
            if p.len() != vars.len() {
                return Err(FamilyError::LengthMismatch { expected: vars.len(), found: p.len() });
            }
            set.insert(p);
        }
        Ok(VRep { vars, points: set.into_iter().collect() })
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    pub fn into_points(self) -> Vec<Vec<Rational>> {
        self.points
    }
}

pub fn node_vars(n: usize) -> Vec<String> {
    (0..n).map(|v| format!("x_{v}")).collect()
}

pub fn edge_vars(g: &Graph) -> Vec<String> {
    g.edges().iter().map(|(u, v)| format!("x_{u}_{v}")).collect()
}

fn indicator(len: usize, ones: impl IntoIterator<Item = usize>) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); len];
    for i in ones {
        p[i] = Rational::one();
    }
    p
}

/// Edge sets of all matchings (including the empty one), by backtracking.
pub fn matchings(g: &Graph) -> Result<Vec<Vec<usize>>, FamilyError> {
    if g.edge_count() > MAX_MATCHING_EDGES {
        return Err(FamilyError::TooLarge { limit: MAX_MATCHING_EDGES, found: g.edge_count() });
    }
    fn rec(g: &Graph, next: usize, used: &mut Vec<bool>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(current.clone());
        for e in next..g.edge_count() {
            let (u, v) = g.edges()[e];
            if used[u] || used[v] {
                continue;
            }
            used[u] = true;
            used[v] = true;
            current.push(e);
            rec(g, e + 1, used, current, out);
            current.pop();
            used[u] = false;
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    rec(g, 0, &mut vec![false; g.node_count()], &mut Vec::new(), &mut out);
    Ok(out)
}

pub fn enum_matchings(g: &Graph) -> Result<VRep, FamilyError> {
    let m = g.edge_count();
    let pts = matchings(g)?.into_iter().map(|ms| indicator(m, ms));
    VRep::new(edge_vars(g), pts)
}

pub fn enum_perfect_matchings(g: &Graph) -> Result<VRep, FamilyError> {
    let m = g.edge_count();
    let n = g.node_count();
    let pts = matchings(g)?.into_iter().filter(|ms| 2 * ms.len() == n).map(|ms| indicator(m, ms));
    VRep::new(edge_vars(g), pts)
}

/// Node sets of all directed s-t paths in an acyclic digraph with source `s`.
pub fn path_node_sets(d: &Digraph, s: usize, t: usize) -> Result<Vec<Vec<usize>>, FamilyError> {
    d.check_path_instance(s, t)?;
    fn rec(d: &Digraph, u: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if u == t {
            out.push(path.clone());
            return;
        }
        for a in d.out_arcs(u) {
            let w = d.arcs()[a].1;
            path.push(w);
            rec(d, w, t, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, s, t, &mut vec![s], &mut out);
    Ok(out)
}

pub fn enum_path_sets(d: &Digraph, s: usize, t: usize) -> Result<VRep, FamilyError> {
    let n = d.node_count();
    let pts = path_node_sets(d, s, t)?.into_iter().map(|p| indicator(n, p));
    VRep::new(node_vars(n), pts)
}

pub fn enum_small_cliques(g: &Graph) -> VRep {
    let n = g.node_count();
    let pts = core::iter::once(indicator(n, []))
        .chain((0..n).map(|v| indicator(n, [v])))
        .chain(g.edges().iter().map(|&(u, v)| indicator(n, [u, v])));
    VRep::new(node_vars(n), pts).expect("lengths agree")
}

pub fn enum_edge_vertices(g: &Graph) -> VRep {
    let n = g.node_count();
    let pts = g.edges().iter().map(|&(u, v)| indicator(n, [u, v]));
    VRep::new(node_vars(n), pts).expect("lengths agree")
}
