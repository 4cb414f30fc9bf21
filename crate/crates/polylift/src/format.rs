//! Plain-text graph instances.
//!
//! ```text
//! # comment
//! directed        (digraphs only)
//! n m
//! u v             (m lines, 0-based ids)
//! st s t          (path instances only)
//! ```

use std::fmt::Write as _;

use polylift_core::graphcore::{Digraph, Graph, GraphError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("instance is {found}, expected {expected}")]
    Kind { expected: &'static str, found: &'static str },
    #[error("path instance needs an `st s t` line")]
    MissingEndpoints,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub directed: bool,
    pub nodes: usize,
    pub pairs: Vec<(usize, usize)>,
    pub st: Option<(usize, usize)>,
}

fn numbers(line: usize, toks: &[&str]) -> Result<Vec<usize>, FormatError> {
    toks.iter()
        .map(|t| {
            t.parse::<usize>().map_err(|_| FormatError::Syntax { line, msg: format!("not a node id or count: {t}") })
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut directed = false;
    let (mut line, mut head) = lines.next().ok_or(FormatError::Syntax { line: 0, msg: "empty instance".into() })?;
    if head == "directed" {
        directed = true;
        (line, head) = lines.next().ok_or(FormatError::Syntax { line, msg: "missing `n m` line".into() })?;
    }
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(FormatError::Syntax { line, msg: "expected `n m`".into() });
    }
    let nm = numbers(line, &toks)?;
    let (nodes, m) = (nm[0], nm[1]);
    let mut pairs = Vec::with_capacity(m);
    let mut st = None;
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["st", rest @ ..] if rest.len() == 2 => {
                if st.is_some() {
                    return Err(FormatError::Syntax { line, msg: "duplicate `st` line".into() });
                }
                let v = numbers(line, rest)?;
                st = Some((v[0], v[1]));
            }
            [_, _] => {
                let v = numbers(line, &toks)?;
                pairs.push((v[0], v[1]));
            }
            _ => return Err(FormatError::Syntax { line, msg: format!("unexpected line: {l}") }),
        }
    }
    if pairs.len() != m {
        return Err(FormatError::EdgeCount { expected: m, found: pairs.len() });
    }
    Ok(Instance { directed, nodes, pairs, st })
}

impl Instance {
    fn kind(&self) -> &'static str {
        if self.directed {
            "directed"
        } else {
            "undirected"
        }
    }

    pub fn to_graph(&self) -> Result<Graph, FormatError> {
        if self.directed {
            return Err(FormatError::Kind { expected: "undirected", found: self.kind() });
        }
        Ok(Graph::new(self.nodes, self.pairs.iter().copied())?)
    }

    /// The digraph with its `s`, `t` pair.
    pub fn to_path_instance(&self) -> Result<(Digraph, usize, usize), FormatError> {
        if !self.directed {
            return Err(FormatError::Kind { expected: "directed", found: self.kind() });
        }
        let (s, t) = self.st.ok_or(FormatError::MissingEndpoints)?;
        let d = Digraph::new(self.nodes, self.pairs.iter().copied())?;
        d.check_path_instance(s, t)?;
        Ok((d, s, t))
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_path_instance(d: &Digraph, s: usize, t: usize) -> String {
    let mut out = format!("directed\n{} {}\n", d.node_count(), d.arc_count());
    for (u, v) in d.arcs() {
        let _ = writeln!(out, "{u} {v}");
    }
    let _ = writeln!(out, "st {s} {t}");
    out
}
