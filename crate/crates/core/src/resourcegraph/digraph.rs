use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::exact::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub length: Rational,
}

/// Directed multigraph with named nodes and positive rational edge lengths.
/// An edge is identified by `(from, to, label)`; re-adding one is a no-op.
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_keys: HashSet<(usize, usize, String)>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for Digraph {}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert-if-absent; returns the node's index.
    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: &str, length: Rational) -> Result<(), GraphError> {
        let n = self.names.len();
        if from >= n || to >= n {
            return Err(GraphError::UnknownNode(format!("#{}", from.max(to))));
        }
        if length <= Rational::zero() {
            return Err(GraphError::Length(format_rational(&length)));
        }
        if self.edge_keys.insert((from, to, label.to_owned())) {
            self.edges.push(Edge { from, to, label: label.to_owned(), length });
        }
        Ok(())
    }

    /// Adds a unit-length edge between named nodes, creating them as needed.
    pub fn connect(&mut self, from: &str, to: &str, label: &str) {
        let (u, v) = (self.add_node(from), self.add_node(to));
        self.add_edge(u, v, label, Rational::one()).expect("unit length is positive");
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing edge indices per node, in insertion order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.names.len()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.from].push(k);
        }
        adj
    }

    /// Graphviz rendering. With `clusters`, nodes sharing a class are
    /// grouped into one `subgraph cluster_*`.
    pub fn to_dot(&self, clusters: Option<&[Vec<usize>]>, name_width: usize) -> String {
        let short = |s: &str| s.chars().take(name_width).collect::<String>();
        let mut out = String::from("digraph reach {\n  rankdir=LR;\n  node [shape=ellipse];\n");
        match clusters {
            Some(classes) => {
                for (c, members) in classes.iter().enumerate() {
                    let _ = writeln!(out, "  subgraph cluster_{c} {{\n    label=\"class {c}\";");
                    for &m in members {
                        let _ = writeln!(out, "    n{m} [label=\"{}\"];", escape(&short(&self.names[m])));
                    }
                    out.push_str("  }\n");
                }
            }
            None => {
                for (i, n) in self.names.iter().enumerate() {
                    let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(&short(n)));
                }
            }
        }
        for e in &self.edges {
            let mut label = e.label.clone();
            if !e.length.is_one() {
                let _ = write!(label, " ({})", format_rational(&e.length));
            }
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from, e.to, escape(&label));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// JSON form: node names plus edges referencing them by name.
#[derive(Serialize, Deserialize)]
struct DigraphFile {
    nodes: Vec<String>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    from: String,
    to: String,
    #[serde(default)]
    label: String,
    #[serde(default = "unit_length")]
    length: String,
}

fn unit_length() -> String {
    "1".into()
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DigraphFile {
            nodes: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    from: self.names[e.from].clone(),
                    to: self.names[e.to].clone(),
                    label: e.label.clone(),
                    length: format_rational(&e.length),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let file = DigraphFile::deserialize(d)?;
        let mut g = Digraph::new();
        for n in &file.nodes {
            if g.node(n).is_some() {
                return Err(D::Error::custom(format!("duplicate node `{n}`")));
            }
            g.add_node(n);
        }
        for e in file.edges {
            let lookup = |n: &str| g.node(n).ok_or_else(|| D::Error::custom(format!("edge references unknown node `{n}`")));
            let (u, v) = (lookup(&e.from)?, lookup(&e.to)?);
            let length = parse_rational(&e.length).map_err(D::Error::custom)?;
            g.add_edge(u, v, &e.label, length).map_err(D::Error::custom)?;
        }
        Ok(g)
    }
}
