use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::digraph::Digraph;
use super::GraphError;
use crate::exact::{dagger, mat_mul, Digest, ExactDensityMatrix, ExactMatrix, GaussianRational, Rational};
use crate::reduction::{apply, certify_choi, choi, choi_of, ChannelElement, GeneratorSet};

/// A channel with exact entries that the explorer can apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactChannel {
    /// `ρ ↦ λ·UρU† + (1 − λ)·I/d`.
    Depolarizing(ChannelElement),
    /// `ρ ↦ Σ_k K_k ρ K_k†`.
    Kraus { label: String, operators: Vec<ExactMatrix> },
}

impl ExactChannel {
    pub fn kraus(label: &str, operators: Vec<ExactMatrix>) -> Self {
        ExactChannel::Kraus { label: label.to_owned(), operators }
    }

    pub fn label(&self) -> String {
        match self {
            ExactChannel::Depolarizing(c) if c.word.is_empty() => "id".into(),
            ExactChannel::Depolarizing(c) => c.word.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(""),
            ExactChannel::Kraus { label, .. } => label.clone(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ExactChannel::Depolarizing(c) => Some(c.dim()),
            ExactChannel::Kraus { operators, .. } => operators.first().map(ExactMatrix::rows),
        }
    }

    pub fn choi(&self) -> ExactMatrix {
        match self {
            ExactChannel::Depolarizing(c) => choi(c),
            ExactChannel::Kraus { operators, .. } => choi_of(operators[0].rows(), |x| kraus_sum(operators, x)),
        }
    }

    /// Exact CPTP certificate via the Choi matrix.
    pub fn certify(&self) -> Result<(), GraphError> {
        let d = self.dim().ok_or_else(|| GraphError::Shape(format!("channel {} has no Kraus operators", self.label())))?;
        if let ExactChannel::Kraus { operators, .. } = self {
            if operators.iter().any(|k| k.rows() != d || k.cols() != d) {
                return Err(GraphError::Shape(format!("Kraus operators of {} are not all {d}x{d}", self.label())));
            }
        }
        certify_choi(&self.choi(), d).map_err(|violation| GraphError::NotCptp { label: self.label(), violation })
    }

    /// Assumes `rho` has the channel's dimension.
    fn apply_unchecked(&self, rho: &ExactDensityMatrix) -> ExactDensityMatrix {
        match self {
            ExactChannel::Depolarizing(c) => apply(c, rho).expect("dimension checked"),
            ExactChannel::Kraus { operators, .. } => {
                ExactDensityMatrix::new_unchecked(kraus_sum(operators, rho.matrix()))
            }
        }
    }

    pub fn apply(&self, rho: &ExactDensityMatrix) -> Result<ExactDensityMatrix, GraphError> {
        if self.dim() != Some(rho.dim()) {
            return Err(GraphError::Shape(format!("channel {} does not act on dimension {}", self.label(), rho.dim())));
        }
        Ok(self.apply_unchecked(rho))
    }
}

fn kraus_sum(ops: &[ExactMatrix], x: &ExactMatrix) -> ExactMatrix {
    let mut acc = ExactMatrix::zeros(x.rows(), x.cols());
    for k in ops {
        let term = mat_mul(&mat_mul(k, x).expect("square"), &dagger(k)).expect("square");
        acc = &acc + &term;
    }
    acc
}

/// The generators of a compiled set as explorable channels.
pub fn channels_from_set(set: &GeneratorSet) -> Vec<ExactChannel> {
    set.generators().into_iter().map(ExactChannel::Depolarizing).collect()
}

/// Orbit of the seed states, explored breadth-first.
///
/// Node names are the hex digests of the states; `states[i]` belongs to
/// node `i` of `graph`. Nodes found at the last layer are not expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachGraph {
    pub graph: Digraph,
    pub states: Vec<ExactDensityMatrix>,
    pub seeds: Vec<usize>,
    pub depth_bound: usize,
    pub truncated: bool,
}

impl ReachGraph {
    pub fn find(&self, state: &ExactDensityMatrix) -> Option<usize> {
        self.graph.node(&state.digest().hex()).filter(|&i| self.states[i] == *state)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Node<'a> {
            id: &'a str,
            state: Vec<Vec<String>>,
        }
        let nodes: Vec<Node> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| Node { id: self.graph.name(i), state: s.matrix().to_text_rows() })
            .collect();
        let edges = serde_json::to_value(&self.graph).expect("graph serializes")["edges"].clone();
        serde_json::json!({
            "seeds": self.seeds.iter().map(|&s| self.graph.name(s)).collect::<Vec<_>>(),
            "depth_bound": self.depth_bound,
            "truncated": self.truncated,
            "nodes": nodes,
            "edges": edges,
        })
    }
}

/// Breadth-first closure of `seeds` under `channels` to `max_depth` steps.
/// Every channel is certified CPTP first. `node_budget` caps the number of
/// states; hitting it sets `truncated`.
pub fn explore(
    channels: &[ExactChannel],
    seeds: &[ExactDensityMatrix],
    max_depth: usize,
    node_budget: Option<usize>,
) -> Result<ReachGraph, GraphError> {
    let Some(first) = seeds.first() else {
        return Err(GraphError::Shape("at least one seed state is required".into()));
    };
    let dim = first.dim();
    if seeds.iter().any(|s| s.dim() != dim) {
        return Err(GraphError::Shape("seed states have different dimensions".into()));
    }
    for c in channels {
        c.certify()?;
        if c.dim() != Some(dim) {
            return Err(GraphError::Shape(format!("channel {} does not act on dimension {dim}", c.label())));
        }
    }
    let labels: Vec<String> = channels.iter().map(ExactChannel::label).collect();
    let budget = node_budget.unwrap_or(usize::MAX);
    let mut g = ReachGraph {
        graph: Digraph::new(),
        states: Vec::new(),
        seeds: Vec::new(),
        depth_bound: max_depth,
        truncated: false,
    };
    let mut by_digest: HashMap<Digest, usize> = HashMap::new();
    let mut insert = |g: &mut ReachGraph, state: ExactDensityMatrix, digest: Digest| -> Option<(usize, bool)> {
        if let Some(&i) = by_digest.get(&digest) {
            assert!(g.states[i] == state, "state digest collision");
            return Some((i, false));
        }
        if g.states.len() >= budget {
            g.truncated = true;
            return None;
        }
        let i = g.graph.add_node(&digest.hex());
        by_digest.insert(digest, i);
        g.states.push(state);
        Some((i, true))
    };

    let mut frontier = Vec::new();
    for s in seeds {
        let d = s.digest();
        if let Some((i, fresh)) = insert(&mut g, s.clone(), d) {
            if !g.seeds.contains(&i) {
                g.seeds.push(i);
            }
            if fresh {
                frontier.push(i);
            }
        }
    }
    for _ in 0..max_depth {
        if frontier.is_empty() {
            break;
        }
        let children: Vec<Vec<(ExactDensityMatrix, Digest)>> = frontier
            .par_iter()
            .map(|&u| {
                channels
                    .iter()
                    .map(|c| {
                        let s = c.apply_unchecked(&g.states[u]);
                        let d = s.digest();
                        (s, d)
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (&u, kids) in frontier.iter().zip(children) {
            for ((state, d), label) in kids.into_iter().zip(&labels) {
                if let Some((v, fresh)) = insert(&mut g, state, d) {
                    g.graph.add_edge(u, v, label, Rational::from_integer(1.into()))?;
                    if fresh {
                        next.push(v);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReachOutcome {
    /// Shortest label sequence, in application order.
    Reachable { path: Vec<String> },
    /// Holds only relative to the explored depth.
    NotReachableWithinBound { depth_bound: usize },
}

/// Shortest path between two states of an explored graph. A target state
/// that was never explored is reported as not reachable within the bound.
pub fn reach(g: &ReachGraph, from: &ExactDensityMatrix, to: &ExactDensityMatrix) -> Result<ReachOutcome, GraphError> {
    let src = g.find(from).ok_or_else(|| GraphError::UnknownState(from.digest().short(12)))?;
    let not_found = ReachOutcome::NotReachableWithinBound { depth_bound: g.depth_bound };
    let Some(dst) = g.find(to) else { return Ok(not_found) };
    let adj = g.graph.adjacency();
    let edges = g.graph.edges();
    let mut via: Vec<Option<usize>> = vec![None; g.states.len()];
    let mut seen = vec![false; g.states.len()];
    seen[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        if u == dst {
            let mut path = Vec::new();
            let mut cur = dst;
            while let Some(k) = via[cur] {
                path.push(edges[k].label.clone());
                cur = edges[k].from;
            }
            path.reverse();
            return Ok(ReachOutcome::Reachable { path });
        }
        for &k in &adj[u] {
            let v = edges[k].to;
            if !seen[v] {
                seen[v] = true;
                via[v] = Some(k);
                queue.push_back(v);
            }
        }
    }
    Ok(not_found)
}

/// The Pauli-X conjugation channel on a qubit.
pub fn pauli_x_channel() -> ExactChannel {
    let x = ExactMatrix::from_fn(2, 2, |r, c| if r != c { GaussianRational::one() } else { GaussianRational::zero() });
    ExactChannel::kraus("X", vec![x])
}
