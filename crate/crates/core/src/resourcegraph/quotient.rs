use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::digraph::Digraph;
use crate::exact::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub length: Rational,
}

/// Strongly connected components of a [`Digraph`], collapsed.
///
/// Classes are numbered in a topological order of the condensation. Parallel
/// edges between two classes keep the largest length; edges inside a class
/// are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientDag {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub edges: Vec<DagEdge>,
}

impl QuotientDag {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn successors(&self) -> Vec<Vec<(usize, &Rational)>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for e in &self.edges {
            out[e.from].push((e.to, &e.length));
        }
        out
    }

    /// A topological order of the classes, or `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.classes.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let succ = self.successors();
        let mut queue: VecDeque<usize> = (0..n).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &(d, _) in &succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    pub fn to_json(&self, g: &Digraph) -> serde_json::Value {
        #[derive(Serialize)]
        struct Class<'a> {
            id: usize,
            members: Vec<&'a str>,
        }
        #[derive(Serialize)]
        struct Edge {
            from: usize,
            to: usize,
            length: String,
        }
        let classes: Vec<Class> = self
            .classes
            .iter()
            .enumerate()
            .map(|(id, m)| Class { id, members: m.iter().map(|&i| g.name(i)).collect() })
            .collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge { from: e.from, to: e.to, length: format_rational(&e.length) })
            .collect();
        serde_json::json!({ "classes": classes, "edges": edges })
    }
}

/// Collapses mutually reachable nodes (iterative Tarjan).
pub fn quotient(g: &Digraph) -> QuotientDag {
    let n = g.node_count();
    let adj = g.adjacency();
    let edges = g.edges();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    // Components in reverse topological order.
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, position in its adjacency list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if let Some(&k) = adj[v].get(top.1) {
                top.1 += 1;
                let w = edges[k].to;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                sccs.push(comp);
            }
        }
    }

    sccs.reverse();
    let mut class_of = vec![0; n];
    for (c, members) in sccs.iter().enumerate() {
        for &m in members {
            class_of[m] = c;
        }
    }
    let mut longest: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for e in edges {
        let (a, b) = (class_of[e.from], class_of[e.to]);
        if a == b {
            continue;
        }
        longest
            .entry((a, b))
            .and_modify(|l| {
                if e.length > *l {
                    *l = e.length.clone();
                }
            })
            .or_insert_with(|| e.length.clone());
    }
    QuotientDag {
        class_of,
        classes: sccs,
        edges: longest.into_iter().map(|((from, to), length)| DagEdge { from, to, length }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> Digraph {
        let mut g = Digraph::new();
        for (a, b) in edges {
            g.connect(a, b, "e");
        }
        g
    }

    #[test]
    fn two_cycle_is_one_class() {
        let q = quotient(&graph(&[("0", "1"), ("1", "0")]));
        assert_eq!(q.classes, vec![vec![0, 1]]);
        assert!(q.edges.is_empty());
    }

    #[test]
    fn dag_keeps_identity_partition_in_topological_order() {
        let g = graph(&[("c", "d"), ("a", "b"), ("b", "c")]);
        let q = quotient(&g);
        assert_eq!(q.class_count(), 4);
        assert!(q.classes.iter().all(|c| c.len() == 1));
        for e in g.edges() {
            assert!(q.class_of[e.from] < q.class_of[e.to]);
        }
        assert!(q.is_acyclic());
    }

    #[test]
    fn cycle_with_tails() {
        let q = quotient(&graph(&[("s", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "t")]));
        assert_eq!(q.class_count(), 3);
        let names = ["s", "a", "b", "c", "t"];
        let cls: Vec<usize> = (0..5).map(|i| q.class_of[i]).collect();
        assert_eq!(cls[1], cls[2]);
        assert_eq!(cls[2], cls[3]);
        assert!(cls[0] < cls[1] && cls[1] < cls[4], "{names:?} -> {cls:?}");
    }

    #[test]
    fn detects_cycles_in_handmade_dags() {
        let q = QuotientDag {
            class_of: vec![0, 1],
            classes: vec![vec![0], vec![1]],
            edges: vec![
                DagEdge { from: 0, to: 1, length: Rational::from_integer(1.into()) },
                DagEdge { from: 1, to: 0, length: Rational::from_integer(1.into()) },
            ],
        };
        assert!(!q.is_acyclic());
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let mut g = Digraph::new();
        for i in 0..50_000 {
            g.connect(&i.to_string(), &(i + 1).to_string(), "e");
        }
        g.connect("50000", "0", "e");
        assert_eq!(quotient(&g).class_count(), 1);
    }
}
