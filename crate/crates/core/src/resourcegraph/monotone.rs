//! Longest-path monotones on a quotient DAG and the two checks that make a
//! family of them a complete set: compatibility with every edge, and
//! dominance order coinciding with reachability.
//!
//! Values are bound-relative: they describe the explored subgraph only.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::digraph::Digraph;
use super::quotient::QuotientDag;
use super::GraphError;
use crate::exact::{format_rational, Rational};

/// `f_base(c) = 1/(ℓ+1)` with ℓ the longest path length from `base` to `c`,
/// or 2 when `c` is unreachable from `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneTable {
    pub base: usize,
    pub values: Vec<Rational>,
}

impl MonotoneTable {
    pub fn value(&self, class: usize) -> &Rational {
        &self.values[class]
    }

    pub fn unreachable_value() -> Rational {
        Rational::from_integer(2.into())
    }
}

impl Serialize for MonotoneTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Table {
            base: usize,
            values: BTreeMap<String, String>,
        }
        Table {
            base: self.base,
            values: self.values.iter().enumerate().map(|(c, v)| (c.to_string(), format_rational(v))).collect(),
        }
        .serialize(s)
    }
}

/// Tables based at every class, in class order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneFamily {
    pub tables: Vec<MonotoneTable>,
}

pub fn monotone(q: &QuotientDag, base: usize) -> Result<MonotoneTable, GraphError> {
    let order = q.topological_order().ok_or(GraphError::Cyclic)?;
    if base >= q.class_count() {
        return Err(GraphError::UnknownNode(format!("class {base}")));
    }
    let succ = q.successors();
    let mut longest: Vec<Option<Rational>> = vec![None; q.class_count()];
    longest[base] = Some(Rational::zero());
    let start = order.iter().position(|&c| c == base).expect("base is in the order");
    for &c in &order[start..] {
        let Some(lc) = longest[c].clone() else { continue };
        for &(d, len) in &succ[c] {
            let cand = &lc + len;
            if longest[d].as_ref().is_none_or(|cur| cand > *cur) {
                longest[d] = Some(cand);
            }
        }
    }
    let values = longest
        .into_iter()
        .map(|l| match l {
            Some(l) => (l + Rational::one()).recip(),
            None => MonotoneTable::unreachable_value(),
        })
        .collect();
    Ok(MonotoneTable { base, values })
}

pub fn monotone_family(q: &QuotientDag) -> Result<MonotoneFamily, GraphError> {
    let tables = (0..q.class_count()).map(|c| monotone(q, c)).collect::<Result<_, _>>()?;
    Ok(MonotoneFamily { tables })
}

/// An edge along which some table increases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityViolation {
    pub from: String,
    pub to: String,
    pub label: String,
    pub base: usize,
    pub value_from: String,
    pub value_to: String,
}

/// `f(v) ≤ f(u)` for every edge `u → v` of `g` and every table `f`.
pub fn check_compatible(g: &Digraph, q: &QuotientDag, family: &MonotoneFamily) -> Result<(), CompatibilityViolation> {
    for f in &family.tables {
        for e in g.edges() {
            let (fu, fv) = (f.value(q.class_of[e.from]), f.value(q.class_of[e.to]));
            if fv > fu {
                return Err(CompatibilityViolation {
                    from: g.name(e.from).to_owned(),
                    to: g.name(e.to).to_owned(),
                    label: e.label.clone(),
                    base: f.base,
                    value_from: format_rational(fu),
                    value_to: format_rational(fv),
                });
            }
        }
    }
    Ok(())
}

/// A class pair where dominance by the family and reachability disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletenessViolation {
    pub from_class: usize,
    pub to_class: usize,
    pub reachable: bool,
    pub dominated: bool,
}

/// Class-level reachability (reflexive), by Warshall's closure over bitsets.
pub fn transitive_closure(q: &QuotientDag) -> Vec<Vec<u64>> {
    let n = q.class_count();
    let words = n.div_ceil(64).max(1);
    let mut reach = vec![vec![0u64; words]; n];
    for (c, row) in reach.iter_mut().enumerate() {
        row[c / 64] |= 1 << (c % 64);
    }
    for e in &q.edges {
        reach[e.from][e.to / 64] |= 1 << (e.to % 64);
    }
    for k in 0..n {
        let row_k = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k / 64] >> (k % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&row_k) {
                    *a |= *b;
                }
            }
        }
    }
    reach
}

/// For every ordered class pair `(ρ, σ)`: `f(σ) ≤ f(ρ)` for all tables iff
/// `σ` is reachable from `ρ`.
pub fn check_complete(q: &QuotientDag, family: &MonotoneFamily) -> Result<(), CompletenessViolation> {
    let n = q.class_count();
    let reach = transitive_closure(q);
    // Order-preserving integer ranks, one vector per table.
    let ranks: Vec<Vec<u32>> = family
        .tables
        .iter()
        .map(|f| {
            let mut sorted: Vec<&Rational> = f.values.iter().collect();
            sorted.sort();
            sorted.dedup();
            f.values.iter().map(|v| sorted.binary_search(&v).expect("present") as u32).collect()
        })
        .collect();
    for rho in 0..n {
        for sigma in 0..n {
            let dominated = ranks.iter().all(|r| r[sigma] <= r[rho]);
            let reachable = reach[rho][sigma / 64] >> (sigma % 64) & 1 == 1;
            if dominated != reachable {
                return Err(CompletenessViolation { from_class: rho, to_class: sigma, reachable, dominated });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::resourcegraph::quotient;

    fn graph(edges: &[(&str, &str)]) -> Digraph {
        let mut g = Digraph::new();
        for (a, b) in edges {
            g.connect(a, b, "e");
        }
        g
    }

    #[test]
    fn base_unreachable_and_path_values() {
        let mut g = graph(&[("a", "b"), ("b", "c"), ("a", "c")]);
        g.add_node("z");
        let q = quotient(&g);
        let a = q.class_of[g.node("a").unwrap()];
        let f = monotone(&q, a).unwrap();
        assert_eq!(f.value(a), &ratio(1, 1));
        assert_eq!(f.value(q.class_of[g.node("b").unwrap()]), &ratio(1, 2));
        // Longest path a→b→c, not the shortcut.
        assert_eq!(f.value(q.class_of[g.node("c").unwrap()]), &ratio(1, 3));
        assert_eq!(f.value(q.class_of[g.node("z").unwrap()]), &ratio(2, 1));
    }

    #[test]
    fn weighted_lengths_add() {
        let mut g = Digraph::new();
        let (a, b) = (g.add_node("a"), g.add_node("b"));
        g.add_edge(a, b, "t", ratio(5, 2)).unwrap();
        let q = quotient(&g);
        assert_eq!(monotone(&q, q.class_of[a]).unwrap().value(q.class_of[b]), &ratio(2, 7));
    }

    #[test]
    fn cyclic_input_is_rejected() {
        let q = QuotientDag {
            class_of: vec![0, 1],
            classes: vec![vec![0], vec![1]],
            edges: vec![
                super::super::quotient::DagEdge { from: 0, to: 1, length: ratio(1, 1) },
                super::super::quotient::DagEdge { from: 1, to: 0, length: ratio(1, 1) },
            ],
        };
        assert_eq!(monotone(&q, 0), Err(GraphError::Cyclic));
    }

    #[test]
    fn single_node_checks_pass() {
        let g = graph(&[("a", "a")]);
        let q = quotient(&g);
        let fam = monotone_family(&q).unwrap();
        assert_eq!(check_compatible(&g, &q, &fam), Ok(()));
        assert_eq!(check_complete(&q, &fam), Ok(()));
    }

    #[test]
    fn perturbed_value_breaks_compatibility() {
        let g = graph(&[("a", "b")]);
        let q = quotient(&g);
        let mut fam = monotone_family(&q).unwrap();
        let (a, b) = (q.class_of[0], q.class_of[1]);
        fam.tables[a].values[b] = ratio(3, 2);
        let err = check_compatible(&g, &q, &fam).unwrap_err();
        assert_eq!((err.from.as_str(), err.to.as_str(), err.base), ("a", "b", a));
    }

    #[test]
    fn missing_table_breaks_completeness() {
        // Two incomparable branches below a root.
        let g = graph(&[("r", "x"), ("r", "y")]);
        let q = quotient(&g);
        let mut fam = monotone_family(&q).unwrap();
        assert_eq!(check_complete(&q, &fam), Ok(()));
        let x = q.class_of[g.node("x").unwrap()];
        fam.tables.retain(|t| t.base != x);
        let err = check_complete(&q, &fam).unwrap_err();
        assert!(err.dominated && !err.reachable);
        assert_eq!(err.from_class, x);
    }

    #[test]
    fn table_json_uses_fraction_strings() {
        let g = graph(&[("a", "b")]);
        let q = quotient(&g);
        let f = monotone(&q, 0).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["values"]["1"], "1/2");
        assert_eq!(v["values"]["0"], "1");
    }
}
