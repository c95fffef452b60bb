//! Bounded refutation of "F₁ and F₂ generate the same resource theory".
//!
//! Each bounded closure is reduced to canonical channel forms
//! `(U up to global phase, damped?)`. The damping value itself is not part
//! of the form: every generator family is available at any λ ∈ (0, 1), so
//! a composite with at least one damped generator can match any damping in
//! (0, 1), while the empty word is the only undamped element.
//!
//! Equality of theories is undecidable; this only ever reports `Distinct`
//! (with a witness) or `IndistinguishableUpToDepth`.

use std::collections::HashMap;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::channel::{make_target, ChannelElement, GenLabel};
use super::compile::GeneratorSet;
use super::ReductionError;
use crate::exact::{digest, format_rational, mat_mul, phase_normalize, Digest, ExactMatrix, Rational};

/// A finite generating set of (U, λ) channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub generators: Vec<ChannelElement>,
}

impl Theory {
    pub fn new(generators: Vec<ChannelElement>) -> Result<Self, ReductionError> {
        let Some(first) = generators.first() else {
            return Err(ReductionError::Domain("a theory needs at least one generator".into()));
        };
        if generators.iter().any(|g| g.dim() != first.dim()) {
            return Err(ReductionError::Shape("generators act on different dimensions".into()));
        }
        Ok(Theory { generators })
    }

    pub fn from_set(set: &GeneratorSet) -> Self {
        Theory { generators: set.generators() }
    }

    /// `F ∪ {ψ}` with ψ at the given damping.
    pub fn augmented_with_target(&self, damping: Rational) -> Result<Self, ReductionError> {
        let mut psi = make_target(damping)?;
        psi.word = vec![GenLabel::Target];
        let mut generators = self.generators.clone();
        generators.push(psi);
        Theory::new(generators)
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiffStatus {
    Distinct,
    IndistinguishableUpToDepth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheorySide {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffWitness {
    /// Closure that contains the channel.
    pub present_in: TheorySide,
    pub word: Vec<GenLabel>,
    pub damping: String,
    pub form_digest: Digest,
}

/// How the other theory realises one generator's canonical form, if it does.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorMatch {
    pub side: TheorySide,
    pub generator: Vec<GenLabel>,
    pub realized_by: Option<Vec<GenLabel>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffOutcome {
    pub status: DiffStatus,
    /// Depth up to which both closures were fully enumerated and compared.
    pub depth: usize,
    pub witness: Option<DiffWitness>,
    pub generator_matches: Vec<GeneratorMatch>,
    pub closure_sizes: [usize; 2],
    pub truncated: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct FormKey {
    digest: Digest,
    damped: bool,
}

struct FormEntry {
    normalized: ExactMatrix,
    unitary: ExactMatrix,
    seq: Vec<u16>,
    damping: Rational,
}

/// Distinct canonical forms reachable in at most `depth` steps, in BFS order.
struct Closure {
    forms: Vec<(FormKey, FormEntry)>,
    index: HashMap<FormKey, Vec<usize>>,
    layer_ends: Vec<usize>,
}

impl Closure {
    fn find(&self, key: &FormKey, normalized: &ExactMatrix) -> Option<usize> {
        self.index.get(key)?.iter().copied().find(|&i| self.forms[i].1.normalized == *normalized)
    }

    fn complete_depth(&self) -> usize {
        self.layer_ends.len() - 1
    }

    /// Number of forms within the first `depth` layers.
    fn size_at(&self, depth: usize) -> usize {
        self.layer_ends[depth]
    }
}

impl Closure {
    fn new(theory: &Theory) -> Self {
        let id = ExactMatrix::identity(theory.dim());
        let key = FormKey { digest: digest(&id), damped: false };
        Closure {
            forms: vec![(
                key,
                FormEntry { normalized: id.clone(), unitary: id, seq: Vec::new(), damping: Rational::one() },
            )],
            index: HashMap::from([(key, vec![0])]),
            layer_ends: vec![1],
        }
    }

    /// Adds the next layer. On budget exhaustion the partial layer is
    /// discarded and `false` returned.
    fn grow(&mut self, theory: &Theory, budget: &mut usize) -> bool {
        let start = self.layer_ends.len().checked_sub(2).map_or(0, |i| self.layer_ends[i]);
        let end = *self.layer_ends.last().unwrap();
        let gens = &theory.generators;
        let kids: Vec<Vec<(FormKey, FormEntry)>> = self.forms[start..end]
            .par_iter()
            .map(|(_, e)| {
                gens.iter()
                    .enumerate()
                    .map(|(g, gen)| {
                        let unitary = mat_mul(&gen.unitary, &e.unitary).expect("same dimension");
                        let normalized = phase_normalize(&unitary);
                        let damping = &gen.damping * &e.damping;
                        let key = FormKey { digest: digest(&normalized), damped: !damping.is_one() };
                        let mut seq = e.seq.clone();
                        seq.push(g as u16);
                        (key, FormEntry { normalized, unitary, seq, damping })
                    })
                    .collect()
            })
            .collect();
        let before = self.forms.len();
        for (key, entry) in kids.into_iter().flatten() {
            if *budget == 0 {
                self.forms.truncate(before);
                self.index.retain(|_, v| {
                    v.retain(|&i| i < before);
                    !v.is_empty()
                });
                return false;
            }
            *budget -= 1;
            if self.find(&key, &entry.normalized).is_some() {
                continue;
            }
            self.index.entry(key).or_default().push(self.forms.len());
            self.forms.push((key, entry));
        }
        self.layer_ends.push(self.forms.len());
        true
    }
}

fn word_of(theory: &Theory, seq: &[u16]) -> Vec<GenLabel> {
    seq.iter().rev().flat_map(|&g| theory.generators[g as usize].word.clone()).collect()
}

/// Compares the depth-bounded closures of two theories.
///
/// Both closures grow one layer at a time. `node_budget` caps the total
/// number of generated products; when it runs out, comparison happens at
/// the deepest level both closures completed and `truncated` is set.
pub fn theory_diff(
    f1: &Theory,
    f2: &Theory,
    max_depth: usize,
    node_budget: Option<usize>,
) -> Result<DiffOutcome, ReductionError> {
    if f1.dim() != f2.dim() {
        return Err(ReductionError::Shape("theories act on different dimensions".into()));
    }
    let mut budget = node_budget.unwrap_or(usize::MAX);
    let (mut c1, mut c2) = (Closure::new(f1), Closure::new(f2));
    let mut truncated = false;
    for _ in 0..max_depth {
        if !c1.grow(f1, &mut budget) || !c2.grow(f2, &mut budget) {
            truncated = true;
            break;
        }
    }
    let depth = c1.complete_depth().min(c2.complete_depth());
    let sides = [(TheorySide::First, f1, &c1, &c2), (TheorySide::Second, f2, &c2, &c1)];

    let mut witness = None;
    for (side, theory, mine, other) in sides {
        let hit = mine.forms[..mine.size_at(depth)]
            .iter()
            .find(|(k, e)| other.find(k, &e.normalized).is_none_or(|i| i >= other.size_at(depth)));
        if let Some((key, e)) = hit {
            witness = Some(DiffWitness {
                present_in: side,
                word: word_of(theory, &e.seq),
                damping: format_rational(&e.damping),
                form_digest: key.digest,
            });
            break;
        }
    }

    let mut generator_matches = Vec::new();
    for (side, theory, _, other) in sides {
        let other_theory = if side == TheorySide::First { f2 } else { f1 };
        for gen in &theory.generators {
            let normalized = phase_normalize(&gen.unitary);
            let key = FormKey { digest: digest(&normalized), damped: !gen.damping.is_one() };
            let realized_by = other
                .find(&key, &normalized)
                .filter(|&i| i < other.size_at(depth))
                .map(|i| word_of(other_theory, &other.forms[i].1.seq));
            generator_matches.push(GeneratorMatch { side, generator: gen.word.clone(), realized_by });
        }
    }

    Ok(DiffOutcome {
        status: if witness.is_some() { DiffStatus::Distinct } else { DiffStatus::IndistinguishableUpToDepth },
        depth,
        witness,
        generator_matches,
        closure_sizes: [c1.size_at(depth), c2.size_at(depth)],
        truncated,
    })
}
