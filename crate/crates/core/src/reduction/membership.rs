//! Bounded semi-decision of `ψ ∈ 𝓕*`.
//!
//! ψ has identity unitary, so a word in the generators realises ψ (for a
//! suitable choice of dampings) exactly when its unitary product is a scalar
//! multiple of `I₄`. Conjugation is phase-blind, so any unimodular scalar is
//! accepted.
//!
//! *Generic* mode is shape-agnostic. It grows the set of distinct unitary
//! products breadth-first (one representative per group element: the
//! shortest, then lexicographically least, application sequence) and looks
//! for a scalar word of length `L` by meeting in the middle: the sequence
//! `x ++ y` (x applied first, |x| = ⌈L/2⌉) is scalar iff `U_y ∝ U_x†`. This
//! visits exactly the words a plain BFS would accept, at square-root cost.
//!
//! *Structured* mode only builds words `G_{a_n}…G_{a_1}H_{a_1}…H_{a_n}`,
//! enumerating tile words by their PCP overhang and accepting on the exact
//! scalar test of the composed channel.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{ChannelElement, GenLabel};
use super::compile::GeneratorSet;
use crate::exact::{
    dagger, digest, format_rational, is_scalar, mat_mul, phase_normalize, Digest, ExactMatrix,
    GaussianRational, Rational,
};
use crate::pcp::{verify_solution, Overhang, PcpInstance, SearchStatus, TileWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Generic,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipOutcome {
    pub mode: SearchMode,
    pub status: SearchStatus,
    /// Composition order: the rightmost generator is applied first.
    pub witness: Option<Vec<GenLabel>>,
    pub witness_depth: Option<usize>,
    pub scalar_value: Option<GaussianRational>,
    /// True when the witness product is `c·I` with `c ≠ 1`.
    pub nontrivial_phase: bool,
    /// Product of the generator dampings along the witness.
    pub damping: Option<String>,
    pub damping_monomial: Option<BTreeMap<String, usize>>,
    /// Tile word decoded from the witness; always verified.
    pub extracted: Option<TileWord>,
    pub depth_reached: usize,
    pub nodes_expanded: usize,
    pub truncated: bool,
}

impl MembershipOutcome {
    fn exhausted(mode: SearchMode) -> Self {
        MembershipOutcome {
            mode,
            status: SearchStatus::ExhaustedToDepth,
            witness: None,
            witness_depth: None,
            scalar_value: None,
            nontrivial_phase: false,
            damping: None,
            damping_monomial: None,
            extracted: None,
            depth_reached: 0,
            nodes_expanded: 0,
            truncated: false,
        }
    }

    fn found(&mut self, channel: &ChannelElement, scalar: GaussianRational, inst: Option<&PcpInstance>) {
        self.status = SearchStatus::Found;
        self.witness_depth = Some(channel.word.len());
        self.nontrivial_phase = !scalar.is_one();
        self.scalar_value = Some(scalar);
        self.damping = Some(format_rational(&channel.damping));
        self.damping_monomial = Some(channel.damping_monomial());
        self.extracted = inst.and_then(|i| extract_tile_word(&channel.word, i));
        self.witness = Some(channel.word.clone());
    }
}

/// Search for a word whose unitary product is scalar, over an arbitrary
/// generator list (searched in the given order).
pub fn generic_scalar_search(
    gens: &[ChannelElement],
    max_depth: usize,
    node_budget: Option<usize>,
) -> (MembershipOutcome, Option<ChannelElement>) {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    assert!(!gens.is_empty(), "no generators");
    let mut out = MembershipOutcome::exhausted(SearchMode::Generic);
    let mut ball = Ball::new(gens, node_budget);

    for len in 1..=max_depth {
        let (lx, ly) = (len.div_ceil(2), len / 2);
        while ball.layers.len() <= lx {
            if !ball.grow() {
                out.nodes_expanded = ball.nodes_expanded;
                out.truncated = true;
                return (out, None);
            }
        }
        ball.index_layer(ly);
        if let Some((x, y)) = ball.meet(lx, ly) {
            let mut seq = ball.layers[lx][x].seq.clone();
            seq.extend_from_slice(&ball.layers[ly][y].seq);
            let channel = channel_for(gens, &seq);
            let scalar = is_scalar(&channel.unitary).expect("meet-in-the-middle match is scalar");
            out.found(&channel, scalar, None);
            out.depth_reached = len;
            out.nodes_expanded = ball.nodes_expanded;
            return (out, Some(channel));
        }
        out.depth_reached = len;
    }
    out.nodes_expanded = ball.nodes_expanded;
    (out, None)
}

/// Composes generators from an application sequence (first index applied first).
fn channel_for(gens: &[ChannelElement], application_seq: &[u16]) -> ChannelElement {
    let dim = gens[0].dim();
    application_seq
        .iter()
        .fold(ChannelElement::identity(dim), |acc, &g| super::compose(&gens[g as usize], &acc))
}

struct Node {
    unitary: ExactMatrix,
    /// Generator indices in application order.
    seq: Vec<u16>,
}

/// Breadth-first ball of distinct unitary products, one layer per word length.
struct Ball<'a> {
    gens: &'a [ChannelElement],
    layers: Vec<Vec<Node>>,
    seen: HashMap<Digest, Vec<(usize, usize)>>,
    phase_index: Vec<Option<HashMap<Digest, Vec<usize>>>>,
    nodes_expanded: usize,
    budget: usize,
}

impl<'a> Ball<'a> {
    fn new(gens: &'a [ChannelElement], budget: Option<usize>) -> Self {
        let id = ExactMatrix::identity(gens[0].dim());
        let mut seen = HashMap::new();
        seen.insert(id.digest(), vec![(0, 0)]);
        Ball {
            gens,
            layers: vec![vec![Node { unitary: id, seq: Vec::new() }]],
            seen,
            phase_index: vec![None],
            nodes_expanded: 0,
            budget: budget.unwrap_or(usize::MAX),
        }
    }

    /// Adds the next layer; false if the node budget ran out.
    fn grow(&mut self) -> bool {
        let r = self.layers.len();
        let gens = self.gens;
        let children: Vec<Vec<(ExactMatrix, Digest)>> = self.layers[r - 1]
            .par_iter()
            .map(|node| {
                gens.iter()
                    .map(|g| {
                        let u = mat_mul(&g.unitary, &node.unitary).expect("dimensions agree");
                        let d = u.digest();
                        (u, d)
                    })
                    .collect()
            })
            .collect();
        let mut layer = Vec::new();
        for (parent, kids) in children.into_iter().enumerate() {
            for (g, (u, d)) in kids.into_iter().enumerate() {
                if self.nodes_expanded == self.budget {
                    return false;
                }
                self.nodes_expanded += 1;
                let bucket = self.seen.entry(d).or_default();
                if bucket.iter().any(|&(l, i)| {
                    let stored = if l == r { &layer[i] } else { &self.layers[l][i] };
                    let stored: &Node = stored;
                    stored.unitary == u
                }) {
                    continue;
                }
                bucket.push((r, layer.len()));
                let mut seq = self.layers[r - 1][parent].seq.clone();
                seq.push(g as u16);
                layer.push(Node { unitary: u, seq });
            }
        }
        self.layers.push(layer);
        self.phase_index.push(None);
        true
    }

    fn index_layer(&mut self, l: usize) {
        if self.phase_index[l].is_some() {
            return;
        }
        let keys: Vec<Digest> = self.layers[l]
            .par_iter()
            .map(|n| digest(&phase_normalize(&n.unitary)))
            .collect();
        let mut idx: HashMap<Digest, Vec<usize>> = HashMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            idx.entry(k).or_default().push(i);
        }
        self.phase_index[l] = Some(idx);
    }

    /// First `x` in layer `lx` (in order) with some `y` in layer `ly` such that
    /// `U_y ∝ U_x†`; `y` is the first such in its layer.
    fn meet(&self, lx: usize, ly: usize) -> Option<(usize, usize)> {
        let index = self.phase_index[ly].as_ref().expect("indexed");
        let ys = &self.layers[ly];
        let targets: Vec<(ExactMatrix, Digest)> = self.layers[lx]
            .par_iter()
            .map(|n| {
                let t = phase_normalize(&dagger(&n.unitary));
                let d = digest(&t);
                (t, d)
            })
            .collect();
        targets.iter().enumerate().find_map(|(x, (t, d))| {
            index
                .get(d)?
                .iter()
                .copied()
                .find(|&y| phase_normalize(&ys[y].unitary) == *t)
                .map(|y| (x, y))
        })
    }
}

/// Reads a tile word off a witness of shape `G_{a_n}…G_{a_1}H_{a_1}…H_{a_n}`
/// or any cyclic rotation of it. Returns `None` for other shapes, or when
/// the read-off word is not a PCP solution.
pub fn extract_tile_word(word: &[GenLabel], inst: &PcpInstance) -> Option<TileWord> {
    if word.len() < 2 || word.contains(&GenLabel::Target) {
        return None;
    }
    let candidates = [two_phase_indices(word), applied_h_indices(word)];
    if let Some(w) = candidates.into_iter().flatten().map(TileWord).find(|w| verify_solution(inst, w)) {
        return Some(w);
    }
    // Any other arrangement of the same tiles, lexicographically first.
    let mut idx: Vec<usize> = word.iter().filter_map(GenLabel::h_index).collect();
    if idx.is_empty() || idx.len() > MAX_PERMUTED_TILES {
        return None;
    }
    idx.sort_unstable();
    loop {
        let w = TileWord(idx.clone());
        if verify_solution(inst, &w) {
            return Some(w);
        }
        if !next_permutation(&mut idx) {
            return None;
        }
    }
}

const MAX_PERMUTED_TILES: usize = 8;

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a larger successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Tile indices of a cyclic rotation of `G_an..G_a1 H_a1..H_an`.
fn two_phase_indices(word: &[GenLabel]) -> Option<Vec<usize>> {
    let n = word.len();
    let is_g = |l: &GenLabel| matches!(l, GenLabel::G(_));
    // Start of the G-run, cyclically.
    let start = (0..n).find(|&j| is_g(&word[j]) && !is_g(&word[(j + n - 1) % n]))?;
    let rotated: Vec<GenLabel> = (0..n).map(|k| word[(start + k) % n]).collect();
    let split = rotated.iter().position(|l| !is_g(l))?;
    let (gs, hs) = rotated.split_at(split);
    if hs.iter().any(is_g) || gs.len() != hs.len() {
        return None;
    }
    let h_idx: Vec<usize> = hs.iter().filter_map(GenLabel::h_index).collect();
    let g_idx: Vec<usize> = gs.iter().rev().filter_map(GenLabel::g_index).collect();
    (h_idx == g_idx).then_some(h_idx)
}

/// `H` indices in application order; covers words where each `G_i`
/// directly undoes the `H_i` applied before it, such as `G3 H3 G1 H1`.
fn applied_h_indices(word: &[GenLabel]) -> Option<Vec<usize>> {
    let idx: Vec<usize> = word.iter().rev().filter_map(GenLabel::h_index).collect();
    (!idx.is_empty()).then_some(idx)
}

/// Structured search: two-phase words only, enumerated through the PCP
/// overhang graph. `max_depth` bounds the channel word length, so tile words
/// of length up to `max_depth / 2` are covered.
pub fn structured_search(
    gens: &GeneratorSet,
    max_depth: usize,
    node_budget: Option<usize>,
) -> (MembershipOutcome, Option<ChannelElement>) {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    let mut out = MembershipOutcome::exhausted(SearchMode::Structured);
    let budget = node_budget.unwrap_or(usize::MAX);
    let inst = &gens.instance;
    let id = ChannelElement::identity(4);

    struct SNode {
        overhang: Overhang,
        tiles: Vec<usize>,
        h_part: ChannelElement,
        g_part: ChannelElement,
    }
    let mut visited: HashSet<Overhang> = HashSet::from([Overhang::balanced()]);
    let mut frontier = vec![SNode {
        overhang: Overhang::balanced(),
        tiles: Vec::new(),
        h_part: id.clone(),
        g_part: id,
    }];

    for n in 1..=max_depth / 2 {
        if frontier.is_empty() {
            break;
        }
        out.depth_reached = 2 * (n - 1);
        let children: Vec<Vec<Option<SNode>>> = frontier
            .par_iter()
            .map(|node| {
                (1..=inst.len())
                    .map(|i| {
                        let overhang = node.overhang.extend(&inst.tiles()[i - 1])?;
                        let mut tiles = node.tiles.clone();
                        tiles.push(i);
                        Some(SNode {
                            overhang,
                            tiles,
                            h_part: super::compose(&node.h_part, &gens.h_gens[i - 1]),
                            g_part: super::compose(&gens.g_gens[i - 1], &node.g_part),
                        })
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for child in children.into_iter().flatten().flatten() {
            if out.nodes_expanded == budget {
                out.truncated = true;
                return (out, None);
            }
            out.nodes_expanded += 1;
            if child.overhang.is_balanced() {
                let channel = super::compose(&child.g_part, &child.h_part);
                if let Some(c) = is_scalar(&channel.unitary) {
                    out.found(&channel, c, Some(inst));
                    out.depth_reached = 2 * n;
                    return (out, Some(channel));
                }
                continue;
            }
            if visited.insert(child.overhang.clone()) {
                next.push(child);
            }
        }
        frontier = next;
    }
    // Odd lengths cannot carry the two-phase shape, so every admissible
    // word up to max_depth has been covered.
    out.depth_reached = max_depth;
    (out, None)
}

/// Semi-decides `ψ ∈ 𝓕*` up to words of length `max_depth`.
pub fn membership_search(
    gens: &GeneratorSet,
    max_depth: usize,
    mode: SearchMode,
    node_budget: Option<usize>,
) -> MembershipOutcome {
    match mode {
        SearchMode::Generic => {
            let (mut out, channel) = generic_scalar_search(&gens.generators(), max_depth, node_budget);
            if let Some(c) = channel {
                out.extracted = extract_tile_word(&c.word, &gens.instance);
            }
            out
        }
        SearchMode::Structured => structured_search(gens, max_depth, node_budget).0,
    }
}

/// Product of generator dampings along a word (no identity factors).
pub fn word_damping(gens: &GeneratorSet, word: &[GenLabel]) -> Option<Rational> {
    word.iter().try_fold(Rational::one(), |acc, l| Some(acc * &gens.generator(*l)?.damping))
}
