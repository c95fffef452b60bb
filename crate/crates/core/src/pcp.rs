//! Post Correspondence Problem instances ("dominoes"), their text format,
//! and a bounded breadth-first semi-decision procedure.
//!
//! The search state is the signed overhang: which side is ahead, and the
//! unmatched suffix it is ahead by. Two tile words with the same overhang
//! have identical futures, so each overhang is expanded once, from the
//! shortest (then lexicographically least) word that reaches it.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freerot::BinaryWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance has no tiles")]
    Empty,
    #[error("tile index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("tile {0} has two empty words; every word containing it is a trivial solution")]
    DegenerateTile(usize),
    #[error("tile word must be nonempty")]
    EmptyWord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub top: BinaryWord,
    pub bottom: BinaryWord,
}

impl Tile {
    pub fn word(&self, side: Side) -> &BinaryWord {
        match side {
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.top.is_empty() && self.bottom.is_empty()
    }
}

/// Tile `i` (1-based) realises letter `a_i`: `h(a_i) = top`, `g(a_i) = bottom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PcpInstance {
    tiles: Vec<Tile>,
}

impl PcpInstance {
    pub fn new(tiles: Vec<Tile>) -> Result<Self, PcpError> {
        if tiles.is_empty() {
            return Err(PcpError::Empty);
        }
        Ok(PcpInstance { tiles })
    }

    /// Convenience constructor from `(top, bottom)` string pairs.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, PcpError> {
        let text: Vec<String> = pairs.iter().map(|(t, b)| format!("{t}|{b}")).collect();
        parse_instance(&text.join("\n"))
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Tile by 1-based index.
    pub fn tile(&self, index: usize) -> Result<&Tile, PcpError> {
        index
            .checked_sub(1)
            .and_then(|i| self.tiles.get(i))
            .ok_or(PcpError::IndexOutOfRange(index, self.tiles.len()))
    }

    /// 1-based indices of tiles whose two words are both empty.
    pub fn degenerate_tiles(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.tiles[i - 1].is_degenerate()).collect()
    }

    /// Serialises back to the `top|bottom` line format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.tiles {
            s.push_str(&format!("{}|{}\n", t.top, t.bottom));
        }
        s
    }
}

impl fmt::Display for PcpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tiles.iter().map(|t| format!("({},{})", t.top, t.bottom)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parses one tile per line as `top|bottom`. Blank lines and `#` comments
/// are ignored; either word may be empty.
pub fn parse_instance(text: &str) -> Result<PcpInstance, PcpError> {
    let mut tiles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| PcpError::Parse { line: n + 1, msg };
        let (top, bottom) = line
            .split_once('|')
            .ok_or_else(|| err(format!("expected `top|bottom`, got `{line}`")))?;
        let word = |s: &str| {
            s.trim()
                .parse::<BinaryWord>()
                .map_err(|_| err(format!("non-binary character in `{}`", s.trim())))
        };
        tiles.push(Tile {
            top: word(top)?,
            bottom: word(bottom)?,
        });
    }
    PcpInstance::new(tiles)
}

/// A nonempty sequence of 1-based tile indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileWord(pub Vec<usize>);

impl TileWord {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TileWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Image of `w` under `h` (top) or `g` (bottom).
pub fn apply_hom(inst: &PcpInstance, side: Side, w: &TileWord) -> Result<BinaryWord, PcpError> {
    let mut out = BinaryWord::empty();
    for &i in w.indices() {
        out = out.concat(inst.tile(i)?.word(side));
    }
    Ok(out)
}

/// `h(w) = g(w)` for a nonempty, in-range `w`.
pub fn verify_solution(inst: &PcpInstance, w: &TileWord) -> bool {
    if w.is_empty() {
        return false;
    }
    match (apply_hom(inst, Side::Top, w), apply_hom(inst, Side::Bottom, w)) {
        (Ok(t), Ok(b)) => t == b,
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Found,
    ExhaustedToDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub witness: Option<TileWord>,
    pub depth_reached: usize,
    pub nodes_expanded: usize,
    pub truncated: bool,
}

/// Unmatched suffix of the side that is ahead; empty means balanced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Overhang {
    pub ahead: Option<Side>,
    pub suffix: Vec<u8>,
}

impl Overhang {
    pub fn balanced() -> Self {
        Overhang { ahead: None, suffix: Vec::new() }
    }

    pub fn is_balanced(&self) -> bool {
        self.suffix.is_empty()
    }

    /// Appends a tile; `None` when neither side is a prefix of the other.
    pub fn extend(&self, tile: &Tile) -> Option<Overhang> {
        let (mut top, mut bottom) = match self.ahead {
            Some(Side::Top) => (self.suffix.clone(), Vec::new()),
            Some(Side::Bottom) => (Vec::new(), self.suffix.clone()),
            None => (Vec::new(), Vec::new()),
        };
        top.extend_from_slice(tile.top.bits());
        bottom.extend_from_slice(tile.bottom.bits());
        let common = top.len().min(bottom.len());
        if top[..common] != bottom[..common] {
            return None;
        }
        Some(if top.len() > common {
            Overhang { ahead: Some(Side::Top), suffix: top[common..].to_vec() }
        } else if bottom.len() > common {
            Overhang { ahead: Some(Side::Bottom), suffix: bottom[common..].to_vec() }
        } else {
            Overhang::balanced()
        })
    }
}

/// Breadth-first search for a shortest, then lexicographically least,
/// solution with at most `max_depth` tiles.
///
/// `node_budget` caps the number of generated configurations; exceeding it
/// returns `ExhaustedToDepth` with `truncated` set.
pub fn solve_bounded(
    inst: &PcpInstance,
    max_depth: usize,
    node_budget: Option<usize>,
) -> Result<SearchOutcome, PcpError> {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    if let Some(&i) = inst.degenerate_tiles().first() {
        return Err(PcpError::DegenerateTile(i));
    }
    let budget = node_budget.unwrap_or(usize::MAX);
    let mut visited: HashSet<Overhang> = HashSet::from([Overhang::balanced()]);
    let mut frontier: Vec<(Overhang, Vec<usize>)> = vec![(Overhang::balanced(), Vec::new())];
    let mut outcome = SearchOutcome {
        status: SearchStatus::ExhaustedToDepth,
        witness: None,
        depth_reached: 0,
        nodes_expanded: 0,
        truncated: false,
    };

    for depth in 1..=max_depth {
        if frontier.is_empty() {
            break;
        }
        // Children of each configuration, in tile order; merged sequentially
        // so the result does not depend on scheduling.
        let children: Vec<Vec<(usize, Option<Overhang>)>> = frontier
            .par_iter()
            .map(|(cfg, _)| {
                inst.tiles()
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (i + 1, cfg.extend(t)))
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for ((_, word), kids) in frontier.iter().zip(children) {
            for (index, child) in kids {
                let Some(child) = child else { continue };
                if outcome.nodes_expanded == budget {
                    outcome.truncated = true;
                    return Ok(outcome);
                }
                outcome.nodes_expanded += 1;
                let mut w = word.clone();
                w.push(index);
                if child.is_balanced() {
                    outcome.status = SearchStatus::Found;
                    outcome.witness = Some(TileWord(w));
                    outcome.depth_reached = depth;
                    return Ok(outcome);
                }
                if visited.insert(child.clone()) {
                    next.push((child, w));
                }
            }
        }
        outcome.depth_reached = depth;
        frontier = next;
    }
    Ok(outcome)
}
