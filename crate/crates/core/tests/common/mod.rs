#![allow(dead_code)]

use std::path::PathBuf;

use chanmem::exact::{ratio, ExactDensityMatrix, ExactMatrix, GaussianRational};
use chanmem::pcp::{PcpInstance, TileWord};
use chanmem::reduction::ChannelElement;
use rand::Rng;
use serde::Deserialize;

#[derive(Deserialize)]
struct CorpusFile {
    instances: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    name: String,
    tiles: Vec<(String, String)>,
    min_solution: Option<usize>,
}

pub struct CorpusEntry {
    pub name: String,
    pub instance: PcpInstance,
    /// Minimal solution length, `None` when unsolvable to 10 tiles.
    pub min_solution: Option<usize>,
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn corpus() -> Vec<CorpusEntry> {
    let text = std::fs::read_to_string(fixture("pcp_corpus.json")).unwrap();
    let file: CorpusFile = serde_json::from_str(&text).unwrap();
    file.instances
        .into_iter()
        .map(|e| {
            let pairs: Vec<(&str, &str)> = e.tiles.iter().map(|(t, b)| (t.as_str(), b.as_str())).collect();
            CorpusEntry { name: e.name, instance: PcpInstance::from_pairs(&pairs).unwrap(), min_solution: e.min_solution }
        })
        .collect()
}

/// Lexicographically first shortest solution, by enumerating every index
/// sequence and comparing the concatenated strings.
pub fn brute_force_solution(inst: &PcpInstance, max_len: usize) -> Option<TileWord> {
    let k = inst.len();
    let tops: Vec<String> = inst.tiles().iter().map(|t| t.top.to_string()).collect();
    let bottoms: Vec<String> = inst.tiles().iter().map(|t| t.bottom.to_string()).collect();
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            let top: String = idx.iter().map(|&i| tops[i].as_str()).collect();
            let bottom: String = idx.iter().map(|&i| bottoms[i].as_str()).collect();
            if top == bottom {
                return Some(TileWord(idx.iter().map(|i| i + 1).collect()));
            }
            // Odometer increment, last position fastest.
            let mut p = len;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < k {
                    break;
                }
                idx[p] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    None
}

/// `M M† / tr(M M†)` for a random Gaussian-integer matrix `M`: exactly PSD
/// with unit trace by construction.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> ExactDensityMatrix {
    loop {
        let m = ExactMatrix::from_fn(dim, dim, |_, _| {
            GaussianRational::from_ratios((rng.gen_range(-3..=3), 1), (rng.gen_range(-3..=3), 1))
        });
        let g = &m * &chanmem::exact::dagger(&m);
        let tr = g.trace();
        if tr.is_zero() {
            continue;
        }
        let scaled = g.scale(&tr.inv().unwrap());
        return ExactDensityMatrix::new(scaled).unwrap();
    }
}

/// A full-rank 4x4 state with distinct diagonal entries, not fixed by any
/// of the compiled generators of small instances.
pub fn generic_seed() -> ExactDensityMatrix {
    let rows = [[10, 1, 2, 3], [1, 8, 1, 2], [2, 1, 6, 1], [3, 2, 1, 7]];
    let m = ExactMatrix::from_fn(4, 4, |r, c| GaussianRational::real(ratio(rows[r][c], 31)));
    ExactDensityMatrix::new(m).unwrap()
}

/// Plain breadth-first oracle: the first scalar word of minimal length,
/// trying application sequences in lexicographic order. Returns the word in
/// composition order.
pub fn plain_bfs_scalar(gens: &[ChannelElement], max_depth: usize) -> Option<Vec<String>> {
    let n = gens.len();
    for len in 1..=max_depth {
        let mut idx = vec![0usize; len];
        loop {
            let mut u = ExactMatrix::identity(gens[0].dim());
            for &g in &idx {
                u = &gens[g].unitary * &u;
            }
            let first = u.get(0, 0).clone();
            if !first.is_zero() && u == ExactMatrix::scalar(u.rows(), first) {
                return Some(idx.iter().rev().map(|&g| gens[g].word[0].to_string()).collect());
            }
            let mut p = len;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    None
}
