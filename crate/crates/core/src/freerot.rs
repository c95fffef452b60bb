//! The free pair `A = e^{iθ n·σ}`, `B = e^{iθ m·σ}` in SU(2), the word
//! homomorphism γ: {0,1}* → ⟨A, B⟩, and a bounded exhaustive freeness scan.
//!
//! Entries stay inside ℚ(i) only when both cos θ and sin θ are rational, so
//! the rotation angle is given as a Pythagorean pair. Freeness is never
//! assumed beyond the length a scan has actually covered.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::{
    int, is_scalar, mat_mul, ratio, rational_text, rational_text_vec, ExactMatrix, GaussianRational,
    Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeRotError {
    #[error("freeness condition violated: cos θ = {0} lies in {{0, ±1, ±1/2}}")]
    Freeness(String),
    #[error("axis error: {0}")]
    Axis(String),
    #[error("exactness error: cos² θ + sin² θ = {0}, expected 1")]
    Exactness(String),
    #[error("invalid binary word `{0}`")]
    Word(String),
}

/// Rotation angle (as an exact cos/sin pair) and the two rotation axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationParams {
    #[serde(with = "rational_text")]
    pub cos: Rational,
    #[serde(with = "rational_text")]
    pub sin: Rational,
    #[serde(with = "rational_text_vec")]
    pub axis_a: Vec<Rational>,
    #[serde(with = "rational_text_vec")]
    pub axis_b: Vec<Rational>,
}

impl Default for RotationParams {
    /// cos θ = 3/5, sin θ = 4/5, n = ẑ, m = x̂.
    fn default() -> Self {
        RotationParams {
            cos: ratio(3, 5),
            sin: ratio(4, 5),
            axis_a: vec![int(0), int(0), int(1)],
            axis_b: vec![int(1), int(0), int(0)],
        }
    }
}

impl RotationParams {
    pub fn with_angle(cos: Rational, sin: Rational) -> Self {
        RotationParams {
            cos,
            sin,
            ..RotationParams::default()
        }
    }

    pub fn cos_num(&self) -> String {
        self.cos.numer().to_string()
    }

    pub fn cos_den(&self) -> String {
        self.cos.denom().to_string()
    }

    /// Checks only what keeps `A` and `B` exact SU(2) matrices: the
    /// Pythagorean identity and unit axes.
    pub fn validate_exactness(&self) -> Result<(), FreeRotError> {
        let pyth = &self.cos * &self.cos + &self.sin * &self.sin;
        if !pyth.is_one() {
            return Err(FreeRotError::Exactness(pyth.to_string()));
        }
        for (name, axis) in [("n", &self.axis_a), ("m", &self.axis_b)] {
            if axis.len() != 3 {
                return Err(FreeRotError::Axis(format!("axis {name} must have 3 components")));
            }
            let norm = dot(axis, axis);
            if !norm.is_one() {
                return Err(FreeRotError::Axis(format!("axis {name} has squared norm {norm}, expected 1")));
            }
        }
        Ok(())
    }

    /// Full check, including the conditions under which ⟨A, B⟩ is free.
    pub fn validate(&self) -> Result<(), FreeRotError> {
        self.validate_exactness()?;
        let c = &self.cos;
        let excluded = [int(0), int(1), int(-1), ratio(1, 2), ratio(-1, 2)];
        if excluded.contains(c) {
            return Err(FreeRotError::Freeness(c.to_string()));
        }
        let d = dot(&self.axis_a, &self.axis_b);
        if !d.is_zero() {
            return Err(FreeRotError::Axis(format!("axes are not orthogonal (n·m = {d})")));
        }
        Ok(())
    }
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

/// `cos θ·I + i sin θ·(axis·σ)`.
pub fn rotation(cos: &Rational, sin: &Rational, axis: &[Rational]) -> ExactMatrix {
    let (x, y, z) = (&axis[0], &axis[1], &axis[2]);
    let g = |re: Rational, im: Rational| GaussianRational::new(re, im);
    ExactMatrix::from_rows(vec![
        vec![g(cos.clone(), sin * z), g(sin * y, sin * x)],
        vec![g(-(sin * y), sin * x), g(cos.clone(), -(sin * z))],
    ])
    .expect("2x2")
}

/// The generators `A` (letter 0) and `B` (letter 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreePair {
    pub a: ExactMatrix,
    pub b: ExactMatrix,
    pub params: RotationParams,
}

impl FreePair {
    pub fn standard() -> Self {
        make_free_pair(RotationParams::default()).expect("default parameters are valid")
    }

    pub fn letter(&self, bit: u8) -> &ExactMatrix {
        if bit == 0 {
            &self.a
        } else {
            &self.b
        }
    }
}

pub fn make_free_pair(params: RotationParams) -> Result<FreePair, FreeRotError> {
    params.validate()?;
    Ok(build_pair(params))
}

/// Builds the pair without the freeness conditions, e.g. to check that the
/// scan really does detect cancellation. Exactness is still enforced.
pub fn make_pair_unverified(params: RotationParams) -> Result<FreePair, FreeRotError> {
    params.validate_exactness()?;
    Ok(build_pair(params))
}

fn build_pair(params: RotationParams) -> FreePair {
    let a = rotation(&params.cos, &params.sin, &params.axis_a);
    let b = rotation(&params.cos, &params.sin, &params.axis_b);
    FreePair { a, b, params }
}

/// A finite word over {0, 1}; may be empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self, FreeRotError> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(FreeRotError::Word(format!("bit {b}")));
        }
        Ok(BinaryWord(bits))
    }

    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &BinaryWord) -> BinaryWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BinaryWord(v)
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.0.push(bit);
    }
}

impl FromStr for BinaryWord {
    type Err = FreeRotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(FreeRotError::Word(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BinaryWord)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// γ(w): 0 ↦ A, 1 ↦ B, concatenation ↦ product, ε ↦ I₂.
pub fn gamma(w: &BinaryWord, pair: &FreePair) -> ExactMatrix {
    w.bits().iter().fold(ExactMatrix::identity(2), |acc, &bit| {
        mat_mul(&acc, pair.letter(bit)).expect("2x2")
    })
}

/// `m^i`; `i = 0` gives the identity.
pub fn power(m: &ExactMatrix, i: usize) -> ExactMatrix {
    assert!(m.is_square(), "power of a non-square matrix");
    let mut result = ExactMatrix::identity(m.rows());
    let mut base = m.clone();
    let mut e = i;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub word_a: BinaryWord,
    pub word_b: BinaryWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    pub scanned_max_len: usize,
    pub word_count: usize,
    pub collisions: Vec<Collision>,
    pub scalar_words: Vec<BinaryWord>,
    pub truncated: bool,
}

impl CollisionReport {
    /// No collision and no scalar word within the scanned range.
    pub fn is_clean(&self) -> bool {
        self.collisions.is_empty() && self.scalar_words.is_empty()
    }
}

/// Evaluates γ on every nonempty word of length `≤ max_len` (shortest first,
/// then lexicographic) and reports coinciding pairs and scalar images.
///
/// At most `word_budget` words are evaluated; hitting the cap sets
/// `truncated` and `scanned_max_len` is the last length fully covered.
pub fn freeness_scan(pair: &FreePair, max_len: usize, word_budget: Option<usize>) -> CollisionReport {
    assert!(max_len >= 1, "max_len must be at least 1");
    let budget = word_budget.unwrap_or(usize::MAX);
    let mut report = CollisionReport {
        scanned_max_len: 0,
        word_count: 0,
        collisions: Vec::new(),
        scalar_words: Vec::new(),
        truncated: false,
    };
    // First word seen for each distinct matrix.
    let mut seen: HashMap<crate::exact::Digest, Vec<(BinaryWord, ExactMatrix)>> = HashMap::new();
    let mut layer = vec![(BinaryWord::empty(), ExactMatrix::identity(2))];

    for len in 1..=max_len {
        let next: Vec<(BinaryWord, ExactMatrix)> = layer
            .par_iter()
            .flat_map_iter(|(w, m)| {
                [0u8, 1].into_iter().map(move |bit| {
                    let mut word = w.clone();
                    word.push(bit);
                    (word, mat_mul(m, pair.letter(bit)).expect("2x2"))
                })
            })
            .collect();
        let digests: Vec<_> = next.par_iter().map(|(_, m)| m.digest()).collect();

        for ((word, m), d) in next.iter().zip(digests) {
            if report.word_count == budget {
                report.truncated = true;
                return report;
            }
            report.word_count += 1;
            if is_scalar(m).is_some() {
                report.scalar_words.push(word.clone());
            }
            let bucket = seen.entry(d).or_default();
            match bucket.iter().find(|(_, other)| other == m) {
                Some((first, _)) => report.collisions.push(Collision {
                    word_a: first.clone(),
                    word_b: word.clone(),
                }),
                None => bucket.push((word.clone(), m.clone())),
            }
        }
        report.scanned_max_len = len;
        layer = next;
    }
    report
}
