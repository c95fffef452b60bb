use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ReductionError;
use crate::exact::{
    dagger, is_psd, mat_mul, rational_text, ExactDensityMatrix, ExactMatrix, GaussianRational, Rational,
};

/// Name of a generator inside a channel word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenLabel {
    /// `H_i`, built from the top word of tile `i` (1-based).
    H(usize),
    /// `G_i`, built from the bottom word of tile `i` (1-based).
    G(usize),
    /// The target ψ, when a theory is augmented with it.
    Target,
}

impl GenLabel {
    pub fn h_index(&self) -> Option<usize> {
        match self {
            GenLabel::H(i) => Some(*i),
            _ => None,
        }
    }

    pub fn g_index(&self) -> Option<usize> {
        match self {
            GenLabel::G(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for GenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenLabel::H(i) => write!(f, "H{i}"),
            GenLabel::G(i) => write!(f, "G{i}"),
            GenLabel::Target => f.write_str("psi"),
        }
    }
}

impl FromStr for GenLabel {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ReductionError::Label(s.to_string());
        if s == "psi" {
            return Ok(GenLabel::Target);
        }
        let (kind, idx) = s.split_at(1.min(s.len()));
        let i: usize = idx.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match kind {
            "H" => Ok(GenLabel::H(i)),
            "G" => Ok(GenLabel::G(i)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GenLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GenLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The channel `ρ ↦ λ·UρU† + (1 − λ)·I/d`, together with the generator word
/// it was composed from (leftmost generator applied last).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChannelElement {
    pub unitary: ExactMatrix,
    #[serde(with = "rational_text")]
    pub damping: Rational,
    pub word: Vec<GenLabel>,
}

impl ChannelElement {
    /// The identity channel 𝟙.
    pub fn identity(dim: usize) -> Self {
        ChannelElement {
            unitary: ExactMatrix::identity(dim),
            damping: Rational::one(),
            word: Vec::new(),
        }
    }

    pub fn generator(label: GenLabel, unitary: ExactMatrix, damping: Rational) -> Self {
        ChannelElement { unitary, damping, word: vec![label] }
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty() && self.damping.is_one()
    }

    /// Exponent of each generator label in the damping monomial.
    pub fn damping_monomial(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for l in &self.word {
            *m.entry(l.to_string()).or_insert(0) += 1;
        }
        m
    }
}

/// `x ∘ y`: apply `y`, then `x`. Unitaries multiply, dampings multiply,
/// words concatenate.
pub fn compose(x: &ChannelElement, y: &ChannelElement) -> ChannelElement {
    let mut word = x.word.clone();
    word.extend_from_slice(&y.word);
    ChannelElement {
        unitary: mat_mul(&x.unitary, &y.unitary).expect("channel dimensions agree"),
        damping: &x.damping * &y.damping,
        word,
    }
}

pub fn apply(c: &ChannelElement, rho: &ExactDensityMatrix) -> Result<ExactDensityMatrix, ReductionError> {
    if rho.dim() != c.dim() {
        return Err(ReductionError::Shape(format!(
            "channel acts on dimension {}, state has dimension {}",
            c.dim(),
            rho.dim()
        )));
    }
    Ok(ExactDensityMatrix::new_unchecked(depolarised_conjugation(
        &c.unitary,
        &c.damping,
        rho.matrix(),
    )))
}

/// `λ·U X U† + (1 − λ)·tr(X)·I/d` for an arbitrary operator `X`.
fn depolarised_conjugation(u: &ExactMatrix, damping: &Rational, x: &ExactMatrix) -> ExactMatrix {
    let d = u.rows();
    let conj = &(u * x) * &dagger(u);
    let mixed = Rational::one() - damping;
    let scaled = conj.scale_real(damping);
    if mixed.is_zero() {
        return scaled;
    }
    let noise = x.trace().scale(&(mixed / Rational::from_integer((d as i64).into())));
    &scaled + &ExactMatrix::scalar(d, noise)
}

/// ψ = (I, λ, ε): `ρ ↦ λρ + (1 − λ)·I/4`.
pub fn make_target(damping: Rational) -> Result<ChannelElement, ReductionError> {
    check_damping(&damping)?;
    Ok(ChannelElement {
        unitary: ExactMatrix::identity(4),
        damping,
        word: Vec::new(),
    })
}

pub(crate) fn check_damping(damping: &Rational) -> Result<(), ReductionError> {
    if *damping <= Rational::zero() || *damping >= Rational::one() {
        return Err(ReductionError::Domain(format!("damping {damping} outside (0, 1)")));
    }
    Ok(())
}

/// `E_ij` in dimension `d`.
fn matrix_unit(d: usize, i: usize, j: usize) -> ExactMatrix {
    ExactMatrix::from_fn(d, d, |r, c| {
        if r == i && c == j {
            GaussianRational::one()
        } else {
            GaussianRational::zero()
        }
    })
}

/// Choi matrix `Σ_ij E_ij ⊗ Φ(E_ij)` of an arbitrary linear map on `d × d`
/// operators. The first tensor factor is the input.
pub fn choi_of(d: usize, map: impl Fn(&ExactMatrix) -> ExactMatrix) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let block = matrix_unit(d, i, j).kron(&map(&matrix_unit(d, i, j)));
            out = &out + &block;
        }
    }
    out
}

pub fn choi(c: &ChannelElement) -> ExactMatrix {
    choi_of(c.dim(), |x| depolarised_conjugation(&c.unitary, &c.damping, x))
}

/// Traces out the second (output) factor of a `d² × d²` operator.
pub fn partial_trace_output(m: &ExactMatrix, d: usize) -> ExactMatrix {
    assert_eq!(m.rows(), d * d, "operator is not on a d x d bipartite space");
    ExactMatrix::from_fn(d, d, |i, j| {
        let mut acc = GaussianRational::zero();
        for k in 0..d {
            acc += m.get(i * d + k, j * d + k);
        }
        acc
    })
}

/// Why a Choi matrix fails to certify a CPTP map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CptpViolation {
    NotHermitian,
    NotPositive,
    NotTracePreserving { partial_trace: ExactMatrix },
}

/// Exact CPTP certificate: Choi matrix PSD and its output partial trace `I`.
pub fn certify_choi(choi: &ExactMatrix, d: usize) -> Result<(), CptpViolation> {
    if !choi.is_hermitian() {
        return Err(CptpViolation::NotHermitian);
    }
    if !is_psd(choi).expect("hermitian") {
        return Err(CptpViolation::NotPositive);
    }
    let pt = partial_trace_output(choi, d);
    if pt != ExactMatrix::identity(d) {
        return Err(CptpViolation::NotTracePreserving { partial_trace: pt });
    }
    Ok(())
}
