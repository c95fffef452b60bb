//! Compiles a PCP instance into the generating set `𝓕 = {𝟙, H_i, G_i}` of
//! rotated depolarising channels, and semi-decides whether the target
//! `ψ(ρ) = λρ + (1 − λ)·I/4` lies in the generated semigroup.
//!
//! Each family `H^λ_i` is instantiated at one rational damping; composites
//! track their damping as an exact product. Because λ may be chosen freely
//! in (0, 1), membership of ψ is decided on the unitary part alone.

mod channel;
mod compile;
mod diff;
mod membership;

use thiserror::Error;

pub use channel::{
    apply, certify_choi, choi, choi_of, compose, make_target, partial_trace_output, ChannelElement,
    CptpViolation, GenLabel,
};
pub use compile::{compile, g_unitary, h_unitary, BundleGenerator, GeneratorBundle, GeneratorSet};
pub use diff::{theory_diff, DiffOutcome, DiffStatus, DiffWitness, GeneratorMatch, Theory, TheorySide};
pub use membership::{
    extract_tile_word, generic_scalar_search, membership_search, structured_search, word_damping,
    MembershipOutcome, SearchMode,
};

use crate::exact::{ratio, ExactError, Rational};
use crate::freerot::FreeRotError;
use crate::pcp::PcpError;

/// λ = 1/2.
pub fn default_damping() -> Rational {
    ratio(1, 2)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("generator {0} is not exactly unitary")]
    NotUnitary(String),
    #[error("invalid generator label `{0}`")]
    Label(String),
    #[error("inconsistent generator bundle: {0}")]
    Bundle(String),
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    FreeRot(#[from] FreeRotError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
