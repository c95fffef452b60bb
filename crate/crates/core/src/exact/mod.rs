//! Exact arithmetic kernel: rationals, Gaussian rationals, dense matrices
//! over ℚ(i), and the exact predicates (unitary, Hermitian, PSD, scalar)
//! everything else is built on. No floating point is used anywhere here.

mod density;
mod gaussian;
mod matrix;
mod psd;

use thiserror::Error;

pub use density::ExactDensityMatrix;
pub use gaussian::{
    format_rational, int, parse_rational, ratio, rational_text, rational_text_vec, GaussianRational,
    Rational,
};
pub use matrix::{dagger, digest, is_scalar, mat_mul, phase_normalize, Digest, ExactMatrix};
pub use psd::{char_poly, is_psd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}
