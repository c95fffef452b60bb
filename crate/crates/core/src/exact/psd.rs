use num_traits::{Signed, Zero};

use super::{mat_mul, ExactError, ExactMatrix, GaussianRational, Rational};

/// Coefficients `c[0..=n]` of `det(xI − M) = Σ c[k]·x^k`, computed by the
/// Faddeev–LeVerrier recurrence.
pub fn char_poly(m: &ExactMatrix) -> Result<Vec<GaussianRational>, ExactError> {
    if !m.is_square() {
        return Err(ExactError::Shape("characteristic polynomial of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut coeffs = vec![GaussianRational::zero(); n + 1];
    coeffs[n] = GaussianRational::one();
    // acc holds M_k; the first iterate is the identity.
    let mut acc = ExactMatrix::identity(n);
    for k in 1..=n {
        let am = mat_mul(m, &acc)?;
        let c = am.trace().scale(&Rational::new((-1).into(), (k as i64).into()));
        coeffs[n - k] = c.clone();
        if k < n {
            acc = &am + &ExactMatrix::scalar(n, c);
        }
    }
    Ok(coeffs)
}

/// Exact positive-semidefiniteness test for Hermitian matrices.
///
/// All eigenvalues of a Hermitian matrix are real, so `M ⪰ 0` iff the
/// coefficient of `x^k` in `det(xI − M)` has sign `(−1)^(n−k)` or is zero.
pub fn is_psd(m: &ExactMatrix) -> Result<bool, ExactError> {
    if !m.is_hermitian() {
        return Err(ExactError::Domain("PSD test requires a Hermitian matrix".into()));
    }
    let coeffs = char_poly(m)?;
    let n = m.rows();
    Ok(coeffs.iter().enumerate().all(|(k, c)| {
        debug_assert!(c.is_real(), "Hermitian char poly must be real");
        let c = &c.re;
        if c.is_zero() {
            return true;
        }
        if (n - k).is_multiple_of(2) {
            c.is_positive()
        } else {
            c.is_negative()
        }
    }))
}
