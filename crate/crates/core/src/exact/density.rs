use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{is_psd, Digest, ExactError, ExactMatrix, GaussianRational, Rational};

/// A density matrix with exact entries: Hermitian, unit trace, PSD.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactDensityMatrix {
    mat: ExactMatrix,
}

impl ExactDensityMatrix {
    /// Validates all three invariants exactly.
    pub fn new(mat: ExactMatrix) -> Result<Self, ExactError> {
        if !mat.is_square() {
            return Err(ExactError::Shape("density matrix must be square".into()));
        }
        if !mat.is_hermitian() {
            return Err(ExactError::Domain("density matrix is not Hermitian".into()));
        }
        if !mat.trace().is_one() {
            return Err(ExactError::Domain(format!("density matrix has trace {}", mat.trace())));
        }
        if !is_psd(&mat)? {
            return Err(ExactError::Domain("density matrix is not positive semidefinite".into()));
        }
        Ok(ExactDensityMatrix { mat })
    }

    /// For outputs of certified channels, whose validity is guaranteed.
    pub(crate) fn new_unchecked(mat: ExactMatrix) -> Self {
        debug_assert!(mat.is_square());
        ExactDensityMatrix { mat }
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut d = vec![GaussianRational::zero(); dim];
        d[k] = GaussianRational::one();
        ExactDensityMatrix::new_unchecked(ExactMatrix::diag(d))
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        ExactDensityMatrix::new_unchecked(
            ExactMatrix::identity(dim).scale_real(&Rational::new(1.into(), (dim as i64).into())),
        )
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ExactMatrix {
        self.mat
    }

    pub fn digest(&self) -> Digest {
        self.mat.digest()
    }
}

impl Serialize for ExactDensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.mat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactDensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ExactDensityMatrix::new(ExactMatrix::deserialize(d)?).map_err(D::Error::custom)
    }
}
