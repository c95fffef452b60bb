use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use super::{ExactError, GaussianRational, Rational};

/// Dense row-major matrix over ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Self, ExactError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(ExactError::Shape(format!(
                "{} entries do not form a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Shape("ragged rows".into()));
        }
        ExactMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix::from_fn(rows, cols, |_, _| GaussianRational::zero())
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix::scalar(n, GaussianRational::one())
    }

    pub fn scalar(n: usize, c: GaussianRational) -> Self {
        ExactMatrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { GaussianRational::zero() })
    }

    pub fn diag(values: Vec<GaussianRational>) -> Self {
        let n = values.len();
        ExactMatrix::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { GaussianRational::zero() })
    }

    /// Block-diagonal matrix with `blocks` along the diagonal.
    pub fn block_diag(blocks: &[&ExactMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = ExactMatrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.entries[(r0 + i) * m + c0 + j] = b.get(i, j).clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Extracts the `size × size` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> ExactMatrix {
        ExactMatrix::from_fn(size, size, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map(|e| e * c)
    }

    pub fn scale_real(&self, r: &Rational) -> Self {
        self.map(|e| e.scale(r))
    }

    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let a = self.get(i / other.rows, j / other.cols);
            if a.is_zero() {
                return GaussianRational::zero();
            }
            a * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == dagger(self)
    }

    /// `U†U = I` exactly.
    pub fn is_unitary(&self) -> bool {
        self.is_square() && (&dagger(self) * self) == ExactMatrix::identity(self.rows)
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Result<GaussianRational, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m: Vec<Vec<GaussianRational>> = (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut det = GaussianRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Ok(GaussianRational::zero());
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            det = &det * &m[col][col];
            let inv = m[col][col].inv().expect("nonzero pivot");
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let d = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &d;
                }
            }
        }
        Ok(det)
    }

    pub fn digest(&self) -> Digest {
        digest(self)
    }

    /// Nested row arrays of canonical entry strings.
    pub fn to_text_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    pub fn from_text_rows(rows: &[Vec<String>]) -> Result<Self, ExactError> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        ExactMatrix::from_rows(parsed)
    }
}

/// Exact product `a · b`.
pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
    if a.cols != b.rows {
        return Err(ExactError::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (n, m) = (a.rows, b.cols);
    let mut out = vec![GaussianRational::zero(); n * m];
    for i in 0..n {
        for k in 0..a.cols {
            let x = a.get(i, k);
            // Most operands are block-diagonal; skipping zeros halves the work.
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                let y = b.get(k, j);
                if y.is_zero() {
                    continue;
                }
                out[i * m + j] += &(x * y);
            }
        }
    }
    Ok(ExactMatrix { rows: n, cols: m, entries: out })
}

/// Conjugate transpose.
pub fn dagger(a: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(a.cols, a.rows, |i, j| a.get(j, i).conj())
}

/// Returns `Some(c)` iff `a = c·I`.
pub fn is_scalar(a: &ExactMatrix) -> Option<GaussianRational> {
    if !a.is_square() {
        return None;
    }
    let c = a.get(0, 0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let e = a.get(i, j);
            let ok = if i == j { e == c } else { e.is_zero() };
            if !ok {
                return None;
            }
        }
    }
    Some(c.clone())
}

/// Scales `a` so that its first nonzero entry (row-major) becomes 1.
///
/// Two unitaries are equal up to a global phase iff their normalisations
/// coincide.
pub fn phase_normalize(a: &ExactMatrix) -> ExactMatrix {
    match a.entries.iter().find(|e| !e.is_zero()) {
        Some(first) if !first.is_one() => a.scale(&first.inv().expect("nonzero")),
        _ => a.clone(),
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        mat_mul(self, rhs).expect("matrix shape mismatch")
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(x, y)| x - y).collect(),
        }
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_text_rows()).finish()
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_text_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        ExactMatrix::from_text_rows(&rows).map_err(D::Error::custom)
    }
}

/// SHA-256 of a matrix's canonical byte encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// First `n` hex characters.
    pub fn short(&self, n: usize) -> String {
        let mut h = self.hex();
        h.truncate(n);
        h
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.short(16))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

pub fn digest(a: &ExactMatrix) -> Digest {
    let mut bytes = Vec::with_capacity(16 + a.entries.len() * 24);
    bytes.extend_from_slice(&(a.rows as u64).to_le_bytes());
    bytes.extend_from_slice(&(a.cols as u64).to_le_bytes());
    for e in &a.entries {
        e.write_bytes(&mut bytes);
    }
    Digest(Sha256::digest(&bytes).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn gr(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::from_ratios(re, im)
    }

    #[test]
    fn identity_is_neutral() {
        let m = ExactMatrix::from_rows(vec![
            vec![gr((1, 2), (0, 1)), gr((3, 1), (-1, 7))],
            vec![gr((0, 1), (2, 1)), gr((-5, 3), (1, 1))],
        ])
        .unwrap();
        assert_eq!(&ExactMatrix::identity(2) * &m, m);
        assert_eq!(&m * &ExactMatrix::identity(2), m);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = ExactMatrix::zeros(2, 3);
        assert!(matches!(mat_mul(&a, &a), Err(ExactError::Shape(_))));
        assert!(ExactMatrix::new(2, 2, vec![GaussianRational::zero(); 3]).is_err());
    }

    #[test]
    fn dagger_of_diagonal_phase() {
        let d = ExactMatrix::diag(vec![gr((3, 5), (4, 5)), gr((3, 5), (-4, 5))]);
        let expect = ExactMatrix::diag(vec![gr((3, 5), (-4, 5)), gr((3, 5), (4, 5))]);
        assert_eq!(dagger(&d), expect);
        assert_eq!(dagger(&ExactMatrix::identity(3)), ExactMatrix::identity(3));
        assert!(d.is_unitary());
    }

    #[test]
    fn scalar_predicate() {
        assert_eq!(is_scalar(&ExactMatrix::identity(4)), Some(GaussianRational::one()));
        let minus = ExactMatrix::scalar(4, GaussianRational::from(-1));
        assert_eq!(is_scalar(&minus), Some(GaussianRational::from(-1)));
        let i2 = ExactMatrix::identity(2);
        let m2 = ExactMatrix::scalar(2, GaussianRational::from(-1));
        assert_eq!(is_scalar(&ExactMatrix::block_diag(&[&i2, &m2])), None);
        assert_eq!(is_scalar(&ExactMatrix::zeros(2, 3)), None);
    }

    #[test]
    fn determinant_and_kron() {
        let m = ExactMatrix::from_rows(vec![
            vec![int(2).into(), int(1).into()],
            vec![int(7).into(), int(4).into()],
        ])
        .unwrap();
        assert_eq!(m.det().unwrap(), GaussianRational::one());
        let k = m.kron(&ExactMatrix::identity(2));
        assert_eq!(k.rows(), 4);
        assert_eq!(k.det().unwrap(), GaussianRational::one());
        assert_eq!(k.trace(), GaussianRational::real(int(12)));
        let swap = ExactMatrix::from_rows(vec![
            vec![GaussianRational::zero(), GaussianRational::one()],
            vec![GaussianRational::one(), GaussianRational::zero()],
        ])
        .unwrap();
        assert_eq!(swap.det().unwrap(), GaussianRational::from(-1));
    }

    #[test]
    fn phase_normalization_identifies_global_phases() {
        let u = ExactMatrix::diag(vec![gr((3, 5), (4, 5)), gr((3, 5), (-4, 5))]);
        let v = u.scale(&GaussianRational::i());
        assert_ne!(u, v);
        assert_eq!(phase_normalize(&u), phase_normalize(&v));
        assert!(phase_normalize(&u).get(0, 0).is_one());
    }

    #[test]
    fn text_rows_round_trip() {
        let m = ExactMatrix::from_rows(vec![
            vec![gr((3, 5), (4, 5)), GaussianRational::zero()],
            vec![GaussianRational::real(ratio(-1, 3)), gr((0, 1), (-4, 5))],
        ])
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"[["3/5+4/5*i","0+0*i"],["-1/3+0*i","0-4/5*i"]]"#);
        let back: ExactMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn digest_is_deterministic_and_content_sensitive() {
        let a = ExactMatrix::identity(2);
        assert_eq!(digest(&a), digest(&ExactMatrix::identity(2)));
        assert_ne!(digest(&a), digest(&ExactMatrix::identity(3)));
        assert_ne!(digest(&a), digest(&a.scale(&GaussianRational::from(-1))));
        // 1/2 and 2/4 are the same canonical rational.
        let h = ExactMatrix::scalar(2, GaussianRational::real(ratio(2, 4)));
        assert_eq!(digest(&h), digest(&ExactMatrix::scalar(2, GaussianRational::real(ratio(1, 2)))));
    }
}
