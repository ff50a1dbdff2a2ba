//! Dense complex matrices, the carrier type for states, channels, projectors
//! and process matrices.
//!
//! Storage is row-major `Vec<Complex64>` with explicit row/column counts.
//! The JSON schema is `{"rows": n, "cols": m, "entries": [[re, im], ...]}`,
//! row-major; every module serialises matrices through it.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense complex matrix with explicit dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand for a real complex scalar.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shorthand for a general complex scalar.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl CMatrix {
    /// Build from a row-major entry vector. Rejects non-finite entries and
    /// length mismatches.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C_ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    /// Build from nested real rows (imaginary parts zero).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().map(|&x| cr(x)));
        }
        Self::new(r, c, entries)
    }

    /// Column vector from amplitudes.
    pub fn ket(amplitudes: &[Complex64]) -> Self {
        Self {
            rows: amplitudes.len(),
            cols: 1,
            entries: amplitudes.to_vec(),
        }
    }

    /// Computational basis ket |k⟩ of the given dimension.
    pub fn basis_ket(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim, 1);
        v.set(k, 0, C_ONE);
        v
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &CMatrix, b: &CMatrix) -> Self {
        assert_eq!(a.cols, 1, "outer product expects column vectors");
        assert_eq!(b.cols, 1, "outer product expects column vectors");
        let mut m = Self::zeros(a.rows, b.rows);
        for i in 0..a.rows {
            for j in 0..b.rows {
                m.set(i, j, a.get(i, 0) * b.get(j, 0).conj());
            }
        }
        m
    }

    /// Rank-one projector |v⟩⟨v| (input need not be normalised).
    pub fn projector_onto(v: &CMatrix) -> Self {
        let n = v.norm2();
        let mut p = Self::outer(v, v);
        if n > 0.0 {
            p = p.scale(cr(1.0 / (n * n)));
        }
        p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * z).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Tr[self · other], evaluated without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C_ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Euclidean norm of a vector (column matrix).
    pub fn norm2(&self) -> f64 {
        self.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tol
    }

    /// Largest |entry| deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// Largest |entry| deviation of `self† self` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&CMatrix::identity(self.cols))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_deviation() <= tol
    }

    /// Kronecker product: entry ((i1,i2),(j1,j2)) = a(i1,j1)·b(i2,j2).
    pub fn kron(&self, b: &CMatrix) -> CMatrix {
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == C_ZERO {
                    continue;
                }
                for i2 in 0..b.rows {
                    for j2 in 0..b.cols {
                        out.set(i1 * b.rows + i2, j1 * b.cols + j2, a * b.get(i2, j2));
                    }
                }
            }
        }
        out
    }
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    assert!(!factors.is_empty());
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kron(f);
    }
    acc
}

/// Exchange operator S = Σ_ij |ij⟩⟨ji| on two d-dimensional factors.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s.set(d * i + j, d * j + i, C_ONE);
        }
    }
    s
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        let entries = raw
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        CMatrix::new(raw.rows, raw.cols, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli;

    #[test]
    fn kron_identity_case() {
        let i2 = CMatrix::identity(2);
        assert!(i2.kron(&i2).approx_eq(&CMatrix::identity(4), 0.0));
    }

    #[test]
    fn kron_xx_antidiagonal() {
        // Entrywise oracle: C((i1,i2),(j1,j2)) = X(i1,j1)·X(i2,j2).
        let x = pauli::sigma(1);
        let m = x.kron(&x);
        let mut oracle = CMatrix::zeros(4, 4);
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        oracle.set(2 * i1 + i2, 2 * j1 + j2, x.get(i1, j1) * x.get(i2, j2));
                    }
                }
            }
        }
        assert!(m.approx_eq(&oracle, 0.0));
        for i in 0..4 {
            assert_eq!(m.get(i, 3 - i), C_ONE);
        }
    }

    #[test]
    fn kron_dimensions() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(4, 5);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (8, 15));
    }

    #[test]
    fn kron_associativity_exact() {
        // Exact equality needs exactly representable entries; dyadic
        // rationals and Pauli matrices qualify.
        let a = pauli::sigma(2);
        let b = CMatrix::from_real_rows(&[&[0.5, -0.25], &[1.0, 0.125]]).unwrap();
        let c = pauli::hadamard();
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        assert_eq!(left, right);
    }

    #[test]
    fn kron_associativity_random_matrices() {
        let mut rng = crate::random::seeded(11);
        let a = crate::random::random_unitary(2, &mut rng);
        let b = crate::random::random_unitary(3, &mut rng);
        let c = crate::random::random_unitary(2, &mut rng);
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        assert!(left.max_abs_diff(&right) < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let e = CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(e, Err(Error::NonFinite)));
    }

    #[test]
    fn json_round_trip() {
        let m = pauli::sigma(2); // Y has complex entries
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"rows\":2"));
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert!(m.approx_eq(&back, 0.0));
    }
}
