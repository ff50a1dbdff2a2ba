//! Hermitian eigendecomposition and functions of Hermitian matrices.
//!
//! Backed by nalgebra's self-adjoint eigensolver behind the crate's own
//! matrix type; eigenvalues are returned ascending with matching columns.

use crate::matrix::{cr, CMatrix};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Input-validation tolerance for Hermiticity (max abs deviation).
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecompose a Hermitian matrix. Values ascend; `vectors` holds the
/// corresponding eigenvectors as columns and is unitary.
pub fn eig_hermitian(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    eig_hermitian_tol(m, HERMITICITY_TOL)
}

pub fn eig_hermitian_tol(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition needs a square matrix".into()));
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NonHermitian { deviation });
    }
    let n = m.rows();
    // symmetrise to scrub roundoff before handing to the solver
    let h = m.add(&m.dagger()).scale(cr(0.5));
    let na = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    let eig = na.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, eig.eigenvectors[(row, k)]);
        }
    }
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.0[0])
}

/// Apply a scalar function to a Hermitian matrix through its spectrum:
/// f(m) = V diag(f(λ)) V†.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> Result<CMatrix> {
    let (values, vectors) = eig_hermitian(m)?;
    let n = m.rows();
    let mut diag = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        diag.set(i, i, f(v));
    }
    Ok(vectors.mul(&diag).mul(&vectors.dagger()))
}

/// exp(−i·h·t) for Hermitian h.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    hermitian_function(h, |lambda| (Complex64::new(0.0, -lambda * t)).exp())
}

/// Sum of |negative eigenvalues|, the standard negativity witness.
pub fn negativity(m: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?
        .0
        .iter()
        .filter(|&&v| v < 0.0)
        .map(|v| -v)
        .sum())
}
