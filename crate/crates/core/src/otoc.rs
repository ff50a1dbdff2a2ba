//! Out-of-time-order correlators, directly and through a three-event loop.
//!
//! The direct four-point function is ⟨V W(t) V† W†(t)⟩ with W(t) = U†WU.
//! The loop route evaluates Tr[A U†BU A ρ A U†B†U A] for a projector A —
//! a single forward-backward pass instead of two — and agrees with the real
//! part of the direct OTOC whenever ρ = 𝟙/d.

use crate::eig;
use crate::matrix::{cr, CMatrix};
use crate::pdm;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Inputs for a direct OTOC evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OtocSpec {
    pub v: CMatrix,
    pub b: CMatrix,
    pub u: CMatrix,
    pub rho: CMatrix,
}

impl OtocSpec {
    pub fn new(v: CMatrix, b: CMatrix, u: CMatrix, rho: CMatrix) -> Result<Self> {
        let dim = rho.rows();
        for m in [&v, &b, &u] {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::DimensionMismatch(
                    "OTOC operators must share the state's dimension".into(),
                ));
            }
        }
        let dev = u.unitarity_deviation();
        if dev > 1e-9 {
            return Err(Error::NonUnitary { deviation: dev });
        }
        pdm::validate_state(&rho)?;
        Ok(Self { v, b, u, rho })
    }
}

/// Thermal state e^{−βH}/Tr e^{−βH}; β = 0 gives 𝟙/d.
pub fn thermal_state(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    if beta < 0.0 {
        return Err(Error::InvalidParameter("negative inverse temperature".into()));
    }
    let (values, vectors) = eig::eig_hermitian(h)?;
    // shift by the ground energy so large β stays finite
    let ground = values[0];
    let dim = h.rows();
    let mut weights = CMatrix::zeros(dim, dim);
    let mut z = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let w = (-beta * (v - ground)).exp();
        weights.set(i, i, cr(w));
        z += w;
    }
    Ok(vectors
        .mul(&weights)
        .mul(&vectors.dagger())
        .scale(cr(1.0 / z)))
}

/// Operator norm (largest singular value).
fn operator_norm(m: &CMatrix) -> Result<f64> {
    let gram = m.dagger().mul(m);
    let (values, _) = eig::eig_hermitian(&gram)?;
    Ok(values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Direct four-point OTOC Tr[ρ · V · U†BU · V† · U†B†U].
///
/// The operator-norm bound |result| ≤ ‖V‖²‖B‖² is enforced as an internal
/// consistency check.
pub fn otoc_direct(spec: &OtocSpec) -> Result<Complex64> {
    let b_t = spec.u.dagger().mul(&spec.b).mul(&spec.u);
    let b_t_dag = b_t.dagger();
    let value = spec
        .rho
        .mul(&spec.v)
        .mul(&b_t)
        .mul(&spec.v.dagger())
        .mul(&b_t_dag)
        .trace();
    let bound = operator_norm(&spec.v)?.powi(2) * operator_norm(&spec.b)?.powi(2);
    if value.norm() > bound + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "OTOC magnitude {} exceeds the operator-norm bound {}",
            value.norm(),
            bound
        )));
    }
    Ok(value)
}

/// Three-event loop form Tr[A U†BU A ρ A U†B†U A] for a Hermitian
/// projector A. For ρ = 𝟙/d this equals Re of the direct OTOC with V = A.
pub fn otoc_via_pdm(a_proj: &CMatrix, b: &CMatrix, u: &CMatrix, rho: &CMatrix) -> Result<f64> {
    let herm_dev = a_proj.hermiticity_deviation();
    if herm_dev > 1e-9 {
        return Err(Error::NotAProjector { deviation: herm_dev });
    }
    let idem_dev = a_proj.mul(a_proj).max_abs_diff(a_proj);
    if idem_dev > 1e-9 {
        return Err(Error::NotAProjector { deviation: idem_dev });
    }
    let dev = u.unitarity_deviation();
    if dev > 1e-9 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let b_t = u.dagger().mul(b).mul(u);
    let value = a_proj
        .mul(&b_t)
        .mul(a_proj)
        .mul(rho)
        .mul(a_proj)
        .mul(&b_t.dagger())
        .mul(a_proj)
        .trace();
    if value.im.abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "loop OTOC should be real, found imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}
