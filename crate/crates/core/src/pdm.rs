//! Pseudo-density matrices over measurement events in time.
//!
//! An n-event PDM is R = (1/2ⁿ) Σ_s ⟨σ_s⟩ σ_s, assembled from expectation
//! values of products of ±1 Pauli outcomes. Between events the state updates
//! by the Lüders rule (ρ ↦ PρP, unnormalised branch weights), so every
//! correlation here is an honest sequential-measurement average. Timelike
//! PDMs are Hermitian and unit trace but need not be positive; ½·SWAP with
//! minimum eigenvalue −½ is the canonical witness.

use crate::eig;
use crate::matrix::{cr, swap_operator, CMatrix};
use crate::pauli::{self, PauliString};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Zero-probability cutoff distinguishing impossible postselection from roundoff.
pub const POSTSELECTION_CUTOFF: f64 = 1e-12;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Channel {
    kraus: Vec<CMatrix>,
}

impl Channel {
    /// Validates Σ K†K = 𝟙 within 1e-9.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        let d_in = kraus[0].cols();
        let d_out = kraus[0].rows();
        if kraus.iter().any(|k| k.cols() != d_in || k.rows() != d_out) {
            return Err(Error::InvalidChannel("inconsistent Kraus shapes".into()));
        }
        let mut acc = CMatrix::zeros(d_in, d_in);
        for k in &kraus {
            acc = acc.add(&k.dagger().mul(k));
        }
        let dev = acc.max_abs_diff(&CMatrix::identity(d_in));
        if dev > 1e-9 {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from 𝟙 by {dev:.3e}"
            )));
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(dim)],
        }
    }

    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let dev = u.unitarity_deviation();
        if !u.is_square() || dev > 1e-9 {
            return Err(Error::NonUnitary { deviation: dev });
        }
        Ok(Self { kraus: vec![u.clone()] })
    }

    /// Fully depolarising channel on dimension d (output 𝟙/d for any input).
    pub fn depolarizing(dim: usize) -> Self {
        let scale = cr(1.0 / (dim as f64));
        let mut kraus = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = CMatrix::zeros(dim, dim);
                k.set(i, j, cr(1.0));
                kraus.push(k.scale(scale.sqrt()));
            }
        }
        Self { kraus }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out = out.add(&k.mul(rho).mul(&k.dagger()));
        }
        out
    }
}

/// Outcome-indexed sets of Kraus operators: measurements, POVMs and
/// measure-and-reprepare operations alike.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instrument {
    outcomes: BTreeMap<i32, Vec<CMatrix>>,
}

impl Instrument {
    /// Validates Σ over outcomes and Kraus indices of K†K = 𝟙 within 1e-9.
    pub fn new(outcomes: BTreeMap<i32, Vec<CMatrix>>) -> Result<Self> {
        let first = outcomes
            .values()
            .flatten()
            .next()
            .ok_or_else(|| Error::InvalidInstrument("no Kraus operators".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        let mut acc = CMatrix::zeros(d_in, d_in);
        for ks in outcomes.values() {
            for k in ks {
                if k.rows() != d_out || k.cols() != d_in {
                    return Err(Error::InvalidInstrument("inconsistent Kraus shapes".into()));
                }
                acc = acc.add(&k.dagger().mul(k));
            }
        }
        let dev = acc.max_abs_diff(&CMatrix::identity(d_in));
        if dev > 1e-9 {
            return Err(Error::InvalidInstrument(format!(
                "completeness fails by {dev:.3e}"
            )));
        }
        Ok(Self { outcomes })
    }

    /// Projective ±1 instrument for a Pauli string observable.
    pub fn pauli_measurement(p: &PauliString) -> Self {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(-1, vec![p.sign_projector(-1)]);
        outcomes.insert(1, vec![p.sign_projector(1)]);
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &BTreeMap<i32, Vec<CMatrix>> {
        &self.outcomes
    }

    pub fn dim_in(&self) -> usize {
        self.outcomes.values().flatten().next().unwrap().cols()
    }

    pub fn dim_out(&self) -> usize {
        self.outcomes.values().flatten().next().unwrap().rows()
    }

    /// Unnormalised post-measurement state for one outcome.
    pub fn apply_outcome(&self, rho: &CMatrix, outcome: i32) -> Result<CMatrix> {
        let ks = self
            .outcomes
            .get(&outcome)
            .ok_or_else(|| Error::IndexOutOfRange(format!("outcome {outcome}")))?;
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in ks {
            out = out.add(&k.mul(rho).mul(&k.dagger()));
        }
        Ok(out)
    }
}

/// Pseudo-density matrix over n two-outcome events.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pdm {
    #[serde(flatten)]
    matrix: CMatrix,
    events: usize,
}

impl Pdm {
    /// Validates Hermiticity and unit trace within 1e-10 and the 2ⁿ dimension.
    pub fn new(matrix: CMatrix, events: usize) -> Result<Self> {
        if matrix.rows() != 1 << events || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{} events need a {}x{} matrix",
                events,
                1 << events,
                1 << events
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NonHermitian { deviation: dev });
        }
        let t = matrix.trace();
        if (t - cr(1.0)).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("PDM trace {t} ≠ 1")));
        }
        Ok(Self { matrix, events })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn events(&self) -> usize {
        self.events
    }

    /// Σ|negative eigenvalues|: zero on ordinary states, positive on
    /// genuinely timelike correlations.
    pub fn negativity(&self) -> Result<f64> {
        eig::negativity(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        eig::min_eigenvalue(&self.matrix)
    }

    /// Extract every Pauli correlation ⟨σ_s⟩ = Tr[R σ_s].
    pub fn pauli_coefficients(&self) -> BTreeMap<Vec<u8>, f64> {
        let mut out = BTreeMap::new();
        for s in PauliString::enumerate(self.events) {
            let v = self.matrix.trace_product(&s.matrix());
            out.insert(s.letters().to_vec(), v.re);
        }
        out
    }
}

/// Pre and post selected state pair |ψ⟩, ⟨φ|.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoTimeState {
    pub pre: CMatrix,
    pub post: CMatrix,
}

impl TwoTimeState {
    pub fn new(pre: CMatrix, post: CMatrix) -> Result<Self> {
        if pre.cols() != 1 || post.cols() != 1 || pre.rows() != post.rows() {
            return Err(Error::DimensionMismatch(
                "two-time state needs kets of equal dimension".into(),
            ));
        }
        for v in [&pre, &post] {
            if (v.norm2() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidState("ket is not unit norm".into()));
            }
        }
        Ok(Self { pre, post })
    }
}

/// Validate a density matrix: Hermitian, unit trace, PSD within floor.
pub fn validate_state(rho: &CMatrix) -> Result<()> {
    let dev = rho.hermiticity_deviation();
    if !rho.is_square() || dev > 1e-9 {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {dev:.3e})"
        )));
    }
    if (rho.trace() - cr(1.0)).norm() > 1e-9 {
        return Err(Error::InvalidState("trace ≠ 1".into()));
    }
    if eig::min_eigenvalue(rho)? < -1e-9 {
        return Err(Error::InvalidState("negative eigenvalue".into()));
    }
    Ok(())
}

/// ⟨{σ_i, σ_j}⟩ for a qubit ρ measured at two times bridged by a channel,
/// computed operationally: Σ_{α,β} αβ Tr[P_j^β ℰ(P_i^α ρ P_i^α)].
pub fn temporal_correlation_pair(rho: &CMatrix, ch: &Channel, i: u8, j: u8) -> Result<f64> {
    validate_state(rho)?;
    if rho.rows() != 2 || ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DimensionMismatch(
            "temporal_correlation_pair is a single-qubit operation".into(),
        ));
    }
    let mut acc = 0.0;
    for alpha in [1i32, -1] {
        let p_i = pauli::projector(i, alpha);
        let collapsed = p_i.mul(rho).mul(&p_i);
        let evolved = ch.apply(&collapsed);
        for beta in [1i32, -1] {
            let p_j = pauli::projector(j, beta);
            let w = p_j.mul(&evolved).trace().re;
            acc += (alpha * beta) as f64 * w;
        }
    }
    Ok(acc)
}

/// Sequential ±1 correlation for Pauli-string events separated by unitaries:
/// Σ_α α₁⋯α_n Tr[P_nᵃ U_{n-1} ⋯ U_1 P_1ᵃ ρ P_1ᵃ U_1† ⋯ U_{n-1}† P_nᵃ].
///
/// `unitaries[k]` evolves between events k and k+1, so it holds one entry
/// fewer than `observables`.
pub fn sequential_pauli_correlation(
    rho: &CMatrix,
    unitaries: &[CMatrix],
    observables: &[PauliString],
) -> Result<f64> {
    if observables.is_empty() || unitaries.len() + 1 != observables.len() {
        return Err(Error::DimensionMismatch(
            "need n observables and n−1 unitaries".into(),
        ));
    }
    validate_state(rho)?;
    for u in unitaries {
        let dev = u.unitarity_deviation();
        if dev > 1e-9 {
            return Err(Error::NonUnitary { deviation: dev });
        }
    }
    let mut acc = 0.0;
    // branch over outcome strings; weights are unnormalised Lüders traces
    let n = observables.len();
    let mut stack: Vec<(usize, f64, CMatrix)> = vec![(0, 1.0, rho.clone())];
    while let Some((step, sign, state)) = stack.pop() {
        if step == n {
            acc += sign * state.trace().re;
            continue;
        }
        let state = if step == 0 {
            state
        } else {
            let u = &unitaries[step - 1];
            u.mul(&state).mul(&u.dagger())
        };
        for outcome in [1i32, -1] {
            let p = observables[step].sign_projector(outcome);
            let branch = p.mul(&state).mul(&p);
            stack.push((step + 1, sign * outcome as f64, branch));
        }
    }
    Ok(acc)
}

/// Assemble R = (1/2ⁿ) Σ corr(s)·σ_s from a correlation table.
///
/// The identity string must be present with value 1 and every correlation
/// must lie in [−1, 1]; strings missing from the map contribute zero.
pub fn pdm_from_correlations(n: usize, corr: &BTreeMap<Vec<u8>, f64>) -> Result<Pdm> {
    match corr.get(&vec![0u8; n]) {
        Some(&v) if (v - 1.0).abs() <= 1e-12 => {}
        Some(&v) => {
            return Err(Error::InvalidParameter(format!(
                "identity correlation must be 1, got {v}"
            )))
        }
        None => {
            return Err(Error::InvalidParameter(
                "missing identity-string correlation".into(),
            ))
        }
    }
    let dim = 1usize << n;
    let mut acc = CMatrix::zeros(dim, dim);
    for (letters, &value) in corr {
        if letters.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "string {letters:?} has wrong length for {n} events"
            )));
        }
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "correlation {value} outside [−1, 1]"
            )));
        }
        let s = PauliString::new(letters.clone())?;
        acc = acc.add(&s.matrix().scale(cr(value)));
    }
    Pdm::new(acc.scale(cr(1.0 / dim as f64)), n)
}

/// Choi-style channel image E_AB = (ℐ ⊗ ℰ)(S) with S the swap.
pub fn channel_swap_image(ch: &Channel) -> CMatrix {
    let d = ch.dim_in();
    let mut e = CMatrix::zeros(d * ch.dim_out(), d * ch.dim_out());
    for i in 0..d {
        for j in 0..d {
            let mut basis = CMatrix::zeros(d, d);
            basis.set(j, i, cr(1.0));
            let block = ch.apply(&basis); // ℰ(|j⟩⟨i|)
            let mut lift = CMatrix::zeros(d, d);
            lift.set(i, j, cr(1.0));
            e = e.add(&lift.kron(&block));
        }
    }
    e
}

/// Bipartite channel PDM R = ½(ρ_A⊗𝟙_B · E_AB + E_AB · ρ_A⊗𝟙_B).
///
/// For the identity channel on the maximally mixed state this is ½·SWAP, and
/// for every channel Tr_B R = ρ.
pub fn pdm_bipartite_channel(rho: &CMatrix, ch: &Channel) -> Result<Pdm> {
    validate_state(rho)?;
    if rho.rows() != 2 || ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DimensionMismatch(
            "bipartite channel PDM is a single-qubit construction".into(),
        ));
    }
    let e = channel_swap_image(ch);
    let left = rho.kron(&CMatrix::identity(2));
    let r = left.mul(&e).add(&e.mul(&left)).scale(cr(0.5));
    Pdm::new(r, 2)
}

/// ⟨σ_i, σ_j, σ_k⟩ for a qubit measured thrice along U evolution and its
/// reversal: Σ αβγ Tr[P_kᶜ U† P_jᵇ U P_iᵃ ρ P_iᵃ U† P_jᵇ U P_kᶜ].
pub fn tripartite_loop_correlation(
    rho: &CMatrix,
    u: &CMatrix,
    i: u8,
    j: u8,
    k: u8,
) -> Result<f64> {
    validate_state(rho)?;
    let dev = u.unitarity_deviation();
    if dev > 1e-9 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    if rho.rows() != 2 || u.rows() != 2 {
        return Err(Error::DimensionMismatch("single-qubit loop only".into()));
    }
    let ud = u.dagger();
    let mut acc = 0.0;
    for alpha in [1i32, -1] {
        let p_i = pauli::projector(i, alpha);
        let after_first = u.mul(&p_i.mul(rho).mul(&p_i)).mul(&ud);
        for beta in [1i32, -1] {
            let p_j = pauli::projector(j, beta);
            let after_second = ud.mul(&p_j.mul(&after_first).mul(&p_j)).mul(u);
            for gamma in [1i32, -1] {
                let p_k = pauli::projector(k, gamma);
                let w = p_k.mul(&after_second).mul(&p_k).trace().re;
                acc += (alpha * beta * gamma) as f64 * w;
            }
        }
    }
    Ok(acc)
}

/// Normalisation p_ij(η) = Σ_{α,β} Tr[η P_j^β ℰ(P_i^α ρ P_i^α) P_j^β].
pub fn postselection_probability(
    rho: &CMatrix,
    ch: &Channel,
    i: u8,
    j: u8,
    eta: &CMatrix,
) -> Result<f64> {
    let mut acc = 0.0;
    for alpha in [1i32, -1] {
        let p_i = pauli::projector(i, alpha);
        let evolved = ch.apply(&p_i.mul(rho).mul(&p_i));
        for beta in [1i32, -1] {
            let p_j = pauli::projector(j, beta);
            acc += eta.mul(&p_j.mul(&evolved).mul(&p_j)).trace().re;
        }
    }
    Ok(acc)
}

/// Postselected two-time correlation
/// ⟨{σ_i, σ_j, η}⟩ = Σ αβ Tr[η P_j^β ℰ(P_i^α ρ P_i^α) P_j^β] / p_ij(η).
pub fn postselected_correlation(
    rho: &CMatrix,
    ch: &Channel,
    i: u8,
    j: u8,
    eta: &CMatrix,
) -> Result<f64> {
    validate_state(rho)?;
    validate_state(eta)?;
    let norm = postselection_probability(rho, ch, i, j, eta)?;
    if norm <= POSTSELECTION_CUTOFF {
        return Err(Error::ImpossiblePostselection);
    }
    let mut acc = 0.0;
    for alpha in [1i32, -1] {
        let p_i = pauli::projector(i, alpha);
        let evolved = ch.apply(&p_i.mul(rho).mul(&p_i));
        for beta in [1i32, -1] {
            let p_j = pauli::projector(j, beta);
            let w = eta.mul(&p_j.mul(&evolved).mul(&p_j)).trace().re;
            acc += (alpha * beta) as f64 * w;
        }
    }
    Ok(acc / norm)
}

/// Three-event postselected PDM R = ¼ Σ_{ij} ⟨{σ_i, σ_j, η}⟩ σ_i ⊗ σ_j ⊗ η.
pub fn pdm_postselected(rho: &CMatrix, ch: &Channel, eta: &CMatrix) -> Result<Pdm> {
    let mut acc = CMatrix::zeros(8, 8);
    for i in 0..4u8 {
        for j in 0..4u8 {
            let c = postselected_correlation(rho, ch, i, j, eta)?;
            let term = pauli::sigma(i).kron(&pauli::sigma(j)).kron(eta);
            acc = acc.add(&term.scale(cr(c)));
        }
    }
    Pdm::new(acc.scale(cr(0.25)), 3)
}

/// Pre/post-selected outcome probability
/// p(a) = Σ_μ |⟨φ|E_a^μ|ψ⟩|² / Σ_{a'} Σ_μ |⟨φ|E_{a'}^μ|ψ⟩|².
pub fn two_time_outcome_prob(tt: &TwoTimeState, instr: &Instrument, a: i32) -> Result<f64> {
    let amp = |ks: &Vec<CMatrix>| -> f64 {
        ks.iter()
            .map(|k| {
                let v: Complex64 = tt.post.dagger().mul(&k.mul(&tt.pre)).get(0, 0);
                v.norm_sqr()
            })
            .sum()
    };
    let numer = instr
        .outcomes()
        .get(&a)
        .map(amp)
        .ok_or_else(|| Error::IndexOutOfRange(format!("outcome {a}")))?;
    let denom: f64 = instr.outcomes().values().map(amp).sum();
    if denom <= POSTSELECTION_CUTOFF {
        return Err(Error::ImpossiblePostselection);
    }
    Ok(numer / denom)
}

/// Two-event correlation with an instrument at the first event and a POVM at
/// the second, bridged by a memory channel: Σ_{a,b} a·b·Tr[E_b 𝒩(Φ_a(τ))].
/// Outcome labels must be ±1 on both ends.
pub fn instrument_channel_correlation(
    tau: &CMatrix,
    first: &Instrument,
    memory: &Channel,
    second: &BTreeMap<i32, CMatrix>,
) -> Result<f64> {
    let mut acc = 0.0;
    for (&a, _) in first.outcomes() {
        if a != 1 && a != -1 {
            return Err(Error::OutcomeLabels(a));
        }
        let branch = memory.apply(&first.apply_outcome(tau, a)?);
        for (&b, effect) in second {
            if b != 1 && b != -1 {
                return Err(Error::OutcomeLabels(b));
            }
            acc += (a * b) as f64 * effect.mul(&branch).trace().re;
        }
    }
    Ok(acc)
}

/// The canonical timelike PDM ½·SWAP on two qubit events.
pub fn half_swap() -> CMatrix {
    swap_operator(2).scale(cr(0.5))
}
