//! Decoherence functionals over projective history families.
//!
//! A family is an initial state, a unitary evolving into each time step and
//! a complete orthogonal projector set measured at each step. The
//! decoherence functional D([α],[α']) = Tr[Pⁿ…P¹ ρ P¹'…Pⁿ'] is evaluated
//! with Heisenberg-picture projectors built from accumulated unitaries. Its
//! diagonal is the history probability table; vanishing (real parts of)
//! off-diagonals is the consistency condition.

use crate::matrix::{cr, CMatrix};
use crate::pauli::PauliString;
use crate::pdm;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One time step: the unitary evolving into it and the complete, mutually
/// exclusive projector set measured at it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoryStep {
    pub unitary: CMatrix,
    pub projectors: Vec<CMatrix>,
}

/// Initial state plus ordered steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoryFamily {
    pub rho0: CMatrix,
    pub steps: Vec<HistoryStep>,
}

impl HistoryFamily {
    /// Checks per step: Σ_α P_α = 𝟙 and P_α P_β = δ_αβ P_β within 1e-9,
    /// unitaries unitary within 1e-9, and a well-formed initial state.
    pub fn new(rho0: CMatrix, steps: Vec<HistoryStep>) -> Result<Self> {
        pdm::validate_state(&rho0)?;
        let dim = rho0.rows();
        for (k, step) in steps.iter().enumerate() {
            let dev = step.unitary.unitarity_deviation();
            if step.unitary.rows() != dim || dev > 1e-9 {
                return Err(Error::NonUnitary { deviation: dev });
            }
            let mut sum = CMatrix::zeros(dim, dim);
            for p in &step.projectors {
                if p.rows() != dim || !p.is_square() {
                    return Err(Error::DimensionMismatch(format!(
                        "projector at step {k} has wrong shape"
                    )));
                }
                sum = sum.add(p);
            }
            if sum.max_abs_diff(&CMatrix::identity(dim)) > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "projectors at step {k} do not resolve the identity"
                )));
            }
            for (i, p) in step.projectors.iter().enumerate() {
                for (j, q) in step.projectors.iter().enumerate() {
                    let prod = p.mul(q);
                    let target = if i == j {
                        p.clone()
                    } else {
                        CMatrix::zeros(dim, dim)
                    };
                    if prod.max_abs_diff(&target) > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "projectors {i},{j} at step {k} are not orthogonal idempotents"
                        )));
                    }
                }
            }
        }
        Ok(Self { rho0, steps })
    }

    /// Family for ±1 Pauli-string events with `unitaries[k]` evolving
    /// between events k and k+1. Outcome index 0 is +1, index 1 is −1.
    pub fn from_pauli_events(
        rho0: CMatrix,
        unitaries: &[CMatrix],
        observables: &[PauliString],
    ) -> Result<Self> {
        if observables.is_empty() || unitaries.len() + 1 != observables.len() {
            return Err(Error::DimensionMismatch(
                "need n observables and n−1 unitaries".into(),
            ));
        }
        let dim = rho0.rows();
        let mut steps = Vec::with_capacity(observables.len());
        for (k, obs) in observables.iter().enumerate() {
            let unitary = if k == 0 {
                CMatrix::identity(dim)
            } else {
                unitaries[k - 1].clone()
            };
            steps.push(HistoryStep {
                unitary,
                projectors: vec![obs.sign_projector(1), obs.sign_projector(-1)],
            });
        }
        Self::new(rho0, steps)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    /// Outcome count per step.
    pub fn branch_shape(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.projectors.len()).collect()
    }

    /// Step-k projectors conjugated by the product of unitaries up to and
    /// including step k.
    fn heisenberg_projectors(&self) -> Vec<Vec<CMatrix>> {
        let dim = self.rho0.rows();
        let mut acc = CMatrix::identity(dim);
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            acc = step.unitary.mul(&acc);
            let acc_dag = acc.dagger();
            out.push(
                step.projectors
                    .iter()
                    .map(|p| acc_dag.mul(p).mul(&acc))
                    .collect(),
            );
        }
        out
    }
}

/// Every index list over the given shape, row-major.
pub fn index_lists(shape: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = shape.iter().product();
    (0..total)
        .map(|mut k| {
            let mut idx = vec![0usize; shape.len()];
            for (slot, &extent) in shape.iter().enumerate().rev() {
                idx[slot] = k % extent;
                k /= extent;
            }
            idx
        })
        .collect()
}

/// D([α],[α']) = Tr[Pⁿ_{αₙ} … P¹_{α₁} ρ P¹_{α'₁} … Pⁿ_{α'ₙ}] with
/// Heisenberg-picture projectors.
pub fn decoherence_functional(
    family: &HistoryFamily,
    alpha: &[usize],
    alpha_p: &[usize],
) -> Result<Complex64> {
    let n = family.num_steps();
    if alpha.len() != n || alpha_p.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "index lists must have length {n}"
        )));
    }
    for (k, step) in family.steps.iter().enumerate() {
        if alpha[k] >= step.projectors.len() || alpha_p[k] >= step.projectors.len() {
            return Err(Error::IndexOutOfRange(format!("step {k}")));
        }
    }
    let heisenberg = family.heisenberg_projectors();
    let mut chain = family.rho0.clone();
    for k in 0..n {
        chain = heisenberg[k][alpha[k]].mul(&chain);
    }
    for k in 0..n {
        chain = chain.mul(&heisenberg[k][alpha_p[k]]);
    }
    Ok(chain.trace())
}

/// Diagonal of the decoherence functional: one probability per history.
pub fn history_probabilities(family: &HistoryFamily) -> Result<Vec<(Vec<usize>, f64)>> {
    let mut out = Vec::new();
    for idx in index_lists(&family.branch_shape()) {
        let d = decoherence_functional(family, &idx, &idx)?;
        out.push((idx, d.re));
    }
    Ok(out)
}

/// Consistency: off-diagonal decoherence entries vanish within `tol`, in
/// real part (weak) or in modulus (strong).
pub fn is_consistent(family: &HistoryFamily, strong: bool, tol: f64) -> Result<bool> {
    let lists = index_lists(&family.branch_shape());
    for a in &lists {
        for b in &lists {
            if a == b {
                continue;
            }
            let d = decoherence_functional(family, a, b)?;
            let magnitude = if strong { d.norm() } else { d.re.abs() };
            if magnitude > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Temporal correlation from history diagonals:
/// ⟨{σ_{i₁},…,σ_{iₙ}}⟩ = Σ_α α₁⋯αₙ D([α],[α]).
pub fn correlation_from_histories(
    rho0: &CMatrix,
    unitaries: &[CMatrix],
    observables: &[PauliString],
) -> Result<f64> {
    let family = HistoryFamily::from_pauli_events(rho0.clone(), unitaries, observables)?;
    let mut acc = 0.0;
    for idx in index_lists(&family.branch_shape()) {
        let sign: i32 = idx.iter().map(|&o| if o == 0 { 1 } else { -1 }).product();
        let d = decoherence_functional(&family, &idx, &idx)?;
        acc += sign as f64 * d.re;
    }
    Ok(acc)
}

/// Coarse-grain one step by summing projectors over partition blocks. The
/// partition must cover the step's outcome indices exactly once.
pub fn coarse_grain(
    family: &HistoryFamily,
    step: usize,
    partition: &[Vec<usize>],
) -> Result<HistoryFamily> {
    if step >= family.num_steps() {
        return Err(Error::IndexOutOfRange(format!("step {step}")));
    }
    let fine = &family.steps[step].projectors;
    let mut seen = vec![false; fine.len()];
    for block in partition {
        for &i in block {
            if i >= fine.len() {
                return Err(Error::InvalidPartition(format!("index {i} out of range")));
            }
            if seen[i] {
                return Err(Error::InvalidPartition(format!("index {i} repeated")));
            }
            seen[i] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::InvalidPartition(
            "partition does not cover all outcomes".into(),
        ));
    }
    let dim = family.rho0.rows();
    let coarse: Vec<CMatrix> = partition
        .iter()
        .map(|block| {
            block
                .iter()
                .fold(CMatrix::zeros(dim, dim), |acc, &i| acc.add(&fine[i]))
        })
        .collect();
    let mut steps = family.steps.clone();
    steps[step] = HistoryStep {
        unitary: steps[step].unitary.clone(),
        projectors: coarse,
    };
    HistoryFamily::new(family.rho0.clone(), steps)
}

/// Matrix of decoherence entries on the product outcome-label basis:
/// entry ([α],[α']) = D([α],[α']). Hermitian with unit trace.
pub fn decoherence_matrix(family: &HistoryFamily) -> Result<CMatrix> {
    let lists = index_lists(&family.branch_shape());
    let dim = lists.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (r, a) in lists.iter().enumerate() {
        for (c, b) in lists.iter().enumerate() {
            m.set(r, c, decoherence_functional(family, a, b)?);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli;
    use crate::random;

    fn ket0_density() -> CMatrix {
        CMatrix::projector_onto(&CMatrix::basis_ket(2, 0))
    }

    fn z_step(unitary: CMatrix) -> HistoryStep {
        HistoryStep {
            unitary,
            projectors: vec![pauli::projector(3, 1), pauli::projector(3, -1)],
        }
    }

    fn random_family(rng: &mut random::SeededRng, qubits: usize, steps: usize) -> HistoryFamily {
        let dim = 1 << qubits;
        let rho = random::random_density(dim, rng);
        let steps = (0..steps)
            .map(|k| {
                let u = if k == 0 {
                    CMatrix::identity(dim)
                } else {
                    random::random_unitary(dim, rng)
                };
                // complete rank-1 projector family from random unitary columns
                let v = random::random_unitary(dim, rng);
                let projectors = (0..dim)
                    .map(|col| {
                        let mut ket = CMatrix::zeros(dim, 1);
                        for row in 0..dim {
                            ket.set(row, 0, v.get(row, col));
                        }
                        CMatrix::projector_onto(&ket)
                    })
                    .collect();
                HistoryStep {
                    unitary: u,
                    projectors,
                }
            })
            .collect();
        HistoryFamily::new(rho, steps).unwrap()
    }

    #[test]
    fn eigenstate_single_step() {
        let f = HistoryFamily::new(ket0_density(), vec![z_step(CMatrix::identity(2))]).unwrap();
        let d00 = decoherence_functional(&f, &[0], &[0]).unwrap();
        let d11 = decoherence_functional(&f, &[1], &[1]).unwrap();
        let d01 = decoherence_functional(&f, &[0], &[1]).unwrap();
        assert!((d00.re - 1.0).abs() < 1e-14 && d00.im.abs() < 1e-14);
        assert!(d11.norm() < 1e-14);
        assert!(d01.norm() < 1e-14);
    }

    #[test]
    fn x_projectors_off_diagonal() {
        // D(+,−) = Tr[P⁺ ρ P⁻] by direct 2×2 multiplication.
        let f = HistoryFamily::new(
            ket0_density(),
            vec![HistoryStep {
                unitary: CMatrix::identity(2),
                projectors: vec![pauli::projector(1, 1), pauli::projector(1, -1)],
            }],
        )
        .unwrap();
        let d = decoherence_functional(&f, &[0], &[1]).unwrap();
        let oracle = pauli::projector(1, 1)
            .mul(&ket0_density())
            .mul(&pauli::projector(1, -1))
            .trace();
        assert!((d - oracle).norm() < 1e-14);
        // the trace closes the cycle P⁻P⁺ = 0: single-step off-diagonals vanish
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn functional_sums_to_one() {
        let mut rng = random::seeded(211);
        for _ in 0..5 {
            let f = random_family(&mut rng, 1, 2);
            let lists = index_lists(&f.branch_shape());
            let mut total = Complex64::new(0.0, 0.0);
            for a in &lists {
                for b in &lists {
                    total += decoherence_functional(&f, a, b).unwrap();
                }
            }
            assert!((total.re - 1.0).abs() < 1e-9 && total.im.abs() < 1e-9);
        }
    }

    #[test]
    fn hermiticity_in_arguments() {
        let mut rng = random::seeded(223);
        let f = random_family(&mut rng, 1, 3);
        let lists = index_lists(&f.branch_shape());
        for a in &lists {
            for b in &lists {
                let d_ab = decoherence_functional(&f, a, b).unwrap();
                let d_ba = decoherence_functional(&f, b, a).unwrap();
                assert!((d_ab - d_ba.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_are_nonnegative() {
        let mut rng = random::seeded(227);
        let f = random_family(&mut rng, 2, 2);
        let probs = history_probabilities(&f).unwrap();
        let total: f64 = probs.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(probs.iter().all(|&(_, p)| p >= -1e-10));
    }

    #[test]
    fn z_then_z_through_hadamard() {
        // From |0⟩: certain +1 at step 1, then the Hadamard splits evenly.
        let f = HistoryFamily::new(
            ket0_density(),
            vec![z_step(CMatrix::identity(2)), z_step(pauli::hadamard())],
        )
        .unwrap();
        let probs = history_probabilities(&f).unwrap();
        for (idx, p) in probs {
            let expected = if idx[0] == 0 { 0.5 } else { 0.0 };
            assert!((p - expected).abs() < 1e-12, "{idx:?}");
        }
    }

    #[test]
    fn mixed_state_uniform_probabilities() {
        let f = HistoryFamily::new(
            CMatrix::identity(2).scale(cr(0.5)),
            vec![z_step(CMatrix::identity(2))],
        )
        .unwrap();
        let probs = history_probabilities(&f).unwrap();
        assert!(probs.iter().all(|&(_, p)| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn single_step_families_are_consistent() {
        let mut rng = random::seeded(229);
        let f = random_family(&mut rng, 1, 1);
        assert!(is_consistent(&f, true, 1e-8).unwrap());
        assert!(is_consistent(&f, false, 1e-8).unwrap());
    }

    #[test]
    fn z_then_z_on_plus_state_is_consistent() {
        let plus = CMatrix::projector_onto(&CMatrix::ket(&[
            cr(1.0 / 2.0_f64.sqrt()),
            cr(1.0 / 2.0_f64.sqrt()),
        ]));
        let f = HistoryFamily::new(
            plus,
            vec![z_step(CMatrix::identity(2)), z_step(CMatrix::identity(2))],
        )
        .unwrap();
        assert!(is_consistent(&f, false, 1e-10).unwrap());
    }

    #[test]
    fn x_then_z_is_strongly_inconsistent() {
        let f = HistoryFamily::new(
            ket0_density(),
            vec![
                HistoryStep {
                    unitary: CMatrix::identity(2),
                    projectors: vec![pauli::projector(1, 1), pauli::projector(1, -1)],
                },
                z_step(CMatrix::identity(2)),
            ],
        )
        .unwrap();
        assert!(!is_consistent(&f, true, 1e-8).unwrap());
    }

    #[test]
    fn correlation_matches_sequential_pdm_route() {
        let mut rng = random::seeded(233);
        for _ in 0..20 {
            let rho = random::random_density(2, &mut rng);
            let u = random::random_unitary(2, &mut rng);
            for i in 0..4u8 {
                for j in 0..4u8 {
                    let obs = vec![
                        PauliString::new(vec![i]).unwrap(),
                        PauliString::new(vec![j]).unwrap(),
                    ];
                    let via_hist = correlation_from_histories(&rho, &[u.clone()], &obs).unwrap();
                    let via_pdm =
                        pdm::sequential_pauli_correlation(&rho, &[u.clone()], &obs).unwrap();
                    assert!((via_hist - via_pdm).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn loop_correlation_matches_tripartite() {
        // U forward then U† backward reproduces the three-event loop values.
        let mut rng = random::seeded(239);
        for _ in 0..5 {
            let rho = random::random_density(2, &mut rng);
            let u = random::random_unitary(2, &mut rng);
            for (i, j, k) in [(3, 3, 3), (1, 2, 3), (0, 1, 1), (2, 2, 0)] {
                let obs = vec![
                    PauliString::new(vec![i]).unwrap(),
                    PauliString::new(vec![j]).unwrap(),
                    PauliString::new(vec![k]).unwrap(),
                ];
                let via_hist =
                    correlation_from_histories(&rho, &[u.clone(), u.dagger()], &obs).unwrap();
                let via_loop = pdm::tripartite_loop_correlation(&rho, &u, i, j, k).unwrap();
                assert!((via_hist - via_loop).abs() < 1e-11, "({i},{j},{k})");
            }
        }
    }

    #[test]
    fn all_identity_observables_normalise() {
        let mut rng = random::seeded(241);
        let rho = random::random_density(2, &mut rng);
        let u = random::random_unitary(2, &mut rng);
        let obs = vec![
            PauliString::identity(1),
            PauliString::identity(1),
            PauliString::identity(1),
        ];
        let c = correlation_from_histories(&rho, &[u.clone(), u.dagger()], &obs).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_partition_is_identity() {
        let mut rng = random::seeded(251);
        let f = random_family(&mut rng, 1, 2);
        let g = coarse_grain(&f, 0, &[vec![0], vec![1]]).unwrap();
        for (a, b) in [(vec![0, 0], vec![1, 0]), (vec![0, 1], vec![0, 1])] {
            let df = decoherence_functional(&f, &a, &b).unwrap();
            let dg = decoherence_functional(&g, &a, &b).unwrap();
            assert!((df - dg).norm() < 1e-12);
        }
    }

    #[test]
    fn merge_all_gives_trivial_step() {
        let mut rng = random::seeded(257);
        let f = random_family(&mut rng, 1, 2);
        let g = coarse_grain(&f, 0, &[vec![0, 1]]).unwrap();
        assert_eq!(g.steps[0].projectors.len(), 1);
        assert!(g.steps[0].projectors[0].approx_eq(&CMatrix::identity(2), 1e-10));
        let total: f64 = history_probabilities(&g)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coarse_functional_is_blockwise_sum() {
        let mut rng = random::seeded(263);
        let f = random_family(&mut rng, 1, 2);
        let g = coarse_grain(&f, 0, &[vec![0, 1]]).unwrap();
        for a1 in 0..2 {
            for b1 in 0..2 {
                let coarse = decoherence_functional(&g, &[0, a1], &[0, b1]).unwrap();
                let mut fine_sum = Complex64::new(0.0, 0.0);
                for a0 in 0..2 {
                    for b0 in 0..2 {
                        fine_sum += decoherence_functional(&f, &[a0, a1], &[b0, b1]).unwrap();
                    }
                }
                assert!((coarse - fine_sum).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coarse_graining_preserves_total_probability() {
        let mut rng = random::seeded(281);
        let f = random_family(&mut rng, 2, 2);
        let g = coarse_grain(&f, 1, &[vec![0, 3], vec![1, 2]]).unwrap();
        let fine: f64 = history_probabilities(&f)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        let coarse: f64 = history_probabilities(&g)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        assert!((fine - coarse).abs() < 1e-12);
    }

    #[test]
    fn invalid_partition_rejected() {
        let mut rng = random::seeded(269);
        let f = random_family(&mut rng, 1, 1);
        assert!(matches!(
            coarse_grain(&f, 0, &[vec![0]]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            coarse_grain(&f, 0, &[vec![0, 0], vec![1]]),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn decoherence_matrix_single_step_z() {
        let f = HistoryFamily::new(ket0_density(), vec![z_step(CMatrix::identity(2))]).unwrap();
        let m = decoherence_matrix(&f).unwrap();
        assert!(m.approx_eq(&ket0_density(), 1e-14));
    }

    #[test]
    fn decoherence_matrix_hermitian_unit_trace() {
        let mut rng = random::seeded(271);
        let f = random_family(&mut rng, 1, 2);
        let m = decoherence_matrix(&f).unwrap();
        assert!(m.is_hermitian(1e-12));
        assert!((m.trace().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strongly_consistent_family_gives_diagonal_matrix() {
        // Z then Z under identity evolution decoheres fully.
        let mut rng = random::seeded(277);
        let rho = random::random_density(2, &mut rng);
        let f = HistoryFamily::new(
            rho,
            vec![z_step(CMatrix::identity(2)), z_step(CMatrix::identity(2))],
        )
        .unwrap();
        assert!(is_consistent(&f, true, 1e-10).unwrap());
        let m = decoherence_matrix(&f).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(m.get(r, c).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn bad_index_is_an_error() {
        let f = HistoryFamily::new(ket0_density(), vec![z_step(CMatrix::identity(2))]).unwrap();
        assert!(matches!(
            decoherence_functional(&f, &[2], &[0]),
            Err(Error::IndexOutOfRange(_))
        ));
    }
}
