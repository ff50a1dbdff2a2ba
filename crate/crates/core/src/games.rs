//! Non-local and signalling games.
//!
//! CHSH with classical and quantum strategies, quantum-classical non-local
//! games where the referee sends quantum questions, and their timelike
//! version: one player at two instants joined by a quantum memory channel.
//! With a trivial late question the signalling-game probabilities are
//! exactly the two-event PDM instrument correlations.

use crate::matrix::{cr, CMatrix};
use crate::pauli;
use crate::pdm::{Channel, Instrument};
use crate::space::SpaceSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A POVM keyed by outcome label.
pub type Povm = BTreeMap<i32, CMatrix>;

/// Question distribution π(x,y) and payoff l(a,b|x,y); payoff is indexed by
/// outcome position in ascending label order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameSpec {
    /// π indexed [x][y]; non-negative, sums to 1.
    pub pi: Vec<Vec<f64>>,
    /// l indexed [x][y][a][b]; values in [0, 1].
    pub payoff: Vec<Vec<Vec<Vec<f64>>>>,
}

impl GameSpec {
    pub fn new(pi: Vec<Vec<f64>>, payoff: Vec<Vec<Vec<Vec<f64>>>>) -> Result<Self> {
        let total: f64 = pi.iter().flatten().sum();
        if pi.iter().flatten().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "question distribution must be a probability table".into(),
            ));
        }
        if payoff
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .any(|&l| !(0.0..=1.0).contains(&l))
        {
            return Err(Error::InvalidParameter("payoff values must sit in [0,1]".into()));
        }
        Ok(Self { pi, payoff })
    }

    /// The CHSH game: uniform questions, win iff a ⊕ b = x·y.
    pub fn chsh() -> Self {
        let pi = vec![vec![0.25; 2]; 2];
        let mut payoff = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        if (a ^ b) == (x & y) {
                            payoff[x][y][a][b] = 1.0;
                        }
                    }
                }
            }
        }
        Self { pi, payoff }
    }
}

/// Exhaustive maximum of the CHSH winning probability over the sixteen
/// deterministic strategies; equals 3/4 exactly.
pub fn chsh_classical_optimum() -> f64 {
    let mut best = 0.0f64;
    for f in 0..4u8 {
        for g in 0..4u8 {
            let mut wins = 0u32;
            for x in 0..2u8 {
                for y in 0..2u8 {
                    let a = (f >> x) & 1;
                    let b = (g >> y) & 1;
                    if a ^ b == x & y {
                        wins += 1;
                    }
                }
            }
            best = best.max(wins as f64 / 4.0);
        }
    }
    best
}

/// ±1 observable cos θ·Z + sin θ·X.
pub fn rotated_observable(theta: f64) -> CMatrix {
    pauli::sigma(3)
        .scale(cr(theta.cos()))
        .add(&pauli::sigma(1).scale(cr(theta.sin())))
}

/// CHSH winning probability of a two-qubit state with each party measuring
/// cos θ·Z + sin θ·X; angles are (a₀, a₁, b₀, b₁).
pub fn chsh_quantum_value(state: &CMatrix, angles: [f64; 4]) -> Result<f64> {
    crate::pdm::validate_state(state)?;
    if state.rows() != 4 {
        return Err(Error::DimensionMismatch("CHSH needs a two-qubit state".into()));
    }
    let projector = |theta: f64, outcome_bit: usize| -> CMatrix {
        let sign = if outcome_bit == 0 { 1.0 } else { -1.0 };
        CMatrix::identity(2)
            .add(&rotated_observable(theta).scale(cr(sign)))
            .scale(cr(0.5))
    };
    let mut win = 0.0;
    for x in 0..2usize {
        for y in 0..2usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    if a ^ b != x & y {
                        continue;
                    }
                    let joint = projector(angles[x], a).kron(&projector(angles[2 + y], b));
                    win += 0.25 * joint.trace_product(state).re;
                }
            }
        }
    }
    Ok(win)
}

/// The optimal CHSH measurement angles (0, π/2, π/4, −π/4).
pub fn chsh_optimal_angles() -> [f64; 4] {
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;
    [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4]
}

/// |Φ⁺⟩⟨Φ⁺| on two qubits.
pub fn bell_phi_plus() -> CMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    let ket = CMatrix::ket(&[cr(s), cr(0.0), cr(0.0), cr(s)]);
    CMatrix::projector_onto(&ket)
}

/// Quantum-classical non-local game correlation
/// P(a,b|x,y) = Tr[(P^a_{XA} ⊗ Q^b_{YB})(τ^x ⊗ ρ_AB ⊗ ω^y)].
///
/// POVM a acts on X⊗A, POVM b on Y⊗B; the shared state spans A⊗B. Returns
/// the (a,b) table in element order.
pub fn qc_nonlocal_prob(
    tau_x: &CMatrix,
    omega_y: &CMatrix,
    rho_ab: &CMatrix,
    povm_a: &[CMatrix],
    povm_b: &[CMatrix],
) -> Result<Vec<Vec<f64>>> {
    let d_x = tau_x.rows();
    let d_y = omega_y.rows();
    let first_a = povm_a.first().ok_or_else(|| Error::InvalidParameter("empty POVM".into()))?;
    let first_b = povm_b.first().ok_or_else(|| Error::InvalidParameter("empty POVM".into()))?;
    if first_a.rows() % d_x != 0 || first_b.rows() % d_y != 0 {
        return Err(Error::DimensionMismatch("POVM does not cover its question".into()));
    }
    let d_a = first_a.rows() / d_x;
    let d_b = first_b.rows() / d_y;
    if rho_ab.rows() != d_a * d_b {
        return Err(Error::DimensionMismatch(format!(
            "shared state is {}-dimensional, expected {}",
            rho_ab.rows(),
            d_a * d_b
        )));
    }
    for (povm, dim) in [(povm_a, d_x * d_a), (povm_b, d_y * d_b)] {
        let mut sum = CMatrix::zeros(dim, dim);
        for e in povm {
            if e.rows() != dim {
                return Err(Error::DimensionMismatch("ragged POVM".into()));
            }
            sum = sum.add(e);
        }
        if sum.max_abs_diff(&CMatrix::identity(dim)) > 1e-9 {
            return Err(Error::InvalidInstrument("POVM does not resolve identity".into()));
        }
    }
    let spec = SpaceSpec::new(vec![
        ("X".into(), d_x),
        ("A".into(), d_a),
        ("Y".into(), d_y),
        ("B".into(), d_b),
    ])?;
    let state = spec
        .embed(tau_x, &["X"])?
        .mul(&spec.embed(rho_ab, &["A", "B"])?)
        .mul(&spec.embed(omega_y, &["Y"])?);
    let mut table = vec![vec![0.0; povm_b.len()]; povm_a.len()];
    for (a, ea) in povm_a.iter().enumerate() {
        let lifted_a = spec.embed(ea, &["X", "A"])?;
        for (b, eb) in povm_b.iter().enumerate() {
            let lifted_b = spec.embed(eb, &["Y", "B"])?;
            table[a][b] = lifted_a.mul(&lifted_b).trace_product(&state).re;
        }
    }
    Ok(table)
}

/// One player's plan for a signalling game: a hidden-variable mixture of an
/// early instrument, a memory channel, and a late POVM that may depend on
/// the early outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Strategy {
    /// Hidden-variable weights, non-negative, summing to 1.
    pub lambda_dist: Vec<f64>,
    /// Early instrument per λ, mapping the question system X into A.
    pub first: Vec<Instrument>,
    /// Memory channel A → B.
    pub memory: Channel,
    /// Late POVM on B⊗Y per λ, keyed by (early outcome a, late outcome b).
    pub second: Vec<BTreeMap<i32, Povm>>,
}

impl Strategy {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_dist.len() != self.first.len() || self.lambda_dist.len() != self.second.len()
        {
            return Err(Error::DimensionMismatch(
                "strategy pieces disagree on the number of hidden variables".into(),
            ));
        }
        let total: f64 = self.lambda_dist.iter().sum();
        if self.lambda_dist.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "hidden-variable weights must form a distribution".into(),
            ));
        }
        for per_lambda in &self.second {
            for povm in per_lambda.values() {
                let dim = povm
                    .values()
                    .next()
                    .ok_or_else(|| Error::InvalidInstrument("empty POVM".into()))?
                    .rows();
                let mut sum = CMatrix::zeros(dim, dim);
                for e in povm.values() {
                    sum = sum.add(e);
                }
                if sum.max_abs_diff(&CMatrix::identity(dim)) > 1e-9 {
                    return Err(Error::InvalidInstrument(
                        "late POVM does not resolve identity".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Signalling-game correlation
/// p(a,b|x,y) = Σ_λ π(λ) Tr[({(𝒩∘Φ^{a|λ})(τ^x)} ⊗ ω^y) Ψ^{b|a,λ}].
pub fn qcsg_prob(
    strategy: &Strategy,
    tau_x: &CMatrix,
    omega_y: &CMatrix,
) -> Result<BTreeMap<(i32, i32), f64>> {
    strategy.validate()?;
    let d_y = omega_y.rows();
    let mut table: BTreeMap<(i32, i32), f64> = BTreeMap::new();
    for (lambda, &weight) in strategy.lambda_dist.iter().enumerate() {
        let instrument = &strategy.first[lambda];
        for (&a, _) in instrument.outcomes() {
            let through_memory = strategy
                .memory
                .apply(&instrument.apply_outcome(tau_x, a)?);
            let joint = through_memory.kron(omega_y);
            let povm = strategy.second[lambda].get(&a).ok_or_else(|| {
                Error::InvalidInstrument(format!("no late POVM for early outcome {a}"))
            })?;
            for (&b, effect) in povm {
                if effect.rows() != joint.rows() {
                    return Err(Error::DimensionMismatch(format!(
                        "late POVM element is {}x{}, memory⊗question is {}-dimensional (d_y = {d_y})",
                        effect.rows(),
                        effect.cols(),
                        joint.rows()
                    )));
                }
                let p = weight * effect.trace_product(&joint).re;
                *table.entry((a, b)).or_insert(0.0) += p;
            }
        }
    }
    Ok(table)
}

/// Expected payoff Σ_{x,y} π(x,y) Σ_{a,b} l(a,b|x,y) p(a,b|x,y) of a fixed
/// strategy; evaluation only, no optimisation. Outcome labels map to payoff
/// indices in ascending order.
pub fn qcsg_payoff(
    game: &GameSpec,
    strategy: &Strategy,
    taus: &[CMatrix],
    omegas: &[CMatrix],
) -> Result<f64> {
    if game.pi.len() != taus.len() || game.pi.iter().any(|row| row.len() != omegas.len()) {
        return Err(Error::DimensionMismatch(
            "question tables disagree with the distribution shape".into(),
        ));
    }
    let mut value = 0.0;
    for (x, tau) in taus.iter().enumerate() {
        for (y, omega) in omegas.iter().enumerate() {
            let table = qcsg_prob(strategy, tau, omega)?;
            let a_labels: Vec<i32> = {
                let mut l: Vec<i32> = table.keys().map(|&(a, _)| a).collect();
                l.sort_unstable();
                l.dedup();
                l
            };
            let b_labels: Vec<i32> = {
                let mut l: Vec<i32> = table.keys().map(|&(_, b)| b).collect();
                l.sort_unstable();
                l.dedup();
                l
            };
            for (ai, &a) in a_labels.iter().enumerate() {
                for (bi, &b) in b_labels.iter().enumerate() {
                    let l = game.payoff[x][y][ai][bi];
                    value += game.pi[x][y] * l * table.get(&(a, b)).copied().unwrap_or(0.0);
                }
            }
        }
    }
    Ok(value)
}

/// Temporal correlation ⟨{Φ,Ψ}⟩ = Σ_{a,b} a·b·p(a,b|x) of a strategy with a
/// trivial late question. Outcome labels must be ±1.
pub fn qcsg_temporal_correlation(strategy: &Strategy, tau_x: &CMatrix) -> Result<f64> {
    let trivial = CMatrix::identity(1);
    let table = qcsg_prob(strategy, tau_x, &trivial)?;
    let mut acc = 0.0;
    for (&(a, b), &p) in &table {
        if a.abs() != 1 {
            return Err(Error::OutcomeLabels(a));
        }
        if b.abs() != 1 {
            return Err(Error::OutcomeLabels(b));
        }
        acc += (a * b) as f64 * p;
    }
    Ok(acc)
}

/// Embed the CHSH quantum strategy as a signalling game: the early
/// instrument reads the question register, measures half of a fresh Bell
/// pair at the question's angle, and forwards the other half through an
/// identity memory; the late measurement reads its question register the
/// same way. Outcomes are ±1.
pub fn chsh_as_signalling_strategy(angles: [f64; 4]) -> Result<Strategy> {
    let bell = bell_phi_plus();
    let _ = &bell;
    let eigvec = |theta: f64, sign: i32| -> CMatrix {
        let half = theta / 2.0;
        if sign > 0 {
            CMatrix::ket(&[cr(half.cos()), cr(half.sin())])
        } else {
            CMatrix::ket(&[cr(-half.sin()), cr(half.cos())])
        }
    };
    // early Kraus for outcome a and question x: |collapsed(a,x)⟩⟨x|,
    // collapsed = (⟨v_a^x| ⊗ 𝟙)|Φ⁺⟩ = conj(v_a^x)/√2
    let mut outcomes: BTreeMap<i32, Vec<CMatrix>> = BTreeMap::new();
    for a in [1i32, -1] {
        let mut kraus = Vec::new();
        for x in 0..2usize {
            let v = eigvec(angles[x], a);
            let collapsed = v.conj().scale(cr(1.0 / 2.0_f64.sqrt()));
            kraus.push(CMatrix::outer(&collapsed, &CMatrix::basis_ket(2, x)));
        }
        outcomes.insert(a, kraus);
    }
    let first = Instrument::new(outcomes)?;
    // late POVM on B⊗Y: project B at the angle the Y flag selects
    let mut late: Povm = BTreeMap::new();
    for b in [1i32, -1] {
        let mut element = CMatrix::zeros(4, 4);
        for y in 0..2usize {
            let v = eigvec(angles[2 + y], b);
            let flag = CMatrix::projector_onto(&CMatrix::basis_ket(2, y));
            element = element.add(&CMatrix::projector_onto(&v).kron(&flag));
        }
        late.insert(b, element);
    }
    let mut second: BTreeMap<i32, Povm> = BTreeMap::new();
    second.insert(1, late.clone());
    second.insert(-1, late);
    Ok(Strategy {
        lambda_dist: vec![1.0],
        first: vec![first],
        memory: Channel::identity(2),
        second: vec![second],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdm;
    use crate::random;
    use rand::Rng;

    #[test]
    fn classical_optimum_is_three_quarters() {
        assert_eq!(chsh_classical_optimum(), 0.75);
    }

    #[test]
    fn constant_strategy_achieves_the_optimum() {
        // a = b = 0 wins whenever x·y = 0, i.e. on 3 of 4 question pairs.
        let mut wins = 0;
        for x in 0..2u8 {
            for y in 0..2u8 {
                if 0 == x & y {
                    wins += 1;
                }
            }
        }
        assert_eq!(wins, 3);
    }

    #[test]
    fn bell_state_reaches_tsirelson_win_probability() {
        let value = chsh_quantum_value(&bell_phi_plus(), chsh_optimal_angles()).unwrap();
        let expected = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((value - expected).abs() < 1e-9, "{value}");
    }

    #[test]
    fn product_state_stays_classical() {
        let mut rng = random::seeded(307);
        let ket00 = CMatrix::projector_onto(&CMatrix::basis_ket(4, 0));
        for _ in 0..100 {
            let angles = [
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            ];
            let value = chsh_quantum_value(&ket00, angles).unwrap();
            assert!(value <= 0.75 + 1e-9, "{value}");
        }
    }

    #[test]
    fn maximally_mixed_state_is_fair_coin() {
        let mixed = CMatrix::identity(4).scale(cr(0.25));
        let value = chsh_quantum_value(&mixed, chsh_optimal_angles()).unwrap();
        assert!((value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quantum_value_never_exceeds_tsirelson_on_random_angles() {
        let mut rng = random::seeded(311);
        let ceiling = (std::f64::consts::PI / 8.0).cos().powi(2) + 1e-9;
        for _ in 0..100 {
            let angles = [
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            ];
            let value = chsh_quantum_value(&bell_phi_plus(), angles).unwrap();
            assert!(value <= ceiling, "{value}");
        }
    }

    #[test]
    fn qc_nonlocal_product_case_factorises() {
        // trivial ancillas, product ρ, local projective POVMs
        let mut rng = random::seeded(313);
        let rho_a = random::random_density(2, &mut rng);
        let rho_b = random::random_density(2, &mut rng);
        let trivial = CMatrix::identity(1);
        let povm_a = vec![pauli::projector(3, 1), pauli::projector(3, -1)];
        let povm_b = vec![pauli::projector(1, 1), pauli::projector(1, -1)];
        let table = qc_nonlocal_prob(
            &trivial,
            &trivial,
            &rho_a.kron(&rho_b),
            &povm_a,
            &povm_b,
        )
        .unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expected = povm_a[a].trace_product(&rho_a).re
                    * povm_b[b].trace_product(&rho_b).re;
                assert!((table[a][b] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qc_nonlocal_reproduces_chsh_values() {
        // classical-question embedding: τ^x = |x⟩⟨x|, POVMs read the flag
        let angles = chsh_optimal_angles();
        let projector = |theta: f64, sign: i32| {
            CMatrix::identity(2)
                .add(&rotated_observable(theta).scale(cr(sign as f64)))
                .scale(cr(0.5))
        };
        let mut win = 0.0;
        for x in 0..2usize {
            for y in 0..2usize {
                let tau = CMatrix::projector_onto(&CMatrix::basis_ket(2, x));
                let omega = CMatrix::projector_onto(&CMatrix::basis_ket(2, y));
                // party POVM on question ⊗ half: flag-controlled projector
                let povm_a: Vec<CMatrix> = [1, -1]
                    .iter()
                    .map(|&s| {
                        let mut e = CMatrix::zeros(4, 4);
                        for q in 0..2usize {
                            let flag = CMatrix::projector_onto(&CMatrix::basis_ket(2, q));
                            e = e.add(&flag.kron(&projector(angles[q], s)));
                        }
                        e
                    })
                    .collect();
                let povm_b: Vec<CMatrix> = [1, -1]
                    .iter()
                    .map(|&s| {
                        let mut e = CMatrix::zeros(4, 4);
                        for q in 0..2usize {
                            let flag = CMatrix::projector_onto(&CMatrix::basis_ket(2, q));
                            e = e.add(&flag.kron(&projector(angles[2 + q], s)));
                        }
                        e
                    })
                    .collect();
                let table =
                    qc_nonlocal_prob(&tau, &omega, &bell_phi_plus(), &povm_a, &povm_b).unwrap();
                for a in 0..2usize {
                    for b in 0..2usize {
                        if a ^ b == x & y {
                            win += 0.25 * table[a][b];
                        }
                    }
                }
            }
        }
        let expected = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((win - expected).abs() < 1e-9);
    }

    #[test]
    fn qc_nonlocal_single_effect_concentrates() {
        let trivial = CMatrix::identity(1);
        let rho = CMatrix::identity(4).scale(cr(0.25));
        let table = qc_nonlocal_prob(
            &trivial,
            &trivial,
            &rho,
            &[CMatrix::identity(2)],
            &[CMatrix::identity(2)],
        )
        .unwrap();
        assert!((table[0][0] - 1.0).abs() < 1e-12);
    }

    fn z_instrument() -> Instrument {
        Instrument::pauli_measurement(&crate::PauliString::new(vec![3]).unwrap())
    }

    fn z_povm_on_b() -> Povm {
        let mut povm = Povm::new();
        povm.insert(1, pauli::projector(3, 1));
        povm.insert(-1, pauli::projector(3, -1));
        povm
    }

    #[test]
    fn qcsg_z_chain_is_deterministic() {
        let mut second = BTreeMap::new();
        second.insert(1, z_povm_on_b());
        second.insert(-1, z_povm_on_b());
        let strategy = Strategy {
            lambda_dist: vec![1.0],
            first: vec![z_instrument()],
            memory: Channel::identity(2),
            second: vec![second],
        };
        let tau = CMatrix::projector_onto(&CMatrix::basis_ket(2, 0));
        let table = qcsg_prob(&strategy, &tau, &CMatrix::identity(1)).unwrap();
        assert!((table[&(1, 1)] - 1.0).abs() < 1e-12);
        assert!(table[&(1, -1)].abs() < 1e-12);
    }

    #[test]
    fn trivial_first_instrument_reduces_to_born_rule() {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(1, vec![CMatrix::identity(2)]);
        let mut second = BTreeMap::new();
        second.insert(1, z_povm_on_b());
        let strategy = Strategy {
            lambda_dist: vec![1.0],
            first: vec![Instrument::new(outcomes).unwrap()],
            memory: Channel::identity(2),
            second: vec![second],
        };
        let mut rng = random::seeded(331);
        let rho = random::random_density(2, &mut rng);
        let table = qcsg_prob(&strategy, &rho, &CMatrix::identity(1)).unwrap();
        let born = pauli::projector(3, 1).trace_product(&rho).re;
        assert!((table[&(1, 1)] - born).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_memory_forgets_the_first_outcome() {
        let mut second = BTreeMap::new();
        second.insert(1, z_povm_on_b());
        second.insert(-1, z_povm_on_b());
        let strategy = Strategy {
            lambda_dist: vec![1.0],
            first: vec![z_instrument()],
            memory: Channel::depolarizing(2),
            second: vec![second],
        };
        let tau = CMatrix::identity(2).scale(cr(0.5));
        let table = qcsg_prob(&strategy, &tau, &CMatrix::identity(1)).unwrap();
        // p(b|a) constant in a: each joint entry is p(a)·½ = ¼
        for (_, &p) in table.iter() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn no_retro_signalling_marginal() {
        let mut rng = random::seeded(337);
        let strategy = random::random_signalling_strategy(&mut rng);
        let tau = random::random_density(2, &mut rng);
        let omega_1 = random::random_density(2, &mut rng);
        let omega_2 = random::random_density(2, &mut rng);
        // the late POVM in the random strategy acts on B only; lift to B⊗Y
        let lift = |povm: &Povm| -> Povm {
            povm.iter()
                .map(|(&b, e)| (b, e.kron(&CMatrix::identity(2))))
                .collect()
        };
        let lifted = Strategy {
            lambda_dist: strategy.lambda_dist.clone(),
            first: strategy.first.clone(),
            memory: strategy.memory.clone(),
            second: strategy
                .second
                .iter()
                .map(|per| per.iter().map(|(&a, p)| (a, lift(p))).collect())
                .collect(),
        };
        let t1 = qcsg_prob(&lifted, &tau, &omega_1).unwrap();
        let t2 = qcsg_prob(&lifted, &tau, &omega_2).unwrap();
        for a in [-1, 1] {
            let m1: f64 = t1.iter().filter(|((x, _), _)| *x == a).map(|(_, p)| p).sum();
            let m2: f64 = t2.iter().filter(|((x, _), _)| *x == a).map(|(_, p)| p).sum();
            assert!((m1 - m2).abs() < 1e-12);
        }
    }

    #[test]
    fn temporal_correlation_matches_pdm_route() {
        let mut rng = random::seeded(347);
        for _ in 0..20 {
            let strategy = random::random_signalling_strategy(&mut rng);
            let tau = random::random_density(2, &mut rng);
            let via_game = qcsg_temporal_correlation(&strategy, &tau).unwrap();
            let via_pdm = pdm::instrument_channel_correlation(
                &tau,
                &strategy.first[0],
                &strategy.memory,
                &strategy.second[0][&1],
            )
            .unwrap();
            assert!((via_game - via_pdm).abs() < 1e-11);
        }
    }

    #[test]
    fn pauli_chain_closed_form() {
        // Pauli instruments i then j with unitary memory on τ = 𝟙/2 give
        // ½ Tr[σ_j U σ_i U†].
        let mut rng = random::seeded(349);
        let u = random::random_unitary(2, &mut rng);
        let tau = CMatrix::identity(2).scale(cr(0.5));
        for i in 1..4u8 {
            for j in 1..4u8 {
                let mut povm = Povm::new();
                povm.insert(1, pauli::projector(j, 1));
                povm.insert(-1, pauli::projector(j, -1));
                let mut second = BTreeMap::new();
                second.insert(1, povm.clone());
                second.insert(-1, povm);
                let strategy = Strategy {
                    lambda_dist: vec![1.0],
                    first: vec![Instrument::pauli_measurement(
                        &crate::PauliString::new(vec![i]).unwrap(),
                    )],
                    memory: Channel::from_unitary(&u).unwrap(),
                    second: vec![second],
                };
                let value = qcsg_temporal_correlation(&strategy, &tau).unwrap();
                let closed = 0.5
                    * pauli::sigma(j)
                        .mul(&u)
                        .mul(&pauli::sigma(i))
                        .mul(&u.dagger())
                        .trace()
                        .re;
                assert!((value - closed).abs() < 1e-11, "({i},{j})");
            }
        }
    }

    #[test]
    fn x_then_z_through_identity_memory_vanishes() {
        let mut povm = Povm::new();
        povm.insert(1, pauli::projector(3, 1));
        povm.insert(-1, pauli::projector(3, -1));
        let mut second = BTreeMap::new();
        second.insert(1, povm.clone());
        second.insert(-1, povm);
        let strategy = Strategy {
            lambda_dist: vec![1.0],
            first: vec![Instrument::pauli_measurement(
                &crate::PauliString::new(vec![1]).unwrap(),
            )],
            memory: Channel::identity(2),
            second: vec![second],
        };
        let tau = CMatrix::identity(2).scale(cr(0.5));
        let value = qcsg_temporal_correlation(&strategy, &tau).unwrap();
        assert!(value.abs() < 1e-12);
    }

    #[test]
    fn chsh_embedding_reaches_quantum_optimum() {
        let strategy = chsh_as_signalling_strategy(chsh_optimal_angles()).unwrap();
        let game = GameSpec::chsh();
        let taus: Vec<CMatrix> = (0..2)
            .map(|x| CMatrix::projector_onto(&CMatrix::basis_ket(2, x)))
            .collect();
        let omegas = taus.clone();
        let payoff = qcsg_payoff(&game, &strategy, &taus, &omegas).unwrap();
        let expected = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((payoff - expected).abs() < 1e-9, "{payoff}");
    }

    #[test]
    fn payoff_extremes() {
        let strategy = chsh_as_signalling_strategy(chsh_optimal_angles()).unwrap();
        let taus: Vec<CMatrix> = (0..2)
            .map(|x| CMatrix::projector_onto(&CMatrix::basis_ket(2, x)))
            .collect();
        let omegas = taus.clone();
        let all_win = GameSpec::new(
            vec![vec![0.25; 2]; 2],
            vec![vec![vec![vec![1.0; 2]; 2]; 2]; 2],
        )
        .unwrap();
        let none_win = GameSpec::new(
            vec![vec![0.25; 2]; 2],
            vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2],
        )
        .unwrap();
        assert!((qcsg_payoff(&all_win, &strategy, &taus, &omegas).unwrap() - 1.0).abs() < 1e-10);
        assert!(qcsg_payoff(&none_win, &strategy, &taus, &omegas).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_pm_outcome_labels_rejected() {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(0, vec![CMatrix::identity(2)]);
        let mut povm = Povm::new();
        povm.insert(1, CMatrix::identity(2));
        let mut second = BTreeMap::new();
        second.insert(0, povm);
        let strategy = Strategy {
            lambda_dist: vec![1.0],
            first: vec![Instrument::new(outcomes).unwrap()],
            memory: Channel::identity(2),
            second: vec![second],
        };
        let tau = CMatrix::identity(2).scale(cr(0.5));
        assert!(matches!(
            qcsg_temporal_correlation(&strategy, &tau),
            Err(Error::OutcomeLabels(0))
        ));
    }
}
