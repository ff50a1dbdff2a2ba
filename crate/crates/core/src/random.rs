//! Seeded random generators for states, unitaries, channels and projectors.
//!
//! Everything draws from a ChaCha8 stream so that sweeps are reproducible
//! from a single `u64` seed across platforms. Unitaries come from
//! Gram–Schmidt orthonormalisation of complex Gaussian matrices.

use crate::matrix::{cr, CMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// The crate-wide deterministic generator (ChaCha8, 64-bit seed).
pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: re, im ~ N(0,1) via Box–Muller.
pub fn complex_gaussian(rng: &mut SeededRng) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    m
}

/// Haar-ish random unitary: Gram–Schmidt columns of a Gaussian matrix,
/// with one re-orthogonalisation pass for numerical safety.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let overlap: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..dim {
                    let prev = cols[k][i];
                    cols[j][i] -= overlap * prev;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            cols[j][i] /= norm;
        }
    }
    let mut u = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            u.set(i, j, cols[j][i]);
        }
    }
    u
}

/// Full-rank random density matrix: ρ = GG†/Tr[GG†].
pub fn random_density(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let w = g.mul(&g.dagger());
    let t = w.trace().re;
    w.scale(cr(1.0 / t))
}

/// Random pure state density matrix.
pub fn random_pure_density(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let v = random_ket(dim, rng);
    CMatrix::projector_onto(&v)
}

/// Random normalised ket.
pub fn random_ket(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = random_gaussian_matrix(dim, 1, rng);
    let n = g.norm2();
    g.scale(cr(1.0 / n))
}

/// Random Hermitian matrix (GUE-style, unnormalised).
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    g.add(&g.dagger()).scale(cr(0.5))
}

/// Random Kraus decomposition of a channel dim→dim with the given rank,
/// obtained from an isometric dilation (columns of a random unitary).
pub fn random_kraus_set(dim: usize, rank: usize, rng: &mut SeededRng) -> Vec<CMatrix> {
    let big = random_unitary(dim * rank, rng);
    // isometry V: C^dim → C^rank ⊗ C^dim from the first `dim` columns
    let mut kraus = vec![CMatrix::zeros(dim, dim); rank];
    for r in 0..rank {
        for i in 0..dim {
            for j in 0..dim {
                kraus[r].set(i, j, big.get(r * dim + i, j));
            }
        }
    }
    kraus
}

/// Random channel in Kraus form.
pub fn random_channel(dim: usize, rank: usize, rng: &mut SeededRng) -> crate::pdm::Channel {
    crate::pdm::Channel::new(random_kraus_set(dim, rank, rng)).expect("dilation is trace preserving")
}

/// Random two-outcome (±1) instrument on `dim`, one Kraus per outcome,
/// obtained by splitting a random isometry over a qubit ancilla.
pub fn random_pm_instrument(dim: usize, rng: &mut SeededRng) -> crate::pdm::Instrument {
    let kraus = random_kraus_set(dim, 2, rng);
    let mut outcomes = std::collections::BTreeMap::new();
    outcomes.insert(1, vec![kraus[0].clone()]);
    outcomes.insert(-1, vec![kraus[1].clone()]);
    crate::pdm::Instrument::new(outcomes).expect("isometry split is complete")
}

/// Random two-outcome (±1) POVM: E₊ = (𝟙 + s·H/‖H‖)/2 with s ∈ (0,1).
pub fn random_povm_pair(dim: usize, rng: &mut SeededRng) -> (CMatrix, CMatrix) {
    let h = random_hermitian(dim, rng);
    let norm = crate::eig::eig_hermitian(&h)
        .expect("hermitian by construction")
        .0
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let s: f64 = rng.gen_range(0.1..0.95);
    let plus = CMatrix::identity(dim)
        .add(&h.scale(cr(s / norm)))
        .scale(cr(0.5));
    let minus = CMatrix::identity(dim).sub(&plus);
    (plus, minus)
}

/// Random single-hidden-variable signalling strategy on qubits: a random
/// ±1 instrument, a random memory channel, and a random ±1 POVM on the
/// memory output (trivial late question).
pub fn random_signalling_strategy(rng: &mut SeededRng) -> crate::games::Strategy {
    let first = random_pm_instrument(2, rng);
    let memory = random_channel(2, 2, rng);
    let (plus, minus) = random_povm_pair(2, rng);
    let mut povm = crate::games::Povm::new();
    povm.insert(1, plus);
    povm.insert(-1, minus);
    let mut second = std::collections::BTreeMap::new();
    second.insert(1, povm.clone());
    second.insert(-1, povm);
    crate::games::Strategy {
        lambda_dist: vec![1.0],
        first: vec![first],
        memory,
        second: vec![second],
    }
}

/// Random rank-`rank` orthogonal projector in dimension `dim`.
pub fn random_projector(dim: usize, rank: usize, rng: &mut SeededRng) -> CMatrix {
    assert!(rank <= dim);
    let u = random_unitary(dim, rng);
    let mut p = CMatrix::zeros(dim, dim);
    for k in 0..rank {
        for i in 0..dim {
            for j in 0..dim {
                let v = p.get(i, j) + u.get(i, k) * u.get(j, k).conj();
                p.set(i, j, v);
            }
        }
    }
    p
}
