//! Labeled tensor factorisations of a Hilbert space.
//!
//! A `SpaceSpec` is an ordered list of `(label, dim)` factors. Composite
//! indices are big-endian: the leftmost label is the most significant digit,
//! matching left-to-right tensor products. Partial trace, partial transpose
//! and operator embedding are all index bookkeeping on top of it.

use crate::matrix::CMatrix;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    factors: Vec<(String, usize)>,
}

impl SpaceSpec {
    pub fn new(factors: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (label, dim) in &factors {
            if *dim == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "factor `{label}` has dimension 0"
                )));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { factors })
    }

    /// Convenience constructor from `&str` labels.
    pub fn of(factors: &[(&str, usize)]) -> Self {
        Self::new(
            factors
                .iter()
                .map(|&(l, d)| (l.to_string(), d))
                .collect::<Vec<_>>(),
        )
        .expect("invalid space spec literal")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label).map(|p| self.factors[p].1)
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l)).collect()
    }

    fn check_square(&self, m: &CMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "spec of total dimension {} cannot factor a {}x{} matrix",
                self.total_dim(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Split a flat index into per-factor digits (big-endian).
    fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.factors.len()];
        for (slot, (_, dim)) in self.factors.iter().enumerate().rev() {
            digits[slot] = index % dim;
            index /= dim;
        }
        digits
    }

    fn compose(&self, digits: &[usize]) -> usize {
        let mut index = 0usize;
        for (slot, (_, dim)) in self.factors.iter().enumerate() {
            index = index * dim + digits[slot];
        }
        index
    }

    /// Trace out every factor not in `keep`. The kept factors stay in spec
    /// order; tracing over all labels yields a 1×1 matrix holding Tr m.
    pub fn partial_trace(&self, m: &CMatrix, keep: &[&str]) -> Result<CMatrix> {
        self.check_square(m)?;
        let keep_pos: HashSet<usize> = self.positions(keep)?.into_iter().collect();
        let kept: Vec<usize> = (0..self.factors.len())
            .filter(|p| keep_pos.contains(p))
            .collect();
        let traced: Vec<usize> = (0..self.factors.len())
            .filter(|p| !keep_pos.contains(p))
            .collect();
        let kept_dim: usize = kept.iter().map(|&p| self.factors[p].1).product();
        let traced_dim: usize = traced.iter().map(|&p| self.factors[p].1).product();

        let mut out = CMatrix::zeros(kept_dim, kept_dim);
        let mut digits_row = vec![0usize; self.factors.len()];
        let mut digits_col = vec![0usize; self.factors.len()];
        for a in 0..kept_dim {
            let a_digits = digits_for(&kept, self, a);
            for b in 0..kept_dim {
                let b_digits = digits_for(&kept, self, b);
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for t in 0..traced_dim {
                    let t_digits = digits_for(&traced, self, t);
                    for (k, &p) in kept.iter().enumerate() {
                        digits_row[p] = a_digits[k];
                        digits_col[p] = b_digits[k];
                    }
                    for (k, &p) in traced.iter().enumerate() {
                        digits_row[p] = t_digits[k];
                        digits_col[p] = t_digits[k];
                    }
                    acc += m.get(self.compose(&digits_row), self.compose(&digits_col));
                }
                out.set(a, b, acc);
            }
        }
        Ok(out)
    }

    /// Transpose the factors in `subset`, leaving the rest untouched.
    pub fn partial_transpose(&self, m: &CMatrix, subset: &[&str]) -> Result<CMatrix> {
        self.check_square(m)?;
        let flip: HashSet<usize> = self.positions(subset)?.into_iter().collect();
        let dim = self.total_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            let rd = self.decompose(row);
            for col in 0..dim {
                let cd = self.decompose(col);
                let mut nrd = rd.clone();
                let mut ncd = cd.clone();
                for &p in &flip {
                    nrd[p] = cd[p];
                    ncd[p] = rd[p];
                }
                out.set(self.compose(&nrd), self.compose(&ncd), m.get(row, col));
            }
        }
        Ok(out)
    }

    /// Lift an operator that acts on the listed labels (in the listed order)
    /// to the full space, acting as identity elsewhere.
    pub fn embed(&self, op: &CMatrix, labels: &[&str]) -> Result<CMatrix> {
        let pos = self.positions(labels)?;
        let sub_dim: usize = pos.iter().map(|&p| self.factors[p].1).product();
        if !op.is_square() || op.rows() != sub_dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, labels {:?} span dimension {}",
                op.rows(),
                op.cols(),
                labels,
                sub_dim
            )));
        }
        let dim = self.total_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            let rd = self.decompose(row);
            for col in 0..dim {
                let cd = self.decompose(col);
                // identity on factors outside `labels`
                if (0..self.factors.len())
                    .filter(|p| !pos.contains(p))
                    .any(|p| rd[p] != cd[p])
                {
                    continue;
                }
                let mut sub_row = 0usize;
                let mut sub_col = 0usize;
                for &p in &pos {
                    sub_row = sub_row * self.factors[p].1 + rd[p];
                    sub_col = sub_col * self.factors[p].1 + cd[p];
                }
                out.set(row, col, op.get(sub_row, sub_col));
            }
        }
        Ok(out)
    }

    /// Replace each factor in `labels` by the maximally mixed state on it:
    /// W ↦ (𝟙_X/d_X) ⊗ Tr_X W, with X kept in place.
    pub fn mix_factors(&self, m: &CMatrix, labels: &[&str]) -> Result<CMatrix> {
        self.check_square(m)?;
        let mix: HashSet<usize> = self.positions(labels)?.into_iter().collect();
        let dim = self.total_dim();
        let mix_dim: usize = mix.iter().map(|&p| self.factors[p].1).product();
        let mixed: Vec<usize> = (0..self.factors.len())
            .filter(|p| mix.contains(p))
            .collect();
        let mut out = CMatrix::zeros(dim, dim);
        let weight = 1.0 / mix_dim as f64;
        for row in 0..dim {
            let rd = self.decompose(row);
            for col in 0..dim {
                let cd = self.decompose(col);
                // (𝟙/d) part: diagonal on the mixed factors
                if mixed.iter().any(|&p| rd[p] != cd[p]) {
                    continue;
                }
                // Tr_X part: sum the source over the mixed factors
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                let mut srd = rd.clone();
                let mut scd = cd.clone();
                for t in 0..mix_dim {
                    let td = digits_for(&mixed, self, t);
                    for (k, &p) in mixed.iter().enumerate() {
                        srd[p] = td[k];
                        scd[p] = td[k];
                    }
                    acc += m.get(self.compose(&srd), self.compose(&scd));
                }
                out.set(row, col, acc * num_complex::Complex64::new(weight, 0.0));
            }
        }
        Ok(out)
    }
}

/// Split a flat index over the sub-factorisation given by `positions`.
fn digits_for(positions: &[usize], spec: &SpaceSpec, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0usize; positions.len()];
    for (k, &p) in positions.iter().enumerate().rev() {
        let d = spec.factors()[p].1;
        digits[k] = index % d;
        index /= d;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{cr, kron_all, C_ONE};
    use crate::pauli::sigma;
    use crate::random;

    /// Σ_ij |ij⟩⟨ji| — the two-qubit swap.
    pub fn swap2() -> CMatrix {
        let mut s = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                s.set(2 * i + j, 2 * j + i, C_ONE);
            }
        }
        s
    }

    #[test]
    fn trace_out_product_state() {
        let mut rng = random::seeded(3);
        let rho = random::random_density(2, &mut rng);
        let sig = random::random_density(3, &mut rng);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 3)]);
        let joint = rho.kron(&sig);
        let reduced = spec.partial_trace(&joint, &["A"]).unwrap();
        assert!(reduced.approx_eq(&rho, 1e-12));
    }

    #[test]
    fn trace_of_swap_half() {
        // Index-sum oracle over SWAP = Σ|ij⟩⟨ji|: Tr_A(½ SWAP) = 𝟙/2.
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let half_swap = swap2().scale(cr(0.5));
        let reduced = spec.partial_trace(&half_swap, &["B"]).unwrap();
        assert!(reduced.approx_eq(&CMatrix::identity(2).scale(cr(0.5)), 1e-15));
    }

    #[test]
    fn trace_over_everything() {
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let m = swap2();
        let t = spec.partial_trace(&m, &[]).unwrap();
        assert_eq!((t.rows(), t.cols()), (1, 1));
        assert!((t.get(0, 0) - m.trace()).norm() < 1e-15);
    }

    #[test]
    fn trace_preserved() {
        let mut rng = random::seeded(5);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2), ("C", 2)]);
        let m = random::random_density(8, &mut rng);
        let r = spec.partial_trace(&m, &["B"]).unwrap();
        assert!((r.trace() - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_kron_identity() {
        // partial_trace(kron(a,b), keep first) = a·Tr(b)
        let mut rng = random::seeded(7);
        let a = random::random_unitary(2, &mut rng);
        let b = random::random_unitary(3, &mut rng);
        let spec = SpaceSpec::of(&[("L", 2), ("R", 3)]);
        let reduced = spec.partial_trace(&a.kron(&b), &["L"]).unwrap();
        assert!(reduced.approx_eq(&a.scale(b.trace()), 1e-12));
    }

    #[test]
    fn unknown_label_errors() {
        let spec = SpaceSpec::of(&[("A", 2)]);
        assert!(matches!(
            spec.partial_trace(&CMatrix::identity(2), &["Q"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn full_partial_transpose_is_transpose() {
        let mut rng = random::seeded(9);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let m = random::random_density(4, &mut rng);
        let t = spec.partial_transpose(&m, &["A", "B"]).unwrap();
        assert!(t.approx_eq(&m.transpose(), 0.0));
    }

    #[test]
    fn empty_subset_is_identity_map() {
        let mut rng = random::seeded(10);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let m = random::random_density(4, &mut rng);
        let t = spec.partial_transpose(&m, &[]).unwrap();
        assert!(t.approx_eq(&m, 0.0));
    }

    #[test]
    fn partial_transpose_of_cj_identity_is_swap() {
        // ([[𝟙]])^{PT on first qubit} = SWAP
        let mut cj = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                cj.set(2 * i + i, 2 * j + j, C_ONE);
            }
        }
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let pt = spec.partial_transpose(&cj, &["A"]).unwrap();
        assert!(pt.approx_eq(&swap2(), 0.0));
    }

    #[test]
    fn partial_transpose_involution() {
        let mut rng = random::seeded(12);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 3), ("C", 2)]);
        let m = random::random_density(12, &mut rng);
        let once = spec.partial_transpose(&m, &["B", "C"]).unwrap();
        let twice = spec.partial_transpose(&once, &["B", "C"]).unwrap();
        assert!(twice.approx_eq(&m, 0.0));
    }

    #[test]
    fn embed_matches_kron_for_adjacent_labels() {
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2), ("C", 2)]);
        let op = sigma(1).kron(&sigma(3));
        let embedded = spec.embed(&op, &["A", "B"]).unwrap();
        let direct = kron_all(&[&sigma(1), &sigma(3), &CMatrix::identity(2)]);
        assert!(embedded.approx_eq(&direct, 0.0));
    }

    #[test]
    fn embed_handles_reordered_labels() {
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        // op acts on (B, A): op = X_B ⊗ Z_A  ⇒ full operator = Z_A ⊗ X_B
        let op = sigma(1).kron(&sigma(3));
        let embedded = spec.embed(&op, &["B", "A"]).unwrap();
        let direct = sigma(3).kron(&sigma(1));
        assert!(embedded.approx_eq(&direct, 0.0));
    }

    #[test]
    fn mix_factors_replaces_with_maximally_mixed() {
        let mut rng = random::seeded(21);
        let rho = random::random_density(2, &mut rng);
        let sig = random::random_density(2, &mut rng);
        let spec = SpaceSpec::of(&[("A", 2), ("B", 2)]);
        let mixed = spec.mix_factors(&rho.kron(&sig), &["B"]).unwrap();
        let expected = rho.kron(&CMatrix::identity(2).scale(cr(0.5)));
        assert!(mixed.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            SpaceSpec::new(vec![("A".into(), 2), ("A".into(), 2)]),
            Err(Error::DuplicateLabel(_))
        ));
    }
}
