//! Pauli operators, strings of them, and the ±1 projectors they induce.

use crate::matrix::{c, cr, CMatrix};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Single-qubit Pauli matrix: 0 = 𝟙, 1 = X, 2 = Y, 3 = Z.
pub fn sigma(letter: u8) -> CMatrix {
    let z = cr(0.0);
    let o = cr(1.0);
    let entries = match letter {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => vec![o, z, z, -o],
        _ => panic!("pauli letter {letter} out of range"),
    };
    CMatrix::new(2, 2, entries).unwrap()
}

/// Hadamard gate, used all over the test corpus.
pub fn hadamard() -> CMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    CMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()
}

/// Projector (𝟙 + sign·σ_letter)/2 onto the ±1 eigenspace.
///
/// For letter 0 the +1 projector is 𝟙 and the −1 projector is 0, so the
/// identity "measurement" has a single certain outcome.
pub fn projector(letter: u8, sign: i32) -> CMatrix {
    let s = cr(sign as f64);
    CMatrix::identity(2).add(&sigma(letter).scale(s)).scale(cr(0.5))
}

/// An ordered word of Pauli letters, one per qubit/event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString(Vec<u8>);

impl PauliString {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&l) = letters.iter().find(|&&l| l > 3) {
            return Err(Error::IndexOutOfRange(format!("pauli letter {l}")));
        }
        Ok(Self(letters))
    }

    /// All-identity string on n qubits.
    pub fn identity(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }

    /// ⊗_j σ_{letters[j]}, a 2ⁿ×2ⁿ Hermitian involution.
    pub fn matrix(&self) -> CMatrix {
        assert!(!self.0.is_empty(), "empty pauli string has no matrix");
        let mut acc = sigma(self.0[0]);
        for &l in &self.0[1..] {
            acc = acc.kron(&sigma(l));
        }
        acc
    }

    /// Projectors (𝟙 ± σ_string)/2 onto the ±1 eigenspaces of the string.
    pub fn sign_projector(&self, sign: i32) -> CMatrix {
        let dim = 1usize << self.len();
        CMatrix::identity(dim)
            .add(&self.matrix().scale(cr(sign as f64)))
            .scale(cr(0.5))
    }

    /// Enumerate all 4ⁿ strings of length n in lexicographic order.
    pub fn enumerate(n: usize) -> Vec<PauliString> {
        let total = 4usize.pow(n as u32);
        (0..total)
            .map(|mut k| {
                let mut letters = vec![0u8; n];
                for slot in (0..n).rev() {
                    letters[slot] = (k % 4) as u8;
                    k /= 4;
                }
                PauliString(letters)
            })
            .collect()
    }
}
