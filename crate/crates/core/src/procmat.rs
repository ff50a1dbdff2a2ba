//! Process matrices with indefinite causal order.
//!
//! A bipartite process W lives on slots among {P, A_I, A_O, B_I, B_O, F};
//! absent slots are carried as dimension-1 factors so that one code path
//! serves every slot configuration. Validity is positivity, the trace
//! condition Tr W = d_{A_O} d_{B_O} d_P, and invariance under the L_V
//! projector built from trace-and-replace-with-maximally-mixed maps
//! _X W ≡ (𝟙_X/d_X) ⊗ Tr_X W.

use crate::matrix::{cr, CMatrix};
use crate::pauli::{self, PauliString};
use crate::pdm::{self, Channel};
use crate::space::SpaceSpec;
use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Slot labels in canonical order: global past, Alice in/out, Bob in/out,
/// global future.
pub const SLOT_LABELS: [&str; 6] = ["P", "A_I", "A_O", "B_I", "B_O", "F"];

/// The eleven-term expansion of the validity projector. Signs follow the
/// A↔B-symmetric form; each subset names the slots to trace and replace.
const LV_TERMS: [(f64, &[&str]); 11] = [
    (1.0, &[]),
    (-1.0, &["F"]),
    (1.0, &["A_O", "F"]),
    (1.0, &["B_O", "F"]),
    (-1.0, &["A_O", "B_O", "F"]),
    (-1.0, &["A_I", "A_O", "F"]),
    (1.0, &["A_I", "A_O", "B_O", "F"]),
    (-1.0, &["B_I", "B_O", "F"]),
    (1.0, &["A_O", "B_I", "B_O", "F"]),
    (-1.0, &["A_I", "A_O", "B_I", "B_O", "F"]),
    (1.0, &["P", "A_I", "A_O", "B_I", "B_O", "F"]),
];

/// Process matrix over labeled laboratory slots.
#[derive(Debug, Clone)]
pub struct ProcessMatrix {
    matrix: CMatrix,
    spec: SpaceSpec,
}

impl ProcessMatrix {
    /// Labels must be a subsequence of the canonical slot order and factor
    /// the matrix; Hermiticity is required here, the remaining validity
    /// conditions are checked by [`validate_process_matrix`].
    pub fn new(matrix: CMatrix, spec: SpaceSpec) -> Result<Self> {
        let mut cursor = 0usize;
        for (label, _) in spec.factors() {
            let pos = SLOT_LABELS[cursor..]
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            cursor += pos + 1;
        }
        if spec.total_dim() != matrix.rows() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "slots cover dimension {}, matrix is {}x{}",
                spec.total_dim(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > 1e-10 {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { matrix, spec })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn dim_of(&self, label: &str) -> usize {
        self.spec.dim_of(label).unwrap_or(1)
    }

    /// Spec extended to all six canonical slots, absent ones as dimension 1.
    /// Inserting dimension-1 factors leaves the matrix untouched.
    pub fn full_spec(&self) -> SpaceSpec {
        let factors = SLOT_LABELS
            .iter()
            .map(|&l| (l.to_string(), self.dim_of(l)))
            .collect::<Vec<_>>();
        SpaceSpec::new(factors).expect("canonical labels are unique")
    }
}

impl Serialize for ProcessMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Slot<'a> {
            label: &'a str,
            dim: usize,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            #[serde(flatten)]
            matrix: &'a CMatrix,
            slots: Vec<Slot<'a>>,
        }
        Repr {
            matrix: &self.matrix,
            slots: self
                .spec
                .factors()
                .iter()
                .map(|(l, d)| Slot { label: l, dim: *d })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProcessMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Slot {
            label: String,
            dim: usize,
        }
        #[derive(Deserialize)]
        struct Repr {
            #[serde(flatten)]
            matrix: CMatrix,
            slots: Vec<Slot>,
        }
        let raw = Repr::deserialize(deserializer)?;
        let spec = SpaceSpec::new(raw.slots.into_iter().map(|s| (s.label, s.dim)).collect())
            .map_err(D::Error::custom)?;
        ProcessMatrix::new(raw.matrix, spec).map_err(D::Error::custom)
    }
}

/// Choi matrix Σ_ij |i⟩⟨j| ⊗ ℳ(|i⟩⟨j|) of a channel.
pub fn choi(ch: &Channel) -> CMatrix {
    let d_in = ch.dim_in();
    let d_out = ch.dim_out();
    let mut m = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let mut basis = CMatrix::zeros(d_in, d_in);
            basis.set(i, j, cr(1.0));
            let block = ch.apply(&basis);
            let mut lift = CMatrix::zeros(d_in, d_in);
            lift.set(i, j, cr(1.0));
            m = m.add(&lift.kron(&block));
        }
    }
    let _ = d_out;
    m
}

/// [[𝟙]] = Σ_ij |ii⟩⟨jj|, the unnormalised maximally entangled projector.
pub fn cj_identity(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + i, j * d + j, cr(1.0));
        }
    }
    m
}

/// [[U]] = (𝟙 ⊗ U)[[𝟙]](𝟙 ⊗ U†).
pub fn cj_unitary(u: &CMatrix) -> CMatrix {
    let d = u.rows();
    let lift = CMatrix::identity(d).kron(u);
    lift.mul(&cj_identity(d)).mul(&lift.dagger())
}

/// Inverse Choi map ℳ(ρ) = Tr_in[(ρᵀ ⊗ 𝟙) M]. The transpose on ρ makes the
/// round trip with [`choi`] exact.
pub fn choi_apply(choi_m: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    let d_in = rho.rows();
    if !rho.is_square() || choi_m.rows() % d_in != 0 {
        return Err(Error::DimensionMismatch(
            "choi matrix does not fit the state dimension".into(),
        ));
    }
    let d_out = choi_m.rows() / d_in;
    if choi_m.rows() != d_in * d_out || !choi_m.is_square() {
        return Err(Error::DimensionMismatch("non-square choi matrix".into()));
    }
    let spec = SpaceSpec::of(&[("in", d_in), ("out", d_out)]);
    let lifted = rho.transpose().kron(&CMatrix::identity(d_out));
    spec.partial_trace(&lifted.mul(choi_m), &["out"])
}

/// Report from [`validate_process_matrix`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidityReport {
    pub psd: bool,
    pub trace_ok: bool,
    pub lv_fixed: bool,
    pub min_eig: f64,
    pub trace: f64,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.psd && self.trace_ok && self.lv_fixed
    }
}

/// Apply the validity projector L_V.
pub fn l_v(w: &ProcessMatrix) -> Result<CMatrix> {
    let spec = w.full_spec();
    let mut acc = CMatrix::zeros(w.matrix().rows(), w.matrix().rows());
    for (sign, subset) in LV_TERMS {
        let term = spec.mix_factors(w.matrix(), subset)?;
        acc = acc.add(&term.scale(cr(sign)));
    }
    Ok(acc)
}

/// Check positivity (eigenvalue floor −1e-9), the trace condition
/// Tr W = d_{A_O} d_{B_O} d_P, and the L_V fixed point ‖W − L_V W‖_F < 1e-9.
pub fn validate_process_matrix(w: &ProcessMatrix) -> Result<ValidityReport> {
    let min_eig = crate::eig::min_eigenvalue(w.matrix())?;
    let trace = w.matrix().trace().re;
    let expected = (w.dim_of("A_O") * w.dim_of("B_O") * w.dim_of("P")) as f64;
    let projected = l_v(w)?;
    let lv_dev = w.matrix().sub(&projected).frobenius_norm();
    Ok(ValidityReport {
        psd: min_eig >= -1e-9,
        trace_ok: (trace - expected).abs() <= 1e-9,
        lv_fixed: lv_dev < 1e-9,
        min_eig,
        trace,
    })
}

/// CJ observable of a Pauli measurement with repreparation,
/// Σ_i = P_i⁺⊗P_i⁺ − P_i⁻⊗P_i⁻ = ½(𝟙⊗σ_i + σ_i⊗𝟙).
pub fn pauli_cj_observable(i: u8) -> CMatrix {
    let s = pauli::sigma(i);
    let id = CMatrix::identity(2);
    id.kron(&s).add(&s.kron(&id)).scale(cr(0.5))
}

/// The same observable written through the projectors, for cross-checking.
pub fn pauli_cj_observable_projector_form(i: u8) -> CMatrix {
    let plus = pauli::projector(i, 1);
    let minus = pauli::projector(i, -1);
    plus.kron(&plus).sub(&minus.kron(&minus))
}

/// Pauli correlation read out of a process matrix:
/// p(Σ_i, Σ_j) = Tr[W^{T_{A_I A_O B_I B_O}} (𝔠_i ⊗ 𝔠_j)],
/// where 𝔠 is the measurement-instrument CJ operator Σ_α α 𝔠(ρ ↦ P^α ρ P^α),
/// i.e. the input-side partial transpose of [`pauli_cj_observable`]. A slot
/// pair with a trivial (dimension-1) output uses the bare POVM observable
/// σᵀ on its input instead.
pub fn pm_pauli_correlation(w: &ProcessMatrix, i: u8, j: u8) -> Result<f64> {
    let spec = w.full_spec();
    for label in ["A_I", "B_I"] {
        if w.dim_of(label) != 2 {
            return Err(Error::DimensionMismatch(format!(
                "slot {label} must be a qubit"
            )));
        }
    }
    let obs_a = party_observable(&spec, "A_I", "A_O", w.dim_of("A_O"), i)?;
    let obs_b = party_observable(&spec, "B_I", "B_O", w.dim_of("B_O"), j)?;
    let transposed = transpose_lab_slots(w)?;
    Ok(transposed.trace_product(&obs_a.mul(&obs_b)).re)
}

/// W^{T_{A_I A_O B_I B_O}} over whichever lab slots are present.
fn transpose_lab_slots(w: &ProcessMatrix) -> Result<CMatrix> {
    let present: Vec<&str> = ["A_I", "A_O", "B_I", "B_O"]
        .into_iter()
        .filter(|l| w.dim_of(l) > 1)
        .collect();
    w.spec().partial_transpose(w.matrix(), &present)
}

/// Signed CJ operator of the σ-measurement instrument,
/// 𝔠_i = Σ_α α Σ_kl |k⟩⟨l| ⊗ P_i^α |k⟩⟨l| P_i^α.
///
/// For i ≥ 1 this is the input-side partial transpose of
/// [`pauli_cj_observable`]; for i = 0 it is the identity-channel Choi matrix
/// [[𝟙]], which carries the normalisation p(𝔠_0, 𝔠_0) = 1.
pub fn pauli_measurement_cj(letter: u8) -> CMatrix {
    let mut acc = CMatrix::zeros(4, 4);
    for alpha in [1i32, -1] {
        let p = pauli::projector(letter, alpha);
        for k in 0..2 {
            for l in 0..2 {
                let mut basis = CMatrix::zeros(2, 2);
                basis.set(k, l, cr(1.0));
                let term = basis.kron(&p.mul(&basis).mul(&p)).scale(cr(alpha as f64));
                acc = acc.add(&term);
            }
        }
    }
    acc
}

fn party_observable(
    spec: &SpaceSpec,
    in_label: &str,
    out_label: &str,
    d_out: usize,
    letter: u8,
) -> Result<CMatrix> {
    if d_out == 2 {
        spec.embed(&pauli_measurement_cj(letter), &[in_label, out_label])
    } else {
        // trivial output: bare POVM observable, transposed for the pairing
        spec.embed(&pauli::sigma(letter).transpose(), &[in_label])
    }
}

/// One Pauli term of a four-qubit process matrix, with its coefficient in
/// W = Σ_s c_s σ_s.
#[derive(Debug, Clone, Serialize)]
pub struct HsTerm {
    pub letters: [u8; 4],
    pub coeff: f64,
}

/// Hilbert–Schmidt decomposition of W over (A_I, A_O, B_I, B_O) sorted into
/// causal classes. `forbidden` collects terms outside every class, e.g.
/// anything touching A_O ⊗ B_O jointly; it is empty for valid processes.
#[derive(Debug, Clone, Serialize)]
pub struct HsReport {
    pub identity: f64,
    pub a_to_b: Vec<HsTerm>,
    pub b_to_a: Vec<HsTerm>,
    pub separate: Vec<HsTerm>,
    pub forbidden: Vec<HsTerm>,
}

impl HsReport {
    pub fn max_forbidden_abs(&self) -> f64 {
        self.forbidden
            .iter()
            .map(|t| t.coeff.abs())
            .fold(0.0, f64::max)
    }
}

/// Classify the Pauli terms of a four-qubit process matrix by which causal
/// structure they support: A-to-B signalling (σ on A_O⊗B_I, optionally A_I),
/// B-to-A signalling (σ on B_O⊗A_I, optionally B_I), causally separate
/// (inputs only), or forbidden.
pub fn hs_classify(w: &ProcessMatrix) -> Result<HsReport> {
    for label in ["A_I", "A_O", "B_I", "B_O"] {
        if w.dim_of(label) != 2 {
            return Err(Error::DimensionMismatch(
                "hs_classify expects four qubit slots".into(),
            ));
        }
    }
    let m = w.matrix();
    let mut report = HsReport {
        identity: 0.0,
        a_to_b: Vec::new(),
        b_to_a: Vec::new(),
        separate: Vec::new(),
        forbidden: Vec::new(),
    };
    for s in PauliString::enumerate(4) {
        let coeff = m.trace_product(&s.matrix()).re / 16.0;
        let [ai, ao, bi, bo] = [
            s.letters()[0],
            s.letters()[1],
            s.letters()[2],
            s.letters()[3],
        ];
        if s.is_identity() {
            report.identity = coeff;
            continue;
        }
        if coeff.abs() < 1e-12 {
            continue;
        }
        let term = HsTerm {
            letters: [ai, ao, bi, bo],
            coeff,
        };
        if bo == 0 && ao != 0 && bi != 0 {
            report.a_to_b.push(term);
        } else if ao == 0 && bo != 0 && ai != 0 {
            report.b_to_a.push(term);
        } else if ao == 0 && bo == 0 {
            report.separate.push(term);
        } else {
            report.forbidden.push(term);
        }
    }
    Ok(report)
}

/// W = ρ^{A_I} ⊗ [[U]]^{A_O B_I} with trivial P, B_O, F: a qubit prepared in
/// ρ, handed to Alice, then piped through U to Bob.
pub fn process_from_state_and_unitary(rho: &CMatrix, u: &CMatrix) -> Result<ProcessMatrix> {
    pdm::validate_state(rho)?;
    let dev = u.unitarity_deviation();
    if dev > 1e-9 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let spec = SpaceSpec::of(&[("A_I", 2), ("A_O", 2), ("B_I", 2)]);
    ProcessMatrix::new(rho.kron(&cj_unitary(u)), spec)
}

/// Report from [`pm_pdm_equivalence_check`].
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub max_abs_diff: f64,
}

/// The one-lab-to-one-event direct map: for W = ρ ⊗ [[U]], process-matrix
/// Pauli correlations must equal the operational two-time PDM correlations
/// for every observable pair.
pub fn pm_pdm_equivalence_check(rho: &CMatrix, u: &CMatrix) -> Result<EquivalenceReport> {
    let w = process_from_state_and_unitary(rho, u)?;
    let ch = Channel::from_unitary(u)?;
    let mut max_abs_diff = 0.0f64;
    for i in 0..4u8 {
        for j in 0..4u8 {
            let via_pm = pm_pauli_correlation(&w, i, j)?;
            let via_pdm = pdm::temporal_correlation_pair(rho, &ch, i, j)?;
            max_abs_diff = max_abs_diff.max((via_pm - via_pdm).abs());
        }
    }
    Ok(EquivalenceReport { max_abs_diff })
}
