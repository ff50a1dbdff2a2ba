//! Causal polytopes, GYNI/LGYNI facets, and the paper's two-route
//! causal-inequality violation.
//!
//! Causal correlations are convex mixtures of fixed-order deterministic
//! strategies (a = f(x), b = g(x,y) for A before B, and mirrored). Vertex
//! enumeration plus a phase-1 simplex decide membership; the violation demo
//! drives a process matrix and its ancilla pseudo-density operators through
//! the same measure-and-reprepare instruments and lands outside the
//! polytope at p_GYNI = 5/16·(1+1/√2).

use crate::matrix::{cr, kron_all, CMatrix};
use crate::pauli::sigma;
use crate::procmat::cj_identity;
use crate::space::SpaceSpec;
use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

/// Hard cap on enumerated vertices.
pub const VERTEX_LIMIT: usize = 1_000_000;

/// LP feasibility tolerance of the phase-1 simplex.
pub const LP_FEASIBILITY_TOL: f64 = 1e-8;

/// Conditional probability table p(a,b|x,y) with outcome counts k and
/// question counts m per party.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    m_a: usize,
    m_b: usize,
    k_a: usize,
    k_b: usize,
    p: Vec<f64>,
}

impl CorrelationTable {
    /// Validates non-negativity and per-question normalisation.
    pub fn new(m_a: usize, m_b: usize, k_a: usize, k_b: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != m_a * m_b * k_a * k_b {
            return Err(Error::DimensionMismatch(format!(
                "table needs {} entries, got {}",
                m_a * m_b * k_a * k_b,
                p.len()
            )));
        }
        let table = Self { m_a, m_b, k_a, k_b, p };
        for x in 0..m_a {
            for y in 0..m_b {
                let mut total = 0.0;
                for a in 0..k_a {
                    for b in 0..k_b {
                        let v = table.get(a, b, x, y);
                        if v < -1e-10 {
                            return Err(Error::InvalidParameter(format!(
                                "negative probability {v} at ({a},{b}|{x},{y})"
                            )));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "probabilities for questions ({x},{y}) sum to {total}"
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.m_a, self.m_b, self.k_a, self.k_b)
    }

    fn flat(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.k_b + b) * self.m_a + x) * self.m_b + y
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.flat(a, b, x, y)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.p
    }
}

impl Serialize for CorrelationTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            m_a: usize,
            m_b: usize,
            k_a: usize,
            k_b: usize,
            p: Vec<Vec<Vec<Vec<f64>>>>,
        }
        let mut nested = vec![vec![vec![vec![0.0; self.m_b]; self.m_a]; self.k_b]; self.k_a];
        for a in 0..self.k_a {
            for b in 0..self.k_b {
                for x in 0..self.m_a {
                    for y in 0..self.m_b {
                        nested[a][b][x][y] = self.get(a, b, x, y);
                    }
                }
            }
        }
        Repr {
            m_a: self.m_a,
            m_b: self.m_b,
            k_a: self.k_a,
            k_b: self.k_b,
            p: nested,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CorrelationTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            m_a: usize,
            m_b: usize,
            k_a: usize,
            k_b: usize,
            p: Vec<Vec<Vec<Vec<f64>>>>,
        }
        let raw = Repr::deserialize(deserializer)?;
        let mut flat = vec![0.0; raw.m_a * raw.m_b * raw.k_a * raw.k_b];
        for (a, pa) in raw.p.iter().enumerate() {
            for (b, pb) in pa.iter().enumerate() {
                for (x, px) in pb.iter().enumerate() {
                    for (y, &v) in px.iter().enumerate() {
                        flat[((a * raw.k_b + b) * raw.m_a + x) * raw.m_b + y] = v;
                    }
                }
            }
        }
        CorrelationTable::new(raw.m_a, raw.m_b, raw.k_a, raw.k_b, flat).map_err(D::Error::custom)
    }
}

/// Which party acts first in a deterministic strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    AliceFirst,
    BobFirst,
}

/// Expected causal-polytope vertex count
/// k_a^{m_a} k_b^{m_a m_b} + k_a^{m_a m_b} k_b^{m_b} − k_a^{m_a} k_b^{m_b}.
pub fn expected_vertex_count(m_a: usize, m_b: usize, k_a: usize, k_b: usize) -> u128 {
    let pow = |base: usize, exp: usize| (base as u128).pow(exp as u32);
    pow(k_a, m_a) * pow(k_b, m_a * m_b) + pow(k_a, m_a * m_b) * pow(k_b, m_b)
        - pow(k_a, m_a) * pow(k_b, m_b)
}

fn digits(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0usize; len];
    for slot in out.iter_mut() {
        *slot = code % base;
        code /= base;
    }
    out
}

fn deterministic_tables(
    m_a: usize,
    m_b: usize,
    k_a: usize,
    k_b: usize,
    order: Order,
) -> Vec<CorrelationTable> {
    let (first_slots, second_slots) = match order {
        Order::AliceFirst => (m_a, m_a * m_b),
        Order::BobFirst => (m_a * m_b, m_b),
    };
    let (first_base, second_base) = match order {
        Order::AliceFirst => (k_a, k_b),
        Order::BobFirst => (k_a, k_b),
    };
    let first_total = first_base.pow(first_slots as u32);
    let second_total = second_base.pow(second_slots as u32);
    let mut tables = Vec::with_capacity(first_total * second_total);
    for f_code in 0..first_total {
        let f = digits(f_code, first_base, first_slots);
        for g_code in 0..second_total {
            let g = digits(g_code, second_base, second_slots);
            let mut p = vec![0.0; m_a * m_b * k_a * k_b];
            for x in 0..m_a {
                for y in 0..m_b {
                    let (a, b) = match order {
                        // a = f(x), b = g(x,y)
                        Order::AliceFirst => (f[x], g[x * m_b + y]),
                        // a = f(x,y), b = g(y)
                        Order::BobFirst => (f[x * m_b + y], g[y]),
                    };
                    p[((a * k_b + b) * m_a + x) * m_b + y] = 1.0;
                }
            }
            tables.push(CorrelationTable { m_a, m_b, k_a, k_b, p });
        }
    }
    tables
}

/// All vertices of the causal polytope: deterministic A-first strategies
/// united with deterministic B-first ones, deduplicated.
pub fn enumerate_causal_vertices(
    m_a: usize,
    m_b: usize,
    k_a: usize,
    k_b: usize,
) -> Result<Vec<CorrelationTable>> {
    if m_a.min(m_b).min(k_a).min(k_b) == 0 {
        return Err(Error::InvalidParameter("counts must be at least 1".into()));
    }
    let expected = expected_vertex_count(m_a, m_b, k_a, k_b);
    if expected > VERTEX_LIMIT as u128 {
        return Err(Error::SizeLimit {
            requested: expected.min(usize::MAX as u128) as usize,
            limit: VERTEX_LIMIT,
        });
    }
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut vertices = Vec::new();
    for order in [Order::AliceFirst, Order::BobFirst] {
        for table in deterministic_tables(m_a, m_b, k_a, k_b, order) {
            // entries are exactly 0 or 1, so a byte key dedups exactly
            let key: Vec<u8> = table.p.iter().map(|&v| v as u8).collect();
            if seen.insert(key) {
                vertices.push(table);
            }
        }
    }
    Ok(vertices)
}

/// The two non-trivial facet families of the (2,2,2,2) causal polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Facet {
    /// Guess your neighbour's input: ¼ Σ δ_{a,y} δ_{b,x} p ≤ 1/2.
    Gyni,
    /// Lazy GYNI: ¼ Σ δ_{x(a⊕y),0} δ_{y(b⊕x),0} p ≤ 3/4.
    Lgyni,
}

impl Facet {
    pub fn bound(&self) -> f64 {
        match self {
            Facet::Gyni => 0.5,
            Facet::Lgyni => 0.75,
        }
    }
}

/// Evaluate a facet functional on a binary-question, binary-answer table.
pub fn facet_value(table: &CorrelationTable, kind: Facet) -> Result<f64> {
    if table.shape() != (2, 2, 2, 2) {
        return Err(Error::DimensionMismatch(
            "facets are defined for binary questions and answers".into(),
        ));
    }
    let mut acc = 0.0;
    for x in 0..2usize {
        for y in 0..2usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    let wins = match kind {
                        Facet::Gyni => a == y && b == x,
                        Facet::Lgyni => x * (a ^ y) == 0 && y * (b ^ x) == 0,
                    };
                    if wins {
                        acc += table.get(a, b, x, y);
                    }
                }
            }
        }
    }
    Ok(acc / 4.0)
}

/// Dense phase-1 simplex with Bland's rule: decides whether Ax = b has a
/// solution with x ≥ 0 by minimising the sum of artificial variables.
fn phase_one_feasible(a: &[Vec<f64>], b: &[f64]) -> Result<bool> {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    // tableau rows: m constraints then the cost row; columns: n structural,
    // m artificial, rhs
    let width = n + m + 1;
    let mut t = vec![vec![0.0f64; width]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    // cost row for min Σ artificials with the artificial basis priced out
    for j in 0..n {
        t[m][j] = -(0..m).map(|i| t[i][j]).sum::<f64>();
    }
    t[m][width - 1] = -(0..m).map(|i| t[i][width - 1]).sum::<f64>();

    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_iterations = 200_000;
    for _ in 0..max_iterations {
        // Bland: entering column is the lowest index with a negative reduced cost
        let entering = (0..n + m).find(|&j| t[m][j] < -1e-9);
        let Some(col) = entering else {
            let objective = -t[m][width - 1];
            return Ok(objective <= LP_FEASIBILITY_TOL);
        };
        // ratio test; ties resolved by the smallest basic-variable index
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > 1e-9 {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match pivot_row {
                    None => true,
                    Some(r) => {
                        ratio < best_ratio - 1e-12
                            || ((ratio - best_ratio).abs() <= 1e-12 && basis[i] < basis[r])
                    }
                };
                if better {
                    best_ratio = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        let Some(row) = pivot_row else {
            // cost unbounded below cannot happen for a phase-1 objective;
            // treat defensively as infeasible
            return Ok(false);
        };
        let pivot = t[row][col];
        for j in 0..width {
            t[row][j] /= pivot;
        }
        for i in 0..=m {
            if i == row {
                continue;
            }
            let factor = t[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                t[i][j] -= factor * t[row][j];
            }
        }
        basis[row] = col;
    }
    Err(Error::InvalidParameter(
        "simplex iteration limit exceeded".into(),
    ))
}

/// Membership in the causal polytope: true iff the table lies within `tol`
/// (L∞, entrywise) of a convex mixture of the enumerated vertices.
pub fn is_causal(table: &CorrelationTable, tol: f64) -> Result<bool> {
    let (m_a, m_b, k_a, k_b) = table.shape();
    let vertices = enumerate_causal_vertices(m_a, m_b, k_a, k_b)?;
    let entries = table.p.len();
    let n_lambda = vertices.len();
    // variables: λ (per vertex), then slack s⁺ per entry, then s⁻ per entry
    let n_vars = n_lambda + 2 * entries;
    let mut a = Vec::with_capacity(2 * entries + 1);
    let mut b = Vec::with_capacity(2 * entries + 1);
    for e in 0..entries {
        // Σ λ_j v_j[e] + s⁺_e = t[e] + tol
        let mut row = vec![0.0; n_vars];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v.p[e];
        }
        row[n_lambda + e] = 1.0;
        a.push(row);
        b.push(table.p[e] + tol);
        // Σ λ_j v_j[e] − s⁻_e = t[e] − tol
        let mut row = vec![0.0; n_vars];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v.p[e];
        }
        row[n_lambda + entries + e] = -1.0;
        a.push(row);
        b.push(table.p[e] - tol);
    }
    let mut row = vec![0.0; n_vars];
    for slot in row.iter_mut().take(n_lambda) {
        *slot = 1.0;
    }
    a.push(row);
    b.push(1.0);
    phase_one_feasible(&a, &b)
}

/// Which computational path produces the violating table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DemoRoute {
    /// Process matrix paired with instrument Choi operators.
    ProcessMatrix,
    /// Ancilla pseudo-density operators, one per question pair, reassembled
    /// into the process pairing through their preparation sectors.
    Pdm,
}

/// Output of [`paper_violation_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct ViolationReport {
    pub route: String,
    pub gyni: f64,
    pub lgyni: f64,
    pub causal: bool,
    pub table: CorrelationTable,
}

/// p_GYNI = 5/16·(1 + 1/√2), the violating value.
pub fn gyni_violation_value() -> f64 {
    (5.0 / 16.0) * (1.0 + 1.0 / 2.0_f64.sqrt())
}

/// p_LGYNI = p_GYNI + 1/4.
pub fn lgyni_violation_value() -> f64 {
    gyni_violation_value() + 0.25
}

/// The causally nonseparable process
/// W = ¼[𝟙⊗⁴ + (Z^{A_I}Z^{A_O}Z^{B_I}𝟙 + Z^{A_I}𝟙X^{B_I}X^{B_O})/√2].
pub fn violating_process() -> CMatrix {
    let id = CMatrix::identity(2);
    let z = sigma(3);
    let x = sigma(1);
    let term_a = kron_all(&[&z, &z, &z, &id]);
    let term_b = kron_all(&[&z, &id, &x, &x]);
    let sqrt2 = 2.0_f64.sqrt();
    CMatrix::identity(16)
        .add(&term_a.add(&term_b).scale(cr(1.0 / sqrt2)))
        .scale(cr(0.25))
}

/// CJ instrument elements for both parties: pass-through answering 1 on
/// question 0, and measure-Z-answer-and-reprepare-the-flipped-bit on
/// question 1.
pub fn violating_operations() -> [[CMatrix; 2]; 2] {
    let zero = CMatrix::zeros(4, 4);
    let pass = cj_identity(2);
    let flip = |a: usize| -> CMatrix {
        let meas = CMatrix::projector_onto(&CMatrix::basis_ket(2, a));
        let reprep = CMatrix::projector_onto(&CMatrix::basis_ket(2, a ^ 1));
        meas.kron(&reprep)
    };
    [[zero, pass], [flip(0), flip(1)]]
}

/// Ancilla pseudo-density operator for one question pair:
/// R_{xy} = ¼[|x⟩⟨x| ⊗ 𝟙 ⊗ |y⟩⟨y| ⊗ 𝟙 + (ZZZ𝟙 + Z𝟙XX)/√2].
pub fn ancilla_pdm(x: usize, y: usize) -> CMatrix {
    let id = CMatrix::identity(2);
    let z = sigma(3);
    let xp = sigma(1);
    let prep_x = CMatrix::projector_onto(&CMatrix::basis_ket(2, x));
    let prep_y = CMatrix::projector_onto(&CMatrix::basis_ket(2, y));
    let prep = kron_all(&[&prep_x, &id, &prep_y, &id]);
    let cross = kron_all(&[&z, &z, &z, &id])
        .add(&kron_all(&[&z, &id, &xp, &xp]))
        .scale(cr(1.0 / 2.0_f64.sqrt()));
    prep.add(&cross).scale(cr(0.25))
}

fn lab_slots() -> SpaceSpec {
    SpaceSpec::of(&[("A_I", 2), ("A_O", 2), ("B_I", 2), ("B_O", 2)])
}

fn table_from_process(w: &CMatrix) -> Result<CorrelationTable> {
    let spec = lab_slots();
    let ops = violating_operations();
    let transposed = spec.partial_transpose(w, &["A_I", "A_O", "B_I", "B_O"])?;
    let mut p = vec![0.0; 16];
    for x in 0..2usize {
        for y in 0..2usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    let joint = ops[x][a].kron(&ops[y][b]);
                    let prob = transposed.trace_product(&joint).re;
                    p[((a * 2 + b) * 2 + x) * 2 + y] = prob.max(0.0);
                }
            }
        }
    }
    CorrelationTable::new(2, 2, 2, 2, p)
}

/// Reproduce the causal-inequality violation through one of two routes.
///
/// The process-matrix route pairs W with the instruments directly. The PDM
/// route builds the four ancilla operators R_{xy}, checks that they share a
/// single question-independent signalling sector (and that substituting
/// maximally mixed preparations recovers a common process), and evaluates
/// the same pairing on the reconstruction. Both land on
/// p_GYNI = 5/16·(1+1/√2) ≈ 0.5335 and p_LGYNI ≈ 0.7835, outside the
/// causal polytope.
pub fn paper_violation_demo(route: DemoRoute) -> Result<ViolationReport> {
    let w = match route {
        DemoRoute::ProcessMatrix => violating_process(),
        DemoRoute::Pdm => {
            let id = CMatrix::identity(2);
            let mut cross: Option<CMatrix> = None;
            for x in 0..2usize {
                for y in 0..2usize {
                    let r = ancilla_pdm(x, y);
                    if (r.trace() - cr(1.0)).norm() > 1e-12 || !r.is_hermitian(1e-12) {
                        return Err(Error::InvalidState(
                            "ancilla pseudo-density operator is malformed".into(),
                        ));
                    }
                    let prep_x = CMatrix::projector_onto(&CMatrix::basis_ket(2, x));
                    let prep_y = CMatrix::projector_onto(&CMatrix::basis_ket(2, y));
                    let prep = kron_all(&[&prep_x, &id, &prep_y, &id]).scale(cr(0.25));
                    let sector = r.sub(&prep);
                    match &cross {
                        None => cross = Some(sector),
                        Some(existing) => {
                            if existing.max_abs_diff(&sector) > 1e-12 {
                                return Err(Error::InvalidState(
                                    "question-dependent signalling sector".into(),
                                ));
                            }
                        }
                    }
                }
            }
            let cross = cross.expect("four question pairs visited");
            CMatrix::identity(16).scale(cr(0.25)).add(&cross)
        }
    };
    let table = table_from_process(&w)?;
    let gyni = facet_value(&table, Facet::Gyni)?;
    let lgyni = facet_value(&table, Facet::Lgyni)?;
    let causal = is_causal(&table, LP_FEASIBILITY_TOL)?;
    Ok(ViolationReport {
        route: match route {
            DemoRoute::ProcessMatrix => "pm".into(),
            DemoRoute::Pdm => "pdm".into(),
        },
        gyni,
        lgyni,
        causal,
        table,
    })
}
