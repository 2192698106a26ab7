//! Distribution equivalence, recovery of the gauge relating two complete
//! representations, and classification of gauges as unitary or antiunitary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeTransform};
use crate::linalg::{self, ComplexMatrix};
use crate::model::ModelRepresentation;
use crate::probability::{probability_table, ProbabilityTable, TableEntry};
use crate::superop;
use crate::tol;

pub const DEFAULT_MAX_LEN: usize = 3;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Elementwise agreement required of a recovered gauge.
pub const GAUGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub i: usize,
    pub seq: Vec<usize>,
    pub k: usize,
    pub p_a: f64,
    pub p_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub equal: bool,
    pub max_dev: f64,
    pub witness: Option<Witness>,
}

fn compare_tables(a: &ProbabilityTable, b: &ProbabilityTable, tol: f64) -> Result<EquivalenceReport> {
    let (max_dev, at) = a.max_deviation(b)?;
    let equal = max_dev <= tol;
    let witness = if equal {
        None
    } else {
        at.map(|idx| {
            let TableEntry { state, seq, effect, p } = a.entries[idx].clone();
            Witness { i: state, seq, k: effect, p_a: p, p_b: b.entries[idx].p }
        })
    };
    Ok(EquivalenceReport { equal, max_dev, witness })
}

fn check_shapes(a: &ModelRepresentation, b: &ModelRepresentation) -> Result<()> {
    if a.dim != b.dim || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "dim {} {:?} vs dim {} {:?}",
            a.dim,
            a.shape(),
            b.dim,
            b.shape()
        )));
    }
    Ok(())
}

/// Compare the full outcome tables of both representations up to `max_len`.
pub fn distributions_equal(
    a: &ModelRepresentation,
    b: &ModelRepresentation,
    max_len: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    check_shapes(a, b)?;
    let ta = probability_table(a, max_len)?;
    let tb = probability_table(b, max_len)?;
    compare_tables(&ta, &tb, tol)
}

/// Greedily pick columns that raise the rank until `needed` are found.
pub(crate) fn independent_columns(cols: &[linalg::ComplexVector], needed: usize) -> (Vec<usize>, usize) {
    let n = cols.first().map_or(0, |c| c.len());
    let mut chosen: Vec<usize> = Vec::new();
    for (k, _) in cols.iter().enumerate() {
        if chosen.len() == needed {
            break;
        }
        let mut m = linalg::zeros(n, chosen.len() + 1);
        for (slot, &idx) in chosen.iter().chain(std::iter::once(&k)).enumerate() {
            m.set_column(slot, &cols[idx]);
        }
        if linalg::numerical_rank(&m, tol::RANK_REL) == chosen.len() + 1 {
            chosen.push(k);
        }
    }
    let rank = chosen.len();
    (chosen, rank)
}

/// Columns `vec(rho_i)` for the given state indices.
pub(crate) fn state_matrix(rep: &ModelRepresentation, idx: &[usize]) -> ComplexMatrix {
    let n = rep.dim * rep.dim;
    let mut m = linalg::zeros(n, idx.len());
    for (slot, &i) in idx.iter().enumerate() {
        m.set_column(slot, &linalg::vectorize(&rep.states[i].mat));
    }
    m
}

/// Rows `vec(E_k)^dagger` for the given effect indices.
pub(crate) fn effect_matrix(rep: &ModelRepresentation, idx: &[usize]) -> ComplexMatrix {
    let n = rep.dim * rep.dim;
    let mut m = linalg::zeros(idx.len(), n);
    for (slot, &k) in idx.iter().enumerate() {
        m.set_row(slot, &linalg::vectorize(&rep.effects[k].mat).adjoint());
    }
    m
}

/// Indices of `d^2` linearly independent states and effects.
pub fn complete_subsets(rep: &ModelRepresentation) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = rep.dim * rep.dim;
    let states: Vec<_> = rep.states.iter().map(|s| linalg::vectorize(&s.mat)).collect();
    let (si, srank) = independent_columns(&states, n);
    if srank < n {
        return Err(Error::NotComplete { what: "states", rank: srank, needed: n });
    }
    let effects: Vec<_> = rep.effects.iter().map(|e| linalg::vectorize(&e.mat)).collect();
    let (ei, erank) = independent_columns(&effects, n);
    if erank < n {
        return Err(Error::NotComplete { what: "effects", rank: erank, needed: n });
    }
    Ok((si, ei))
}

/// The gauge `T` with `apply_gauge(a, T) = b`, from
/// `T = M_in(a) M_in(b)^-1 = M_out(a)^-1 M_out(b)`.
pub fn recover_gauge_gst(a: &ModelRepresentation, b: &ModelRepresentation) -> Result<GaugeTransform> {
    check_shapes(a, b)?;
    let first = distributions_equal(a, b, 1, GAUGE_TOL)?;
    if !first.equal {
        return Err(Error::NotEquivalent(first.max_dev));
    }
    let (si, ei) = complete_subsets(a)?;
    let in_a = state_matrix(a, &si);
    let in_b = state_matrix(b, &si);
    let out_a = effect_matrix(a, &ei);
    let out_b = effect_matrix(b, &ei);
    let n = a.dim * a.dim;
    let inv_in_b = in_b
        .try_inverse()
        .ok_or(Error::NotComplete { what: "states", rank: n - 1, needed: n })?;
    let inv_out_a = out_a
        .try_inverse()
        .ok_or(Error::NotComplete { what: "effects", rank: n - 1, needed: n })?;
    let t_in = &in_a * inv_in_b;
    let t_out = inv_out_a * out_b;
    let scale = linalg::max_abs(&t_in).max(1.0);
    let gap = linalg::max_abs_diff(&t_in, &t_out) / scale;
    if !(gap <= GAUGE_TOL) {
        return Err(Error::InconsistentGauge(gap));
    }
    let t = GaugeTransform::from_superop(t_in, "recovered")?;
    let image = apply_gauge(a, &t)?;
    let dev = image.max_deviation(b);
    if !(dev <= GAUGE_TOL * scale) {
        return Err(Error::NotEquivalent(dev));
    }
    Ok(t)
}

/// A unitary or antiunitary transformation `X -> u X u^dagger`, optionally
/// followed by the transpose.
#[derive(Debug, Clone, Serialize)]
pub struct WignerTransform {
    #[serde(skip)]
    pub u: ComplexMatrix,
    pub antiunitary: bool,
}

impl WignerTransform {
    pub fn new(u: ComplexMatrix, antiunitary: bool) -> Result<Self> {
        let err = linalg::unitarity_error(&u);
        if err > tol::TOL_UNITARY {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { u, antiunitary })
    }

    pub fn gauge(&self) -> GaugeTransform {
        let g = if self.antiunitary { GaugeTransform::antiunitary(&self.u) } else { GaugeTransform::unitary(&self.u) };
        g.expect("u checked unitary")
    }

    pub fn superop(&self) -> ComplexMatrix {
        self.gauge().superop().clone()
    }

    pub fn inverse(&self) -> WignerTransform {
        let u = if self.antiunitary { self.u.transpose() } else { self.u.adjoint() };
        WignerTransform { u, antiunitary: self.antiunitary }
    }

    /// Same class and same `u` up to a global phase.
    pub fn approx_eq(&self, other: &WignerTransform, tol: f64) -> bool {
        self.antiunitary == other.antiunitary
            && linalg::max_abs_diff(&linalg::fix_global_phase(&self.u, 1e-8), &linalg::fix_global_phase(&other.u, 1e-8))
                <= tol
    }

    pub fn class_name(&self) -> &'static str {
        if self.antiunitary {
            "antiunitary"
        } else {
            "unitary"
        }
    }
}

#[derive(Debug, Clone)]
pub enum TransformClass {
    Unitary(ComplexMatrix),
    Antiunitary(ComplexMatrix),
    Other,
}

impl TransformClass {
    pub fn name(&self) -> &'static str {
        match self {
            TransformClass::Unitary(_) => "unitary",
            TransformClass::Antiunitary(_) => "antiunitary",
            TransformClass::Other => "other",
        }
    }

    pub fn wigner(&self) -> Option<WignerTransform> {
        match self {
            TransformClass::Unitary(u) => Some(WignerTransform { u: u.clone(), antiunitary: false }),
            TransformClass::Antiunitary(u) => Some(WignerTransform { u: u.clone(), antiunitary: true }),
            TransformClass::Other => None,
        }
    }
}

/// `u` with superoperator `u (x) conj(u)`, if the Choi matrix of `superop`
/// is PSD with rank 1 and trace `d` and the extracted operator is unitary.
pub fn unitary_from_superop(s: &ComplexMatrix) -> Option<ComplexMatrix> {
    let map = superop::QuantumMap::from_superop(s.clone(), "").ok()?;
    let d = map.dim();
    let choi = map.choi();
    if linalg::hermiticity_error(choi) > tol::TOL_HERM * d as f64 {
        return None;
    }
    if (choi.trace().re - d as f64).abs() > GAUGE_TOL * d as f64 {
        return None;
    }
    let (vals, vecs) = linalg::hermitian_eigen(choi);
    let top = *vals.last()?;
    if top <= 0.0 || vals[0] < -tol::TOL_PSD * d as f64 {
        return None;
    }
    if vals.iter().filter(|&&v| v.abs() > tol::RANK_REL * top).count() != 1 {
        return None;
    }
    let v = vecs.column(vals.len() - 1).into_owned() * linalg::c(top.sqrt(), 0.0);
    let u = linalg::fix_global_phase(&superop::operator_from_choi_vector(&v, d), 1e-8);
    if linalg::unitarity_error(&u) > GAUGE_TOL {
        return None;
    }
    Some(u)
}

pub fn classify_transform(t: &GaugeTransform) -> TransformClass {
    if let Some(u) = unitary_from_superop(t.superop()) {
        return TransformClass::Unitary(u);
    }
    // T = W U_u  <=>  T W = U_conj(u)
    let w = linalg::swap_operator(t.dim());
    if let Some(ubar) = unitary_from_superop(&(t.superop() * w)) {
        return TransformClass::Antiunitary(linalg::fix_global_phase(&ubar.conjugate(), 1e-8));
    }
    TransformClass::Other
}

/// The unitary or antiunitary transformation relating two representations,
/// or `None` when the relating gauge lies outside that class.
pub fn same_model(a: &ModelRepresentation, b: &ModelRepresentation) -> Result<Option<WignerTransform>> {
    let t = recover_gauge_gst(a, b)?;
    Ok(classify_transform(&t).wigner())
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceVerdict {
    pub equal: bool,
    pub max_dev: f64,
    pub witness: Option<Witness>,
    pub gauge_class: &'static str,
}

/// Distribution comparison plus, when possible, the class of the relating gauge.
pub fn equivalence_verdict(
    a: &ModelRepresentation,
    b: &ModelRepresentation,
    max_len: usize,
    tol: f64,
) -> Result<EquivalenceVerdict> {
    let report = distributions_equal(a, b, max_len, tol)?;
    let gauge_class = if report.equal {
        match recover_gauge_gst(a, b) {
            Ok(t) => classify_transform(&t).name(),
            Err(Error::NotComplete { .. }) | Err(Error::InconsistentGauge(_)) | Err(Error::NotEquivalent(_)) => "none",
            Err(e) => return Err(e),
        }
    } else {
        "none"
    };
    Ok(EquivalenceVerdict { equal: report.equal, max_dev: report.max_dev, witness: report.witness, gauge_class })
}
