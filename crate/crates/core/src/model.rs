//! Representations `({rho_i}, {M_j}, {E_k})` and their physicality checks.
//!
//! Element types do not enforce physicality on construction: gauge
//! transformations routinely produce non-physical representations, and
//! those are inspected with [`check_physical`] rather than rejected.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::superop::QuantumMap;
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub mat: ComplexMatrix,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct Effect {
    pub mat: ComplexMatrix,
    pub label: String,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, label: impl Into<String>) -> Self {
        Self { mat, label: label.into() }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(linalg::identity(d) * linalg::c(1.0 / d as f64, 0.0), "mixed")
    }

    /// `|a><a|` in the computational basis.
    pub fn basis(d: usize, a: usize) -> Self {
        Self::new(linalg::matrix_unit(d, a, a), format!("|{a}>"))
    }
}

impl Effect {
    pub fn new(mat: ComplexMatrix, label: impl Into<String>) -> Self {
        Self { mat, label: label.into() }
    }

    pub fn basis(d: usize, a: usize) -> Self {
        Self::new(linalg::matrix_unit(d, a, a), format!("|{a}><{a}|"))
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl PartialEq for Effect {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

/// A concrete description of a device: preparations, operations, measurements.
#[derive(Debug, Clone)]
pub struct ModelRepresentation {
    pub dim: usize,
    pub states: Vec<DensityMatrix>,
    pub maps: Vec<QuantumMap>,
    pub effects: Vec<Effect>,
    /// Declared coverage of all unitary maps.
    pub unitary_complete: bool,
    pub label: String,
}

/// Value equality; labels are ignored.
impl PartialEq for ModelRepresentation {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.unitary_complete == other.unitary_complete
            && self.states == other.states
            && self.maps == other.maps
            && self.effects == other.effects
    }
}

impl ModelRepresentation {
    pub fn new(
        dim: usize,
        states: Vec<DensityMatrix>,
        maps: Vec<QuantumMap>,
        effects: Vec<Effect>,
    ) -> Result<Self> {
        let rep = Self { dim, states, maps, effects, unitary_complete: false, label: String::new() };
        rep.validate()?;
        Ok(rep)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_unitary_complete(mut self, flag: bool) -> Self {
        self.unitary_complete = flag;
        self
    }

    /// Checks that every element has the shared dimension and finite entries.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.mat.shape() != (d, d) || !linalg::is_finite(&s.mat) {
                return Err(Error::DimensionMismatch(format!("state {i} has shape {:?}", s.mat.shape())));
            }
        }
        for (k, e) in self.effects.iter().enumerate() {
            if e.mat.shape() != (d, d) || !linalg::is_finite(&e.mat) {
                return Err(Error::DimensionMismatch(format!("effect {k} has shape {:?}", e.mat.shape())));
            }
        }
        for (j, m) in self.maps.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::DimensionMismatch(format!("map {j} acts on dimension {}", m.dim())));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.states.len(), self.maps.len(), self.effects.len())
    }

    /// Largest elementwise deviation between matching elements of two
    /// same-shaped representations; infinite when shapes differ.
    pub fn max_deviation(&self, other: &ModelRepresentation) -> f64 {
        if self.dim != other.dim || self.shape() != other.shape() {
            return f64::INFINITY;
        }
        let s = self.states.iter().zip(&other.states).map(|(a, b)| linalg::max_abs_diff(&a.mat, &b.mat));
        let m = self.maps.iter().zip(&other.maps).map(|(a, b)| linalg::max_abs_diff(a.superop(), b.superop()));
        let e = self.effects.iter().zip(&other.effects).map(|(a, b)| linalg::max_abs_diff(&a.mat, &b.mat));
        s.chain(m).chain(e).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ModelRepresentation, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    State,
    Map,
    Effect,
}

/// Verdict for one element of a representation.
#[derive(Debug, Clone, Serialize)]
pub struct ElementVerdict {
    pub kind: ElementKind,
    pub index: usize,
    pub label: String,
    pub pass: bool,
    /// Signed eigenvalue margin: negative means violation. For states and
    /// maps this is the minimum (Choi) eigenvalue, for effects the smaller
    /// of `lambda_min` and `1 - lambda_max`.
    pub margin: f64,
    pub hermiticity_error: f64,
    /// Trace (states) or trace-preservation (maps) deviation; 0 for effects.
    pub trace_error: f64,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhysicalityReport {
    pub pass: bool,
    pub worst_margin: f64,
    pub elements: Vec<ElementVerdict>,
}

impl PhysicalityReport {
    pub fn failures(&self) -> impl Iterator<Item = &ElementVerdict> {
        self.elements.iter().filter(|e| !e.pass)
    }
}

pub fn check_physical(rep: &ModelRepresentation) -> PhysicalityReport {
    check_physical_with(rep, &Tolerances::default())
}

pub fn check_physical_with(rep: &ModelRepresentation, tol: &Tolerances) -> PhysicalityReport {
    let mut elements = Vec::new();
    for (i, s) in rep.states.iter().enumerate() {
        elements.push(state_verdict(i, s, tol));
    }
    for (j, m) in rep.maps.iter().enumerate() {
        elements.push(map_verdict(j, m, tol));
    }
    for (k, e) in rep.effects.iter().enumerate() {
        elements.push(effect_verdict(k, e, tol));
    }
    let pass = elements.iter().all(|e| e.pass);
    let worst_margin = elements.iter().map(|e| e.margin).fold(f64::INFINITY, f64::min);
    PhysicalityReport { pass, worst_margin, elements }
}

pub fn is_physical(rep: &ModelRepresentation) -> bool {
    check_physical(rep).pass
}

fn state_verdict(index: usize, s: &DensityMatrix, tol: &Tolerances) -> ElementVerdict {
    let herm = linalg::hermiticity_error(&s.mat);
    let tr = s.mat.trace();
    let trace_error = (tr - linalg::ONE).norm();
    let margin = linalg::min_eigenvalue(&s.mat);
    let reason = if herm > tol.herm {
        Some(format!("not Hermitian ({herm:.3e})"))
    } else if trace_error > tol.trace {
        Some(format!("trace {:.6} != 1", tr.re))
    } else if margin < -tol.psd {
        Some(format!("negative eigenvalue {margin:.6e}"))
    } else {
        None
    };
    ElementVerdict {
        kind: ElementKind::State,
        index,
        label: s.label.clone(),
        pass: reason.is_none(),
        margin,
        hermiticity_error: herm,
        trace_error,
        reason,
    }
}

fn map_verdict(index: usize, m: &QuantumMap, tol: &Tolerances) -> ElementVerdict {
    let herm = linalg::hermiticity_error(m.choi());
    let trace_error = m.trace_preservation_error();
    let margin = m.choi_min_eigenvalue();
    let reason = if herm > tol.herm {
        Some(format!("Choi not Hermitian ({herm:.3e})"))
    } else if trace_error > tol.trace {
        Some(format!("not trace-preserving ({trace_error:.3e})"))
    } else if margin < -tol.psd {
        Some(format!("not completely positive: Choi eigenvalue {margin:.6e}"))
    } else {
        None
    };
    ElementVerdict {
        kind: ElementKind::Map,
        index,
        label: m.label.clone(),
        pass: reason.is_none(),
        margin,
        hermiticity_error: herm,
        trace_error,
        reason,
    }
}

fn effect_verdict(index: usize, e: &Effect, tol: &Tolerances) -> ElementVerdict {
    let herm = linalg::hermiticity_error(&e.mat);
    let eig = linalg::hermitian_eigenvalues(&e.mat);
    let lo = eig.first().copied().unwrap_or(f64::NAN);
    let hi = eig.last().copied().unwrap_or(f64::NAN);
    let margin = lo.min(1.0 - hi);
    let reason = if herm > tol.herm {
        Some(format!("not Hermitian ({herm:.3e})"))
    } else if lo < -tol.psd {
        Some(format!("negative eigenvalue {lo:.6e}"))
    } else if hi > 1.0 + tol.psd {
        Some(format!("eigenvalue {hi:.6e} exceeds 1"))
    } else {
        None
    };
    ElementVerdict {
        kind: ElementKind::Effect,
        index,
        label: e.label.clone(),
        pass: reason.is_none(),
        margin,
        hermiticity_error: herm,
        trace_error: 0.0,
        reason,
    }
}

/// All states maximally mixed, all maps unital, all effects proportional to 1.
pub fn is_trivial(rep: &ModelRepresentation) -> bool {
    is_trivial_with(rep, crate::tol::TOL_PSD)
}

pub fn is_trivial_with(rep: &ModelRepresentation, tol: f64) -> bool {
    let d = rep.dim;
    let id = linalg::identity(d);
    let mixed = &id * linalg::c(1.0 / d as f64, 0.0);
    let states = rep.states.iter().all(|s| linalg::max_abs_diff(&s.mat, &mixed) <= tol);
    let maps = rep.maps.iter().all(|m| m.is_unital(tol));
    let effects = rep.effects.iter().all(|e| {
        let scaled = &id * (e.mat.trace() / d as f64);
        linalg::max_abs_diff(&e.mat, &scaled) <= tol
    });
    states && maps && effects
}

/// Smallest eigenvalue over all states and Choi matrices.
pub fn min_state_choi_eigenvalue(rep: &ModelRepresentation) -> f64 {
    let s = rep.states.iter().map(|s| linalg::min_eigenvalue(&s.mat));
    let m = rep.maps.iter().map(|m| m.choi_min_eigenvalue());
    s.chain(m).fold(f64::INFINITY, f64::min)
}
