//! Gauge transformations: invertible linear maps `T` on matrix space acting
//! on a representation as `({T^-1(rho)}, {T^-1 M T}, {T*(E)})`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::model::{is_physical, min_state_choi_eigenvalue, DensityMatrix, Effect, ModelRepresentation};
use crate::superop::{self, depolarizing_superop, QuantumMap};
use crate::tol;

/// Residual allowed in `T T^-1 = 1` before a transform counts as singular.
pub const INVERSE_CHECK: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GaugeTransform {
    superop: ComplexMatrix,
    inverse: ComplexMatrix,
    dim: usize,
    pub label: String,
}

impl GaugeTransform {
    pub fn from_superop(superop: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !superop.is_square() {
            return Err(Error::DimensionMismatch(format!("gauge shape {:?}", superop.shape())));
        }
        let dim = linalg::sqrt_dim(superop.nrows())
            .ok_or_else(|| Error::DimensionMismatch(format!("{} is not a perfect square", superop.nrows())))?;
        if !linalg::is_finite(&superop) {
            return Err(Error::InvalidArgument("non-finite gauge entry".into()));
        }
        let inverse = superop.clone().try_inverse().ok_or(Error::SingularTransform)?;
        let n = superop.nrows();
        let residual = linalg::max_abs_diff(&(&superop * &inverse), &linalg::identity(n));
        if !residual.is_finite() || residual > INVERSE_CHECK {
            return Err(Error::SingularTransform);
        }
        Ok(Self { superop, inverse, dim, label: label.into() })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_superop(linalg::identity(dim * dim), "id").expect("identity is invertible")
    }

    /// `X -> u X u^dagger`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let m = superop::map_from_unitary(u)?;
        Self::from_superop(m.superop().clone(), "unitary")
    }

    /// `X -> (u X u^dagger)^T`: the transpose map after a unitary conjugation.
    pub fn antiunitary(u: &ComplexMatrix) -> Result<Self> {
        let m = superop::map_from_unitary(u)?;
        let w = linalg::swap_operator(u.nrows());
        Self::from_superop(w * m.superop(), "antiunitary")
    }

    /// The transpose map `X -> X^T`.
    pub fn transpose(dim: usize) -> Self {
        Self::from_superop(linalg::swap_operator(dim), "transpose").expect("permutation")
    }

    pub fn depolarizing(f: f64, dim: usize) -> Result<Self> {
        if f == 0.0 || !f.is_finite() {
            return Err(Error::InvalidArgument(format!("depolarizing gauge needs finite F != 0, got {f}")));
        }
        Self::from_superop(depolarizing_superop(f, dim), format!("D_{f}"))
    }

    pub fn from_map(map: &QuantumMap) -> Result<Self> {
        Self::from_superop(map.superop().clone(), map.label.clone())
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn inverse_superop(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inverse(&self) -> GaugeTransform {
        GaugeTransform {
            superop: self.inverse.clone(),
            inverse: self.superop.clone(),
            dim: self.dim,
            label: format!("{}^-1", self.label),
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &GaugeTransform) -> Result<GaugeTransform> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch(format!("compose {} with {}", self.dim, first.dim)));
        }
        Ok(GaugeTransform {
            superop: &self.superop * &first.superop,
            inverse: &first.inverse * &self.inverse,
            dim: self.dim,
            label: format!("{}*{}", self.label, first.label),
        })
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        linalg::devectorize(&(&self.superop * linalg::vectorize(x)), self.dim)
    }

    pub fn apply_inverse(&self, x: &ComplexMatrix) -> ComplexMatrix {
        linalg::devectorize(&(&self.inverse * linalg::vectorize(x)), self.dim)
    }

    pub fn choi(&self) -> ComplexMatrix {
        self.as_map().choi().clone()
    }

    pub fn as_map(&self) -> QuantumMap {
        QuantumMap::from_superop(self.superop.clone(), self.label.clone()).expect("square superoperator")
    }

    pub fn condition_number(&self) -> f64 {
        linalg::condition_number(&self.superop)
    }
}

/// `T*` with `<<T*(A)|B>> = <<A|T(B)>>`: the conjugate-transpose superoperator.
///
/// For Hermitian-preserving `T` this coincides with the trace-form dual
/// `Tr[T*(A) B] = Tr[A T(B)]`.
pub fn dual(t: &GaugeTransform) -> GaugeTransform {
    GaugeTransform {
        superop: t.superop.adjoint(),
        inverse: t.inverse.adjoint(),
        dim: t.dim,
        label: format!("{}*", t.label),
    }
}

pub fn depolarizing(f: f64, dim: usize) -> Result<GaugeTransform> {
    GaugeTransform::depolarizing(f, dim)
}

/// `D_F` as a physical channel, `0 <= F <= 1`.
pub fn depolarizing_map(f: f64, dim: usize) -> Result<QuantumMap> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!("depolarizing channel needs 0 <= F <= 1, got {f}")));
    }
    QuantumMap::from_superop(depolarizing_superop(f, dim), format!("D_{f}"))
}

pub fn transpose_map(dim: usize) -> GaugeTransform {
    GaugeTransform::transpose(dim)
}

pub fn apply_gauge(rep: &ModelRepresentation, t: &GaugeTransform) -> Result<ModelRepresentation> {
    rep.validate()?;
    if rep.dim != t.dim {
        return Err(Error::DimensionMismatch(format!("model dimension {} vs gauge {}", rep.dim, t.dim)));
    }
    let adjoint = t.superop.adjoint();
    let d = rep.dim;
    let states = rep
        .states
        .iter()
        .map(|s| DensityMatrix::new(t.apply_inverse(&s.mat), s.label.clone()))
        .collect();
    let maps = rep
        .maps
        .iter()
        .map(|m| {
            QuantumMap::from_superop(&t.inverse * m.superop() * &t.superop, m.label.clone()).map(|q| q.with_extra(m.extra))
        })
        .collect::<Result<Vec<_>>>()?;
    let effects = rep
        .effects
        .iter()
        .map(|e| Effect::new(linalg::devectorize(&(&adjoint * linalg::vectorize(&e.mat)), d), e.label.clone()))
        .collect();
    Ok(ModelRepresentation {
        dim: d,
        states,
        maps,
        effects,
        unitary_complete: rep.unitary_complete,
        label: format!("{}|{}", rep.label, t.label),
    })
}

/// Upper end of the depolarizing window `1 <= F <= F_max` inside which
/// `D_{1/F}` keeps a physical representation physical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FMax {
    Finite(f64),
    Infinite,
}

impl FMax {
    pub fn value(self) -> f64 {
        match self {
            FMax::Finite(f) => f,
            FMax::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for FMax {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FMax::Finite(f) => s.serialize_f64(*f),
            FMax::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Eigenvalues this close to zero (or to `1/d`) are snapped onto the boundary.
const WINDOW_EDGE: f64 = 1e-12;

/// `(1 - d lambda_min)^-1` with `lambda_min` over all state and Choi eigenvalues.
pub fn max_depolarizing_f(rep: &ModelRepresentation) -> Result<(FMax, f64)> {
    if !is_physical(rep) {
        return Err(Error::NotPhysical);
    }
    let d = rep.dim as f64;
    let mut lambda = min_state_choi_eigenvalue(rep);
    if lambda <= WINDOW_EDGE {
        lambda = lambda.max(0.0);
        if lambda <= WINDOW_EDGE {
            lambda = 0.0;
        }
    }
    if lambda >= 1.0 / d - WINDOW_EDGE {
        return Ok((FMax::Infinite, lambda));
    }
    Ok((FMax::Finite(1.0 / (1.0 - d * lambda)), lambda))
}

#[derive(Debug, Clone, Serialize)]
pub struct HptpReport {
    pub pass: bool,
    pub hermiticity_error: f64,
    pub trace_error: f64,
}

/// Hermitian- and trace-preserving: Hermitian Choi matrix with `Tr_2(C) = 1`.
pub fn is_hptp(t: &GaugeTransform) -> HptpReport {
    let map = t.as_map();
    let hermiticity_error = linalg::hermiticity_error(map.choi());
    let trace_error = map.trace_preservation_error();
    HptpReport {
        pass: hermiticity_error <= tol::TOL_HERM && trace_error <= tol::TOL_TRACE,
        hermiticity_error,
        trace_error,
    }
}

/// `T(X) = sum_l eta_l F_l X F_l^dagger` with real weights.
#[derive(Debug, Clone)]
pub struct EtaKrausDecomposition {
    pub dim: usize,
    pub terms: Vec<(f64, ComplexMatrix)>,
}

impl EtaKrausDecomposition {
    pub fn superop(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut s = linalg::zeros(d * d, d * d);
        for (eta, f) in &self.terms {
            s += linalg::kron(f, &f.conjugate()) * linalg::c(*eta, 0.0);
        }
        s
    }

    /// `sum_l eta_l F_l^dagger F_l`.
    pub fn normalization(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut s = linalg::zeros(d, d);
        for (eta, f) in &self.terms {
            s += f.adjoint() * f * linalg::c(*eta, 0.0);
        }
        s
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|(e, _)| *e).collect()
    }
}

/// Eigendecomposition of the Choi matrix read back as weighted Kraus terms.
/// Zero-weight terms (below the rank threshold) are dropped.
pub fn eta_kraus(t: &GaugeTransform) -> Result<EtaKrausDecomposition> {
    if !is_hptp(t).pass {
        return Err(Error::NotHptp);
    }
    let d = t.dim;
    let (vals, vecs) = linalg::hermitian_eigen(&t.choi());
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let terms = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol::RANK_REL * top)
        .map(|(l, &eta)| (eta, superop::operator_from_choi_vector(&vecs.column(l).into_owned(), d)))
        .collect();
    Ok(EtaKrausDecomposition { dim: d, terms })
}

/// Well-conditioned random invertible gauge `1 + G/(2d)` with complex Gaussian `G`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<GaugeTransform> {
    let n = dim * dim;
    let g = linalg::ginibre(rng, n, n) * linalg::c(0.5 / dim as f64, 0.0);
    GaugeTransform::from_superop(linalg::identity(n) + g, "random")
}
