//! Linear maps on matrix space in the superoperator and Choi pictures.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::tol;

/// A linear map on `d x d` matrices stored as its `d^2 x d^2` superoperator.
///
/// The Choi matrix `sum_ab |a><b| (x) M(|a><b|)` is computed once on
/// construction and kept alongside.
#[derive(Debug, Clone)]
pub struct QuantumMap {
    superop: ComplexMatrix,
    choi: ComplexMatrix,
    dim: usize,
    pub label: String,
    /// Declared as an extra, non-unitary element of a unitary-complete gate set.
    pub extra: bool,
}

impl PartialEq for QuantumMap {
    fn eq(&self, other: &Self) -> bool {
        self.superop == other.superop
    }
}

impl QuantumMap {
    pub fn from_superop(superop: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let dim = check_square_superop(&superop)?;
        let choi = superop_to_choi(&superop, dim);
        Ok(Self { superop, choi, dim, label: label.into(), extra: false })
    }

    pub fn from_choi(choi: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let dim = check_square_superop(&choi)?;
        let superop = choi_to_superop(&choi, dim);
        Ok(Self { superop, choi, dim, label: label.into(), extra: false })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_superop(linalg::identity(dim * dim), "id").expect("square")
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_extra(mut self, extra: bool) -> Self {
        self.extra = extra;
        self
    }

    /// Apply to a `d x d` matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        linalg::devectorize(&(&self.superop * linalg::vectorize(x)), self.dim)
    }

    /// `self` after `first`, i.e. `X -> self(first(X))`.
    pub fn compose(&self, first: &QuantumMap) -> Result<QuantumMap> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch(format!("compose {} with {}", self.dim, first.dim)));
        }
        QuantumMap::from_superop(&self.superop * &first.superop, format!("{}*{}", self.label, first.label))
    }

    /// Largest entry of `Tr_2(C) - 1`.
    pub fn trace_preservation_error(&self) -> f64 {
        let pt = linalg::partial_trace_second(&self.choi, self.dim);
        linalg::max_abs_diff(&pt, &linalg::identity(self.dim))
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.choi)
    }

    pub fn is_cptp(&self) -> bool {
        self.trace_preservation_error() <= tol::TOL_TRACE
            && linalg::hermiticity_error(&self.choi) <= tol::TOL_HERM
            && self.choi_min_eigenvalue() >= -tol::TOL_PSD
    }

    /// `M(1) = 1` within `tol`.
    pub fn is_unital(&self, tol: f64) -> bool {
        let id = linalg::identity(self.dim);
        linalg::max_abs_diff(&self.apply(&id), &id) <= tol
    }
}

fn check_square_superop(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("superoperator shape {:?}", m.shape())));
    }
    if !linalg::is_finite(m) {
        return Err(Error::InvalidArgument("non-finite superoperator entry".into()));
    }
    linalg::sqrt_dim(m.nrows())
        .ok_or_else(|| Error::DimensionMismatch(format!("{} is not a perfect square", m.nrows())))
}

/// Superoperator to Choi: `C[(a c), (b e)] = S[(c e), (a b)]`.
fn superop_to_choi(s: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = linalg::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    out[(a * d + cc, b * d + e)] = s[(cc * d + e, a * d + b)];
                }
            }
        }
    }
    out
}

/// Inverse of [`superop_to_choi`].
fn choi_to_superop(choi: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = linalg::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    out[(cc * d + e, a * d + b)] = choi[(a * d + cc, b * d + e)];
                }
            }
        }
    }
    out
}

pub fn choi_of(map: &QuantumMap) -> ComplexMatrix {
    map.choi().clone()
}

pub fn superop_from_choi(choi: &ComplexMatrix) -> Result<QuantumMap> {
    QuantumMap::from_choi(choi.clone(), "choi")
}

/// `X -> sum_l K_l X K_l^dagger`.
pub fn map_from_kraus(kraus: &[ComplexMatrix]) -> Result<QuantumMap> {
    let first = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
    let d = first.nrows();
    let mut s = linalg::zeros(d * d, d * d);
    for k in kraus {
        if k.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("Kraus operator shape {:?}", k.shape())));
        }
        s += linalg::kron(k, &k.conjugate());
    }
    QuantumMap::from_superop(s, "kraus")
}

/// `X -> u X u^dagger`, superoperator `u (x) conj(u)`.
pub fn map_from_unitary(u: &ComplexMatrix) -> Result<QuantumMap> {
    let err = linalg::unitarity_error(u);
    if err > tol::TOL_UNITARY {
        return Err(Error::NotUnitary(err));
    }
    QuantumMap::from_superop(linalg::kron(u, &u.conjugate()), "unitary")
}

/// The rank-1 Choi vector `sum_a |a> (x) K|a>` reshaped back into `K`.
pub(crate) fn operator_from_choi_vector(v: &linalg::ComplexVector, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |row, col| v[col * d + row])
}

/// `X -> F X + (1 - F) Tr(X) 1/d`.
pub fn depolarizing_superop(f: f64, d: usize) -> ComplexMatrix {
    let id = linalg::vectorize(&linalg::identity(d));
    linalg::identity(d * d) * linalg::c(f, 0.0) + (&id * id.transpose()) * linalg::c((1.0 - f) / d as f64, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_unitary, ginibre};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_choi_pattern() {
        let id = QuantumMap::identity(2);
        let choi = id.choi();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if [0, 3].contains(&r) && [0, 3].contains(&col) { 1.0 } else { 0.0 };
                assert_eq!(choi[(r, col)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn choi_superop_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kraus: Vec<_> = (0..3).map(|_| ginibre(&mut rng, 3, 3)).collect();
        let m = map_from_kraus(&kraus).unwrap();
        let back = superop_from_choi(&choi_of(&m)).unwrap();
        assert!(linalg::max_abs_diff(back.superop(), m.superop()) < 1e-12);
    }

    #[test]
    fn unitary_map_matches_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 3);
        let x = ginibre(&mut rng, 3, 3);
        let m = map_from_unitary(&u).unwrap();
        assert!(linalg::max_abs_diff(&m.apply(&x), &(&u * &x * u.adjoint())) < 1e-12);
        assert!(m.is_cptp());
    }

    #[test]
    fn non_unitary_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = ginibre(&mut rng, 2, 2);
        assert!(matches!(map_from_unitary(&g), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(QuantumMap::from_superop(linalg::zeros(3, 3), "x").is_err());
        assert!(QuantumMap::from_superop(linalg::zeros(4, 2), "x").is_err());
        assert!(map_from_kraus(&[]).is_err());
    }

    #[test]
    fn trace_of_tp_choi_is_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(&mut rng, 3);
        let m = map_from_unitary(&u).unwrap();
        assert!((m.choi().trace() - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn depolarized_choi_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = 3;
        let kraus: Vec<_> = (0..2).map(|_| ginibre(&mut rng, d, d)).collect();
        let m = crate::random::normalize_kraus(&kraus).unwrap();
        let f = 0.37;
        let dep = QuantumMap::from_superop(depolarizing_superop(f, d), "D").unwrap();
        let composed = dep.compose(&m).unwrap();
        let expected = m.choi() * c(f, 0.0) + linalg::identity(d * d) * c((1.0 - f) / d as f64, 0.0);
        assert!(linalg::max_abs_diff(composed.choi(), &expected) < 1e-12);
    }
}
