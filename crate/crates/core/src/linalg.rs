//! Dense complex linear algebra helpers shared by every module.
//!
//! Matrices on the d-dimensional Hilbert space are `d x d`; maps on matrix
//! space are `d^2 x d^2` superoperators acting on row-major vectorized
//! matrices, i.e. `|a><b|` is the basis vector `|a> (x) |b>` with index
//! `a * d + b`. Under this convention `X -> A X B` has superoperator
//! `A (x) B^T`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(r: usize, c: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(r, c)
}

/// Projector `|psi><psi|` (the vector is used as given, not normalized).
pub fn outer(psi: &ComplexVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

/// `|a><b|` on a d-dimensional space.
pub fn matrix_unit(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = zeros(d, d);
    m[(a, b)] = ONE;
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Row-major vectorization: entry `(a, b)` lands at index `a * cols + b`.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = m.shape();
    ComplexVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`vectorize`] for a square `d x d` target.
pub fn devectorize(v: &ComplexVector, d: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), d * d);
    ComplexMatrix::from_fn(d, d, |a, b| v[a * d + b])
}

/// Integer square root of a perfect square, if it is one.
pub fn sqrt_dim(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

/// Hilbert-Schmidt inner product `Tr(A^dagger B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise deviation from hermiticity.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
/// Columns of the returned matrix are the matching unit eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = hermitian_part(m);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::NAN)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol * s_max`.
pub fn numerical_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Spectral norm.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Tr_2` of an operator on `C^d (x) C^d`.
pub fn partial_trace_second(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |a, b| (0..d).map(|k| m[(a * d + k, b * d + k)]).sum())
}

/// Permutation `|a>|b> -> |b>|a>`; the superoperator of the transpose map.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(b * d + a, a * d + b)] = ONE;
        }
    }
    s
}

pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix on R.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { ONE };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    hermitian_part(&ginibre(rng, d, d))
}

/// Eigen-decomposition of a normal matrix through the complex Schur form.
/// Returns the diagonal of the triangular factor and the unitary factor.
pub fn normal_eigen(m: &ComplexMatrix) -> (Vec<C64>, ComplexMatrix) {
    let (q, t) = m.clone().schur().unpack();
    let values = (0..t.nrows()).map(|k| t[(k, k)]).collect();
    (values, q)
}

/// Rebuild `V diag(values) V^dagger`.
pub fn from_eigen(values: &[C64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let diag = ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(values));
    vectors * diag * vectors.adjoint()
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrt_psd(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigen(m);
    if vals.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let scaled: Vec<C64> = vals.iter().map(|v| c(1.0 / v.sqrt(), 0.0)).collect();
    Some(from_eigen(&scaled, &vecs))
}

/// Scale a matrix so that its first entry (column-major scan) with modulus
/// above `rel_tol * max|entry|` is real and positive.
pub fn fix_global_phase(u: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let top = max_abs(u);
    for col in 0..u.ncols() {
        for row in 0..u.nrows() {
            let z = u[(row, col)];
            if z.norm() > rel_tol * top {
                let phase = z.conj() / z.norm();
                return u * phase;
            }
        }
    }
    u.clone()
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Angle into `[0, 2pi)`.
pub fn wrap_positive(x: f64) -> f64 {
    x.rem_euclid(std::f64::consts::TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vectorization_is_row_major() {
        let zero = matrix_unit(2, 0, 0);
        let v = vectorize(&zero);
        assert_eq!(v.as_slice(), &[ONE, ZERO, ZERO, ZERO]);
        let v = vectorize(&identity(2));
        assert_eq!(v.as_slice(), &[ONE, ZERO, ZERO, ONE]);
        let m = ComplexMatrix::from_fn(3, 3, |a, b| c(a as f64, b as f64));
        assert_eq!(devectorize(&vectorize(&m), 3), m);
    }

    #[test]
    fn sandwich_superoperator_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ginibre(&mut rng, 3, 3);
        let b = ginibre(&mut rng, 3, 3);
        let x = ginibre(&mut rng, 3, 3);
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&a, &b.transpose()) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=5 {
            assert!(unitarity_error(&random_unitary(&mut rng, d)) < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 4);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let cv: Vec<C64> = vals.iter().map(|&v| c(v, 0.0)).collect();
        assert!(max_abs_diff(&from_eigen(&cv, &vecs), &h) < 1e-12);
    }

    #[test]
    fn normal_eigen_of_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_unitary(&mut rng, 4);
        let (vals, q) = normal_eigen(&u);
        assert!(vals.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
        assert!(max_abs_diff(&from_eigen(&vals, &q), &u) < 1e-10);
    }

    #[test]
    fn swap_is_transpose_superoperator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = ginibre(&mut rng, 3, 3);
        let y = devectorize(&(swap_operator(3) * vectorize(&x)), 3);
        assert!(max_abs_diff(&y, &x.transpose()) < 1e-15);
    }

    #[test]
    fn angle_wrapping() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_positive(-0.5) - (2.0 * PI - 0.5)).abs() < 1e-12);
    }
}
