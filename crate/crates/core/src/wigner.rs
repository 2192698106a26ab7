//! Reconstruction of a unitary or antiunitary transformation from the images
//! of the projection set under its inverse.

use serde::Serialize;

use crate::equivalence::WignerTransform;
use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, C64};
use crate::projections::projection_set_pi;

/// Residual allowed when checking projections, overlaps and the final fit.
pub const FIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct WignerFit {
    /// Columns are the recovered basis vectors `|a'>`.
    #[serde(skip)]
    pub basis: ComplexMatrix,
    /// Relative phases of the pairs `(1, a)`; the first entry is zero.
    pub phases: Vec<f64>,
    /// `+1` for a unitary fit, `-1` for an antiunitary one.
    pub kappa: i32,
    pub transform: WignerTransform,
    /// Largest elementwise deviation between predicted and given images.
    pub residual: f64,
}

fn check_projection(label: &str, m: &ComplexMatrix, d: usize) -> Result<()> {
    if m.shape() != (d, d) || !linalg::is_finite(m) {
        return Err(Error::NotProjection(format!("{label}: shape {:?}", m.shape())));
    }
    let herm = linalg::hermiticity_error(m);
    let idem = linalg::max_abs_diff(&(m * m), m);
    let tr = (m.trace() - c(1.0, 0.0)).norm();
    if herm > FIT_TOL || idem > FIT_TOL || tr > FIT_TOL {
        return Err(Error::NotProjection(format!(
            "{label}: hermiticity {herm:.3e}, idempotence {idem:.3e}, trace {tr:.3e}"
        )));
    }
    Ok(())
}

/// `conj(2 <a'|img|b'>)` normalized to the unit circle.
fn pair_phase(img: &ComplexMatrix, basis: &ComplexMatrix, a: usize, b: usize, label: &str) -> Result<C64> {
    let va = basis.column(a);
    let vb = basis.column(b);
    let z = (va.adjoint() * img * vb)[(0, 0)] * 2.0;
    if (z.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::GramMismatch(format!("{label}: pair amplitude {:.6} != 1", z.norm())));
    }
    Ok(z.conj() / z.norm())
}

/// Given `images[k]` for the k-th element of the projection set (in its
/// canonical order), find `S` with `S^-1(pi_k) = images[k]`.
pub fn recover_wigner_from_projections(images: &[ComplexMatrix], dim: usize) -> Result<WignerFit> {
    let set = projection_set_pi(dim)?;
    if images.len() != set.len() {
        return Err(Error::ShapeMismatch(format!("{} images for a set of {}", images.len(), set.len())));
    }
    for (p, img) in set.projections.iter().zip(images) {
        check_projection(&p.label, img, dim)?;
    }
    for (i, (pi, ii)) in set.projections.iter().zip(images).enumerate() {
        for (pj, ij) in set.projections.iter().zip(images).skip(i + 1) {
            let want = linalg::trace_product(&pi.mat, &pj.mat).re;
            let got = linalg::trace_product(ii, ij).re;
            if (want - got).abs() > FIT_TOL {
                return Err(Error::GramMismatch(format!(
                    "Tr({} {}) = {got:.9}, expected {want:.9}",
                    pi.label, pj.label
                )));
            }
        }
    }
    let d = dim;
    let find = |label: String| -> usize {
        set.projections.iter().position(|p| p.label == label).expect("label in canonical set")
    };

    let mut basis = linalg::zeros(d, d);
    for a in 0..d {
        let (_, vecs) = linalg::hermitian_eigen(&images[a]);
        basis.set_column(a, &vecs.column(d - 1));
    }

    let mut kappa: Option<C64> = None;
    let mut phase_x = vec![c(1.0, 0.0); d];
    for a in 0..d {
        for b in a + 1..d {
            let lx = format!("pix_{}_{}", a + 1, b + 1);
            let ly = format!("piy_{}_{}", a + 1, b + 1);
            let ex = pair_phase(&images[find(lx.clone())], &basis, a, b, &lx)?;
            let ey = pair_phase(&images[find(ly.clone())], &basis, a, b, &ly)?;
            let k = ey / (c(0.0, 1.0) * ex);
            if a == 0 {
                phase_x[b] = ex;
            }
            match kappa {
                None => {
                    if (k - c(1.0, 0.0)).norm() > 1e-6 && (k + c(1.0, 0.0)).norm() > 1e-6 {
                        return Err(Error::GramMismatch(format!("kappa {k} is not +-1")));
                    }
                    kappa = Some(k);
                }
                Some(k12) => {
                    if (k - k12).norm() > 1e-6 {
                        return Err(Error::GramMismatch(format!("kappa for ({}, {}) is {k}, expected {k12}", a + 1, b + 1)));
                    }
                }
            }
        }
    }
    let kappa = if kappa.expect("dim >= 2").re > 0.0 { 1 } else { -1 };

    let mut u = linalg::zeros(d, d);
    for a in 0..d {
        let col = basis.column(a) * phase_x[a];
        u.set_column(a, &col);
    }
    let u = linalg::fix_global_phase(&u, 1e-8);
    let err = linalg::unitarity_error(&u);
    if err > FIT_TOL {
        return Err(Error::GramMismatch(format!("assembled operator is not unitary ({err:.3e})")));
    }
    let antiunitary = kappa < 0;
    // S^-1(pi) = u (pi or pi^T) u^dagger, so S = W^k U_{u^dagger}
    let inverse = WignerTransform { u: u.clone(), antiunitary: false };
    let mut residual: f64 = 0.0;
    for (p, img) in set.projections.iter().zip(images) {
        let src = if antiunitary { p.mat.transpose() } else { p.mat.clone() };
        let pred = inverse.gauge().apply(&src);
        residual = residual.max(linalg::max_abs_diff(&pred, img));
    }
    if residual > FIT_TOL {
        return Err(Error::GramMismatch(format!("fit residual {residual:.3e}")));
    }
    let phases = phase_x.iter().map(|z| z.arg()).collect();
    Ok(WignerFit {
        basis,
        phases,
        kappa,
        transform: WignerTransform { u: u.adjoint(), antiunitary },
        residual,
    })
}
