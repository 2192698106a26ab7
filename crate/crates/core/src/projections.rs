//! Fixed sets of rank-1 projections built from pairs and triples of basis
//! vectors. Labels are 1-based: `pi_1`, `pix_1_2`, `piy_1_2`, `pix_1_2_3`,
//! `piy_1_2_3`, `piy_3_2_1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, Serialize)]
pub struct LabeledProjection {
    pub label: String,
    #[serde(skip)]
    pub vector: ComplexVector,
    #[serde(skip)]
    pub mat: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionSet {
    pub dim: usize,
    pub projections: Vec<LabeledProjection>,
}

impl ProjectionSet {
    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        self.projections.iter().map(|p| p.mat.clone()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.projections.iter().map(|p| p.label.as_str()).collect()
    }

    /// Rank of the span of the vectorized projections.
    pub fn span_rank(&self) -> usize {
        let n = self.dim * self.dim;
        let mut stacked = linalg::zeros(n, self.len());
        for (k, p) in self.projections.iter().enumerate() {
            stacked.set_column(k, &linalg::vectorize(&p.mat));
        }
        linalg::numerical_rank(&stacked, crate::tol::RANK_REL)
    }
}

fn push(out: &mut Vec<LabeledProjection>, label: String, terms: &[(usize, linalg::C64)], d: usize) {
    let norm = (terms.len() as f64).sqrt();
    let mut v = ComplexVector::zeros(d);
    for &(a, w) in terms {
        v[a] = w / norm;
    }
    let mat = linalg::outer(&v);
    out.push(LabeledProjection { label, vector: v, mat });
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("projection sets need dim >= 2, got {dim}")));
    }
    Ok(())
}

fn basis_and_pairs(d: usize) -> Vec<LabeledProjection> {
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let mut out = Vec::new();
    for a in 0..d {
        push(&mut out, format!("pi_{}", a + 1), &[(a, one)], d);
    }
    for a in 0..d {
        for b in a + 1..d {
            push(&mut out, format!("pix_{}_{}", a + 1, b + 1), &[(a, one), (b, one)], d);
            push(&mut out, format!("piy_{}_{}", a + 1, b + 1), &[(a, one), (b, i)], d);
        }
    }
    out
}

/// `pi_a`, `pix_ab`, `piy_ab`: `d^2` projections spanning the Hermitian matrices.
pub fn projection_set_pi_qpt(dim: usize) -> Result<ProjectionSet> {
    check_dim(dim)?;
    Ok(ProjectionSet { dim, projections: basis_and_pairs(dim) })
}

/// The pair set plus, for every `a < b < c`, the three triple projections
/// `(|a> + |b> + |c>)`, `(|a> + i|b> + i|c>)` and `(|c> + i|b> + i|a>)`.
pub fn projection_set_pi(dim: usize) -> Result<ProjectionSet> {
    check_dim(dim)?;
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let d = dim;
    let mut out = basis_and_pairs(d);
    for a in 0..d {
        for b in a + 1..d {
            for cc in b + 1..d {
                let (la, lb, lc) = (a + 1, b + 1, cc + 1);
                push(&mut out, format!("pix_{la}_{lb}_{lc}"), &[(a, one), (b, one), (cc, one)], d);
                push(&mut out, format!("piy_{la}_{lb}_{lc}"), &[(a, one), (b, i), (cc, i)], d);
                push(&mut out, format!("piy_{lc}_{lb}_{la}"), &[(cc, one), (b, i), (a, i)], d);
            }
        }
    }
    Ok(ProjectionSet { dim, projections: out })
}

/// `d + 2 C(d,2) + 3 C(d,3)`.
pub fn pi_cardinality(d: usize) -> usize {
    let pairs = d * d.saturating_sub(1) / 2;
    let triples = d * d.saturating_sub(1) * d.saturating_sub(2) / 6;
    d + 2 * pairs + 3 * triples
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities() {
        assert_eq!(projection_set_pi(2).unwrap().len(), 4);
        assert_eq!(projection_set_pi(3).unwrap().len(), 12);
        assert_eq!(projection_set_pi(4).unwrap().len(), 28);
        for d in 2..=5 {
            assert_eq!(projection_set_pi(d).unwrap().len(), pi_cardinality(d));
            let qpt = projection_set_pi_qpt(d).unwrap();
            assert_eq!(qpt.len(), d * d);
            assert_eq!(qpt.span_rank(), d * d);
        }
        assert!(projection_set_pi(1).is_err());
    }

    #[test]
    fn elements_are_projections() {
        for d in 2..=4 {
            for p in &projection_set_pi(d).unwrap().projections {
                assert!(linalg::max_abs_diff(&(&p.mat * &p.mat), &p.mat) < 1e-12, "{}", p.label);
                assert!(linalg::hermiticity_error(&p.mat) < 1e-12);
                assert!((p.mat.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn labels_and_overlaps() {
        let set = projection_set_pi(3).unwrap();
        assert_eq!(
            set.labels(),
            [
                "pi_1", "pi_2", "pi_3", "pix_1_2", "piy_1_2", "pix_1_3", "piy_1_3", "pix_2_3", "piy_2_3", "pix_1_2_3",
                "piy_1_2_3", "piy_3_2_1"
            ]
        );
        let m = |l: &str| set.projections.iter().find(|p| p.label == l).unwrap().mat.clone();
        let ov = |a: &str, b: &str| linalg::trace_product(&m(a), &m(b)).re;
        assert!((ov("pi_1", "pix_1_2") - 0.5).abs() < 1e-12);
        assert!((ov("pix_1_2_3", "pi_1") - 1.0 / 3.0).abs() < 1e-12);
        assert!((ov("pix_1_2", "piy_1_2") - 0.5).abs() < 1e-12);
        // |1 + i + i|^2 / 9
        assert!((ov("pix_1_2_3", "piy_1_2_3") - 5.0 / 9.0).abs() < 1e-12);
    }
}
