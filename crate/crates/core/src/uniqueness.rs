//! When is a physical representation determined by its outcome statistics up
//! to unitary and antiunitary transformations?
//!
//! Full-rank models are never unique: shrinking every state and Choi matrix
//! toward the maximally mixed one with an inverse depolarizing gauge gives a
//! physical, distribution-equivalent model with different spectra. The
//! sufficient conditions need either the projection set among the states and
//! effects, or every unitary among the maps together with one singular state
//! and one singular effect.

use serde::Serialize;

use crate::equivalence::unitary_from_superop;
use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, depolarizing, max_depolarizing_f, FMax};
use crate::linalg::{self, c, ComplexMatrix, C64};
use crate::model::{is_physical, is_trivial, ModelRepresentation};
use crate::projections::projection_set_pi;
use crate::superop::{depolarizing_superop, QuantumMap};
use crate::tol;

pub use crate::projections::{projection_set_pi_qpt, LabeledProjection, ProjectionSet};

/// Largest counterexample strength used by [`necessary_condition`].
pub const MAX_COUNTEREXAMPLE_F: f64 = 2.0;
/// Elementwise tolerance for projection-set membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// `|det - 1|` allowed for a unitary channel.
pub const DET_TOL: f64 = 1e-8;
/// Angular tolerance of the super-non-degeneracy scan.
pub const SND_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Trivial,
    NotUnique,
    NecessaryConditionHolds,
    UniqueByProjections,
    UniqueByUnitaryCompleteness,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Trivial => "trivial",
            VerdictStatus::NotUnique => "not_unique",
            VerdictStatus::NecessaryConditionHolds => "necessary_condition_holds",
            VerdictStatus::UniqueByProjections => "unique_by_projections",
            VerdictStatus::UniqueByUnitaryCompleteness => "unique_by_unitary_completeness",
        }
    }
}

#[derive(Debug, Clone)]
pub struct UniquenessVerdict {
    pub status: VerdictStatus,
    pub lambda_min: Option<f64>,
    pub f_max: Option<FMax>,
    /// Depolarizing strength used for the counterexample.
    pub f: Option<f64>,
    pub state_det_product: f64,
    pub choi_det_product: f64,
    /// Largest eigenvalue shift between an element and its counterpart in the counterexample.
    pub spectral_shift: Option<f64>,
    pub matched_projections: Vec<String>,
    pub singular_states: Vec<String>,
    pub singular_effects: Vec<String>,
    pub counterexample: Option<ModelRepresentation>,
}

impl UniquenessVerdict {
    fn new(status: VerdictStatus, rep: &ModelRepresentation) -> Self {
        let state_det_product = rep.states.iter().map(|s| s.mat.determinant().re).product();
        let choi_det_product = rep.maps.iter().map(|m| m.choi().determinant().re).product();
        Self {
            status,
            lambda_min: None,
            f_max: None,
            f: None,
            state_det_product,
            choi_det_product,
            spectral_shift: None,
            matched_projections: Vec::new(),
            singular_states: singular_labels(rep.states.iter().map(|s| (&s.label, &s.mat))),
            singular_effects: singular_labels(rep.effects.iter().map(|e| (&e.label, &e.mat))),
            counterexample: None,
        }
    }
}

fn singular_labels<'a>(items: impl Iterator<Item = (&'a String, &'a ComplexMatrix)>) -> Vec<String> {
    items
        .enumerate()
        .filter(|(_, (_, m))| linalg::min_eigenvalue(m) <= tol::SINGULAR_EIG)
        .map(|(i, (l, _))| if l.is_empty() { i.to_string() } else { l.clone() })
        .collect()
}

fn require_physical(rep: &ModelRepresentation) -> Result<()> {
    rep.validate()?;
    if !is_physical(rep) {
        return Err(Error::NotPhysical);
    }
    Ok(())
}

/// `apply_gauge(rep, D_{1/F})` for `1 <= F <= F_max`.
pub fn counterexample(rep: &ModelRepresentation, f: f64) -> Result<ModelRepresentation> {
    require_physical(rep)?;
    if is_trivial(rep) {
        return Err(Error::TrivialModel);
    }
    let (f_max, _) = max_depolarizing_f(rep)?;
    let edge = f_max.value() * (1.0 + 1e-12);
    if !(f >= 1.0 && f <= edge) {
        return Err(Error::FOutOfWindow { f, f_max: f_max.value() });
    }
    let out = apply_gauge(rep, &depolarizing(1.0 / f, rep.dim)?)?;
    Ok(out.with_label(format!("{}|D_1/{f}", rep.label)))
}

/// Largest difference between sorted spectra of corresponding states,
/// effects and Choi matrices.
pub fn spectral_shift(a: &ModelRepresentation, b: &ModelRepresentation) -> f64 {
    let gap = |x: &ComplexMatrix, y: &ComplexMatrix| {
        let ex = linalg::hermitian_eigenvalues(x);
        let ey = linalg::hermitian_eigenvalues(y);
        ex.iter().zip(&ey).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let s = a.states.iter().zip(&b.states).map(|(x, y)| gap(&x.mat, &y.mat));
    let m = a.maps.iter().zip(&b.maps).map(|(x, y)| gap(x.choi(), y.choi()));
    let e = a.effects.iter().zip(&b.effects).map(|(x, y)| gap(&x.mat, &y.mat));
    s.chain(m).chain(e).fold(0.0, f64::max)
}

/// Full-rank states and Choi matrices rule uniqueness out; otherwise the
/// necessary condition holds (which is not a uniqueness claim).
pub fn necessary_condition(rep: &ModelRepresentation) -> Result<UniquenessVerdict> {
    require_physical(rep)?;
    if is_trivial(rep) {
        return Ok(UniquenessVerdict::new(VerdictStatus::Trivial, rep));
    }
    let (f_max, lambda) = max_depolarizing_f(rep)?;
    if lambda > tol::SINGULAR_EIG {
        let f = ((1.0 + f_max.value()) / 2.0).min(MAX_COUNTEREXAMPLE_F);
        let cx = counterexample(rep, f)?;
        let mut v = UniquenessVerdict::new(VerdictStatus::NotUnique, rep);
        v.lambda_min = Some(lambda);
        v.f_max = Some(f_max);
        v.f = Some(f);
        v.spectral_shift = Some(spectral_shift(rep, &cx));
        v.counterexample = Some(cx);
        return Ok(v);
    }
    let mut v = UniquenessVerdict::new(VerdictStatus::NecessaryConditionHolds, rep);
    v.lambda_min = Some(lambda);
    v.f_max = Some(f_max);
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionConditionReport {
    pub pass: bool,
    /// Labels found among both the states and the effects.
    pub matched: Vec<String>,
    pub missing: Vec<String>,
}

fn contains(list: &[&ComplexMatrix], target: &ComplexMatrix) -> bool {
    list.iter().any(|m| m.shape() == target.shape() && linalg::max_abs_diff(m, target) <= MEMBERSHIP_TOL)
}

/// Every element of the projection set appears, as an exact matrix, among
/// the states and among the effects.
pub fn projection_condition(rep: &ModelRepresentation) -> Result<ProjectionConditionReport> {
    require_physical(rep)?;
    let set = projection_set_pi(rep.dim)?;
    let states: Vec<&ComplexMatrix> = rep.states.iter().map(|s| &s.mat).collect();
    let effects: Vec<&ComplexMatrix> = rep.effects.iter().map(|e| &e.mat).collect();
    let (mut matched, mut missing) = (Vec::new(), Vec::new());
    for p in &set.projections {
        if contains(&states, &p.mat) && contains(&effects, &p.mat) {
            matched.push(p.label.clone());
        } else {
            missing.push(p.label.clone());
        }
    }
    Ok(ProjectionConditionReport { pass: missing.is_empty(), matched, missing })
}

/// `u` if the map is CPTP with unit superoperator determinant.
pub fn is_unitary_map(map: &QuantumMap) -> Option<ComplexMatrix> {
    if !map.is_cptp() {
        return None;
    }
    if (map.superop().determinant() - c(1.0, 0.0)).norm() > DET_TOL {
        return None;
    }
    unitary_from_superop(map.superop())
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitaryCompletenessReport {
    pub pass: bool,
    pub unitary_complete: bool,
    /// Maps that are neither unitary nor flagged as extra.
    pub non_unitary_maps: Vec<String>,
    pub singular_states: Vec<String>,
    pub singular_effects: Vec<String>,
}

/// Declared unitary completeness, every non-extra map unitary, and at least
/// one singular state and one singular effect.
pub fn unitary_completeness_condition(rep: &ModelRepresentation) -> Result<UnitaryCompletenessReport> {
    require_physical(rep)?;
    let non_unitary_maps: Vec<String> = rep
        .maps
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.extra && is_unitary_map(m).is_none())
        .map(|(j, m)| if m.label.is_empty() { j.to_string() } else { m.label.clone() })
        .collect();
    let singular_states = singular_labels(rep.states.iter().map(|s| (&s.label, &s.mat)));
    let singular_effects = singular_labels(rep.effects.iter().map(|e| (&e.label, &e.mat)));
    let pass = rep.unitary_complete
        && non_unitary_maps.is_empty()
        && !singular_states.is_empty()
        && !singular_effects.is_empty();
    Ok(UnitaryCompletenessReport { pass, unitary_complete: rep.unitary_complete, non_unitary_maps, singular_states, singular_effects })
}

/// Trivial, then the two sufficient conditions, then the necessary one.
pub fn assess(rep: &ModelRepresentation) -> Result<UniquenessVerdict> {
    require_physical(rep)?;
    if is_trivial(rep) {
        return Ok(UniquenessVerdict::new(VerdictStatus::Trivial, rep));
    }
    let t2 = projection_condition(rep)?;
    if t2.pass {
        let mut v = UniquenessVerdict::new(VerdictStatus::UniqueByProjections, rep);
        v.matched_projections = t2.matched;
        return Ok(v);
    }
    if unitary_completeness_condition(rep)?.pass {
        return Ok(UniquenessVerdict::new(VerdictStatus::UniqueByUnitaryCompleteness, rep));
    }
    let mut v = necessary_condition(rep)?;
    v.matched_projections = t2.matched;
    Ok(v)
}

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    let err = linalg::unitarity_error(u);
    if err > tol::TOL_UNITARY {
        return Err(Error::NotUnitary(err));
    }
    Ok(())
}

/// Eigenphases in `[0, 2pi)` and the unitary eigenbasis.
pub fn eigenphases(u: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_unitary(u)?;
    let (vals, q) = linalg::normal_eigen(u);
    Ok((vals.iter().map(|z| linalg::wrap_positive(z.arg())).collect(), q))
}

fn snd_from_phases(theta: &[f64]) -> bool {
    let d = theta.len();
    let mut singles = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            singles.push(theta[a] - theta[b]);
        }
    }
    for c_ in 0..d {
        for d_ in 0..d {
            if c_ == d_ {
                continue;
            }
            for e in 0..d {
                if e == d_ {
                    continue;
                }
                for f in 0..d {
                    if e == f || c_ == f {
                        continue;
                    }
                    let pair = theta[c_] - theta[d_] + theta[e] - theta[f];
                    if singles.iter().any(|s| linalg::wrap_angle(pair - s).abs() <= SND_ANGLE_TOL) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// No product of two eigenvalue ratios (with the index restrictions
/// `c != d, e != f, c != f, d != e`) equals a single eigenvalue ratio.
pub fn super_non_degenerate(u: &ComplexMatrix) -> Result<bool> {
    let (theta, _) = eigenphases(u)?;
    Ok(snd_from_phases(&theta))
}

/// Same eigenbasis, phases truncated to `N` decimal digits of a turn plus
/// distinct offsets `4^-a 10^-3N` turns. Base 4 keeps every sum of three
/// offsets distinct; halving offsets would give
/// `(x1 - x2) + (x3 - x2) = x2 - x3` for any three eigenvalues.
pub fn snd_approximant(u: &ComplexMatrix, n: u32) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("approximant order must be >= 1".into()));
    }
    let (theta, q) = eigenphases(u)?;
    let scale = 10f64.powi(n as i32);
    let fine = 10f64.powi(-3 * n as i32);
    let values: Vec<C64> = theta
        .iter()
        .enumerate()
        .map(|(a, t)| {
            let turns = (scale * t / std::f64::consts::TAU).floor() / scale + 0.25f64.powi(a as i32 + 1) * fine;
            C64::from_polar(1.0, std::f64::consts::TAU * turns)
        })
        .collect();
    Ok(linalg::from_eigen(&values, &q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum UnitaryRelation {
    /// `spec(uB) = e^{i omega} spec(uA)`.
    UnitaryRelated { omega: f64 },
    /// `spec(uB) = e^{i omega} conj(spec(uA))`.
    AntiunitaryRelated { omega: f64 },
    Unrelated,
}

/// Phase tolerance for matching spectra in [`classify_unitary_relation`].
pub const RELATION_TOL: f64 = 1e-8;

fn align(target: &[f64], b: &[f64]) -> Option<f64> {
    let mut t = target.to_vec();
    t.sort_by(f64::total_cmp);
    let mut bs = b.to_vec();
    bs.sort_by(f64::total_cmp);
    for k in 0..t.len() {
        let omega = linalg::wrap_angle(bs[0] - t[k]);
        let mut used = vec![false; t.len()];
        let ok = bs.iter().all(|&x| {
            let hit = (0..t.len()).find(|&m| !used[m] && linalg::wrap_angle(x - t[m] - omega).abs() <= RELATION_TOL);
            if let Some(m) = hit {
                used[m] = true;
            }
            hit.is_some()
        });
        if ok {
            return Some(omega);
        }
    }
    None
}

/// Whether the spectrum of `uB` is a rotation of the spectrum of `uA` (or of
/// its complex conjugate). Only guaranteed to decide the relation of the maps
/// when one of the inputs is super-non-degenerate.
pub fn classify_unitary_relation(ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<UnitaryRelation> {
    if ua.shape() != ub.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", ua.shape(), ub.shape())));
    }
    let (ta, _) = eigenphases(ua)?;
    let (tb, _) = eigenphases(ub)?;
    if let Some(omega) = align(&ta, &tb) {
        return Ok(UnitaryRelation::UnitaryRelated { omega });
    }
    let neg: Vec<f64> = ta.iter().map(|t| linalg::wrap_positive(-t)).collect();
    if let Some(omega) = align(&neg, &tb) {
        return Ok(UnitaryRelation::AntiunitaryRelated { omega });
    }
    Ok(UnitaryRelation::Unrelated)
}

#[derive(Debug, Clone)]
pub struct CompleteSet {
    /// Unitaries `w` with `family[k] = w A w^dagger`.
    pub unitaries: Vec<ComplexMatrix>,
    pub family: Vec<ComplexMatrix>,
    pub rank: usize,
}

fn permutation(d: usize, image: impl Fn(usize) -> usize) -> ComplexMatrix {
    let mut p = linalg::zeros(d, d);
    for a in 0..d {
        p[(image(a), a)] = c(1.0, 0.0);
    }
    p
}

/// Fixes the first basis vector and cycles the rest: `|2> -> |d>`, `|a> -> |a-1>`.
pub fn loop_permutation(d: usize) -> ComplexMatrix {
    permutation(d, |a| match a {
        0 => 0,
        1 => d - 1,
        _ => a - 1,
    })
}

pub fn pair_swap(d: usize, a: usize, b: usize) -> ComplexMatrix {
    permutation(d, |x| if x == a { b } else if x == b { a } else { x })
}

/// Unitary taking `|1>` to each state of the pair projection set.
fn frame_unitaries(d: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<ComplexMatrix> = (0..d).map(|a| pair_swap(d, 0, a)).collect();
    for a in 0..d {
        for b in a + 1..d {
            for w in [c(1.0, 0.0), c(0.0, 1.0)] {
                // |a> -> (|a> + w|b>)/sqrt2 inside the (a, b) plane
                let mut r = linalg::identity(d);
                r[(a, a)] = c(h, 0.0);
                r[(b, a)] = w * h;
                r[(a, b)] = -w.conj() * h;
                r[(b, b)] = c(h, 0.0);
                out.push(r * pair_swap(d, 0, a));
            }
        }
    }
    out
}

/// A finite family of unitary conjugates of `A` spanning all `d x d` matrices.
pub fn complete_set_from(a: &ComplexMatrix) -> Result<CompleteSet> {
    if !a.is_square() || a.nrows() < 2 {
        return Err(Error::DimensionMismatch(format!("shape {:?}", a.shape())));
    }
    if linalg::hermiticity_error(a) > tol::TOL_HERM {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let d = a.nrows();
    let scale = linalg::max_abs(a).max(f64::MIN_POSITIVE);
    let tr = a.trace().re;
    let centered = a - linalg::identity(d) * c(tr / d as f64, 0.0);
    if linalg::max_abs(&centered) <= tol::RANK_REL * scale {
        return Err(Error::TrivialMatrix);
    }
    if tr.abs() <= tol::RANK_REL * scale {
        return Err(Error::TracelessMatrix);
    }
    let (_, mut v) = linalg::hermitian_eigen(a);
    // descending eigenvalue order
    let cols: Vec<_> = (0..d).rev().map(|k| v.column(k).into_owned()).collect();
    for (k, col) in cols.iter().enumerate() {
        v.set_column(k, col);
    }

    let lp = loop_permutation(d);
    let mut perms = Vec::new();
    let mut power = linalg::identity(d);
    for _ in 0..d.saturating_sub(1).max(1) {
        perms.push(power.clone());
        for x in 0..d {
            for y in x + 1..d {
                perms.push(&power * pair_swap(d, x, y));
            }
        }
        power = &lp * power;
    }

    let mut unitaries = Vec::new();
    for w in frame_unitaries(d) {
        for p in &perms {
            let vw = &v * &w * p * v.adjoint();
            unitaries.push(vw);
        }
    }
    let family: Vec<ComplexMatrix> = unitaries.iter().map(|w| w * a * w.adjoint()).collect();
    let mut stacked = linalg::zeros(d * d, family.len());
    for (k, m) in family.iter().enumerate() {
        stacked.set_column(k, &linalg::vectorize(m));
    }
    let rank = linalg::numerical_rank(&stacked, tol::RANK_REL);
    Ok(CompleteSet { unitaries, family, rank })
}

/// `F` if the superoperator equals `D_F`: scalar on the traceless subspace
/// and unital.
pub fn fit_depolarizing(superop: &ComplexMatrix) -> Option<f64> {
    let d = linalg::sqrt_dim(superop.nrows())?;
    if !superop.is_square() || d == 0 {
        return None;
    }
    let n = d * d;
    let one = linalg::vectorize(&linalg::identity(d));
    let perp = linalg::identity(n) - (&one * one.adjoint()) * c(1.0 / d as f64, 0.0);
    let f = (&perp * superop * &perp).trace() / c((n - 1) as f64, 0.0);
    if f.im.abs() > DET_TOL {
        return None;
    }
    let f = f.re;
    if linalg::max_abs_diff(superop, &depolarizing_superop(f, d)) > DET_TOL {
        return None;
    }
    let image = superop * &one;
    if image.iter().zip(one.iter()).any(|(x, y)| (x - y).norm() > tol::TOL_TRACE) {
        return None;
    }
    Some(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{distributions_equal, same_model};
    use crate::gauge::depolarizing_map;
    use crate::linalg::random_unitary;
    use crate::model::{check_physical, DensityMatrix, Effect};
    use crate::random::{random_model, rng_from_seed, RandomModelOptions};
    use crate::superop::map_from_unitary;

    fn diag(vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&linalg::ComplexVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x, 0.0))))
    }

    /// Qubit model whose smallest state or Choi eigenvalue is 0.1.
    fn lambda_point_one() -> ModelRepresentation {
        ModelRepresentation::new(
            2,
            vec![DensityMatrix::new(diag(&[0.9, 0.1]), "r0"), DensityMatrix::new(diag(&[0.3, 0.7]), "r1")],
            vec![depolarizing_map(0.6, 2).unwrap()],
            vec![Effect::new(diag(&[0.8, 0.3]), "e0")],
        )
        .unwrap()
    }

    #[test]
    fn necessary_condition_examples() {
        let rep = lambda_point_one();
        let v = necessary_condition(&rep).unwrap();
        assert_eq!(v.status, VerdictStatus::NotUnique);
        assert!((v.f.unwrap() - 1.125).abs() < 1e-12);
        let cx = v.counterexample.unwrap();
        assert!(check_physical(&cx).pass);
        assert!(distributions_equal(&rep, &cx, 3, 1e-9).unwrap().equal);

        let mut pure = rep.clone();
        pure.states[0] = DensityMatrix::basis(2, 0);
        assert_eq!(necessary_condition(&pure).unwrap().status, VerdictStatus::NecessaryConditionHolds);

        let trivial = ModelRepresentation::new(
            2,
            vec![DensityMatrix::maximally_mixed(2)],
            vec![QuantumMap::identity(2)],
            vec![Effect::new(diag(&[0.5, 0.5]), "half")],
        )
        .unwrap();
        assert_eq!(necessary_condition(&trivial).unwrap().status, VerdictStatus::Trivial);
    }

    #[test]
    fn counterexample_examples() {
        let rep = lambda_point_one();
        let cx = counterexample(&rep, 1.2).unwrap();
        assert!(check_physical(&cx).pass);
        assert!(distributions_equal(&rep, &cx, 3, 1e-9).unwrap().equal);
        assert!(spectral_shift(&rep, &cx) > 1e-3);
        let same = counterexample(&rep, 1.0).unwrap();
        assert!(same.approx_eq(&rep, 1e-14));
        assert!(matches!(counterexample(&rep, 1.3), Err(Error::FOutOfWindow { .. })));
    }

    #[test]
    fn counterexample_is_a_distinct_model() {
        let rep = random_model(2, 5, 2, 5, 3, &RandomModelOptions::default()).unwrap();
        let v = necessary_condition(&rep).unwrap();
        assert_eq!(v.status, VerdictStatus::NotUnique);
        let cx = v.counterexample.unwrap();
        assert!(same_model(&rep, &cx).unwrap().is_none());
    }

    fn pi_model(d: usize, full: bool) -> ModelRepresentation {
        let set = if full { projection_set_pi(d).unwrap() } else { projection_set_pi_qpt(d).unwrap() };
        let states = set.projections.iter().map(|p| DensityMatrix::new(p.mat.clone(), p.label.clone())).collect();
        let effects = set.projections.iter().map(|p| Effect::new(p.mat.clone(), p.label.clone())).collect();
        ModelRepresentation::new(d, states, vec![depolarizing_map(0.9, d).unwrap()], effects).unwrap()
    }

    #[test]
    fn projection_condition_examples() {
        let rep = pi_model(2, false);
        assert!(projection_condition(&rep).unwrap().pass);
        assert_eq!(assess(&rep).unwrap().status, VerdictStatus::UniqueByProjections);
        let mut bent = rep.clone();
        let idx = bent.states.iter().position(|s| s.label == "piy_1_2").unwrap();
        let eps = 2e-3;
        let mixed = &bent.states[idx].mat * c(1.0 - eps, 0.0) + linalg::identity(2) * c(eps / 2.0, 0.0);
        bent.states[idx].mat = mixed;
        let report = projection_condition(&bent).unwrap();
        assert!(!report.pass);
        assert_eq!(report.missing, ["piy_1_2"]);
        assert!(!projection_condition(&pi_model(3, false)).unwrap().pass);
        assert!(projection_condition(&pi_model(3, true)).unwrap().pass);
    }

    #[test]
    fn unitary_map_examples() {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let u = is_unitary_map(&map_from_unitary(&x).unwrap()).unwrap();
        assert!(linalg::max_abs_diff(&u, &x) < 1e-12);
        let dep = depolarizing_map(0.9, 2).unwrap();
        assert!((dep.superop().determinant().re - 0.729).abs() < 1e-12);
        assert!(is_unitary_map(&dep).is_none());
        let w = QuantumMap::from_superop(linalg::swap_operator(2), "W").unwrap();
        assert!(is_unitary_map(&w).is_none());
    }

    #[test]
    fn depolarizing_determinant() {
        for d in 2..=4 {
            for f in [0.3, 0.9, 1.4] {
                let det = depolarizing_superop(f, d).determinant().re;
                let want = f.powi((d * d - 1) as i32);
                assert!((det - want).abs() <= 1e-9 * want.abs());
            }
        }
    }

    fn unitary_complete_model(singular_effect: bool, flag: bool) -> ModelRepresentation {
        let mut rng = rng_from_seed(3);
        let maps = (0..3).map(|_| map_from_unitary(&random_unitary(&mut rng, 2)).unwrap()).collect();
        let e = if singular_effect { diag(&[0.0, 0.8]) } else { diag(&[0.1, 0.8]) };
        ModelRepresentation::new(2, vec![DensityMatrix::basis(2, 0)], maps, vec![Effect::new(e, "E")])
            .unwrap()
            .with_unitary_complete(flag)
    }

    #[test]
    fn unitary_completeness_examples() {
        assert!(unitary_completeness_condition(&unitary_complete_model(true, true)).unwrap().pass);
        assert_eq!(assess(&unitary_complete_model(true, true)).unwrap().status, VerdictStatus::UniqueByUnitaryCompleteness);
        assert!(!unitary_completeness_condition(&unitary_complete_model(false, true)).unwrap().pass);
        assert!(!unitary_completeness_condition(&unitary_complete_model(true, false)).unwrap().pass);
        let mut with_extra = unitary_complete_model(true, true);
        with_extra.maps.push(depolarizing_map(0.5, 2).unwrap());
        assert!(!unitary_completeness_condition(&with_extra).unwrap().pass);
        let last = with_extra.maps.pop().unwrap().with_extra(true);
        with_extra.maps.push(last);
        assert!(unitary_completeness_condition(&with_extra).unwrap().pass);
    }

    #[test]
    fn snd_examples() {
        let i = diag(&[1.0, 1.0]);
        let mut u = i.clone();
        u[(1, 1)] = c(0.0, 1.0);
        assert!(super_non_degenerate(&u).unwrap());
        assert!(!super_non_degenerate(&diag(&[1.0, -1.0])).unwrap());
        assert!(!super_non_degenerate(&linalg::identity(3)).unwrap());
        assert!(matches!(super_non_degenerate(&diag(&[1.0, 2.0])), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn snd_approximant_examples() {
        let approx = snd_approximant(&linalg::identity(3), 2).unwrap();
        let (theta, _) = eigenphases(&approx).unwrap();
        let mut theta = theta;
        theta.sort_by(f64::total_cmp);
        let tau = std::f64::consts::TAU;
        let want = [tau * 1e-6 / 64.0, tau * 1e-6 / 16.0, tau * 1e-6 / 4.0];
        for (x, y) in theta.iter().zip(want) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        assert!(super_non_degenerate(&approx).unwrap());

        let mut rng = rng_from_seed(5);
        for d in 3..=4 {
            for _ in 0..20 {
                let v = random_unitary(&mut rng, d);
                assert!(super_non_degenerate(&snd_approximant(&v, 2).unwrap()).unwrap());
            }
        }
        let u = random_unitary(&mut rng, 3);
        let dev = |n| linalg::operator_norm(&(snd_approximant(&u, n).unwrap() - &u));
        assert!(dev(4) <= 1e-3);
        assert!(dev(6) < dev(3));
        for n in [2, 4, 6] {
            let bound = tau * (10f64.powi(-n) + 10f64.powi(-3 * n));
            assert!(dev(n as u32) <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn relation_examples() {
        let mut rng = rng_from_seed(6);
        let ua = snd_approximant(&random_unitary(&mut rng, 3), 2).unwrap();
        let v = random_unitary(&mut rng, 3);
        let omega: f64 = 0.4;
        let phase = C64::from_polar(1.0, omega);
        let ub = &v * &ua * v.adjoint() * phase;
        match classify_unitary_relation(&ua, &ub).unwrap() {
            UnitaryRelation::UnitaryRelated { omega: w } => assert!(linalg::wrap_angle(w - omega).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let ub = &v * ua.conjugate() * v.adjoint() * phase;
        match classify_unitary_relation(&ua, &ub).unwrap() {
            UnitaryRelation::AntiunitaryRelated { omega: w } => assert!(linalg::wrap_angle(w - omega).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let mut a = linalg::identity(3);
        a[(1, 1)] = c(0.0, 1.0);
        a[(2, 2)] = c(-1.0, 0.0);
        let mut b = linalg::identity(3);
        b[(1, 1)] = C64::from_polar(1.0, 0.3);
        b[(2, 2)] = c(-1.0, 0.0);
        assert_eq!(classify_unitary_relation(&a, &b).unwrap(), UnitaryRelation::Unrelated);
    }

    #[test]
    fn complete_set_examples() {
        assert_eq!(complete_set_from(&diag(&[1.0, 0.0])).unwrap().rank, 4);
        assert_eq!(complete_set_from(&diag(&[0.7, 0.2, 0.1])).unwrap().rank, 9);
        assert!(matches!(complete_set_from(&(linalg::identity(3) * c(1.0 / 3.0, 0.0))), Err(Error::TrivialMatrix)));
        assert!(matches!(complete_set_from(&diag(&[1.0, -1.0])), Err(Error::TracelessMatrix)));
        let mut rng = rng_from_seed(8);
        for d in 2..=5 {
            let a = linalg::random_hermitian(&mut rng, d);
            let set = complete_set_from(&a).unwrap();
            assert_eq!(set.rank, d * d, "d = {d}");
            for (w, m) in set.unitaries.iter().zip(&set.family) {
                assert!(linalg::unitarity_error(w) < 1e-12);
                assert!(linalg::max_abs_diff(&(w * &a * w.adjoint()), m) < 1e-12);
            }
        }
    }

    #[test]
    fn fit_depolarizing_examples() {
        assert!((fit_depolarizing(&depolarizing_superop(0.7, 3)).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(fit_depolarizing(&linalg::identity(4)), Some(1.0));
        let z = diag(&[1.0, -1.0]);
        assert!(fit_depolarizing(map_from_unitary(&z).unwrap().superop()).is_none());
    }
}
