//! Linear-inversion gate-set tomography from length-0 and length-1 data,
//! gauge fixing against prior fiducials, and finite-shot datasets.

use serde::Serialize;

use crate::equivalence::{complete_subsets, effect_matrix, independent_columns, state_matrix};
use crate::error::{Error, Result};
use crate::gauge::{apply_gauge, GaugeTransform};
use crate::linalg::{self, c, ComplexMatrix};
use crate::model::{DensityMatrix, Effect, ModelRepresentation};
use crate::probability::sample_frequency;
use crate::superop::QuantumMap;
use crate::tol;

/// `M_in` (columns `vec(rho_i)`), `M_out` (rows `vec(E_k)^dagger`) and
/// `g = M_out M_in` for chosen fiducial states and effects.
#[derive(Debug, Clone)]
pub struct FiducialFrame {
    pub dim: usize,
    pub m_in: ComplexMatrix,
    pub m_out: ComplexMatrix,
    pub g: ComplexMatrix,
    pub state_indices: Vec<usize>,
    pub effect_indices: Vec<usize>,
}

fn check_fiducials(rep: &ModelRepresentation, states: &[usize], effects: &[usize]) -> Result<()> {
    let n = rep.dim * rep.dim;
    for &i in states {
        if i >= rep.states.len() {
            return Err(Error::IndexOutOfRange { what: "state", index: i, len: rep.states.len() });
        }
    }
    for &k in effects {
        if k >= rep.effects.len() {
            return Err(Error::IndexOutOfRange { what: "effect", index: k, len: rep.effects.len() });
        }
    }
    let cols: Vec<_> = states.iter().map(|&i| linalg::vectorize(&rep.states[i].mat)).collect();
    let (_, srank) = independent_columns(&cols, n);
    if states.len() != n || srank < n {
        return Err(Error::NotComplete { what: "states", rank: srank, needed: n });
    }
    let rows: Vec<_> = effects.iter().map(|&k| linalg::vectorize(&rep.effects[k].mat)).collect();
    let (_, erank) = independent_columns(&rows, n);
    if effects.len() != n || erank < n {
        return Err(Error::NotComplete { what: "effects", rank: erank, needed: n });
    }
    Ok(())
}

impl FiducialFrame {
    pub fn from_model(rep: &ModelRepresentation, states: &[usize], effects: &[usize]) -> Result<Self> {
        rep.validate()?;
        check_fiducials(rep, states, effects)?;
        let m_in = state_matrix(rep, states);
        let m_out = effect_matrix(rep, effects);
        let g = &m_out * &m_in;
        Ok(Self { dim: rep.dim, m_in, m_out, g, state_indices: states.to_vec(), effect_indices: effects.to_vec() })
    }

    /// First `d^2` linearly independent states and effects.
    pub fn auto(rep: &ModelRepresentation) -> Result<Self> {
        let (s, e) = complete_subsets(rep)?;
        Self::from_model(rep, &s, &e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetKind {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

/// Outcome probabilities of a non-fiducial state (over fiducial effects) or
/// non-fiducial effect (over fiducial states).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraVector {
    pub index: usize,
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGram {
    pub label: String,
    pub values: Vec<Vec<f64>>,
}

/// `g[k][i] = Tr(E_k rho_i)`, `maps[j][k][i] = Tr(E_k M_j(rho_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GstDataset {
    pub dim: usize,
    pub kind: DatasetKind,
    pub fiducial_states: Vec<usize>,
    pub fiducial_effects: Vec<usize>,
    pub fiducial_state_labels: Vec<String>,
    pub fiducial_effect_labels: Vec<String>,
    pub g: Vec<Vec<f64>>,
    pub maps: Vec<LabeledGram>,
    pub extra_states: Vec<ExtraVector>,
    pub extra_effects: Vec<ExtraVector>,
}

fn real_rows(m: &ComplexMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)].re).collect()).collect()
}

fn to_matrix(rows: &[Vec<f64>]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    ComplexMatrix::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
}

impl GstDataset {
    pub fn n_entries(&self) -> usize {
        let n = self.dim * self.dim;
        n * n * (1 + self.maps.len())
            + self.extra_states.iter().map(|e| e.values.len()).sum::<usize>()
            + self.extra_effects.iter().map(|e| e.values.len()).sum::<usize>()
    }

    fn for_each_value(&mut self, mut f: impl FnMut(u64, &mut f64)) {
        let mut stream = 0u64;
        let mut visit = |v: &mut f64| {
            f(stream, v);
            stream += 1;
        };
        self.g.iter_mut().flatten().for_each(&mut visit);
        self.maps.iter_mut().flat_map(|m| m.values.iter_mut().flatten()).for_each(&mut visit);
        self.extra_states.iter_mut().flat_map(|e| e.values.iter_mut()).for_each(&mut visit);
        self.extra_effects.iter_mut().flat_map(|e| e.values.iter_mut()).for_each(&mut visit);
    }

    /// Replace every entry by a binomial frequency. The generator stream of an
    /// entry is its position in the fixed order g, maps, extra states, extra effects.
    pub fn sampled(&self, shots: u64, seed: u64) -> Result<GstDataset> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let mut out = self.clone();
        out.for_each_value(|stream, v| *v = sample_frequency(*v, shots, seed, stream));
        out.kind = DatasetKind::Sampled { shots, seed };
        Ok(out)
    }

    /// Largest entrywise difference to another dataset of the same shape.
    pub fn max_deviation(&self, other: &GstDataset) -> Result<f64> {
        let mut a = Vec::new();
        self.clone().for_each_value(|_, v| a.push(*v));
        let mut b = Vec::new();
        other.clone().for_each_value(|_, v| b.push(*v));
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch(format!("{} vs {} dataset entries", a.len(), b.len())));
        }
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    pub fn gram(&self) -> ComplexMatrix {
        to_matrix(&self.g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim * self.dim;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if self.dim < 1 || !square(&self.g) || self.maps.iter().any(|m| !square(&m.values)) {
            return Err(Error::DimensionMismatch(format!("dataset matrices must be {n}x{n}")));
        }
        if self.extra_states.iter().chain(&self.extra_effects).any(|e| e.values.len() != n) {
            return Err(Error::DimensionMismatch(format!("extra vectors must have {n} entries")));
        }
        let mut all = Vec::new();
        self.clone().for_each_value(|_, v| all.push(*v));
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite dataset entry".into()));
        }
        Ok(())
    }
}

/// Exact dataset: Gram matrix, one matrix per map, and probability vectors
/// for every state and effect outside the fiducial lists.
pub fn collect_dataset(rep: &ModelRepresentation, states: &[usize], effects: &[usize]) -> Result<GstDataset> {
    let frame = FiducialFrame::from_model(rep, states, effects)?;
    let maps = rep
        .maps
        .iter()
        .enumerate()
        .map(|(j, m)| LabeledGram {
            label: if m.label.is_empty() { format!("M{j}") } else { m.label.clone() },
            values: real_rows(&(&frame.m_out * m.superop() * &frame.m_in)),
        })
        .collect();
    let extra_states = (0..rep.states.len())
        .filter(|i| !states.contains(i))
        .map(|i| ExtraVector {
            index: i,
            label: rep.states[i].label.clone(),
            values: (&frame.m_out * linalg::vectorize(&rep.states[i].mat)).iter().map(|z| z.re).collect(),
        })
        .collect();
    let extra_effects = (0..rep.effects.len())
        .filter(|k| !effects.contains(k))
        .map(|k| ExtraVector {
            index: k,
            label: rep.effects[k].label.clone(),
            values: (linalg::vectorize(&rep.effects[k].mat).adjoint() * &frame.m_in).iter().map(|z| z.re).collect(),
        })
        .collect();
    Ok(GstDataset {
        dim: rep.dim,
        kind: DatasetKind::Exact,
        fiducial_states: states.to_vec(),
        fiducial_effects: effects.to_vec(),
        fiducial_state_labels: states.iter().map(|&i| rep.states[i].label.clone()).collect(),
        fiducial_effect_labels: effects.iter().map(|&k| rep.effects[k].label.clone()).collect(),
        g: real_rows(&frame.g),
        maps,
        extra_states,
        extra_effects,
    })
}

/// [`collect_dataset`] followed by binomial sampling of every entry.
pub fn sample_dataset(
    rep: &ModelRepresentation,
    states: &[usize],
    effects: &[usize],
    shots: u64,
    seed: u64,
) -> Result<GstDataset> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    collect_dataset(rep, states, effects)?.sampled(shots, seed)
}

#[derive(Debug, Clone)]
pub struct LgstResult {
    pub model: ModelRepresentation,
    pub condition_number: f64,
}

/// Representation in the data gauge: fiducial states are the coordinate
/// vectors, fiducial effects the rows of `g`, maps `g^-1 G_j`.
pub fn lgst_reconstruct(ds: &GstDataset) -> Result<LgstResult> {
    ds.validate()?;
    let d = ds.dim;
    let n = d * d;
    let g = ds.gram();
    let cond = linalg::condition_number(&g);
    if !(cond <= tol::MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let g_inv = g.clone().svd(true, true).pseudo_inverse(0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let n_states = ds.fiducial_states.len() + ds.extra_states.len();
    let n_effects = ds.fiducial_effects.len() + ds.extra_effects.len();
    let mut states: Vec<Option<DensityMatrix>> = vec![None; n_states];
    let mut effects: Vec<Option<Effect>> = vec![None; n_effects];
    let place = |slots: usize, idx: usize, what: &'static str| -> Result<()> {
        if idx >= slots {
            Err(Error::IndexOutOfRange { what, index: idx, len: slots })
        } else {
            Ok(())
        }
    };

    for (slot, &i) in ds.fiducial_states.iter().enumerate() {
        place(n_states, i, "state")?;
        let mut v = linalg::ComplexVector::zeros(n);
        v[slot] = c(1.0, 0.0);
        let label = ds.fiducial_state_labels.get(slot).cloned().unwrap_or_default();
        states[i] = Some(DensityMatrix::new(linalg::devectorize(&v, d), label));
    }
    for e in &ds.extra_states {
        place(n_states, e.index, "state")?;
        let col = linalg::ComplexVector::from_iterator(n, e.values.iter().map(|&x| c(x, 0.0)));
        states[e.index] = Some(DensityMatrix::new(linalg::devectorize(&(&g_inv * col), d), e.label.clone()));
    }
    for (slot, &k) in ds.fiducial_effects.iter().enumerate() {
        place(n_effects, k, "effect")?;
        let row = linalg::ComplexVector::from_iterator(n, ds.g[slot].iter().map(|&x| c(x, 0.0)));
        let label = ds.fiducial_effect_labels.get(slot).cloned().unwrap_or_default();
        effects[k] = Some(Effect::new(linalg::devectorize(&row, d), label));
    }
    for e in &ds.extra_effects {
        place(n_effects, e.index, "effect")?;
        let row = linalg::ComplexVector::from_iterator(n, e.values.iter().map(|&x| c(x, 0.0)));
        effects[e.index] = Some(Effect::new(linalg::devectorize(&row, d), e.label.clone()));
    }
    let states = states
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidArgument("state indices do not cover 0..n".into()))?;
    let effects = effects
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidArgument("effect indices do not cover 0..n".into()))?;
    let maps = ds
        .maps
        .iter()
        .map(|m| QuantumMap::from_superop(&g_inv * to_matrix(&m.values), m.label.clone()))
        .collect::<Result<Vec<_>>>()?;
    let model = ModelRepresentation::new(d, states, maps, effects)?.with_label("lgst");
    Ok(LgstResult { model, condition_number: cond })
}

/// The gauge taking the representation's fiducial states onto the prior's:
/// `T = M_in(rep) M_in(prior)^-1`.
pub fn gauge_to_prior(rep: &ModelRepresentation, prior: &FiducialFrame) -> Result<GaugeTransform> {
    if rep.dim != prior.dim {
        return Err(Error::DimensionMismatch(format!("model dim {} vs prior dim {}", rep.dim, prior.dim)));
    }
    let n = prior.dim * prior.dim;
    let rank = linalg::numerical_rank(&prior.m_in, tol::RANK_REL);
    if rank < n {
        return Err(Error::NotComplete { what: "prior states", rank, needed: n });
    }
    for &i in &prior.state_indices {
        if i >= rep.states.len() {
            return Err(Error::IndexOutOfRange { what: "state", index: i, len: rep.states.len() });
        }
    }
    let m_hat = state_matrix(rep, &prior.state_indices);
    let prior_inv = prior.m_in.clone().try_inverse().ok_or(Error::NotComplete { what: "prior states", rank, needed: n })?;
    GaugeTransform::from_superop(m_hat * prior_inv, "gauge-fix")
}

pub fn gauge_fix(rep: &ModelRepresentation, prior: &FiducialFrame) -> Result<ModelRepresentation> {
    let t = gauge_to_prior(rep, prior)?;
    Ok(apply_gauge(rep, &t)?.with_label(format!("{}|fixed", rep.label)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{distributions_equal, recover_gauge_gst};
    use crate::gauge::GaugeTransform;
    use crate::linalg::random_unitary;
    use crate::projections::projection_set_pi_qpt;
    use crate::random::{random_model, rng_from_seed, RandomModelOptions};

    fn hidden(d: usize, seed: u64) -> ModelRepresentation {
        random_model(d, d * d + 1, 2, d * d + 2, seed, &RandomModelOptions::default()).unwrap()
    }

    fn first(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn gram_of_projection_fiducials() {
        let set = projection_set_pi_qpt(2).unwrap();
        let states = set.projections.iter().map(|p| DensityMatrix::new(p.mat.clone(), p.label.clone())).collect();
        let effects = set.projections.iter().map(|p| Effect::new(p.mat.clone(), p.label.clone())).collect();
        let rep = ModelRepresentation::new(2, states, vec![QuantumMap::identity(2)], effects).unwrap();
        let ds = collect_dataset(&rep, &first(4), &first(4)).unwrap();
        let lx = set.labels().iter().position(|l| *l == "pix_1_2").unwrap();
        assert!((ds.g[lx][0] - 0.5).abs() < 1e-15);
        for a in 0..2 {
            assert!((ds.g[a][a] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_deficient_fiducials() {
        let mut rep = hidden(2, 1);
        rep.states[3] = rep.states[0].clone();
        assert!(matches!(collect_dataset(&rep, &first(4), &first(4)), Err(Error::NotComplete { what: "states", .. })));
    }

    #[test]
    fn exact_round_trip() {
        for d in 2..=3 {
            let rep = hidden(d, 7 + d as u64);
            let n = d * d;
            let ds = collect_dataset(&rep, &first(n), &first(n)).unwrap();
            let recon = lgst_reconstruct(&ds).unwrap().model;
            assert!(distributions_equal(&rep, &recon, 1, 1e-9).unwrap().equal);
            // reconstruction = apply_gauge(hidden, M_in)
            let frame = FiducialFrame::from_model(&rep, &first(n), &first(n)).unwrap();
            let t = recover_gauge_gst(&rep, &recon).unwrap();
            assert!(linalg::max_abs_diff(t.superop(), &frame.m_in) < 1e-8);
            // data-gauge frame identity
            let data = FiducialFrame::from_model(&recon, &first(n), &first(n)).unwrap();
            assert!(linalg::max_abs_diff(&data.m_in, &linalg::identity(n)) < 1e-12);
            assert!(linalg::max_abs_diff(&(&data.m_out * &data.m_in), &ds.gram()) < 1e-12);
            let fixed = gauge_fix(&recon, &frame).unwrap();
            assert!(fixed.approx_eq(&rep, 1e-8), "d {d}: {}", fixed.max_deviation(&rep));
        }
    }

    #[test]
    fn gauge_fix_with_rotated_prior() {
        let rep = hidden(2, 3);
        let ds = collect_dataset(&rep, &first(4), &first(4)).unwrap();
        let recon = lgst_reconstruct(&ds).unwrap().model;
        let mut rng = rng_from_seed(3);
        let s = GaugeTransform::unitary(&random_unitary(&mut rng, 2)).unwrap();
        let rotated = apply_gauge(&rep, &s).unwrap();
        let prior = FiducialFrame::from_model(&rotated, &first(4), &first(4)).unwrap();
        assert!(gauge_fix(&recon, &prior).unwrap().approx_eq(&rotated, 1e-8));
        let own = FiducialFrame::from_model(&recon, &first(4), &first(4)).unwrap();
        assert!(gauge_fix(&recon, &own).unwrap().approx_eq(&recon, 1e-12));
    }

    #[test]
    fn ill_conditioned_gram() {
        let rep = hidden(2, 4);
        let mut ds = collect_dataset(&rep, &first(4), &first(4)).unwrap();
        ds.g[3] = ds.g[2].clone();
        ds.g[3][0] += 1e-12;
        assert!(matches!(lgst_reconstruct(&ds), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn sampling() {
        let rep = hidden(2, 5);
        let a = sample_dataset(&rep, &first(4), &first(4), 1000, 9).unwrap();
        let b = sample_dataset(&rep, &first(4), &first(4), 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.kind, DatasetKind::Sampled { shots: 1000, seed: 9 });
        let exact = collect_dataset(&rep, &first(4), &first(4)).unwrap();
        let dev = a.max_deviation(&exact).unwrap();
        assert!(dev > 0.0 && dev < 0.1);
        let mut ones = exact.clone();
        ones.g[0][0] = 1.0;
        assert_eq!(ones.sampled(17, 1).unwrap().g[0][0], 1.0);
        assert!(matches!(sample_dataset(&rep, &first(4), &first(4), 0, 1), Err(Error::InvalidArgument(_))));
        let mut half = exact;
        half.g[0][0] = 0.5;
        let f = half.sampled(1_000_000, 2).unwrap().g[0][0];
        assert!((f - 0.5).abs() < 5e-3);
    }

    #[test]
    fn noisy_reconstruction_is_close() {
        let set = projection_set_pi_qpt(2).unwrap();
        let mut rng = rng_from_seed(6);
        let states = set.projections.iter().map(|p| DensityMatrix::new(p.mat.clone(), p.label.clone())).collect();
        let effects = set.projections.iter().map(|p| Effect::new(p.mat.clone(), p.label.clone())).collect();
        let maps = vec![crate::random::random_channel(&mut rng, 2, 4).unwrap()];
        let rep = ModelRepresentation::new(2, states, maps, effects).unwrap();
        let ds = sample_dataset(&rep, &first(4), &first(4), 1_000_000, 1).unwrap();
        let out = lgst_reconstruct(&ds).unwrap();
        assert!(out.condition_number < 20.0, "{}", out.condition_number);
        let r = distributions_equal(&rep, &out.model, 1, 1e-9).unwrap();
        assert!(!r.equal && r.max_dev < 2e-2, "{}", r.max_dev);
    }
}
