//! Seeded generation of random physical representations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::model::{DensityMatrix, Effect, ModelRepresentation};
use crate::superop::{map_from_kraus, QuantumMap};

#[derive(Debug, Clone, Default)]
pub struct RandomModelOptions {
    /// Rank of every generated state (defaults to full rank).
    pub state_rank: Option<usize>,
    /// Force state 0 to be pure.
    pub pure_first_state: bool,
    /// Force effect 0 to have a zero eigenvalue.
    pub singular_first_effect: bool,
    /// Number of Kraus operators per map (defaults to `d^2`, a full-rank Choi).
    pub kraus_count: Option<usize>,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G G^dagger / Tr(G G^dagger)` with `G` a `d x rank` Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = linalg::ginibre(rng, d, rank.max(1));
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    linalg::hermitian_part(&(p / linalg::c(tr, 0.0)))
}

/// Random PSD matrix of the given rank, scaled so its largest eigenvalue is
/// a random value in `[0.6, 0.95]`.
pub fn random_effect<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = linalg::ginibre(rng, d, rank.max(1));
    let p = linalg::hermitian_part(&(&g * g.adjoint()));
    let top = *linalg::hermitian_eigenvalues(&p).last().expect("non-empty");
    let target: f64 = rng.random_range(0.6..0.95);
    p * linalg::c(target / top, 0.0)
}

/// Rescale a Kraus set on the input side by `(sum K^dagger K)^(-1/2)`.
pub fn normalize_kraus(kraus: &[ComplexMatrix]) -> Result<QuantumMap> {
    let d = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?.nrows();
    let mut s = linalg::zeros(d, d);
    for k in kraus {
        s += k.adjoint() * k;
    }
    let norm = linalg::inv_sqrt_psd(&s).ok_or_else(|| Error::InvalidArgument("Kraus set is rank deficient".into()))?;
    let fixed: Vec<ComplexMatrix> = kraus.iter().map(|k| k * &norm).collect();
    map_from_kraus(&fixed)
}

pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, kraus_count: usize) -> Result<QuantumMap> {
    let kraus: Vec<ComplexMatrix> = (0..kraus_count.max(1)).map(|_| linalg::ginibre(rng, d, d)).collect();
    normalize_kraus(&kraus)
}

pub fn random_model(
    dim: usize,
    n_states: usize,
    n_maps: usize,
    n_effects: usize,
    seed: u64,
    opts: &RandomModelOptions,
) -> Result<ModelRepresentation> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    if let Some(r) = opts.state_rank {
        if r == 0 || r > dim {
            return Err(Error::InvalidArgument(format!("state rank {r} not in 1..={dim}")));
        }
    }
    if opts.kraus_count == Some(0) {
        return Err(Error::InvalidArgument("kraus count must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let states = (0..n_states)
        .map(|i| {
            let rank = if i == 0 && opts.pure_first_state { 1 } else { opts.state_rank.unwrap_or(dim) };
            DensityMatrix::new(random_state(&mut rng, dim, rank), format!("rho{i}"))
        })
        .collect();
    let kraus_count = opts.kraus_count.unwrap_or(dim * dim);
    let maps = (0..n_maps)
        .map(|j| random_channel(&mut rng, dim, kraus_count).map(|m| m.with_label(format!("M{j}"))))
        .collect::<Result<Vec<_>>>()?;
    let effects = (0..n_effects)
        .map(|k| {
            let rank = if k == 0 && opts.singular_first_effect { dim - 1 } else { dim };
            Effect::new(random_effect(&mut rng, dim, rank), format!("E{k}"))
        })
        .collect();
    Ok(ModelRepresentation::new(dim, states, maps, effects)?.with_label(format!("random(d={dim}, seed={seed})")))
}
