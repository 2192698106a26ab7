//! Outcome probabilities `<<E_k| M_jN ... M_j1 |rho_i>>` and their tables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexVector};
use crate::model::ModelRepresentation;
use crate::tol::Tolerances;

/// Default cap on the number of table entries.
pub const DEFAULT_TABLE_CAP: usize = 2_000_000;

pub fn probability(rep: &ModelRepresentation, state: usize, seq: &[usize], effect: usize) -> Result<f64> {
    probability_with(rep, state, seq, effect, &Tolerances::default())
}

pub fn probability_with(
    rep: &ModelRepresentation,
    state: usize,
    seq: &[usize],
    effect: usize,
    tol: &Tolerances,
) -> Result<f64> {
    rep.validate()?;
    check_index("state", state, rep.states.len())?;
    check_index("effect", effect, rep.effects.len())?;
    for &j in seq {
        check_index("map", j, rep.maps.len())?;
    }
    let mut v = linalg::vectorize(&rep.states[state].mat);
    for &j in seq {
        v = rep.maps[j].superop() * v;
    }
    finish(raw_value(&rep.effects[effect].mat, &v), tol)
}

fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
    if index >= len {
        Err(Error::IndexOutOfRange { what, index, len })
    } else {
        Ok(())
    }
}

/// `<<E|v>> = vec(E)^dagger v`, real part.
fn raw_value(effect: &linalg::ComplexMatrix, v: &ComplexVector) -> f64 {
    linalg::vectorize(effect).iter().zip(v.iter()).map(|(e, x)| e.conj() * x).sum::<linalg::C64>().re
}

/// Clamp values within tolerance of `[0, 1]`; values further out are
/// returned unchanged unless strict mode is on.
fn finish(p: f64, tol: &Tolerances) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        return Ok(p);
    }
    if p >= -tol.prob && p <= 1.0 + tol.prob {
        return Ok(p.clamp(0.0, 1.0));
    }
    if tol.strict {
        Err(Error::ValueOutOfRange { value: p })
    } else {
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TableKind {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub state: usize,
    pub seq: Vec<usize>,
    pub effect: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityTable {
    pub n_states: usize,
    pub n_maps: usize,
    pub n_effects: usize,
    pub max_len: usize,
    pub kind: TableKind,
    /// Lexicographic in `(state, seq, effect)`; a sequence precedes its extensions.
    pub entries: Vec<TableEntry>,
    /// Number of raw values that fell outside `[0, 1]` by more than `tol_prob`.
    pub out_of_range: usize,
}

/// `n_states * n_effects * sum_{L=0}^{N} n_maps^L`, or `None` on overflow.
pub fn table_size(n_states: usize, n_maps: usize, n_effects: usize, max_len: usize) -> Option<usize> {
    let mut seqs: usize = 0;
    let mut level: usize = 1;
    for len in 0..=max_len {
        seqs = seqs.checked_add(level)?;
        if len < max_len {
            level = level.checked_mul(n_maps)?;
        }
    }
    seqs.checked_mul(n_states)?.checked_mul(n_effects)
}

pub fn probability_table(rep: &ModelRepresentation, max_len: usize) -> Result<ProbabilityTable> {
    probability_table_with(rep, max_len, DEFAULT_TABLE_CAP, &Tolerances::default())
}

pub fn probability_table_with(
    rep: &ModelRepresentation,
    max_len: usize,
    cap: usize,
    tol: &Tolerances,
) -> Result<ProbabilityTable> {
    rep.validate()?;
    let (ns, nm, ne) = rep.shape();
    let entries = table_size(ns, nm, ne, max_len).unwrap_or(usize::MAX);
    if entries > cap {
        return Err(Error::CapExceeded { entries, cap });
    }

    let per_state = |i: usize| -> Result<(Vec<TableEntry>, usize)> {
        let mut out = Vec::new();
        let mut bad = 0;
        let mut seq = Vec::with_capacity(max_len);
        let v = linalg::vectorize(&rep.states[i].mat);
        walk(rep, i, &v, &mut seq, max_len, tol, &mut out, &mut bad)?;
        Ok((out, bad))
    };

    #[cfg(feature = "parallel")]
    let chunks: Vec<Result<(Vec<TableEntry>, usize)>> = {
        use rayon::prelude::*;
        (0..ns).into_par_iter().map(per_state).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Result<(Vec<TableEntry>, usize)>> = (0..ns).map(per_state).collect();

    let mut all = Vec::with_capacity(entries);
    let mut out_of_range = 0;
    for chunk in chunks {
        let (e, b) = chunk?;
        all.extend(e);
        out_of_range += b;
    }
    Ok(ProbabilityTable {
        n_states: ns,
        n_maps: nm,
        n_effects: ne,
        max_len,
        kind: TableKind::Exact,
        entries: all,
        out_of_range,
    })
}

#[allow(clippy::too_many_arguments)]
fn walk(
    rep: &ModelRepresentation,
    state: usize,
    v: &ComplexVector,
    seq: &mut Vec<usize>,
    max_len: usize,
    tol: &Tolerances,
    out: &mut Vec<TableEntry>,
    bad: &mut usize,
) -> Result<()> {
    for (k, e) in rep.effects.iter().enumerate() {
        let raw = raw_value(&e.mat, v);
        if raw < -tol.prob || raw > 1.0 + tol.prob {
            *bad += 1;
        }
        out.push(TableEntry { state, seq: seq.clone(), effect: k, p: finish(raw, tol)? });
    }
    if seq.len() == max_len {
        return Ok(());
    }
    for (j, m) in rep.maps.iter().enumerate() {
        let next = m.superop() * v;
        seq.push(j);
        walk(rep, state, &next, seq, max_len, tol, out, bad)?;
        seq.pop();
    }
    Ok(())
}

/// One binomial frequency per index; the generator stream is the index so
/// results do not depend on evaluation order.
pub fn sample_frequency(p: f64, shots: u64, seed: u64, stream: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let hits = Binomial::new(shots, p).expect("p in [0, 1]").sample(&mut rng);
    hits as f64 / shots as f64
}

impl ProbabilityTable {
    /// Replace every probability by a binomial frequency over `shots` trials.
    pub fn sampled(&self, shots: u64, seed: u64) -> Result<ProbabilityTable> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, e)| TableEntry { p: sample_frequency(e.p, shots, seed, idx as u64), ..e.clone() })
            .collect();
        Ok(ProbabilityTable { kind: TableKind::Sampled { shots, seed }, entries, out_of_range: 0, ..self.clone() })
    }

    /// CSV with columns `i,seq,k,p` (plus `shots` for sampled tables).
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let shots = match self.kind {
            TableKind::Sampled { shots, .. } => Some(shots),
            TableKind::Exact => None,
        };
        s.push_str(if shots.is_some() { "i,seq,k,p,shots\n" } else { "i,seq,k,p\n" });
        for e in &self.entries {
            let seq: Vec<String> = e.seq.iter().map(|j| j.to_string()).collect();
            s.push_str(&format!("{},{},{},{:.17e}", e.state, seq.join(";"), e.effect, e.p));
            if let Some(n) = shots {
                s.push_str(&format!(",{n}"));
            }
            s.push('\n');
        }
        s
    }

    /// Largest entrywise difference; tables must have identical index sets.
    pub fn max_deviation(&self, other: &ProbabilityTable) -> Result<(f64, Option<usize>)> {
        if self.entries.len() != other.entries.len()
            || (self.n_states, self.n_maps, self.n_effects) != (other.n_states, other.n_maps, other.n_effects)
        {
            return Err(Error::ShapeMismatch(format!(
                "tables {}x{}x{} vs {}x{}x{}",
                self.n_states, self.n_maps, self.n_effects, other.n_states, other.n_maps, other.n_effects
            )));
        }
        let mut worst = 0.0;
        let mut at = None;
        for (idx, (a, b)) in self.entries.iter().zip(&other.entries).enumerate() {
            let dev = (a.p - b.p).abs();
            if dev > worst || dev.is_nan() {
                worst = dev;
                at = Some(idx);
            }
        }
        Ok((worst, at))
    }
}
