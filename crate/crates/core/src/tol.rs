//! Numeric policy. Every threshold used by the library lives here.

use serde::{Deserialize, Serialize};

pub const TOL_HERM: f64 = 1e-9;
pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_PROB: f64 = 1e-9;
pub const TOL_UNITARY: f64 = 1e-9;
/// Relative singular-value cutoff used for every rank decision.
pub const RANK_REL: f64 = 1e-8;
/// Absolute eigenvalue cutoff below which a PSD matrix counts as singular.
pub const SINGULAR_EIG: f64 = 1e-8;
/// Largest condition number accepted when inverting a Gram matrix.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub prob: f64,
    pub unitary: f64,
    pub rank_rel: f64,
    pub singular_eig: f64,
    pub max_condition: f64,
    /// Error instead of clamping when a probability leaves `[0, 1]`.
    pub strict: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            trace: TOL_TRACE,
            psd: TOL_PSD,
            prob: TOL_PROB,
            unitary: TOL_UNITARY,
            rank_rel: RANK_REL,
            singular_eig: SINGULAR_EIG,
            max_condition: MAX_CONDITION,
            strict: false,
        }
    }
}
