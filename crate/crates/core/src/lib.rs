//! Construction, analysis and reconstruction of finite quantum device
//! models: states, CPTP maps and two-outcome effects on a d-dimensional
//! Hilbert space, together with the gauge transformations that leave every
//! outcome distribution unchanged.
//!
//! Conventions: matrices are vectorized row by row (`|a><b|` sits at index
//! `a*d + b`), so `X -> A X B` has superoperator `A (x) B^T`; the Choi matrix
//! of `M` is `sum_ab |a><b| (x) M(|a><b|)`; the probability of
//! `(state i, maps j1..jN, effect k)` is `<<E_k| M_jN ... M_j1 |rho_i>>`.

pub mod equivalence;
pub mod error;
pub mod gauge;
pub mod io;
pub mod linalg;
pub mod model;
pub mod probability;
pub mod projections;
pub mod random;
pub mod superop;
pub mod tol;
pub mod tomography;
pub mod uniqueness;
pub mod wigner;

pub use equivalence::{classify_transform, distributions_equal, recover_gauge_gst, same_model, WignerTransform};
pub use error::{Error, Result};
pub use gauge::{apply_gauge, dual, max_depolarizing_f, GaugeTransform};
pub use linalg::{ComplexMatrix, C64};
pub use model::{check_physical, is_trivial, DensityMatrix, Effect, ModelRepresentation, PhysicalityReport};
pub use probability::{probability, probability_table, ProbabilityTable};
pub use superop::{choi_of, map_from_kraus, map_from_unitary, superop_from_choi, QuantumMap};
pub use tomography::{collect_dataset, gauge_fix, lgst_reconstruct, FiducialFrame, GstDataset};
pub use uniqueness::{counterexample, necessary_condition, UniquenessVerdict};
pub use wigner::recover_wigner_from_projections;
