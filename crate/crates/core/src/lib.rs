//! Friedkin-Johnsen opinion dynamics and polarization analysis.
//!
//! Opinions evolve as `z(k+1) = (I - Λ) s + Λ W z(k)` and settle at `z = H s`. The crate
//! builds `H` for the generalized, variational and restricted variants, measures how six
//! polarization indices change from `s` to `z`, decides which index classes a model can
//! raise, and constructs prejudice vectors `s` that raise them as much as possible.

pub mod conditions;
mod error;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{
    build_susceptibility, load_edge_list, load_susceptibility, pagerank, row_normalize, EdgeListFormat,
    InfluenceMatrix, OpinionVector, SelfWeight, SocialGraph, SusceptibilityProfile, SusceptibilityScheme,
};
pub use metrics::{metrics_bundle, shift_report, Metric, MetricsBundle, ShiftReport};
pub use model::{
    build_response_matrix, convergence_check, iterate_dynamics, map_vfj_to_gfj, steady_state, ModelConfig,
    ResponseMatrix, Variant,
};
