//! Symmetry-informed Bayesian estimation on one-dimensional hypothesis grids.
//!
//! Beliefs are densities sampled on a uniform grid and integrated with the
//! composite trapezoid rule. A [`SymmetrySpec`] maps the hypothesis to a
//! location variable; estimates, error bars and the precision gain are all
//! computed in that location space and mapped back.

mod gain;
mod grid;
mod posterior;
mod symmetry;

pub use gain::{precision_gain, OutcomeTerm, PrecisionGainResult, TruncationPolicy};
pub use grid::HypothesisGrid1D;
pub use posterior::{
    bayes_update, bayes_update_log, grid_mle, make_mi_prior, optimal_estimate,
    optimal_uncertainty, Posterior1D,
};
pub use symmetry::{SymmetryKind, SymmetrySpec};

/// Smallest normalizing constant accepted before an update is declared
/// inconsistent with the prior.
pub const EVIDENCE_FLOOR: f64 = f64::MIN_POSITIVE;
