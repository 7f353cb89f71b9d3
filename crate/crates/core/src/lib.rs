//! Adaptive, symmetry-informed Bayesian parameter estimation.
//!
//! The crate is split into:
//!
//! * [`estimation`]: generic grid machinery. Symmetry functions, ignorance
//!   priors, Bayes updates, the optimal estimator and its error bar, and the
//!   precision gain used to pick measurement settings.
//! * [`absorption`]: a photon-absorption atom-number model. It covers the
//!   Lorentzian lineshape, Poisson counts, the two-parameter prior over
//!   (photon number, optical depth) and the standard log-ratio estimator.
//! * [`controller`]: per-shot selection of the probe detuning by maximizing
//!   the precision gain over a candidate grid.
//! * [`simulator`]: synthetic photon counts and runners for the five
//!   benchmark strategies.
//! * [`analysis`]: noise-to-signal ratio, settling shot count and summary
//!   tables over many runs.
//! * [`config`] and [`cli`]: the `metrology` command-line front end.

pub mod absorption;
pub mod analysis;
pub mod cli;
pub mod config;
pub mod controller;
pub mod error;
pub mod estimation;
pub mod io;
pub mod simulator;

pub use error::{MetrologyError, Result};
