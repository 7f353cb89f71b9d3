//! Photon-absorption model for counting atoms in a probe beam.
//!
//! With `phi` the expected photon count without atoms and `theta` the
//! on-resonance optical depth, a probe detuned by `delta` from resonance
//! detects on average `phi * exp(-zeta(delta) * theta) + dark` photons,
//! Poisson distributed. The atom number is `kappa * theta`.

mod joint;
mod lineshape;
mod mle;
mod model;
mod poisson;
mod shots;

pub use joint::{
    atom_estimate, joint_update, make_joint_mi_prior, marginal_phi, marginal_theta,
    AtomEstimate, JointPosterior,
};
pub use lineshape::{lorentzian_zeta, zeta, LineshapeParams};
pub use mle::{mle_estimate, mle_from_means, MleEstimate};
pub use model::{expected_count, OpticalModelConfig, RESONANCE_FREQUENCY_THZ};
pub use poisson::{ln_factorial, poisson_ln_pmf, poisson_pmf};
pub use shots::{read_shot_log, write_shot_log, ShotRecord};
