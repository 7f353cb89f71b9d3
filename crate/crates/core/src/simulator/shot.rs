use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::absorption::{expected_count, zeta, ShotRecord};
use crate::error::{MetrologyError, Result};

/// Ground truth for a simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruthConfig {
    pub phi_true: f64,
    pub theta_true: f64,
    pub dark_rate: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for TruthConfig {
    fn default() -> Self {
        // theta 3.04 -> about 258 atoms at kappa = 84.9
        Self {
            phi_true: 18.0,
            theta_true: 3.04,
            dark_rate: 1.0,
            seed: 1,
        }
    }
}

impl TruthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi_true.is_finite() && self.phi_true > 0.0) {
            return Err(MetrologyError::config("phi_true", "must be finite and > 0"));
        }
        if !(self.theta_true.is_finite() && self.theta_true >= 0.0) {
            return Err(MetrologyError::config("theta_true", "must be finite and >= 0"));
        }
        if !(self.dark_rate.is_finite() && self.dark_rate >= 0.0) {
            return Err(MetrologyError::config("dark_rate", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Draws one shot. Atom shots have mean `phi e^{-zeta theta} + dark`,
/// empty-trap shots `phi + dark`.
pub fn draw_shot<R: Rng + ?Sized>(
    truth: &TruthConfig,
    gamma_fwhm: f64,
    detuning: f64,
    atoms_present: bool,
    rng: &mut R,
) -> ShotRecord {
    let theta = if atoms_present { truth.theta_true } else { 0.0 };
    let mean = expected_count(truth.phi_true, theta, zeta(gamma_fwhm, detuning), truth.dark_rate);
    let raw = Poisson::new(mean)
        .expect("validated truth gives a positive finite mean")
        .sample(rng) as u64;
    ShotRecord::new(detuning, atoms_present, raw, truth.dark_rate)
}

/// Seeded shot source that counts its Poisson draws.
#[derive(Debug, Clone)]
pub struct ShotSimulator {
    truth: TruthConfig,
    gamma_fwhm: f64,
    rng: ChaCha8Rng,
    draws: u64,
}

impl ShotSimulator {
    pub fn new(truth: TruthConfig, gamma_fwhm: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(truth.seed),
            truth,
            gamma_fwhm,
            draws: 0,
        }
    }

    pub fn shot(&mut self, detuning: f64, atoms_present: bool) -> ShotRecord {
        self.draws += 1;
        draw_shot(&self.truth, self.gamma_fwhm, detuning, atoms_present, &mut self.rng)
    }

    /// An atom shot followed by an empty-trap shot at the same detuning.
    pub fn pair(&mut self, detuning: f64) -> (ShotRecord, ShotRecord) {
        let a = self.shot(detuning, true);
        let b = self.shot(detuning, false);
        (a, b)
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn truth(&self) -> &TruthConfig {
        &self.truth
    }
}
