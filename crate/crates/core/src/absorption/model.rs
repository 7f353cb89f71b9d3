use serde::{Deserialize, Serialize};

use crate::error::{MetrologyError, Result};
use crate::estimation::HypothesisGrid1D;

/// Cs D2 F=4 -> F'=5 resonance. Detunings are measured from here; the
/// absolute frequency is carried as metadata only.
pub const RESONANCE_FREQUENCY_THZ: f64 = 351.721_961;

/// Physical constants and prior ranges of the absorption model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticalModelConfig {
    /// Atoms per unit of on-resonance optical depth.
    pub kappa: f64,
    /// Transition FWHM in MHz.
    pub gamma_fwhm: f64,
    /// Expected dark counts per shot assumed by the likelihood and removed
    /// by the log-ratio estimator.
    pub dark_rate: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_points: usize,
    pub phi_points: usize,
}

impl Default for OpticalModelConfig {
    fn default() -> Self {
        Self {
            kappa: 84.9,
            gamma_fwhm: 5.234,
            dark_rate: 1.0,
            phi_min: 5.0,
            phi_max: 20.0,
            theta_min: 0.0,
            theta_max: 8.0,
            theta_points: 401,
            phi_points: 201,
        }
    }
}

impl OpticalModelConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(MetrologyError::config(field, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("kappa", self.kappa)?;
        positive("gamma_fwhm", self.gamma_fwhm)?;
        positive("phi_min", self.phi_min)?;
        if !(self.dark_rate.is_finite() && self.dark_rate >= 0.0) {
            return Err(MetrologyError::config("dark_rate", "must be finite and >= 0"));
        }
        if !(self.phi_max.is_finite() && self.phi_max > self.phi_min) {
            return Err(MetrologyError::config("phi_max", "must exceed phi_min"));
        }
        if !(self.theta_min.is_finite() && self.theta_min >= 0.0) {
            return Err(MetrologyError::config("theta_min", "must be finite and >= 0"));
        }
        if !(self.theta_max.is_finite() && self.theta_max > self.theta_min) {
            return Err(MetrologyError::config("theta_max", "must exceed theta_min"));
        }
        if self.theta_points < 2 {
            return Err(MetrologyError::config("theta_points", "need at least 2"));
        }
        if self.phi_points < 2 {
            return Err(MetrologyError::config("phi_points", "need at least 2"));
        }
        Ok(())
    }

    pub fn theta_grid(&self) -> Result<HypothesisGrid1D> {
        HypothesisGrid1D::uniform(self.theta_min, self.theta_max, self.theta_points)
    }

    pub fn phi_grid(&self) -> Result<HypothesisGrid1D> {
        HypothesisGrid1D::uniform(self.phi_min, self.phi_max, self.phi_points)
    }

    pub fn zeta(&self, detuning: f64) -> f64 {
        super::zeta(self.gamma_fwhm, detuning)
    }
}

/// Mean raw count `phi * exp(-zeta * theta) + dark_rate`.
#[inline]
pub fn expected_count(phi: f64, theta: f64, zeta: f64, dark_rate: f64) -> f64 {
    phi * (-zeta * theta).exp() + dark_rate
}
