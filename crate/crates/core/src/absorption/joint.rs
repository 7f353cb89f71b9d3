use serde::{Deserialize, Serialize};

use super::{OpticalModelConfig, ShotRecord};
use crate::error::{MetrologyError, Result};
use crate::estimation::{
    optimal_estimate, optimal_uncertainty, HypothesisGrid1D, Posterior1D, SymmetrySpec,
    EVIDENCE_FLOOR,
};

/// Mass fraction in either pair of outermost theta cells above which an
/// estimate is flagged as crowding the prior range.
pub const EDGE_MASS_LIMIT: f64 = 0.05;
const EDGE_CELLS: usize = 2;
/// Marginal density at either end of the theta range, relative to its peak,
/// at or above which the estimate is also flagged.
pub const EDGE_DENSITY_RATIO: f64 = 0.1;

/// Joint density over (phi, theta), stored phi-major: the entry for
/// `(phi_grid[i], theta_grid[j])` sits at `i * theta_len + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPosterior {
    theta_grid: HypothesisGrid1D,
    phi_grid: HypothesisGrid1D,
    density: Vec<f64>,
}

impl JointPosterior {
    /// Normalizes `unnormalized` (phi-major) by double trapezoid quadrature.
    pub fn from_unnormalized(
        theta_grid: HypothesisGrid1D,
        phi_grid: HypothesisGrid1D,
        mut unnormalized: Vec<f64>,
    ) -> Result<Self> {
        let cells = theta_grid.len() * phi_grid.len();
        if unnormalized.len() != cells {
            return Err(MetrologyError::LengthMismatch {
                len: unnormalized.len(),
                points: cells,
            });
        }
        if unnormalized.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(MetrologyError::InvalidArgument(
                "joint density must be finite and nonnegative".into(),
            ));
        }
        let norm = integrate(&theta_grid, &phi_grid, &unnormalized);
        if !(norm > EVIDENCE_FLOOR) {
            return Err(MetrologyError::ZeroEvidence);
        }
        unnormalized.iter_mut().for_each(|d| *d /= norm);
        Ok(Self {
            theta_grid,
            phi_grid,
            density: unnormalized,
        })
    }

    /// All mass on one (phi, theta) node.
    pub fn point_mass(
        theta_grid: HypothesisGrid1D,
        phi_grid: HypothesisGrid1D,
        phi_index: usize,
        theta_index: usize,
    ) -> Self {
        let mut density = vec![0.0; theta_grid.len() * phi_grid.len()];
        density[phi_index * theta_grid.len() + theta_index] =
            1.0 / (phi_grid.weights()[phi_index] * theta_grid.weights()[theta_index]);
        Self {
            theta_grid,
            phi_grid,
            density,
        }
    }

    pub fn theta_grid(&self) -> &HypothesisGrid1D {
        &self.theta_grid
    }

    pub fn phi_grid(&self) -> &HypothesisGrid1D {
        &self.phi_grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn at(&self, phi_index: usize, theta_index: usize) -> f64 {
        self.density[phi_index * self.theta_grid.len() + theta_index]
    }

    pub fn total_mass(&self) -> f64 {
        integrate(&self.theta_grid, &self.phi_grid, &self.density)
    }

    /// Rows of the density, one per phi node.
    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.density.chunks_exact(self.theta_grid.len())
    }

    /// Multiplies in `exp(log_likelihood)` (phi-major) and renormalizes.
    pub fn update_log(&self, log_likelihood: &[f64]) -> Result<Self> {
        if log_likelihood.len() != self.density.len() {
            return Err(MetrologyError::LengthMismatch {
                len: log_likelihood.len(),
                points: self.density.len(),
            });
        }
        let peak = self
            .density
            .iter()
            .zip(log_likelihood)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, l)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(MetrologyError::ZeroEvidence);
        }
        let product = self
            .density
            .iter()
            .zip(log_likelihood)
            .map(|(d, l)| if *d > 0.0 { d * (l - peak).exp() } else { 0.0 })
            .collect();
        Self::from_unnormalized(self.theta_grid.clone(), self.phi_grid.clone(), product)
    }
}

fn integrate(theta_grid: &HypothesisGrid1D, phi_grid: &HypothesisGrid1D, density: &[f64]) -> f64 {
    density
        .chunks_exact(theta_grid.len())
        .zip(phi_grid.weights())
        .map(|(row, wp)| wp * theta_grid.integrate(row))
        .sum()
}

fn check_covers(grid: &HypothesisGrid1D, lo: f64, hi: f64, name: &str) -> Result<()> {
    if grid.lower() == lo && grid.upper() == hi {
        Ok(())
    } else {
        Err(MetrologyError::InvalidGrid(format!(
            "{name} grid [{}, {}] does not match the configured range [{lo}, {hi}]",
            grid.lower(),
            grid.upper()
        )))
    }
}

/// Maximum-ignorance prior over (phi, theta): flat in theta, `1/phi` in phi.
pub fn make_joint_mi_prior(
    cfg: &OpticalModelConfig,
    theta_grid: HypothesisGrid1D,
    phi_grid: HypothesisGrid1D,
) -> Result<JointPosterior> {
    check_covers(&theta_grid, cfg.theta_min, cfg.theta_max, "theta")?;
    check_covers(&phi_grid, cfg.phi_min, cfg.phi_max, "phi")?;
    let analytic_norm = (cfg.theta_max - cfg.theta_min) * (cfg.phi_max / cfg.phi_min).ln();
    let nt = theta_grid.len();
    let mut density = Vec::with_capacity(nt * phi_grid.len());
    for &phi in phi_grid.values() {
        density.extend(std::iter::repeat_n(1.0 / (analytic_norm * phi), nt));
    }
    // renormalize so the trapezoid integral is exactly one
    JointPosterior::from_unnormalized(theta_grid, phi_grid, density)
}

/// Updates with one shot. Atom shots use mean `phi e^{-zeta theta} + dark`,
/// empty-trap shots `phi + dark`.
pub fn joint_update(
    post: &JointPosterior,
    shot: &ShotRecord,
    cfg: &OpticalModelConfig,
) -> Result<JointPosterior> {
    let sanity = 10.0 * cfg.phi_max + cfg.dark_rate;
    if shot.raw_count as f64 > sanity {
        return Err(MetrologyError::InvalidArgument(format!(
            "raw count {} exceeds sanity bound {sanity}",
            shot.raw_count
        )));
    }
    let n = shot.raw_count as f64;
    let dark = cfg.dark_rate;
    let thetas = post.theta_grid.values();
    let mut log_lik = Vec::with_capacity(post.density.len());
    if shot.atoms_present {
        let z = cfg.zeta(shot.detuning);
        let transmission: Vec<f64> = thetas.iter().map(|t| (-z * t).exp()).collect();
        for &phi in post.phi_grid.values() {
            log_lik.extend(transmission.iter().map(|tr| {
                let mean = phi * tr + dark;
                n * mean.ln() - mean
            }));
        }
    } else {
        for &phi in post.phi_grid.values() {
            let mean = phi + dark;
            let l = n * mean.ln() - mean;
            log_lik.extend(std::iter::repeat_n(l, thetas.len()));
        }
    }
    post.update_log(&log_lik)
}

/// Integrates phi out of the joint density.
pub fn marginal_theta(post: &JointPosterior) -> Posterior1D {
    let mut acc = vec![0.0; post.theta_grid.len()];
    for (row, wp) in post.rows().zip(post.phi_grid.weights()) {
        for (a, d) in acc.iter_mut().zip(row) {
            *a += wp * d;
        }
    }
    Posterior1D::from_unnormalized(post.theta_grid.clone(), acc)
        .expect("normalized joint has a normalizable marginal")
}

pub fn marginal_phi(post: &JointPosterior) -> Posterior1D {
    let acc = post.rows().map(|row| post.theta_grid.integrate(row)).collect();
    Posterior1D::from_unnormalized(post.phi_grid.clone(), acc)
        .expect("normalized joint has a normalizable marginal")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomEstimate {
    pub estimate: f64,
    pub error: f64,
    /// More than 5% of the theta-marginal sits in the two outermost cells at
    /// either end, or the marginal is still at least a tenth of its peak at an
    /// end of the range.
    pub edge_concentration: bool,
}

/// Posterior-mean atom number `kappa E[theta]` and its error bar
/// `kappa sd[theta]`, with phi marginalized.
pub fn atom_estimate(post: &JointPosterior, cfg: &OpticalModelConfig) -> AtomEstimate {
    let marginal = marginal_theta(post);
    let spec = SymmetrySpec::identity();
    let theta_hat = optimal_estimate(&marginal, &spec);
    let theta_err = optimal_uncertainty(&marginal, &spec).expect("linear symmetry has unit slope");
    let masses: Vec<f64> = marginal.masses().collect();
    let k = EDGE_CELLS.min(masses.len());
    let low: f64 = masses[..k].iter().sum();
    let high: f64 = masses[masses.len() - k..].iter().sum();
    let d = marginal.density();
    let peak = d.iter().copied().fold(0.0, f64::max);
    let edge = d[0].max(d[d.len() - 1]);
    AtomEstimate {
        estimate: cfg.kappa * theta_hat,
        error: cfg.kappa * theta_err,
        edge_concentration: low > EDGE_MASS_LIMIT
            || high > EDGE_MASS_LIMIT
            || edge >= EDGE_DENSITY_RATIO * peak,
    }
}
