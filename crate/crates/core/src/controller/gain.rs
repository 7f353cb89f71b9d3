use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CubicSpline;
use crate::absorption::{zeta, JointPosterior, OpticalModelConfig};
use crate::error::{MetrologyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    CubicSpline,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Candidate detunings in MHz, ascending.
    pub detuning_candidates: Vec<f64>,
    /// Outcome sums stop once this much likelihood mass is covered for the
    /// worst-case hypothesis in the truncation window.
    pub outcome_mass_threshold: f64,
    /// Cells below this fraction of the peak density are dropped from the
    /// integration window.
    pub density_truncation: f64,
    pub max_outcome: u64,
    pub interpolation: Interpolation,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            detuning_candidates: (0..13).map(|i| 0.5 * i as f64).collect(),
            outcome_mass_threshold: 0.99,
            density_truncation: 0.01,
            max_outcome: 2_000,
            interpolation: Interpolation::CubicSpline,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.detuning_candidates;
        if c.is_empty() || c.iter().any(|d| !d.is_finite()) {
            return Err(MetrologyError::config(
                "detuning_candidates",
                "need at least one finite detuning",
            ));
        }
        if c.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MetrologyError::config(
                "detuning_candidates",
                "must be strictly increasing",
            ));
        }
        if self.interpolation == Interpolation::CubicSpline && c.len() < 4 {
            return Err(MetrologyError::config(
                "detuning_candidates",
                "cubic interpolation needs at least 4 candidates",
            ));
        }
        for (field, v) in [
            ("outcome_mass_threshold", self.outcome_mass_threshold),
            ("density_truncation", self.density_truncation),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(MetrologyError::config(field, format!("must lie in (0, 1), got {v}")));
            }
        }
        if self.max_outcome == 0 {
            return Err(MetrologyError::config("max_outcome", "must be positive"));
        }
        Ok(())
    }
}

/// Inclusive index windows `(first, last)` into the theta and phi grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportWindow {
    pub theta: (usize, usize),
    pub phi: (usize, usize),
}

impl SupportWindow {
    pub fn theta_len(&self) -> usize {
        self.theta.1 - self.theta.0 + 1
    }

    pub fn phi_len(&self) -> usize {
        self.phi.1 - self.phi.0 + 1
    }
}

/// Smallest rectangle of grid indices outside of which the density stays
/// below `density_truncation` times its maximum.
pub fn truncate_support(post: &JointPosterior, cfg: &ControllerConfig) -> SupportWindow {
    let nt = post.theta_grid().len();
    let peak = post.density().iter().copied().fold(0.0, f64::max);
    let cut = cfg.density_truncation * peak;
    let mut theta = (usize::MAX, 0);
    let mut phi = (usize::MAX, 0);
    for (i, row) in post.rows().enumerate() {
        let mut row_hit = false;
        for (j, &d) in row.iter().enumerate() {
            if d >= cut && d > 0.0 {
                theta.0 = theta.0.min(j);
                theta.1 = theta.1.max(j);
                row_hit = true;
            }
        }
        if row_hit {
            phi.0 = phi.0.min(i);
            phi.1 = phi.1.max(i);
        }
    }
    if theta.0 == usize::MAX {
        // all-zero density cannot be normalized, so this is unreachable for
        // valid posteriors; fall back to the full grid
        return SupportWindow {
            theta: (0, nt - 1),
            phi: (0, post.phi_grid().len() - 1),
        };
    }
    SupportWindow { theta, phi }
}

/// Sampled gain curve and its maximizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCurve {
    pub detunings: Vec<f64>,
    pub gains: Vec<f64>,
    pub argmax_detuning: f64,
    pub argmax_gain: f64,
    pub interpolation: Interpolation,
}

/// Precomputed per-episode state: `zeta` for every candidate detuning and
/// `1 / (n + 1)` up to the outcome cap.
#[derive(Debug, Clone)]
pub struct GainEvaluator {
    cfg: ControllerConfig,
    model: OpticalModelConfig,
    candidate_zetas: Vec<f64>,
    reciprocals: Vec<f64>,
}

impl GainEvaluator {
    pub fn new(cfg: &ControllerConfig, model: &OpticalModelConfig) -> Self {
        Self {
            candidate_zetas: cfg
                .detuning_candidates
                .iter()
                .map(|&d| zeta(model.gamma_fwhm, d))
                .collect(),
            reciprocals: (0..=cfg.max_outcome).map(|n| 1.0 / (n + 1) as f64).collect(),
            cfg: cfg.clone(),
            model: model.clone(),
        }
    }

    pub fn controller(&self) -> &ControllerConfig {
        &self.cfg
    }

    /// Gain of an atom shot at an arbitrary detuning.
    pub fn gain(&self, post: &JointPosterior, detuning: f64) -> Result<f64> {
        let z = zeta(self.model.gamma_fwhm, detuning);
        self.gain_for_zeta(post, &truncate_support(post, &self.cfg), z)
    }

    /// `G = sum_n p(n) E[theta | n]^2` over the truncated window. The outcome
    /// sum is renormalized by the evidence it covers, so `G` is the gain
    /// conditional on the outcome landing inside the truncated range.
    fn gain_for_zeta(&self, post: &JointPosterior, win: &SupportWindow, z: f64) -> Result<f64> {
        let thetas = &post.theta_grid().values()[win.theta.0..=win.theta.1];
        let theta_w = &post.theta_grid().weights()[win.theta.0..=win.theta.1];
        let phis = post.phi_grid().values();
        let phi_w = post.phi_grid().weights();
        let dark = self.model.dark_rate;
        let transmission: Vec<f64> = thetas.iter().map(|t| (-z * t).exp()).collect();

        // worst case: the largest mean in the window needs the most outcomes
        let max_mean = phis[win.phi.1] * transmission[0] + dark;
        let bound = self.outcome_bound(max_mean)?;

        let mut evidence = vec![0.0; bound + 1];
        let mut moment = vec![0.0; bound + 1];
        let mut mass = 0.0;
        for (i, row) in post
            .rows()
            .enumerate()
            .take(win.phi.1 + 1)
            .skip(win.phi.0)
        {
            let phi = phis[i];
            let cells = &row[win.theta.0..=win.theta.1];
            for (((d, wt), tr), theta) in cells.iter().zip(theta_w).zip(&transmission).zip(thetas) {
                let w = d * wt * phi_w[i];
                if w == 0.0 {
                    continue;
                }
                mass += w;
                let mean = phi * tr + dark;
                self.accumulate(w, *theta, mean, &mut evidence, &mut moment);
            }
        }
        if !(mass > 0.0) {
            return Err(MetrologyError::ZeroEvidence);
        }
        let mut covered = 0.0;
        let mut gain = 0.0;
        for (e, m) in evidence.iter().zip(&moment) {
            if *e > 0.0 {
                covered += e;
                gain += m * m / e;
            }
        }
        Ok(gain / covered)
    }

    fn accumulate(&self, w: f64, theta: f64, mean: f64, evidence: &mut [f64], moment: &mut [f64]) {
        let mut p = (-mean).exp();
        if p > 0.0 {
            for (n, (e, m)) in evidence.iter_mut().zip(moment.iter_mut()).enumerate() {
                *e += w * p;
                *m += w * theta * p;
                p *= mean * self.reciprocals[n];
            }
        } else {
            let ln_mean = mean.ln();
            for (n, (e, m)) in evidence.iter_mut().zip(moment.iter_mut()).enumerate() {
                let p = (n as f64 * ln_mean - mean - crate::absorption::ln_factorial(n as u64)).exp();
                *e += w * p;
                *m += w * theta * p;
            }
        }
    }

    /// Smallest `N` with `P(n <= N | mean) >= threshold`.
    fn outcome_bound(&self, mean: f64) -> Result<usize> {
        let threshold = self.cfg.outcome_mass_threshold;
        let cap = self.cfg.max_outcome as usize;
        let ln_mean = mean.ln();
        let mut cdf = 0.0;
        for n in 0..=cap {
            cdf += (n as f64 * ln_mean - mean - crate::absorption::ln_factorial(n as u64)).exp();
            if cdf >= threshold {
                return Ok(n);
            }
        }
        Err(MetrologyError::TruncationFailure {
            coverage: cdf,
            threshold,
            max_outcome: self.cfg.max_outcome,
        })
    }

    /// Gains at every candidate, then the interpolated maximizer.
    pub fn select(&self, post: &JointPosterior) -> Result<GainCurve> {
        let win = truncate_support(post, &self.cfg);
        let gains = self
            .candidate_zetas
            .par_iter()
            .map(|&z| self.gain_for_zeta(post, &win, z))
            .collect::<Result<Vec<f64>>>()?;
        let detunings = self.cfg.detuning_candidates.clone();
        let (argmax_detuning, argmax_gain) = match self.cfg.interpolation {
            Interpolation::CubicSpline => CubicSpline::natural(&detunings, &gains)?.argmax(),
            Interpolation::None => {
                let mut best = (detunings[0], gains[0]);
                for (&d, &g) in detunings.iter().zip(&gains).skip(1) {
                    if g > best.1 + 1e-12 * best.1.abs() {
                        best = (d, g);
                    }
                }
                best
            }
        };
        let lo = detunings[0];
        let hi = detunings[detunings.len() - 1];
        Ok(GainCurve {
            argmax_detuning: argmax_detuning.clamp(lo, hi),
            argmax_gain,
            detunings,
            gains,
            interpolation: self.cfg.interpolation,
        })
    }
}

/// Precision gain (in squared optical depth) of one atom shot at `detuning`.
pub fn gain_at_detuning(
    post: &JointPosterior,
    detuning: f64,
    cfg: &ControllerConfig,
    model: &OpticalModelConfig,
) -> Result<f64> {
    GainEvaluator::new(cfg, model).gain(post, detuning)
}

pub fn select_detuning(
    post: &JointPosterior,
    cfg: &ControllerConfig,
    model: &OpticalModelConfig,
) -> Result<GainCurve> {
    GainEvaluator::new(cfg, model).select(post)
}
