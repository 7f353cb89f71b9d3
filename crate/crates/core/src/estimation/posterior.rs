use serde::{Deserialize, Serialize};

use super::{HypothesisGrid1D, SymmetrySpec, EVIDENCE_FLOOR};
use crate::error::{MetrologyError, Result};

/// Normalized density sampled on a [`HypothesisGrid1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior1D {
    grid: HypothesisGrid1D,
    density: Vec<f64>,
}

impl Posterior1D {
    /// Normalizes `unnormalized` over the grid.
    pub fn from_unnormalized(grid: HypothesisGrid1D, unnormalized: Vec<f64>) -> Result<Self> {
        if unnormalized.len() != grid.len() {
            return Err(MetrologyError::LengthMismatch {
                len: unnormalized.len(),
                points: grid.len(),
            });
        }
        if unnormalized.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(MetrologyError::InvalidArgument(
                "density values must be finite and nonnegative".into(),
            ));
        }
        let norm = grid.integrate(&unnormalized);
        if !(norm > EVIDENCE_FLOOR) {
            return Err(MetrologyError::ZeroEvidence);
        }
        let density = unnormalized.into_iter().map(|d| d / norm).collect();
        Ok(Self { grid, density })
    }

    pub fn uniform(grid: HypothesisGrid1D) -> Self {
        let n = grid.len();
        Self::from_unnormalized(grid, vec![1.0; n]).expect("uniform density is valid")
    }

    /// All probability on a single grid node.
    pub fn point_mass(grid: HypothesisGrid1D, index: usize) -> Self {
        assert!(index < grid.len(), "point mass index out of range");
        let mut density = vec![0.0; grid.len()];
        density[index] = 1.0 / grid.weights()[index];
        Self { grid, density }
    }

    pub fn grid(&self) -> &HypothesisGrid1D {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Quadrature probability of each grid node; sums to one.
    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.density
            .iter()
            .zip(self.grid.weights())
            .map(|(d, w)| d * w)
    }

    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.masses()
            .zip(self.grid.values())
            .filter(|(m, _)| *m > 0.0)
            .map(|(m, &x)| m * g(x))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.integrate(&self.density)
    }
}

/// Maximum-ignorance prior for `spec`: density proportional to `|f'|`.
pub fn make_mi_prior(spec: &SymmetrySpec, grid: HypothesisGrid1D) -> Result<Posterior1D> {
    let mut density = Vec::with_capacity(grid.len());
    for &x in grid.values() {
        let d = spec.derivative(x);
        if !d.is_finite() || d == 0.0 {
            return Err(MetrologyError::NonFiniteDerivative { at: x });
        }
        density.push(d.abs());
    }
    Posterior1D::from_unnormalized(grid, density)
}

/// Bayes' rule with likelihood values given in linear space.
pub fn bayes_update(prior: &Posterior1D, likelihood_values: &[f64]) -> Result<Posterior1D> {
    check_len(prior, likelihood_values.len())?;
    if likelihood_values.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(MetrologyError::InvalidArgument(
            "likelihood values must be finite and nonnegative".into(),
        ));
    }
    let product: Vec<f64> = prior
        .density
        .iter()
        .zip(likelihood_values)
        .map(|(p, l)| p * l)
        .collect();
    if !(prior.grid.integrate(&product) > EVIDENCE_FLOOR) {
        return Err(MetrologyError::ZeroEvidence);
    }
    Posterior1D::from_unnormalized(prior.grid.clone(), product)
}

/// Bayes' rule with log-likelihoods. The maximum over the prior support is
/// subtracted before exponentiating so long products of small factors do not
/// underflow.
pub fn bayes_update_log(prior: &Posterior1D, log_likelihood: &[f64]) -> Result<Posterior1D> {
    check_len(prior, log_likelihood.len())?;
    let peak = prior
        .density
        .iter()
        .zip(log_likelihood)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(MetrologyError::ZeroEvidence);
    }
    let product: Vec<f64> = prior
        .density
        .iter()
        .zip(log_likelihood)
        .map(|(p, l)| if *p > 0.0 { p * (l - peak).exp() } else { 0.0 })
        .collect();
    Posterior1D::from_unnormalized(prior.grid.clone(), product)
}

/// `f^{-1}(E[f(theta)])`, the estimator that minimizes the quadratic loss in
/// location space.
pub fn optimal_estimate(post: &Posterior1D, spec: &SymmetrySpec) -> f64 {
    spec.inverse(post.expectation(|x| spec.apply(x)))
}

/// Error bar `sqrt(E[f^2] - f(estimate)^2) / |f'(estimate)|`.
pub fn optimal_uncertainty(post: &Posterior1D, spec: &SymmetrySpec) -> Result<f64> {
    let mean_f = post.expectation(|x| spec.apply(x));
    let mean_f2 = post.expectation(|x| spec.apply(x).powi(2));
    let estimate = spec.inverse(mean_f);
    let slope = spec.derivative(estimate).abs();
    if !(slope >= 1e-300) {
        return Err(MetrologyError::DegenerateDerivative { value: slope });
    }
    // f(estimate) == mean_f; rounding can push the difference a hair below 0
    let loss = (mean_f2 - mean_f * mean_f).max(0.0);
    Ok(loss.sqrt() / slope)
}

/// Grid maximum-likelihood estimate. Ties go to the smallest hypothesis.
pub fn grid_mle(likelihood_values: &[f64], grid: &HypothesisGrid1D) -> Result<f64> {
    if likelihood_values.len() != grid.len() {
        return Err(MetrologyError::LengthMismatch {
            len: likelihood_values.len(),
            points: grid.len(),
        });
    }
    if likelihood_values.iter().any(|l| !l.is_finite()) {
        return Err(MetrologyError::InvalidArgument(
            "likelihood values must be finite".into(),
        ));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, &l) in likelihood_values.iter().enumerate() {
        match best {
            Some((_, b)) if l <= b => {}
            _ => best = Some((i, l)),
        }
    }
    match best {
        Some((i, l)) if l != 0.0 => Ok(grid.values()[i]),
        _ => Err(MetrologyError::AllZero),
    }
}

fn check_len(prior: &Posterior1D, len: usize) -> Result<()> {
    if len == prior.grid.len() {
        Ok(())
    } else {
        Err(MetrologyError::LengthMismatch {
            len,
            points: prior.grid.len(),
        })
    }
}
