use serde::{Deserialize, Serialize};

use crate::error::{MetrologyError, Result};

/// Uniform grid over `[lower, upper]` with composite trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisGrid1D {
    lower: f64,
    upper: f64,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl HypothesisGrid1D {
    pub fn uniform(lower: f64, upper: f64, points: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(MetrologyError::InvalidGrid(format!(
                "need finite lower < upper, got [{lower}, {upper}]"
            )));
        }
        if points < 2 {
            return Err(MetrologyError::InvalidGrid(format!(
                "need at least 2 points, got {points}"
            )));
        }
        let step = (upper - lower) / (points - 1) as f64;
        let mut values: Vec<f64> = (0..points).map(|i| lower + step * i as f64).collect();
        // pin the endpoint exactly; lower + step * (n - 1) can miss by an ulp
        values[points - 1] = upper;
        let mut weights = vec![step; points];
        weights[0] = 0.5 * step;
        weights[points - 1] = 0.5 * step;
        Ok(Self {
            lower,
            upper,
            values,
            weights,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / (self.len() - 1) as f64
    }

    /// Trapezoid integral of samples aligned with [`Self::values`].
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.len());
        samples
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| s * w)
            .sum()
    }

    /// Index of the grid node nearest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = ((x - self.lower) / self.spacing()).round();
        raw.clamp(0.0, (self.len() - 1) as f64) as usize
    }
}
