use serde::{Deserialize, Serialize};

use super::ShotRecord;
use crate::error::{MetrologyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub estimate: f64,
    pub error: f64,
}

/// Standard log-ratio atom-number estimate from dark-corrected mean counts,
/// `(kappa / zeta) ln(<n_b> / <n_a>)`. The error is propagated to first order
/// from the standard errors of the two means.
pub fn mle_estimate(
    shots_a: &[ShotRecord],
    shots_b: &[ShotRecord],
    zeta: f64,
    kappa: f64,
) -> Result<MleEstimate> {
    if shots_a.is_empty() || shots_b.is_empty() {
        return Err(MetrologyError::InvalidArgument(
            "log-ratio estimate needs at least one shot of each kind".into(),
        ));
    }
    let (mean_a, se_a) = mean_and_standard_error(shots_a);
    let (mean_b, se_b) = mean_and_standard_error(shots_b);
    let estimate = mle_from_means(mean_a, mean_b, zeta, kappa)?;
    let error =
        kappa / zeta * ((se_a / mean_a).powi(2) + (se_b / mean_b).powi(2)).sqrt();
    Ok(MleEstimate { estimate, error })
}

/// Closed-form estimate from two corrected means.
pub fn mle_from_means(mean_a: f64, mean_b: f64, zeta: f64, kappa: f64) -> Result<f64> {
    for mean in [mean_a, mean_b] {
        if !(mean > 0.0) {
            return Err(MetrologyError::NonPositiveMean { mean });
        }
    }
    Ok(kappa / zeta * (mean_b / mean_a).ln())
}

/// Mean of the corrected counts with its standard error. A single shot has
/// no sample spread, so its Poisson standard error `sqrt(raw)` is used.
fn mean_and_standard_error(shots: &[ShotRecord]) -> (f64, f64) {
    let k = shots.len() as f64;
    let mean = shots.iter().map(|s| s.corrected_count).sum::<f64>() / k;
    if shots.len() < 2 {
        return (mean, (shots[0].raw_count as f64).sqrt());
    }
    let var = shots
        .iter()
        .map(|s| (s.corrected_count - mean).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    (mean, (var / k).sqrt())
}
