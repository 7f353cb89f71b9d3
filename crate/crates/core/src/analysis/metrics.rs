use crate::error::{MetrologyError, Result};

/// Empirical noise-to-signal ratio `Var(x) / mean(x)^2`, population variance.
pub fn nsr(estimates: &[f64]) -> Result<f64> {
    if estimates.len() < 2 {
        return Err(MetrologyError::InvalidArgument(format!(
            "nsr needs at least 2 values, got {}",
            estimates.len()
        )));
    }
    if estimates.iter().any(|x| !x.is_finite()) {
        return Err(MetrologyError::InvalidArgument("nsr input is not finite".into()));
    }
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    if mean == 0.0 {
        return Err(MetrologyError::ZeroMean);
    }
    // centered form is exactly zero for constant data and scale-invariant
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    Ok(var / (mean * mean))
}

/// Smallest 1-based `k` from which every later estimate stays within
/// `fraction * |final|` of the final estimate. Missing estimates count as
/// outside the band.
pub fn k_min(estimates: &[Option<f64>], fraction: f64) -> usize {
    let Some(Some(last)) = estimates.last().copied() else {
        return estimates.len();
    };
    let band = fraction * last.abs();
    let mut k = estimates.len();
    for (i, e) in estimates.iter().enumerate().rev() {
        match e {
            Some(x) if (x - last).abs() <= band => k = i + 1,
            _ => break,
        }
    }
    k
}
