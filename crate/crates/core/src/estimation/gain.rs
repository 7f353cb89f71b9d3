use serde::{Deserialize, Serialize};

use super::{Posterior1D, SymmetrySpec};
use crate::error::{MetrologyError, Result};

/// How far the sum over outcomes `n = 0, 1, ...` is carried.
///
/// The sum stops at the first `n` for which the cumulative likelihood has
/// reached `mass_threshold` for every hypothesis that still carries prior
/// mass (the worst case), or fails at `max_outcome`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub mass_threshold: f64,
    pub max_outcome: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            mass_threshold: 0.99,
            max_outcome: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTerm {
    pub outcome: u64,
    /// `p(n | y)`, the prior-predictive probability of the outcome.
    pub evidence: f64,
    /// `f` evaluated at the estimate obtained after observing the outcome.
    pub estimate_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionGainResult {
    pub gain: f64,
    pub per_outcome_terms: Vec<OutcomeTerm>,
    pub truncation_bound: u64,
}

impl PrecisionGainResult {
    pub fn covered_evidence(&self) -> f64 {
        self.per_outcome_terms.iter().map(|t| t.evidence).sum()
    }
}

/// Precision gain `G = sum_n p(n) f(estimate after n)^2` for a discrete
/// outcome model `outcome_likelihood(n, theta)`.
///
/// Maximizing `G` over a control setting minimizes the expected posterior
/// loss `E_prior[f^2] - G`.
pub fn precision_gain<L>(
    prior: &Posterior1D,
    spec: &SymmetrySpec,
    outcome_likelihood: L,
    truncation: TruncationPolicy,
) -> Result<PrecisionGainResult>
where
    L: Fn(u64, f64) -> f64,
{
    // (mass, theta, f(theta)) for every node carrying prior mass
    let support: Vec<(f64, f64, f64)> = prior
        .masses()
        .zip(prior.grid().values())
        .filter(|(m, _)| *m > 0.0)
        .map(|(m, &x)| (m, x, spec.apply(x)))
        .collect();
    let mut cumulative = vec![0.0; support.len()];
    let mut terms = Vec::new();
    let mut gain = 0.0;

    let mut n = 0u64;
    loop {
        let mut evidence = 0.0;
        let mut weighted_f = 0.0;
        for ((mass, x, fx), cum) in support.iter().zip(cumulative.iter_mut()) {
            let l = outcome_likelihood(n, *x);
            *cum += l;
            evidence += mass * l;
            weighted_f += mass * l * fx;
        }
        if evidence > 0.0 {
            let estimate_f = weighted_f / evidence;
            gain += weighted_f * estimate_f;
            terms.push(OutcomeTerm {
                outcome: n,
                evidence,
                estimate_f,
            });
        }
        let worst = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
        if worst >= truncation.mass_threshold {
            break;
        }
        if n >= truncation.max_outcome {
            return Err(MetrologyError::TruncationFailure {
                coverage: worst,
                threshold: truncation.mass_threshold,
                max_outcome: truncation.max_outcome,
            });
        }
        n += 1;
    }

    Ok(PrecisionGainResult {
        gain,
        per_outcome_terms: terms,
        truncation_bound: n,
    })
}
