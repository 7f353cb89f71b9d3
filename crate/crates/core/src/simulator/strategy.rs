use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{RunTrace, ShotSimulator, TruthConfig};
use crate::absorption::{
    atom_estimate, joint_update, make_joint_mi_prior, mle_estimate, JointPosterior,
    OpticalModelConfig, ShotRecord,
};
use crate::controller::{run_adaptive_episode, ControllerConfig, GainEvaluator};
use crate::error::{MetrologyError, Result};

pub const DEFAULT_DETUNED_MHZ: f64 = 5.0;

/// Serialized as its [`StrategyKind::name`], e.g. `"adaptive_bayes"` or
/// `"detuned_mle@3.5"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategyKind {
    /// Log-ratio estimate with the probe on resonance.
    OnResonanceMle,
    /// Log-ratio estimate with a fixed detuning (MHz).
    DetunedMle(f64),
    /// Posterior mean with the probe on resonance.
    OnResonanceBayes,
    /// Posterior mean at the detuning that maximizes the gain under the prior.
    AprioriBayes,
    /// Posterior mean with the detuning re-optimized before every shot.
    AdaptiveBayes,
}

impl StrategyKind {
    pub fn all() -> [StrategyKind; 5] {
        [
            StrategyKind::OnResonanceMle,
            StrategyKind::DetunedMle(DEFAULT_DETUNED_MHZ),
            StrategyKind::OnResonanceBayes,
            StrategyKind::AprioriBayes,
            StrategyKind::AdaptiveBayes,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            StrategyKind::OnResonanceMle => "on_resonance_mle".into(),
            StrategyKind::DetunedMle(d) if *d == DEFAULT_DETUNED_MHZ => "detuned_mle".into(),
            StrategyKind::DetunedMle(d) => format!("detuned_mle@{d}"),
            StrategyKind::OnResonanceBayes => "on_resonance_bayes".into(),
            StrategyKind::AprioriBayes => "a_priori_bayes".into(),
            StrategyKind::AdaptiveBayes => "adaptive_bayes".into(),
        }
    }

    /// Position in the canonical table ordering.
    pub fn rank(&self) -> usize {
        match self {
            StrategyKind::OnResonanceMle => 0,
            StrategyKind::DetunedMle(_) => 1,
            StrategyKind::OnResonanceBayes => 2,
            StrategyKind::AprioriBayes => 3,
            StrategyKind::AdaptiveBayes => 4,
        }
    }

    pub fn is_bayesian(&self) -> bool {
        self.rank() >= 2
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl From<StrategyKind> for String {
    fn from(k: StrategyKind) -> String {
        k.name()
    }
}

impl TryFrom<String> for StrategyKind {
    type Error = MetrologyError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for StrategyKind {
    type Err = MetrologyError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(rest) = norm.strip_prefix("detuned_mle@").or_else(|| norm.strip_prefix("detuned@")) {
            let d: f64 = rest
                .parse()
                .map_err(|_| MetrologyError::config("strategies", format!("bad detuning in `{s}`")))?;
            return Ok(StrategyKind::DetunedMle(d));
        }
        Ok(match norm.as_str() {
            "on_resonance_mle" | "on_resonance" | "mle" => StrategyKind::OnResonanceMle,
            "detuned_mle" | "detuned" => StrategyKind::DetunedMle(DEFAULT_DETUNED_MHZ),
            "on_resonance_bayes" | "on_resonance_bayesian" => StrategyKind::OnResonanceBayes,
            "a_priori_bayes" | "apriori_bayes" | "a_priori" | "apriori" => StrategyKind::AprioriBayes,
            "adaptive_bayes" | "adaptive" => StrategyKind::AdaptiveBayes,
            _ => {
                return Err(MetrologyError::config(
                    "strategies",
                    format!("unknown strategy `{s}`"),
                ))
            }
        })
    }
}

/// Runs strategies under one model and controller configuration. The
/// prior-optimal detuning for [`StrategyKind::AprioriBayes`] is computed on
/// first use and shared afterwards.
#[derive(Debug)]
pub struct StrategyRunner {
    controller: ControllerConfig,
    model: OpticalModelConfig,
    prior: JointPosterior,
    apriori_detuning: OnceLock<f64>,
}

impl StrategyRunner {
    pub fn new(controller: &ControllerConfig, model: &OpticalModelConfig) -> Result<Self> {
        model.validate()?;
        controller.validate()?;
        let prior = make_joint_mi_prior(model, model.theta_grid()?, model.phi_grid()?)?;
        Ok(Self {
            controller: controller.clone(),
            model: model.clone(),
            prior,
            apriori_detuning: OnceLock::new(),
        })
    }

    pub fn prior(&self) -> &JointPosterior {
        &self.prior
    }

    pub fn model(&self) -> &OpticalModelConfig {
        &self.model
    }

    pub fn controller(&self) -> &ControllerConfig {
        &self.controller
    }

    /// Gain-maximizing detuning under the prior, i.e. before any shot.
    pub fn apriori_detuning(&self) -> Result<f64> {
        if let Some(d) = self.apriori_detuning.get() {
            return Ok(*d);
        }
        let curve = GainEvaluator::new(&self.controller, &self.model).select(&self.prior)?;
        Ok(*self.apriori_detuning.get_or_init(|| curve.argmax_detuning))
    }

    pub fn run(&self, kind: StrategyKind, truth: &TruthConfig, k_max: usize) -> Result<RunTrace> {
        if k_max == 0 {
            return Err(MetrologyError::InvalidArgument("k_max must be at least 1".into()));
        }
        truth.validate()?;
        match kind {
            StrategyKind::OnResonanceMle => Ok(self.run_mle(kind, 0.0, truth, k_max)),
            StrategyKind::DetunedMle(d) => Ok(self.run_mle(kind, d, truth, k_max)),
            StrategyKind::OnResonanceBayes => self.run_fixed_bayes(kind, 0.0, truth, k_max),
            StrategyKind::AprioriBayes => {
                let d = self.apriori_detuning()?;
                self.run_fixed_bayes(kind, d, truth, k_max)
            }
            StrategyKind::AdaptiveBayes => {
                run_adaptive_episode(truth, k_max, truth.seed, &self.controller, &self.model)
            }
        }
    }

    fn run_mle(&self, kind: StrategyKind, detuning: f64, truth: &TruthConfig, k_max: usize) -> RunTrace {
        let mut sim = ShotSimulator::new(*truth, self.model.gamma_fwhm);
        let mut trace = RunTrace::new(kind, truth.seed);
        let z = self.model.zeta(detuning);
        let mut atoms: Vec<ShotRecord> = Vec::with_capacity(k_max);
        let mut empty: Vec<ShotRecord> = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            let (a, b) = sim.pair(detuning);
            atoms.push(a);
            empty.push(b);
            let (est, err) = match mle_estimate(&atoms, &empty, z, self.model.kappa) {
                Ok(r) => (Some(r.estimate), Some(r.error)),
                Err(_) => (None, None),
            };
            trace.push(a, b, detuning, est, err);
        }
        trace
    }

    fn run_fixed_bayes(
        &self,
        kind: StrategyKind,
        detuning: f64,
        truth: &TruthConfig,
        k_max: usize,
    ) -> Result<RunTrace> {
        let mut sim = ShotSimulator::new(*truth, self.model.gamma_fwhm);
        let mut trace = RunTrace::new(kind, truth.seed);
        let mut post = self.prior.clone();
        for _ in 0..k_max {
            let (a, b) = sim.pair(detuning);
            let updated = joint_update(&post, &a, &self.model)
                .and_then(|p| joint_update(&p, &b, &self.model));
            match updated {
                Ok(p) => post = p,
                Err(e) => {
                    trace.aborted = Some(format!("update failed at k = {}: {e}", trace.len() + 1));
                    return Ok(trace);
                }
            }
            let est = atom_estimate(&post, &self.model);
            trace.edge_concentration = est.edge_concentration;
            trace.push(a, b, detuning, Some(est.estimate), Some(est.error));
        }
        Ok(trace)
    }
}

/// One-shot convenience wrapper around [`StrategyRunner`].
pub fn run_strategy(
    kind: StrategyKind,
    truth: &TruthConfig,
    k_max: usize,
    cfg: &ControllerConfig,
    model: &OpticalModelConfig,
) -> Result<RunTrace> {
    StrategyRunner::new(cfg, model)?.run(kind, truth, k_max)
}
