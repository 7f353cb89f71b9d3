use super::{ControllerConfig, GainEvaluator};
use crate::absorption::{atom_estimate, joint_update, make_joint_mi_prior, OpticalModelConfig};
use crate::error::Result;
use crate::simulator::{RunTrace, ShotSimulator, StrategyKind, TruthConfig};

/// Runs `k_max` adaptive shot pairs: before each pair the detuning is chosen
/// by the controller, then the atom and empty-trap counts update the joint
/// posterior. A shot the posterior cannot explain stops the episode and is
/// reported in [`RunTrace::aborted`].
pub fn run_adaptive_episode(
    truth: &TruthConfig,
    k_max: usize,
    seed: u64,
    cfg: &ControllerConfig,
    model: &OpticalModelConfig,
) -> Result<RunTrace> {
    model.validate()?;
    cfg.validate()?;
    truth.validate()?;
    let truth = truth.with_seed(seed);
    let evaluator = GainEvaluator::new(cfg, model);
    let mut post = make_joint_mi_prior(model, model.theta_grid()?, model.phi_grid()?)?;
    let mut sim = ShotSimulator::new(truth, model.gamma_fwhm);
    let mut trace = RunTrace::new(StrategyKind::AdaptiveBayes, seed);

    for k in 1..=k_max {
        let detuning = evaluator.select(&post)?.argmax_detuning;
        let (a, b) = sim.pair(detuning);
        match joint_update(&post, &a, model).and_then(|p| joint_update(&p, &b, model)) {
            Ok(p) => post = p,
            Err(e) => {
                trace.aborted = Some(format!("update failed at k = {k}: {e}"));
                break;
            }
        }
        let est = atom_estimate(&post, model);
        trace.edge_concentration = est.edge_concentration;
        trace.push(a, b, detuning, Some(est.estimate), Some(est.error));
    }
    Ok(trace)
}
