use rayon::prelude::*;

use crate::absorption::OpticalModelConfig;
use crate::controller::ControllerConfig;
use crate::error::{MetrologyError, Result};
use crate::simulator::{RunTrace, StrategyKind, StrategyRunner, TruthConfig};

pub const THREADS_ENV: &str = "METROLOGY_THREADS";

/// What to simulate: every strategy is repeated with seeds
/// `seed, seed + 1, ..., seed + repeats - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonPlan {
    pub strategies: Vec<StrategyKind>,
    pub repeats: usize,
    pub k_max: usize,
    pub seed: u64,
    pub truth: TruthConfig,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// Grouped by strategy in plan order, seeds ascending within a group.
    pub traces: Vec<RunTrace>,
    pub apriori_detuning: Option<f64>,
}

impl Comparison {
    pub fn traces_for(&self, kind: StrategyKind) -> impl Iterator<Item = &RunTrace> {
        self.traces.iter().filter(move |t| t.strategy == kind)
    }
}

/// Worker count from `METROLOGY_THREADS`, or `None` for the rayon default.
pub fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(MetrologyError::config(
                THREADS_ENV,
                format!("expected a positive integer, got `{v}`"),
            )),
        },
    }
}

/// Runs every (strategy, repeat) episode in parallel. Each episode owns its
/// generator, so the result does not depend on the thread count.
pub fn run_comparison(
    plan: &ComparisonPlan,
    controller: &ControllerConfig,
    model: &OpticalModelConfig,
) -> Result<Comparison> {
    if plan.repeats == 0 || plan.k_max == 0 || plan.strategies.is_empty() {
        return Err(MetrologyError::InvalidArgument(
            "need at least one strategy, one repeat and one shot".into(),
        ));
    }
    let runner = StrategyRunner::new(controller, model)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| MetrologyError::InvalidArgument(e.to_string()))?;

    let jobs: Vec<(StrategyKind, u64)> = plan
        .strategies
        .iter()
        .flat_map(|&k| (0..plan.repeats as u64).map(move |j| (k, plan.seed + j)))
        .collect();
    let apriori = if plan.strategies.contains(&StrategyKind::AprioriBayes) {
        Some(pool.install(|| runner.apriori_detuning())?)
    } else {
        None
    };
    let traces = pool.install(|| {
        jobs.par_iter()
            .map(|&(kind, seed)| runner.run(kind, &plan.truth.with_seed(seed), plan.k_max))
            .collect::<Result<Vec<RunTrace>>>()
    })?;
    Ok(Comparison {
        traces,
        apriori_detuning: apriori,
    })
}
