//! Repeats all five strategies on the default truth and prints the summary
//! table after 30 shot pairs.
//!
//! cargo run --release --example compare_strategies -- [repeats]

use adaptive_metrology::absorption::OpticalModelConfig;
use adaptive_metrology::analysis::{nsr_series, run_comparison, summarize, summary_text, ComparisonPlan};
use adaptive_metrology::controller::ControllerConfig;
use adaptive_metrology::simulator::{StrategyKind, TruthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let repeats = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let plan = ComparisonPlan {
        strategies: StrategyKind::all().to_vec(),
        repeats,
        k_max: 30,
        seed: 1,
        truth: TruthConfig::default(),
    };
    let start = std::time::Instant::now();
    let cmp = run_comparison(&plan, &ControllerConfig::default(), &OpticalModelConfig::default())?;
    println!("ran {} episodes in {:.1?}", cmp.traces.len(), start.elapsed());
    if let Some(d) = cmp.apriori_detuning {
        println!("a-priori detuning: {d:.3} MHz");
    }
    print!("{}", summary_text(&summarize(&cmp.traces, plan.k_max)?));

    let series = nsr_series(&cmp.traces, plan.k_max);
    let target = series
        .iter()
        .find(|p| p.strategy == StrategyKind::OnResonanceMle && p.k == plan.k_max)
        .and_then(|p| p.nsr);
    if let Some(target) = target {
        let k = series
            .iter()
            .filter(|p| p.strategy == StrategyKind::AdaptiveBayes)
            .find(|p| p.nsr.is_some_and(|v| v < target))
            .map(|p| p.k);
        println!("adaptive matches on-resonance MLE at k = 30 after k = {k:?}");
    }
    Ok(())
}
