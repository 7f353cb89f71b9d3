//! One adaptive run of 30 shot pairs: the chosen detuning and the running
//! atom-number estimate after each pair.
//!
//! cargo run --release --example adaptive_episode -- [seed]

use adaptive_metrology::absorption::OpticalModelConfig;
use adaptive_metrology::controller::{run_adaptive_episode, ControllerConfig};
use adaptive_metrology::simulator::TruthConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let model = OpticalModelConfig::default();
    let truth = TruthConfig::default();
    let trace = run_adaptive_episode(&truth, 30, seed, &ControllerConfig::default(), &model)?;
    println!("true atom number {:.1}", model.kappa * truth.theta_true);
    println!("{:>3} {:>8} {:>4} {:>4} {:>16}", "k", "det/MHz", "n_a", "n_b", "estimate");
    for k in 0..trace.len() {
        println!(
            "{:>3} {:>8.3} {:>4} {:>4} {:>8.1} ± {:<6.1}",
            k + 1,
            trace.detunings_used[k],
            trace.shots[2 * k].raw_count,
            trace.shots[2 * k + 1].raw_count,
            trace.estimates[k].unwrap_or(f64::NAN),
            trace.errors[k].unwrap_or(f64::NAN),
        );
    }
    if let Some(reason) = &trace.aborted {
        println!("stopped early: {reason}");
    }
    Ok(())
}
