//! Precision gain of the first shot against probe detuning, with and without
//! dark counts in the count model.

use adaptive_metrology::absorption::{make_joint_mi_prior, OpticalModelConfig};
use adaptive_metrology::controller::{select_detuning, ControllerConfig};

fn main() -> adaptive_metrology::Result<()> {
    let controller = ControllerConfig::default();
    for dark_rate in [0.0, 1.0] {
        let model = OpticalModelConfig {
            dark_rate,
            ..OpticalModelConfig::default()
        };
        let prior = make_joint_mi_prior(&model, model.theta_grid()?, model.phi_grid()?)?;
        let start = std::time::Instant::now();
        let curve = select_detuning(&prior, &controller, &model)?;
        println!("dark rate {dark_rate}: ({:.1?})", start.elapsed());
        for (d, g) in curve.detunings.iter().zip(&curve.gains) {
            println!("  {d:4.1} MHz  {g:.5}");
        }
        println!("  argmax {:.3} MHz", curve.argmax_detuning);
    }
    Ok(())
}
