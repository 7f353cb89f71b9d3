//! Round trip through the shot-log format: simulate 30 on-resonance shot
//! pairs, write them as CSV, read them back, and estimate the atom number
//! with the Bayesian posterior and the log-ratio formula.

use adaptive_metrology::absorption::{
    atom_estimate, joint_update, make_joint_mi_prior, mle_estimate, mle_from_means,
    read_shot_log, write_shot_log, OpticalModelConfig, ShotRecord,
};
use adaptive_metrology::simulator::{ShotSimulator, TruthConfig};

fn main() -> adaptive_metrology::Result<()> {
    let model = OpticalModelConfig::default();
    let mut sim = ShotSimulator::new(TruthConfig::default().with_seed(11), model.gamma_fwhm);
    let shots: Vec<ShotRecord> = (0..30).flat_map(|_| {
        let (a, b) = sim.pair(0.0);
        [a, b]
    }).collect();

    let mut csv = Vec::new();
    write_shot_log(&mut csv, &shots)?;
    println!("{}", String::from_utf8_lossy(&csv).lines().take(4).collect::<Vec<_>>().join("\n"));
    let shots = read_shot_log(csv.as_slice(), model.dark_rate)?;

    let mut post = make_joint_mi_prior(&model, model.theta_grid()?, model.phi_grid()?)?;
    for s in &shots {
        post = joint_update(&post, s, &model)?;
    }
    let bayes = atom_estimate(&post, &model);
    println!("bayesian: {:.1} ± {:.1}", bayes.estimate, bayes.error);

    let (a, b): (Vec<ShotRecord>, Vec<ShotRecord>) = shots.iter().partition(|s| s.atoms_present);
    match mle_estimate(&a, &b, model.zeta(0.0), model.kappa) {
        Ok(m) => println!("log ratio: {:.1} ± {:.1}", m.estimate, m.error),
        Err(e) => println!("log ratio: undefined ({e})"),
    }

    // textbook means: 0.7 and 18.1 counts
    println!("means 0.7 / 18.1 give {:.2}", mle_from_means(0.7, 18.1, 1.0, model.kappa)?);
    Ok(())
}
