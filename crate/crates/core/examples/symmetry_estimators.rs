//! Ignorance priors and optimal estimates under the three built-in symmetry
//! functions, for a flat posterior on a scale parameter phi in [5, 20].

use adaptive_metrology::estimation::{
    bayes_update, make_mi_prior, optimal_estimate, optimal_uncertainty, HypothesisGrid1D,
    Posterior1D, SymmetrySpec,
};

fn main() -> adaptive_metrology::Result<()> {
    let grid = HypothesisGrid1D::uniform(5.0, 20.0, 2001)?;
    let flat = Posterior1D::uniform(grid.clone());

    for (name, spec) in [
        ("linear", SymmetrySpec::identity()),
        ("logarithmic", SymmetrySpec::logarithmic(1.0, 1.0)),
    ] {
        let est = optimal_estimate(&flat, &spec);
        let err = optimal_uncertainty(&flat, &spec)?;
        println!("{name:>12}: estimate {est:.4} ± {err:.4}");
    }

    // the logarithmic ignorance prior weights small values more heavily
    let log_spec = SymmetrySpec::logarithmic(1.0, 1.0);
    let prior = make_mi_prior(&log_spec, grid.clone())?;
    println!("log prior density at 5 and 20: {:.4}, {:.4}", prior.density()[0], prior.density()[grid.len() - 1]);

    // one Gaussian-shaped observation centered at 12
    let lik: Vec<f64> = grid.values().iter().map(|p| (-(p - 12.0f64).powi(2) / 8.0).exp()).collect();
    let post = bayes_update(&prior, &lik)?;
    println!(
        "after one observation: {:.4} ± {:.4}",
        optimal_estimate(&post, &log_spec),
        optimal_uncertainty(&post, &log_spec)?
    );

    // probabilities use the log-odds symmetry
    let w = HypothesisGrid1D::uniform(0.01, 0.99, 981)?;
    let spec = SymmetrySpec::artanh_weight();
    let prior = make_mi_prior(&spec, w)?;
    println!("weight estimate under its ignorance prior: {:.4}", optimal_estimate(&prior, &spec));
    Ok(())
}
