//! Property checks shared by the property suite and the acceptance run. Each
//! returns `Err` with the first counterexample.

#![allow(dead_code)]

use adaptive_metrology::absorption::{
    joint_update, make_joint_mi_prior, JointPosterior, OpticalModelConfig, ShotRecord,
};
use adaptive_metrology::controller::{gain_at_detuning, ControllerConfig};
use adaptive_metrology::estimation::{
    bayes_update, make_mi_prior, optimal_estimate, precision_gain, HypothesisGrid1D,
    Posterior1D, SymmetrySpec, TruncationPolicy,
};
use adaptive_metrology::simulator::{draw_shot, ShotSimulator, TruthConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Map = fn(f64) -> f64;

pub type Check = Result<(), String>;

/// Fixed-seed runner so that verdicts are reproducible.
fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn finish<T: std::fmt::Debug>(
    r: Result<(), proptest::test_runner::TestError<T>>,
) -> Check {
    r.map_err(|e| e.to_string())
}

pub fn poisson_pmf(n: u64, mean: f64) -> f64 {
    let mut p = (-mean).exp();
    for k in 1..=n {
        p *= mean / k as f64;
    }
    p
}

pub fn small_model() -> OpticalModelConfig {
    OpticalModelConfig {
        theta_points: 81,
        phi_points: 41,
        ..OpticalModelConfig::default()
    }
}

/// Joint posterior after `pairs` simulated shot pairs at `detuning`.
pub fn simulated_posterior(
    model: &OpticalModelConfig,
    seed: u64,
    pairs: usize,
    detuning: f64,
) -> JointPosterior {
    let mut post =
        make_joint_mi_prior(model, model.theta_grid().unwrap(), model.phi_grid().unwrap()).unwrap();
    let mut sim = ShotSimulator::new(TruthConfig::default().with_seed(seed), model.gamma_fwhm);
    for _ in 0..pairs {
        let (a, b) = sim.pair(detuning);
        post = joint_update(&post, &a, model).unwrap();
        post = joint_update(&post, &b, model).unwrap();
    }
    post
}

/// Every update, one- and two-dimensional, leaves total mass 1 within 1e-8.
pub fn normalization(cases: u32) -> Check {
    let strategy = (
        prop::collection::vec(0.0f64..1.0, 41),
        prop::collection::vec(prop::collection::vec(1e-6f64..1.0, 41), 1..6),
    );
    finish(runner(cases).run(&strategy, |(prior, liks)| {
        let grid = HypothesisGrid1D::uniform(0.0, 4.0, 41).unwrap();
        let prior: Vec<f64> = prior.iter().map(|p| p + 1e-3).collect();
        let mut post = Posterior1D::from_unnormalized(grid, prior).unwrap();
        for l in &liks {
            post = bayes_update(&post, l).unwrap();
            prop_assert!((post.total_mass() - 1.0).abs() < 1e-8);
        }
        Ok(())
    }))?;

    let model = small_model();
    let strategy = (
        prop::collection::vec((0u64..40, any::<bool>(), 0.0f64..6.0), 1..12),
    );
    finish(runner(cases).run(&strategy, |(shots,)| {
        let mut post =
            make_joint_mi_prior(&model, model.theta_grid().unwrap(), model.phi_grid().unwrap())
                .unwrap();
        prop_assert!((post.total_mass() - 1.0).abs() < 1e-8);
        for (n, atoms, d) in shots {
            post = joint_update(&post, &ShotRecord::new(d, atoms, n, model.dark_rate), &model)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!((post.total_mass() - 1.0).abs() < 1e-8, "{}", post.total_mass());
        }
        Ok(())
    }))
}

/// `G >= (E f)^2` for finite-outcome measurements, where the outcome sum is
/// complete.
pub fn gain_lower_bound(cases: u32) -> Check {
    let strategy = (
        prop::collection::vec(0.01f64..1.0, 33),
        1u64..8,
        any::<bool>(),
    );
    finish(runner(cases).run(&strategy, |(prior, trials, log_spec)| {
        let grid = HypothesisGrid1D::uniform(1.0, 9.0, 33).unwrap();
        let post = Posterior1D::from_unnormalized(grid, prior).unwrap();
        let spec = if log_spec {
            SymmetrySpec::logarithmic(1.0, 1.0)
        } else {
            SymmetrySpec::identity()
        };
        // binomial number of successes with success probability theta / 10
        let lik = move |n: u64, theta: f64| {
            if n > trials {
                return 0.0;
            }
            let p = theta / 10.0;
            let mut c = 1.0;
            for i in 0..n {
                c *= (trials - i) as f64 / (i + 1) as f64;
            }
            c * p.powi(n as i32) * (1.0 - p).powi((trials - n) as i32)
        };
        let r = precision_gain(&post, &spec, lik, TruncationPolicy::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let ef = post.expectation(|x| spec.apply(x));
        prop_assert!(r.gain >= ef * ef * (1.0 - 1e-12), "{} < {}", r.gain, ef * ef);
        Ok(())
    }))
}

/// Controller gains at (0.99, 0.01) and (0.999, 0.001) truncation agree to
/// 0.5% on simulated posteriors and the default grids.
pub fn truncation_agreement(cases: u32) -> Check {
    let model = OpticalModelConfig::default();
    let loose = ControllerConfig::default();
    let tight = ControllerConfig {
        outcome_mass_threshold: 0.999,
        density_truncation: 0.001,
        ..ControllerConfig::default()
    };
    let strategy = (0u64..1000, 0usize..6, 0.0f64..6.0, 0.0f64..6.0);
    finish(runner(cases).run(&strategy, |(seed, pairs, shot_det, det)| {
        let post = simulated_posterior(&model, seed, pairs, shot_det);
        let a = gain_at_detuning(&post, det, &loose, &model).unwrap();
        let b = gain_at_detuning(&post, det, &tight, &model).unwrap();
        prop_assert!((a - b).abs() <= 0.005 * b, "{a} vs {b}");
        Ok(())
    }))
}

/// Direct evaluation of `sum_n p(n) f(f^-1(E[f | n]))^2` by explicit Bayes
/// updates, on a discrete prior over 0..=5 (or 1..=5) atoms.
pub fn brute_force_gain(
    atoms: &[f64],
    masses: &[f64],
    spec: &SymmetrySpec,
    lik: impl Fn(u64, f64) -> f64,
    outcomes: u64,
) -> f64 {
    let mut gain = 0.0;
    for n in 0..=outcomes {
        let joint: Vec<f64> = atoms.iter().zip(masses).map(|(&a, m)| m * lik(n, a)).collect();
        let evidence: f64 = joint.iter().sum();
        if evidence <= 0.0 {
            continue;
        }
        let ef: f64 = atoms.iter().zip(&joint).map(|(&a, j)| spec.apply(a) * j).sum::<f64>() / evidence;
        let est = spec.inverse(ef);
        gain += evidence * spec.apply(est).powi(2);
    }
    gain
}

pub fn brute_force_equivalence(cases: u32) -> Check {
    let strategy = (
        prop::collection::vec(0.05f64..1.0, 6),
        any::<bool>(),
        2.0f64..20.0,
        0.1f64..1.5,
    );
    finish(runner(cases).run(&strategy, |(raw, log_spec, phi, zeta)| {
        // atom numbers sit on the grid nodes; log symmetry needs N >= 1
        let (lo, points) = if log_spec { (1.0, 5) } else { (0.0, 6) };
        let grid = HypothesisGrid1D::uniform(lo, 5.0, points).unwrap();
        let spec = if log_spec {
            SymmetrySpec::logarithmic(1.0, 1.0)
        } else {
            SymmetrySpec::identity()
        };
        let post = Posterior1D::from_unnormalized(grid.clone(), raw[..points].to_vec()).unwrap();
        let lik = move |n: u64, a: f64| poisson_pmf(n, phi * (-zeta * a).exp());
        let r = precision_gain(&post, &spec, lik, TruncationPolicy::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let masses: Vec<f64> = post.masses().collect();
        let brute = brute_force_gain(grid.values(), &masses, &spec, lik, r.truncation_bound);
        prop_assert!((r.gain - brute).abs() <= 1e-10 * brute.abs().max(1.0), "{} vs {brute}", r.gain);
        Ok(())
    }))
}

/// The optimal estimate commutes with a monotone change of variables
/// `psi = theta^3` up to discretization, two grid spacings.
pub fn reparametrization(cases: u32) -> Check {
    let strategy = (1.5f64..3.5, 0.15f64..0.6, any::<bool>());
    finish(runner(cases).run(&strategy, |(center, width, log_spec)| {
        let (a, b, n) = (1.0, 4.0, 601);
        let tg = HypothesisGrid1D::uniform(a, b, n).unwrap();
        let density =
            |t: f64| (-(t - center).powi(2) / (2.0 * width * width)).exp();
        let post_t = Posterior1D::from_unnormalized(tg.clone(), tg.values().iter().map(|&t| density(t)).collect()).unwrap();
        let spec_t = if log_spec {
            SymmetrySpec::logarithmic(1.0, 1.0)
        } else {
            SymmetrySpec::identity()
        };
        let est_t = optimal_estimate(&post_t, &spec_t);

        // psi = theta^3, theta = psi^(1/3)
        let pg = HypothesisGrid1D::uniform(a.powi(3), b.powi(3), 4 * n).unwrap();
        let to_t = |p: f64| p.cbrt();
        let d_psi = |t: f64| 3.0 * t * t;
        let post_p = Posterior1D::from_unnormalized(
            pg.clone(),
            pg.values().iter().map(|&p| density(to_t(p)) / d_psi(to_t(p))).collect(),
        )
        .unwrap();
        let (f, fi, fd): (Map, Map, Map) = if log_spec {
            (|p| p.cbrt().ln(), |y| y.exp().powi(3), |p| 1.0 / (3.0 * p))
        } else {
            (|p| p.cbrt(), |y| y.powi(3), |p| 1.0 / (3.0 * p.cbrt().powi(2)))
        };
        let spec_p = SymmetrySpec::custom(f, fi, fd);
        let est_p = optimal_estimate(&post_p, &spec_p);
        prop_assert!(
            (to_t(est_p) - est_t).abs() <= 2.0 * tg.spacing(),
            "{} vs {est_t}",
            to_t(est_p)
        );
        Ok(())
    }))
}

/// Draw statistics at (phi 18, theta 3, zeta 1, dark 1): mean within 3 sigma
/// of `18 e^-3 + 1`, variance within 5% of the mean.
pub fn poisson_monte_carlo() -> Check {
    let truth = TruthConfig {
        phi_true: 18.0,
        theta_true: 3.0,
        dark_rate: 1.0,
        seed: 5,
    };
    // zero detuning gives zeta = 1
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 100_000;
    let xs: Vec<f64> = (0..draws)
        .map(|_| draw_shot(&truth, 5.234, 0.0, true, &mut rng).raw_count as f64)
        .collect();
    let mean = xs.iter().sum::<f64>() / draws as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let expected = 18.0 * (-3.0f64).exp() + 1.0;
    let sigma = (expected / draws as f64).sqrt();
    if (mean - expected).abs() > 3.0 * sigma {
        return Err(format!("mean {mean} vs {expected} (3 sigma = {})", 3.0 * sigma));
    }
    if (var - expected).abs() > 0.05 * expected {
        return Err(format!("variance {var} vs {expected}"));
    }
    Ok(())
}

/// Same for empty-trap shots, which see `phi + dark`.
pub fn poisson_monte_carlo_empty_trap() -> Check {
    let truth = TruthConfig {
        phi_true: 18.0,
        theta_true: 3.0,
        dark_rate: 1.0,
        seed: 6,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draws = 100_000;
    let mean = (0..draws)
        .map(|_| draw_shot(&truth, 5.234, 2.0, false, &mut rng).raw_count as f64)
        .sum::<f64>()
        / draws as f64;
    let sigma = (19.0 / draws as f64).sqrt();
    if (mean - 19.0).abs() > 3.0 * sigma {
        return Err(format!("mean {mean} vs 19"));
    }
    Ok(())
}

/// The ignorance prior integrates to one for every built-in symmetry.
pub fn prior_normalization() -> Check {
    for (spec, lo, hi) in [
        (SymmetrySpec::identity(), 0.0, 8.0),
        (SymmetrySpec::logarithmic(1.0, 1.0), 5.0, 20.0),
        (SymmetrySpec::artanh_weight(), 0.05, 0.95),
    ] {
        let p = make_mi_prior(&spec, HypothesisGrid1D::uniform(lo, hi, 201).unwrap())
            .map_err(|e| e.to_string())?;
        if (p.total_mass() - 1.0).abs() > 1e-8 {
            return Err(format!("{:?} prior mass {}", spec.kind(), p.total_mass()));
        }
    }
    Ok(())
}
