use std::path::Path;
use std::process::{Command, Output};

fn metrology(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrology"))
        .args(args)
        .current_dir(cwd)
        .env("METROLOGY_THREADS", "1")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const HEADER: &str = "shot_index,detuning_mhz,atoms_present,raw_count\n";

#[test]
fn simulate_writes_traces_summary_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = metrology(
        &["simulate", "--repeats", "3", "--k-max", "8", "--out", "res", "--json", "--svg"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("res");
    for name in [
        "on_resonance_mle",
        "detuned_mle",
        "on_resonance_bayes",
        "a_priori_bayes",
        "adaptive_bayes",
    ] {
        let text = std::fs::read_to_string(out.join(format!("trace_{name}.csv"))).unwrap();
        assert!(text.starts_with("strategy,seed,k,detuning_mhz,n_a,n_b,estimate,error\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 8);
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(std::fs::read_to_string(out.join("nsr_vs_k.csv")).unwrap().starts_with("strategy,k,nsr\n"));
    assert!(out.join("traces.json").exists());
    assert!(out.join("summary.json").exists());
    assert!(out.join("nsr_vs_k.svg").exists());
    assert!(stdout(&o).contains("adaptive_bayes"));
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["simulate", "--strategies", "adaptive", "--repeats", "1", "--seed", "7", "--out", out]
    };
    assert_eq!(metrology(&args("a"), dir.path()).status.code(), Some(0));
    assert_eq!(metrology(&args("b"), dir.path()).status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a/trace_adaptive_bayes.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/trace_adaptive_bayes.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 31);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[model]\nkappa =\n").unwrap();
    let o = metrology(&["simulate", "--config", "c.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kappa"), "{}", stderr(&o));

    let o = metrology(&["gain-curve", "--set", "controller.outcome_mass_threshold=1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outcome_mass_threshold"));

    let o = metrology(&["simulate", "--strategies", "psychic"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_reports_both_estimators() {
    let dir = tempfile::tempdir().unwrap();
    // dark-free means 0.7 and 18.1 on resonance
    let mut log = String::from(HEADER);
    let atoms = [1, 1, 1, 1, 1, 1, 1, 0, 0, 0];
    let empty = [18, 18, 18, 18, 18, 18, 18, 18, 18, 19];
    for i in 0..10 {
        log += &format!("{},0,true,{}\n{},0,false,{}\n", 2 * i, atoms[i], 2 * i + 1, empty[i]);
    }
    std::fs::write(dir.path().join("log.csv"), log).unwrap();
    let o = metrology(&["estimate", "--log", "log.csv", "--set", "model.dark_rate=0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("mle: 276.1"), "{out}");
    assert!(out.contains("bayesian: "));

    let o = metrology(&["estimate", "--log", "log.csv", "--set", "model.dark_rate=0", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["mle"]["estimate"].as_f64().unwrap() - 276.14).abs() < 0.01);
}

#[test]
fn estimate_warns_when_posterior_hits_the_range_edge() {
    let dir = tempfile::tempdir().unwrap();
    let mut log = String::from(HEADER);
    for i in 0..30 {
        log += &format!("{},0,true,0\n{},0,false,{}\n", 2 * i, 2 * i + 1, 17 + i % 3);
    }
    std::fs::write(dir.path().join("log.csv"), log).unwrap();
    let o = metrology(&["estimate", "--log", "log.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("EdgeConcentration"), "{}", stderr(&o));
    assert!(stdout(&o).contains("mle: undefined"));
}

#[test]
fn malformed_logs_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    assert_eq!(metrology(&["estimate", "--log", "empty.csv"], dir.path()).status.code(), Some(4));

    std::fs::write(dir.path().join("bad.csv"), format!("{HEADER}0,0,true,3\n1,0,maybe,4\n")).unwrap();
    let o = metrology(&["estimate", "--log", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));

    assert_eq!(metrology(&["estimate", "--log", "missing.csv"], dir.path()).status.code(), Some(4));
}

#[test]
fn gain_curve_writes_csv_and_argmax() {
    let dir = tempfile::tempdir().unwrap();
    let o = metrology(&["gain-curve", "--k", "0", "--out", "g", "--set", "model.dark_rate=0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("g/gain_curve.csv")).unwrap();
    assert!(csv.starts_with("detuning_mhz,gain\n"));
    assert_eq!(csv.lines().count(), 14);
    assert!(stdout(&o).contains("argmax detuning"));

    let o = metrology(&["gain-curve", "--k", "0", "--json"], dir.path());
    let prior: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let o = metrology(
        &["gain-curve", "--k", "30", "--json", "--set", "truth.theta_true=6"],
        dir.path(),
    );
    let later: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(later["argmax_detuning"].as_f64().unwrap() > prior["argmax_detuning"].as_f64().unwrap());
}
