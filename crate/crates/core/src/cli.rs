//! The `metrology` command line: `simulate`, `estimate` and `gain-curve`.
//!
//! Exit status is 0 on success, 2 for configuration errors, 3 for failures
//! during estimation or simulation, and 4 for unreadable shot logs.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::absorption::{
    atom_estimate, joint_update, make_joint_mi_prior, mle_estimate, read_shot_log, AtomEstimate,
    JointPosterior, OpticalModelConfig, ShotRecord,
};
use crate::analysis::{
    nsr_series, nsr_svg, run_comparison, summarize, summary_text, write_nsr_series_csv,
    write_summary_csv,
};
use crate::config::RunConfig;
use crate::controller::{run_adaptive_episode, select_detuning, GainCurve};
use crate::error::{MetrologyError, Result};
use crate::io::{write_atomic, write_atomic_str};
use crate::simulator::write_traces_csv;

#[derive(Debug, Parser)]
#[command(name = "metrology", version, about = "Adaptive Bayesian atom-number estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate repeated runs of each strategy and summarize them.
    Simulate(SimulateArgs),
    /// Estimate the atom number from a recorded shot log.
    Estimate(EstimateArgs),
    /// Sample the precision gain over the candidate detunings.
    GainCurve(GainCurveArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML configuration file. Missing keys take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a key, e.g. `--set model.dark_rate=0` or `--set k_max=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated strategy names.
    #[arg(long)]
    pub strategies: Option<String>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write JSON mirrors of the traces and the summary.
    #[arg(long)]
    pub json: bool,
    /// Also write an SVG plot of NSR against shot count.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// CSV shot log with columns shot_index,detuning_mhz,atoms_present,raw_count.
    #[arg(long)]
    pub log: PathBuf,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GainCurveArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Number of simulated adaptive shot pairs before sampling the curve.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

pub fn exit_code(err: &MetrologyError) -> u8 {
    match err {
        MetrologyError::InvalidConfig { .. } => 2,
        MetrologyError::MalformedLog { .. } => 4,
        _ => 3,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = std::io::stdout();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, &mut out.lock()),
        Command::Estimate(a) => cmd_estimate(&a, &mut out.lock()),
        Command::GainCurve(a) => cmd_gain_curve(&a, &mut out.lock()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_config(args: &ConfigArgs, extra: Vec<String>) -> Result<RunConfig> {
    let mut overrides = args.set.clone();
    overrides.extend(extra);
    match &args.config {
        Some(p) => RunConfig::load(p, &overrides),
        None => RunConfig::from_overrides(&overrides),
    }
}

fn out_err(e: std::io::Error) -> MetrologyError {
    MetrologyError::Io(e.to_string())
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut extra = Vec::new();
    if let Some(s) = &args.strategies {
        extra.push(format!("strategies={s}"));
    }
    if let Some(r) = args.repeats {
        extra.push(format!("repeats={r}"));
    }
    if let Some(s) = args.seed {
        extra.push(format!("seed={s}"));
    }
    if let Some(k) = args.k_max {
        extra.push(format!("k_max={k}"));
    }
    let mut cfg = load_config(&args.config, extra)?;
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    let cmp = run_comparison(&cfg.plan(), &cfg.controller, &cfg.model)?;
    let dir = &cfg.output_dir;

    for kind in &cfg.strategies {
        let traces: Vec<_> = cmp.traces_for(*kind).cloned().collect();
        let path = dir.join(format!("trace_{}.csv", kind.name()));
        write_atomic(&path, |w| write_traces_csv(w, &traces))?;
    }
    let series = nsr_series(&cmp.traces, cfg.k_max);
    write_atomic(&dir.join("nsr_vs_k.csv"), |w| write_nsr_series_csv(w, &series))?;
    if args.svg {
        write_atomic_str(&dir.join("nsr_vs_k.svg"), &nsr_svg(&series))?;
    }

    if let Some(d) = cmp.apriori_detuning {
        writeln!(out, "a-priori detuning: {d:.3} MHz").map_err(out_err)?;
    }
    for t in cmp.traces.iter().filter(|t| t.aborted.is_some()) {
        eprintln!(
            "warning: {} seed {} stopped early: {}",
            t.strategy,
            t.seed,
            t.aborted.as_deref().unwrap_or_default()
        );
    }
    let summary = if cfg.repeats >= 2 {
        let rows = summarize(&cmp.traces, cfg.k_max)?;
        write_atomic(&dir.join("summary.csv"), |w| write_summary_csv(w, &rows))?;
        write!(out, "{}", summary_text(&rows)).map_err(out_err)?;
        Some(rows)
    } else {
        writeln!(out, "summary skipped: needs at least 2 repeats").map_err(out_err)?;
        None
    };

    if args.json {
        let doc = json!({
            "config": &cfg,
            "apriori_detuning": cmp.apriori_detuning,
            "traces": &cmp.traces,
        });
        write_atomic(&dir.join("traces.json"), |w| {
            serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| MetrologyError::Io(e.to_string()))
        })?;
        if let Some(rows) = &summary {
            write_atomic(&dir.join("summary.json"), |w| {
                serde_json::to_writer_pretty(&mut *w, rows).map_err(|e| MetrologyError::Io(e.to_string()))
            })?;
        }
    }
    writeln!(out, "wrote results to {}", dir.display()).map_err(out_err)?;
    Ok(())
}

fn read_log(path: &Path, dark: f64) -> Result<Vec<ShotRecord>> {
    let file = std::fs::File::open(path).map_err(|e| MetrologyError::MalformedLog {
        row: 0,
        message: format!("cannot open {}: {e}", path.display()),
    })?;
    read_shot_log(std::io::BufReader::new(file), dark)
}

fn posterior_from_shots(shots: &[ShotRecord], model: &OpticalModelConfig) -> Result<JointPosterior> {
    let mut post = make_joint_mi_prior(model, model.theta_grid()?, model.phi_grid()?)?;
    for s in shots {
        post = joint_update(&post, s, model)?;
    }
    Ok(post)
}

/// Log-ratio estimate for a log, or the reason it is undefined.
fn log_ratio(shots: &[ShotRecord], model: &OpticalModelConfig) -> std::result::Result<(f64, f64), String> {
    let (a, b): (Vec<ShotRecord>, Vec<ShotRecord>) = shots.iter().partition(|s| s.atoms_present);
    let Some(first) = a.first() else {
        return Err("no atom shots".into());
    };
    if a.iter().any(|s| s.detuning != first.detuning) {
        return Err("atom shots use more than one detuning".into());
    }
    mle_estimate(&a, &b, model.zeta(first.detuning), model.kappa)
        .map(|m| (m.estimate, m.error))
        .map_err(|e| e.to_string())
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.config, Vec::new())?;
    let shots = read_log(&args.log, cfg.model.dark_rate)?;
    let post = posterior_from_shots(&shots, &cfg.model)?;
    let AtomEstimate {
        estimate,
        error,
        edge_concentration,
    } = atom_estimate(&post, &cfg.model);
    let mle = log_ratio(&shots, &cfg.model);
    if edge_concentration {
        eprintln!(
            "warning: EdgeConcentration: posterior piles up at the edge of theta in [{}, {}]; \
             the estimate is limited by the prior range",
            cfg.model.theta_min, cfg.model.theta_max
        );
    }
    if args.json {
        let doc = json!({
            "shots": shots.len(),
            "bayesian": { "estimate": estimate, "error": error, "edge_concentration": edge_concentration },
            "mle": match &mle {
                Ok((e, s)) => json!({ "estimate": e, "error": s }),
                Err(reason) => json!({ "undefined": reason }),
            },
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default()).map_err(out_err)?;
        return Ok(());
    }
    writeln!(out, "shots: {}", shots.len()).map_err(out_err)?;
    writeln!(out, "bayesian: {estimate:.2} ± {error:.2}").map_err(out_err)?;
    match mle {
        Ok((e, s)) => writeln!(out, "mle: {e:.2} ± {s:.2}"),
        Err(reason) => writeln!(out, "mle: undefined ({reason})"),
    }
    .map_err(out_err)?;
    Ok(())
}

/// Gain curve for the posterior after `k` simulated adaptive shot pairs.
pub fn gain_curve_after(cfg: &RunConfig, k: usize) -> Result<GainCurve> {
    let post = if k == 0 {
        make_joint_mi_prior(&cfg.model, cfg.model.theta_grid()?, cfg.model.phi_grid()?)?
    } else {
        let trace = run_adaptive_episode(&cfg.truth, k, cfg.seed, &cfg.controller, &cfg.model)?;
        if let Some(reason) = trace.aborted {
            return Err(MetrologyError::InvalidArgument(reason));
        }
        posterior_from_shots(&trace.shots, &cfg.model)?
    };
    select_detuning(&post, &cfg.controller, &cfg.model)
}

pub fn cmd_gain_curve(args: &GainCurveArgs, out: &mut dyn Write) -> Result<()> {
    let mut extra = Vec::new();
    if let Some(s) = args.seed {
        extra.push(format!("seed={s}"));
    }
    let mut cfg = load_config(&args.config, extra)?;
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    let curve = gain_curve_after(&cfg, args.k)?;
    let path = cfg.output_dir.join("gain_curve.csv");
    write_atomic(&path, |w| {
        let io = |e: csv::Error| MetrologyError::Io(e.to_string());
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["detuning_mhz", "gain"]).map_err(io)?;
        for (d, g) in curve.detunings.iter().zip(&curve.gains) {
            c.write_record([format!("{d:.4}"), format!("{g:.10}")]).map_err(io)?;
        }
        c.flush()?;
        Ok(())
    })?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&curve).unwrap_or_default()).map_err(out_err)?;
    } else {
        writeln!(
            out,
            "argmax detuning after k = {}: {:.3} MHz (gain {:.6})",
            args.k, curve.argmax_detuning, curve.argmax_gain
        )
        .map_err(out_err)?;
        writeln!(out, "wrote {}", path.display()).map_err(out_err)?;
    }
    Ok(())
}
