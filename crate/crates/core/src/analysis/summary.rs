use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{k_min, nsr};
use crate::error::{MetrologyError, Result};
use crate::simulator::{RunTrace, StrategyKind};

/// One row of the strategy comparison table, evaluated at a fixed shot count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: StrategyKind,
    /// Traces contributing at this shot count.
    pub m: usize,
    pub mean_estimate: f64,
    /// Population standard deviation of the estimates.
    pub std_estimate: f64,
    pub nsr_percent: f64,
    pub mean_error_bar: f64,
    /// Mean settling shot count over the contributing traces.
    pub k_min_mean: f64,
    /// Traces dropped because their estimate at this shot count is missing.
    pub excluded: usize,
}

fn groups(traces: &[RunTrace]) -> Vec<(StrategyKind, Vec<&RunTrace>)> {
    let mut out: Vec<(StrategyKind, Vec<&RunTrace>)> = Vec::new();
    for t in traces {
        match out.iter_mut().find(|(k, _)| *k == t.strategy) {
            Some((_, g)) => g.push(t),
            None => out.push((t.strategy, vec![t])),
        }
    }
    out.sort_by(|a, b| {
        a.0.rank()
            .cmp(&b.0.rank())
            .then_with(|| a.0.name().cmp(&b.0.name()))
    });
    out
}

/// Per-strategy statistics at shot count `at_k` (1-based), rows in canonical
/// strategy order. Each trace's settling count uses its own final estimate.
pub fn summarize(traces: &[RunTrace], at_k: usize) -> Result<Vec<StrategySummary>> {
    if at_k == 0 {
        return Err(MetrologyError::InvalidArgument("at_k must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for (strategy, group) in groups(traces) {
        let mut est = Vec::new();
        let mut err = Vec::new();
        let mut kmins = Vec::new();
        let mut excluded = 0;
        for t in &group {
            match t.estimate_at(at_k) {
                Some(e) => {
                    est.push(e);
                    if let Some(Some(b)) = t.errors.get(at_k - 1) {
                        err.push(*b);
                    }
                    kmins.push(k_min(&t.estimates, 0.1) as f64);
                }
                None => excluded += 1,
            }
        }
        if est.len() < 2 {
            return Err(MetrologyError::InsufficientRepeats {
                strategy: strategy.name(),
                m: est.len(),
            });
        }
        let m = est.len() as f64;
        let mean = est.iter().sum::<f64>() / m;
        let ratio = nsr(&est)?;
        rows.push(StrategySummary {
            strategy,
            m: est.len(),
            mean_estimate: mean,
            std_estimate: (ratio * mean * mean).sqrt(),
            nsr_percent: 100.0 * ratio,
            mean_error_bar: if err.is_empty() {
                f64::NAN
            } else {
                err.iter().sum::<f64>() / err.len() as f64
            },
            k_min_mean: kmins.iter().sum::<f64>() / m,
            excluded,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsrPoint {
    pub strategy: StrategyKind,
    pub k: usize,
    /// Fraction, not percent. `None` when fewer than two traces are valid.
    pub nsr: Option<f64>,
}

/// NSR as a function of the shot count for every strategy.
pub fn nsr_series(traces: &[RunTrace], k_max: usize) -> Vec<NsrPoint> {
    let mut out = Vec::new();
    for (strategy, group) in groups(traces) {
        for k in 1..=k_max {
            let est: Vec<f64> = group.iter().filter_map(|t| t.estimate_at(k)).collect();
            out.push(NsrPoint {
                strategy,
                k,
                nsr: nsr(&est).ok(),
            });
        }
    }
    out
}

pub fn write_nsr_series_csv<W: Write>(writer: W, series: &[NsrPoint]) -> Result<()> {
    let io = |e: csv::Error| MetrologyError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["strategy", "k", "nsr"]).map_err(io)?;
    for p in series {
        w.write_record([
            p.strategy.name(),
            p.k.to_string(),
            p.nsr.map(|x| format!("{x:.8}")).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(writer: W, rows: &[StrategySummary]) -> Result<()> {
    let io = |e: csv::Error| MetrologyError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "strategy",
        "m",
        "mean_estimate",
        "std_estimate",
        "nsr_percent",
        "mean_error_bar",
        "k_min_mean",
        "excluded",
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            r.strategy.name(),
            r.m.to_string(),
            format!("{:.4}", r.mean_estimate),
            format!("{:.4}", r.std_estimate),
            format!("{:.4}", r.nsr_percent),
            format!("{:.4}", r.mean_error_bar),
            format!("{:.3}", r.k_min_mean),
            r.excluded.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned plain-text table.
pub fn summary_text(rows: &[StrategySummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:>5} {:>10} {:>9} {:>8} {:>10} {:>7} {:>5}",
        "strategy", "m", "mean", "std", "nsr%", "err_bar", "k_min", "excl"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<20} {:>5} {:>10.2} {:>9.2} {:>8.3} {:>10.2} {:>7.2} {:>5}",
            r.strategy.name(),
            r.m,
            r.mean_estimate,
            r.std_estimate,
            r.nsr_percent,
            r.mean_error_bar,
            r.k_min_mean,
            r.excluded
        );
    }
    s
}
