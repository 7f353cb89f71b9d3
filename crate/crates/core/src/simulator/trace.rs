use std::io::Write;

use serde::{Deserialize, Serialize};

use super::StrategyKind;
use crate::absorption::ShotRecord;
use crate::error::{MetrologyError, Result};

pub const TRACE_CSV_HEADER: [&str; 8] = [
    "strategy",
    "seed",
    "k",
    "detuning_mhz",
    "n_a",
    "n_b",
    "estimate",
    "error",
];

/// Per-shot history of one strategy execution. Entry `k - 1` of the
/// estimate, error and detuning sequences belongs to the `k`-th shot pair;
/// `shots` alternates atom and empty-trap shots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub shots: Vec<ShotRecord>,
    /// `None` where the estimate is undefined (non-positive corrected mean).
    pub estimates: Vec<Option<f64>>,
    pub errors: Vec<Option<f64>>,
    pub detunings_used: Vec<f64>,
    /// Set when the run stopped early; holds the reason.
    pub aborted: Option<String>,
    /// Posterior mass crowding the edge of the prior range at the final shot.
    pub edge_concentration: bool,
}

impl RunTrace {
    pub fn new(strategy: StrategyKind, seed: u64) -> Self {
        Self {
            strategy,
            seed,
            shots: Vec::new(),
            estimates: Vec::new(),
            errors: Vec::new(),
            detunings_used: Vec::new(),
            aborted: None,
            edge_concentration: false,
        }
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn final_estimate(&self) -> Option<f64> {
        self.estimates.last().copied().flatten()
    }

    /// Estimate after `k` shot pairs (1-based).
    pub fn estimate_at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.estimates.get(i).copied().flatten())
    }

    pub(crate) fn push(
        &mut self,
        a: ShotRecord,
        b: ShotRecord,
        detuning: f64,
        estimate: Option<f64>,
        error: Option<f64>,
    ) {
        self.shots.push(a);
        self.shots.push(b);
        self.detunings_used.push(detuning);
        self.estimates.push(estimate);
        self.errors.push(error);
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Writes traces in the `strategy,seed,k,detuning_mhz,n_a,n_b,estimate,error`
/// layout. Undefined estimates are left empty.
pub fn write_traces_csv<W: Write>(writer: W, traces: &[RunTrace]) -> Result<()> {
    let io = |e: csv::Error| MetrologyError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRACE_CSV_HEADER).map_err(io)?;
    for t in traces {
        for k in 0..t.len() {
            w.write_record([
                t.strategy.name(),
                t.seed.to_string(),
                (k + 1).to_string(),
                format!("{:.6}", t.detunings_used[k]),
                t.shots[2 * k].raw_count.to_string(),
                t.shots[2 * k + 1].raw_count.to_string(),
                opt(t.estimates[k]),
                opt(t.errors[k]),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
