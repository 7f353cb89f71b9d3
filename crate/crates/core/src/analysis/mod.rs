//! Figures of merit over many runs: noise-to-signal ratio, settling shot
//! count, per-strategy summaries, and the repeat harness that produces them.

mod harness;
mod metrics;
mod plot;
mod summary;

pub use harness::{run_comparison, thread_count, Comparison, ComparisonPlan, THREADS_ENV};
pub use metrics::{k_min, nsr};
pub use plot::nsr_svg;
pub use summary::{
    nsr_series, summarize, summary_text, write_nsr_series_csv, write_summary_csv, NsrPoint,
    StrategySummary,
};
