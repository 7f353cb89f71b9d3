//! Synthetic photon counts and the five benchmark estimation strategies.
//!
//! Every run owns a ChaCha8 generator seeded with `seed_from_u64(seed)`, and
//! Poisson counts come from `rand_distr::Poisson`. Identical seeds therefore
//! give bit-identical traces.

mod shot;
mod strategy;
mod trace;

pub use shot::{draw_shot, ShotSimulator, TruthConfig};
pub use strategy::{run_strategy, StrategyKind, StrategyRunner, DEFAULT_DETUNED_MHZ};
pub use trace::{write_traces_csv, RunTrace, TRACE_CSV_HEADER};
