//! Choosing the probe detuning for the next shot.
//!
//! For every candidate detuning the controller evaluates the precision gain
//! of one more atom shot under the current joint posterior, interpolates the
//! sampled curve with a cubic spline, and takes the spline maximizer.

mod episode;
mod gain;
mod spline;

pub use episode::run_adaptive_episode;
pub use gain::{
    gain_at_detuning, select_detuning, truncate_support, ControllerConfig, GainCurve,
    GainEvaluator, Interpolation, SupportWindow,
};
pub use spline::CubicSpline;
