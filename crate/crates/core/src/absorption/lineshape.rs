use serde::{Deserialize, Serialize};

/// Probe detuning and transition linewidth, both in MHz of ordinary
/// frequency. `gamma_fwhm` is the full width at half maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineshapeParams {
    pub gamma_fwhm: f64,
    pub detuning: f64,
}

/// Relative absorption strength `G^2 / (G^2 + 4 delta^2)`, in (0, 1].
pub fn lorentzian_zeta(params: LineshapeParams) -> f64 {
    zeta(params.gamma_fwhm, params.detuning)
}

#[inline]
pub fn zeta(gamma_fwhm: f64, detuning: f64) -> f64 {
    let g2 = gamma_fwhm * gamma_fwhm;
    g2 / (g2 + 4.0 * detuning * detuning)
}
