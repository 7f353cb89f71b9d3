use std::fmt;
use std::sync::Arc;

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    /// Location parameter, `f(x) = c1 * x + c2`.
    Linear,
    /// Scale parameter, `f(x) = c1 * ln(x / c2)`.
    Logarithmic,
    /// Weight (probability) parameter on (0, 1), `f(z) = 2 artanh(2z - 1)`.
    ArtanhWeight,
    Custom,
}

/// A strictly monotone map from a hypothesis to a location variable,
/// together with its inverse and derivative.
#[derive(Clone)]
pub struct SymmetrySpec {
    kind: SymmetryKind,
    f: RealMap,
    f_inverse: RealMap,
    f_derivative: RealMap,
}

impl SymmetrySpec {
    pub fn linear(c1: f64, c2: f64) -> Self {
        assert!(c1 != 0.0 && c1.is_finite(), "linear symmetry needs a finite nonzero slope");
        Self {
            kind: SymmetryKind::Linear,
            f: Arc::new(move |x| c1 * x + c2),
            f_inverse: Arc::new(move |y| (y - c2) / c1),
            f_derivative: Arc::new(move |_| c1),
        }
    }

    /// `f(x) = x`, the choice used for optical depth and atom number.
    pub fn identity() -> Self {
        Self::linear(1.0, 0.0)
    }

    pub fn logarithmic(c1: f64, c2: f64) -> Self {
        assert!(c1 != 0.0 && c1.is_finite(), "logarithmic symmetry needs a finite nonzero c1");
        assert!(c2 > 0.0, "logarithmic symmetry needs c2 > 0");
        Self {
            kind: SymmetryKind::Logarithmic,
            f: Arc::new(move |x: f64| c1 * (x / c2).ln()),
            f_inverse: Arc::new(move |y: f64| c2 * (y / c1).exp()),
            f_derivative: Arc::new(move |x| c1 / x),
        }
    }

    pub fn artanh_weight() -> Self {
        Self {
            kind: SymmetryKind::ArtanhWeight,
            f: Arc::new(|z: f64| 2.0 * (2.0 * z - 1.0).atanh()),
            f_inverse: Arc::new(|y: f64| 0.5 * ((y / 2.0).tanh() + 1.0)),
            f_derivative: Arc::new(|z: f64| 1.0 / (z * (1.0 - z))),
        }
    }

    /// Caller-supplied symmetry. The three maps must be mutually consistent;
    /// nothing here checks that.
    pub fn custom<F, G, D>(f: F, f_inverse: G, f_derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: SymmetryKind::Custom,
            f: Arc::new(f),
            f_inverse: Arc::new(f_inverse),
            f_derivative: Arc::new(f_derivative),
        }
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    #[inline]
    pub fn inverse(&self, y: f64) -> f64 {
        (self.f_inverse)(y)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (self.f_derivative)(x)
    }
}

impl fmt::Debug for SymmetrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetrySpec").field("kind", &self.kind).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
    }

    proptest! {
        #[test]
        fn linear_round_trip(x in -1e3f64..1e3, c1 in 0.1f64..10.0, c2 in -5.0f64..5.0) {
            let s = SymmetrySpec::linear(c1, c2);
            prop_assert!((s.inverse(s.apply(x)) - x).abs() <= 1e-9 * x.abs().max(1.0));
        }

        #[test]
        fn logarithmic_round_trip(x in 1e-3f64..1e3, c2 in 0.5f64..4.0) {
            let s = SymmetrySpec::logarithmic(1.0, c2);
            prop_assert!(rel_close(s.inverse(s.apply(x)), x));
            prop_assert!(s.derivative(x) > 0.0);
        }

        #[test]
        fn artanh_round_trip(z in 0.01f64..0.99) {
            let s = SymmetrySpec::artanh_weight();
            prop_assert!(rel_close(s.inverse(s.apply(z)), z));
            prop_assert!(s.derivative(z) > 0.0);
        }
    }

    #[test]
    fn artanh_is_antisymmetric_about_one_half() {
        let s = SymmetrySpec::artanh_weight();
        assert!((s.apply(0.3) + s.apply(0.7)).abs() < 1e-12);
        assert_eq!(s.apply(0.5), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for s in [
            SymmetrySpec::linear(2.0, 1.0),
            SymmetrySpec::logarithmic(1.0, 1.0),
            SymmetrySpec::artanh_weight(),
        ] {
            let x = 0.37;
            let fd = (s.apply(x + h) - s.apply(x - h)) / (2.0 * h);
            assert!((fd - s.derivative(x)).abs() < 1e-6 * fd.abs(), "{:?}", s.kind());
        }
    }
}
