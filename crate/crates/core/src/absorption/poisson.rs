use std::sync::OnceLock;

const TABLE_LEN: usize = 10_001;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`, tabulated up to 10^4 and from Stirling's series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return table()[n as usize];
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

pub fn poisson_ln_pmf(n: u64, mean: f64) -> f64 {
    debug_assert!(mean > 0.0);
    n as f64 * mean.ln() - mean - ln_factorial(n)
}

/// `mean^n e^{-mean} / n!`, evaluated in log space.
pub fn poisson_pmf(n: u64, mean: f64) -> f64 {
    poisson_ln_pmf(n, mean).exp()
}
