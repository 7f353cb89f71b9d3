use crate::error::{MetrologyError, Result};

/// Natural cubic spline through `(x_i, y_i)` with strictly increasing `x`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(MetrologyError::InvalidArgument(format!(
                "spline needs >= 2 matching samples, got {} x and {} y",
                n,
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MetrologyError::InvalidArgument(
                "spline abscissae must be strictly increasing".into(),
            ));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives (Thomas algorithm)
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    /// Polynomial coefficients of segment `i` in powers of `x - x_i`.
    fn coefficients(&self, i: usize) -> [f64; 4] {
        let h = self.xs[i + 1] - self.xs[i];
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        [
            y0,
            (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0,
            m0 / 2.0,
            (m1 - m0) / (6.0 * h),
        ]
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let [a, b, c, d] = self.coefficients(i);
        let t = x - self.xs[i];
        a + t * (b + t * (c + t * d))
    }

    /// Global maximum over `[x_0, x_last]`. Among (near-)equal maxima the
    /// smallest abscissa wins.
    pub fn argmax(&self) -> (f64, f64) {
        let mut points: Vec<f64> = self.xs.clone();
        for i in 0..self.xs.len() - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            let [_, b, c, d] = self.coefficients(i);
            // roots of b + 2c t + 3d t^2 inside the segment
            let (qa, qb, qc) = (3.0 * d, 2.0 * c, b);
            let mut roots = Vec::with_capacity(2);
            if qa.abs() <= 1e-300 {
                if qb.abs() > 1e-300 {
                    roots.push(-qc / qb);
                }
            } else {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    roots.push((-qb - sq) / (2.0 * qa));
                    roots.push((-qb + sq) / (2.0 * qa));
                }
            }
            points.extend(
                roots
                    .into_iter()
                    .filter(|t| *t > 0.0 && *t < h)
                    .map(|t| self.xs[i] + t),
            );
        }
        points.sort_by(|a, b| a.total_cmp(b));
        let mut best = (points[0], self.eval(points[0]));
        for &x in &points[1..] {
            let y = self.eval(x);
            if y > best.1 + 1e-12 * best.1.abs() {
                best = (x, y);
            }
        }
        best
    }
}
