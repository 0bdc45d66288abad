//! Natural cubic spline with exact first and second antiderivatives.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    // Per-segment polynomial a + b t + c t^2 + d t^3, t = y - knots[i].
    coeffs: Vec<[f64; 4]>,
    // Cumulative integrals at the knots.
    int1: Vec<f64>,
    int2: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(invalid("table", "x and y lengths differ"));
        }
        if n < 4 {
            return Err(invalid("table", "need at least 4 samples"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("table", "abscissae must be strictly increasing"));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

        // Second derivatives m_i with m_0 = m_{n-1} = 0 (tridiagonal solve).
        let mut m = vec![0.0; n];
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        for i in 1..k {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * h[i];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (0..k).rev() {
            let upper = if i + 1 < k { h[i + 1] * m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - upper) / diag[i];
        }

        let mut coeffs = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let a = y[i];
            let b = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
            let c = 0.5 * m[i];
            let d = (m[i + 1] - m[i]) / (6.0 * h[i]);
            coeffs.push([a, b, c, d]);
        }

        let mut int1 = vec![0.0; n];
        let mut int2 = vec![0.0; n];
        for i in 0..n - 1 {
            let t = h[i];
            let [a, b, c, d] = coeffs[i];
            let seg1 = a * t + b * t * t / 2.0 + c * t.powi(3) / 3.0 + d * t.powi(4) / 4.0;
            let seg2 = int1[i] * t
                + a * t * t / 2.0
                + b * t.powi(3) / 6.0
                + c * t.powi(4) / 12.0
                + d * t.powi(5) / 20.0;
            int1[i + 1] = int1[i] + seg1;
            int2[i + 1] = int2[i] + seg2;
        }

        Ok(Self {
            knots: x.to_vec(),
            coeffs,
            int1,
            int2,
        })
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.knots.len();
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        (i, x - self.knots[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let [a, b, c, d] = self.coeffs[i];
        a + t * (b + t * (c + t * d))
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let [_, b, c, d] = self.coeffs[i];
        b + t * (2.0 * c + 3.0 * d * t)
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let [_, _, c, d] = self.coeffs[i];
        2.0 * c + 6.0 * d * t
    }

    /// `∫_{x0}^{x} s(u) du` with `x0` the first knot.
    pub fn integral(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let [a, b, c, d] = self.coeffs[i];
        self.int1[i] + a * t + b * t * t / 2.0 + c * t.powi(3) / 3.0 + d * t.powi(4) / 4.0
    }

    /// Second repeated integral from the first knot.
    pub fn integral2(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let [a, b, c, d] = self.coeffs[i];
        self.int2[i]
            + self.int1[i] * t
            + a * t * t / 2.0
            + b * t.powi(3) / 6.0
            + c * t.powi(4) / 12.0
            + d * t.powi(5) / 20.0
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
}
