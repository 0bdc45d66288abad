//! Symmetric tridiagonal utilities: Sturm counts, bisection for extreme
//! eigenvalues, and pivoted LU for inverse iteration.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        debug_assert_eq!(e.len() + 1, d.len());
        Self { d, e }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (LDLᵀ inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.d.len() {
            let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Smallest eigenvalue by Sturm bisection to near machine precision.
    pub fn smallest_eigenvalue(&self) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = self.norm_inf().max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        (0..n)
            .map(|i| {
                let mut s = self.d[i] * x[i];
                if i > 0 {
                    s += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.e[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Eigenvector for the (approximate) eigenvalue `lambda` by inverse
    /// iteration, normalised to unit 2-norm with a positive sum.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.d.len();
        let scale = self.norm_inf().max(1.0);
        let shift = lambda + 1e3 * f64::EPSILON * scale;
        let lu = TridiagLu::factor(&self.d, &self.e, &self.e, shift)?;
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            let mut y = lu.solve(&x);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::Solver("inverse iteration broke down".into()));
            }
            let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            y.iter_mut().for_each(|v| *v *= sign / norm);
            x = y;
        }
        Ok(x)
    }

    /// `‖T x − λ x‖∞ / (‖T‖∞ ‖x‖∞)`.
    pub fn relative_residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let tx = self.matvec(x);
        let r = tx
            .iter()
            .zip(x)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        r / (self.norm_inf().max(f64::MIN_POSITIVE) * xn)
    }

    /// Rayleigh quotient `xᵀTx / xᵀx`.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let tx = self.matvec(x);
        let num: f64 = tx.iter().zip(x).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|v| v * v).sum();
        num / den
    }
}

/// LU factorisation of a general tridiagonal `T − σI` with partial pivoting.
pub struct TridiagLu {
    // U has up to two superdiagonals after pivoting.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factor the tridiagonal matrix with diagonal `d − shift`, subdiagonal
    /// `lower` and superdiagonal `upper`.
    pub fn factor(d: &[f64], lower: &[f64], upper: &[f64], shift: f64) -> Result<Self> {
        let n = d.len();
        let mut u0: Vec<f64> = d.iter().map(|v| v - shift).collect();
        let mut u1: Vec<f64> = upper.to_vec();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut sub: Vec<f64> = lower.to_vec();
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * d.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for i in 0..n.saturating_sub(1) {
            if sub[i].abs() > u0[i].abs() {
                // Swap rows i and i + 1.
                swapped[i] = true;
                let (a, b, c) = (u0[i], u1[i], u2[i]);
                u0[i] = sub[i];
                u1[i] = u0[i + 1];
                u2[i] = u1[i + 1];
                sub[i] = a;
                u0[i + 1] = b;
                u1[i + 1] = c;
            }
            if u0[i] == 0.0 {
                u0[i] = tiny;
            }
            let m = sub[i] / u0[i];
            l[i] = m;
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
        }
        if n > 0 && u0[n - 1] == 0.0 {
            u0[n - 1] = tiny;
        }
        Ok(Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut y = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.l[i] * y[i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * y[i + 2];
            }
            y[i] = s / self.u0[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn dense(t: &SymTridiag) -> DMatrix<f64> {
        let n = t.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.d[i]
            } else if j == i + 1 {
                t.e[i]
            } else if i == j + 1 {
                t.e[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn smallest_eigenvalue_of_laplacian() {
        // Dirichlet second difference: eigenvalues 2 - 2cos(jπ/(n+1)).
        let n = 50;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n + 1) as f64).cos();
        assert!((t.smallest_eigenvalue() - exact).abs() < 1e-13);
        let v = t.eigenvector(t.smallest_eigenvalue()).unwrap();
        assert!(t.relative_residual(exact, &v) < 1e-12);
        assert!(v.iter().all(|&x| x > 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn sturm_count_matches_dense(d in prop::collection::vec(-3.0f64..3.0, 8),
                                     e in prop::collection::vec(0.1f64..2.0, 7),
                                     x in -4.0f64..4.0) {
            let t = SymTridiag::new(d, e);
            let eig = dense(&t).symmetric_eigenvalues();
            let expect = eig.iter().filter(|&&l| l < x).count();
            let near = eig.iter().any(|l| (l - x).abs() < 1e-9);
            prop_assume!(!near);
            prop_assert_eq!(t.count_below(x), expect);
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!((t.smallest_eigenvalue() - min).abs() < 1e-12);
        }

        #[test]
        fn pivoted_lu_solves(d in prop::collection::vec(-3.0f64..3.0, 9),
                             lo in prop::collection::vec(-2.0f64..2.0, 8),
                             up in prop::collection::vec(-2.0f64..2.0, 8),
                             b in prop::collection::vec(-1.0f64..1.0, 9)) {
            let n = 9;
            let m = DMatrix::from_fn(n, n, |i, j| {
                if i == j { d[i] } else if j == i + 1 { up[i] } else if i == j + 1 { lo[j] } else { 0.0 }
            });
            prop_assume!(m.clone().lu().determinant().abs() > 1e-3);
            let lu = TridiagLu::factor(&d, &lo, &up, 0.0).unwrap();
            let x = lu.solve(&b);
            let r = &m * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(b);
            prop_assert!(r.amax() < 1e-9);
        }
    }
}
