//! Zero-mean shear profiles α(y) on the unit channel cross-section.
//!
//! Built-in profiles are plane Couette (`y - 1/2`) and plane Poiseuille
//! (`-2y² + 2y - 1/3`); user profiles are tabulated and interpolated with a
//! natural cubic spline. Every accepted profile integrates to zero over
//! `[0, 1]`; tabulated data are re-centred and the removed shift recorded.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::spline::CubicSpline;

/// Largest admissible `|∫₀¹ α|` for an accepted profile.
pub const MEAN_TOL: f64 = 1e-10;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Couette,
    Poiseuille,
    /// Identically zero velocity; the advectionless reference case.
    Zero,
    Tabulated,
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FlowKind::Couette => "couette",
            FlowKind::Poiseuille => "poiseuille",
            FlowKind::Zero => "zero",
            FlowKind::Tabulated => "tabulated",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Couette,
    Poiseuille,
    Zero,
    Spline(CubicSpline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowProfile {
    shape: Shape,
    mean_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowExtrema {
    pub alpha_max: f64,
    pub y_max: f64,
    pub alpha_min: f64,
    pub y_min: f64,
    /// α''(y_M); only meaningful when the maximum is interior and nondegenerate.
    pub second_derivative_at_max: f64,
    pub boundary_max: bool,
    pub degenerate: bool,
}

impl FlowExtrema {
    /// True when the maximum is a single interior point with α''(y_M) < 0.
    pub fn is_regular_interior(&self) -> bool {
        !self.boundary_max && !self.degenerate
    }
}

/// `a(y) = ∫₀ʸ α` and `phi(y) = ∫₀ʸ a` tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowIntegrals {
    pub grid: Vec<f64>,
    pub a: Vec<f64>,
    pub phi: Vec<f64>,
}

impl FlowIntegrals {
    /// The double integral written α̃ in the homogenisation analysis; the
    /// same function as `phi`.
    pub fn alpha_tilde(&self) -> &[f64] {
        &self.phi
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Trapezoid mean of `phi` over the grid.
    pub fn phi_mean(&self) -> f64 {
        quad::trapezoid_mean(&self.phi)
    }
}

impl FlowProfile {
    pub fn couette() -> Self {
        Self {
            shape: Shape::Couette,
            mean_shift: 0.0,
        }
    }

    pub fn poiseuille() -> Self {
        Self {
            shape: Shape::Poiseuille,
            mean_shift: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self {
            shape: Shape::Zero,
            mean_shift: 0.0,
        }
    }

    /// Built-in profile by name (`couette`, `poiseuille`, `zero`/`none`).
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "couette" => Some(Self::couette()),
            "poiseuille" => Some(Self::poiseuille()),
            "zero" | "none" => Some(Self::zero()),
            _ => None,
        }
    }

    /// Tabulated profile through `(y_i, alpha_i)`; the samples must span
    /// `[0, 1]`. The spline mean is subtracted and kept as [`Self::mean_shift`].
    pub fn from_table(ys: &[f64], alphas: &[f64]) -> Result<Self> {
        let first = *ys.first().ok_or_else(|| invalid("table", "empty"))?;
        let last = *ys.last().unwrap();
        if first.abs() > DOMAIN_SLACK || (last - 1.0).abs() > DOMAIN_SLACK {
            return Err(invalid("table", "samples must start at y=0 and end at y=1"));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(invalid("table", "non-finite velocity"));
        }
        let spline = CubicSpline::natural(ys, alphas)?;
        let mean = spline.integral(1.0);
        let profile = Self {
            shape: Shape::Spline(spline),
            mean_shift: mean,
        };
        let residual = profile.a(1.0);
        if residual.abs() > MEAN_TOL {
            return Err(Error::NonZeroMean { mean: residual });
        }
        Ok(profile)
    }

    /// Parse the plain-text flow file format: `#` comments, a header line
    /// `n <count>`, then `<y> <alpha>` pairs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::FlowFile("missing `n <count>` header".into()))?;
        let mut parts = header.split_whitespace();
        let count: usize = match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(c), None) => c
                .parse()
                .map_err(|_| Error::FlowFile(format!("bad count `{c}`")))?,
            _ => return Err(Error::FlowFile(format!("bad header `{header}`"))),
        };
        let mut ys = Vec::with_capacity(count);
        let mut alphas = Vec::with_capacity(count);
        for (lineno, line) in lines.enumerate() {
            let mut it = line.split_whitespace();
            let (y, a) = match (it.next(), it.next(), it.next()) {
                (Some(y), Some(a), None) => (y, a),
                _ => {
                    return Err(Error::FlowFile(format!(
                        "data line {}: expected `<y> <alpha>`",
                        lineno + 1
                    )))
                }
            };
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::FlowFile(format!("data line {}: bad number `{s}`", lineno + 1)))
            };
            ys.push(parse(y)?);
            alphas.push(parse(a)?);
        }
        if ys.len() != count {
            return Err(Error::FlowFile(format!(
                "header declares {count} samples, found {}",
                ys.len()
            )));
        }
        if ys.iter().any(|&y| !(0.0..=1.0).contains(&y)) {
            return Err(Error::FlowFile("y values must lie in [0, 1]".into()));
        }
        if ys.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::FlowFile("y values must be strictly increasing".into()));
        }
        Self::from_table(&ys, &alphas).map_err(|e| match e {
            Error::FlowFile(_) => e,
            other => Error::FlowFile(other.to_string()),
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::FlowFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn kind(&self) -> FlowKind {
        match self.shape {
            Shape::Couette => FlowKind::Couette,
            Shape::Poiseuille => FlowKind::Poiseuille,
            Shape::Zero => FlowKind::Zero,
            Shape::Spline(_) => FlowKind::Tabulated,
        }
    }

    /// Mean removed from tabulated data (zero for built-ins).
    pub fn mean_shift(&self) -> f64 {
        self.mean_shift
    }

    /// Number of tabulated samples, if any.
    pub fn sample_count(&self) -> Option<usize> {
        match &self.shape {
            Shape::Spline(s) => Some(s.knots().len()),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match &self.shape {
            Shape::Zero => true,
            Shape::Spline(_) => (0..=256).all(|i| self.alpha(i as f64 / 256.0).abs() < 1e-14),
            _ => false,
        }
    }

    /// α(y) with a domain check.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&y) || y.is_nan() {
            return Err(Error::Domain {
                value: y,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(self.alpha(y.clamp(0.0, 1.0)))
    }

    /// α(y) without a domain check; callers guarantee `y ∈ [0, 1]`.
    #[inline]
    pub fn alpha(&self, y: f64) -> f64 {
        match &self.shape {
            Shape::Couette => y - 0.5,
            Shape::Poiseuille => -2.0 * y * y + 2.0 * y - 1.0 / 3.0,
            Shape::Zero => 0.0,
            Shape::Spline(s) => s.eval(y) - self.mean_shift,
        }
    }

    pub fn alpha_prime(&self, y: f64) -> f64 {
        match &self.shape {
            Shape::Couette => 1.0,
            Shape::Poiseuille => 2.0 - 4.0 * y,
            Shape::Zero => 0.0,
            Shape::Spline(s) => s.deriv(y),
        }
    }

    pub fn alpha_second(&self, y: f64) -> f64 {
        match &self.shape {
            Shape::Couette | Shape::Zero => 0.0,
            Shape::Poiseuille => -4.0,
            Shape::Spline(s) => s.deriv2(y),
        }
    }

    /// `a(y) = ∫₀ʸ α(s) ds`, evaluated in closed form.
    pub fn a(&self, y: f64) -> f64 {
        match &self.shape {
            Shape::Couette => 0.5 * (y * y - y),
            Shape::Poiseuille => -2.0 * y.powi(3) / 3.0 + y * y - y / 3.0,
            Shape::Zero => 0.0,
            Shape::Spline(s) => s.integral(y) - self.mean_shift * y,
        }
    }

    /// `phi(y) = ∫₀ʸ a(s) ds`, evaluated in closed form.
    pub fn phi(&self, y: f64) -> f64 {
        match &self.shape {
            Shape::Couette => y.powi(3) / 6.0 - y * y / 4.0,
            Shape::Poiseuille => -y.powi(4) / 6.0 + y.powi(3) / 3.0 - y * y / 6.0,
            Shape::Zero => 0.0,
            Shape::Spline(s) => s.integral2(y) - 0.5 * self.mean_shift * y * y,
        }
    }

    /// Maximum and minimum of α with the shape of the maximum.
    pub fn extrema(&self) -> Result<FlowExtrema> {
        match &self.shape {
            Shape::Zero => Err(Error::TrivialFlow),
            Shape::Couette => Ok(FlowExtrema {
                alpha_max: 0.5,
                y_max: 1.0,
                alpha_min: -0.5,
                y_min: 0.0,
                second_derivative_at_max: 0.0,
                boundary_max: true,
                degenerate: false,
            }),
            Shape::Poiseuille => Ok(FlowExtrema {
                alpha_max: 1.0 / 6.0,
                y_max: 0.5,
                alpha_min: -1.0 / 3.0,
                y_min: 0.0,
                second_derivative_at_max: -4.0,
                boundary_max: false,
                degenerate: false,
            }),
            Shape::Spline(_) => self.extrema_by_search(),
        }
    }

    fn extrema_by_search(&self) -> Result<FlowExtrema> {
        const SAMPLES: usize = 4000;
        let ys: Vec<f64> = (0..=SAMPLES).map(|i| i as f64 / SAMPLES as f64).collect();
        let vals: Vec<f64> = ys.iter().map(|&y| self.alpha(y)).collect();
        let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale < 1e-14 {
            return Err(Error::TrivialFlow);
        }
        let argmax = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
        let argmin = (0..vals.len()).fold(0, |b, i| if vals[i] < vals[b] { i } else { b });

        let refine = |i: usize, sign: f64| -> (f64, f64) {
            if i == 0 || i == SAMPLES {
                return (ys[i], vals[i]);
            }
            let y = golden_max(|y| sign * self.alpha(y), ys[i - 1], ys[i + 1]);
            (y, self.alpha(y))
        };
        let (y_max, alpha_max) = refine(argmax, 1.0);
        let (y_min, alpha_min) = refine(argmin, -1.0);
        let boundary_max = argmax == 0 || argmax == SAMPLES;
        let second = self.alpha_second(y_max);

        // A second, separated sample attaining the maximum means the maximum
        // is not isolated.
        let near = 1e-9 * scale;
        let plateau = vals
            .iter()
            .enumerate()
            .any(|(i, v)| (alpha_max - v).abs() <= near && i.abs_diff(argmax) > 2);
        let flat = !boundary_max && second.abs() <= 1e-8 * scale.max(1.0);
        Ok(FlowExtrema {
            alpha_max,
            y_max,
            alpha_min,
            y_min,
            second_derivative_at_max: second,
            boundary_max,
            degenerate: plateau || flat,
        })
    }

    /// Tabulate `a` and `phi` on `n_grid + 1` uniform nodes by cell-wise
    /// composite quadrature of α.
    pub fn integrals(&self, n_grid: usize) -> Result<FlowIntegrals> {
        if n_grid < 16 {
            return Err(invalid("n_grid", "must be at least 16"));
        }
        let h = 1.0 / n_grid as f64;
        let grid: Vec<f64> = (0..=n_grid).map(|i| i as f64 * h).collect();
        let mut a = vec![0.0; n_grid + 1];
        let mut phi = vec![0.0; n_grid + 1];
        for i in 0..n_grid {
            let (y0, y1) = (grid[i], grid[i + 1]);
            let da = quad::simpson(|s| self.alpha(s), y0, y1);
            // ∫_{y0}^{y1} a = a(y0) h + ∫_{y0}^{y1} (y1 - s) α(s) ds
            let dphi = a[i] * h + quad::simpson(|s| (y1 - s) * self.alpha(s), y0, y1);
            a[i + 1] = a[i] + da;
            phi[i + 1] = phi[i] + dphi;
        }
        Ok(FlowIntegrals { grid, a, phi })
    }

    /// `Δ = ∫₀¹ (∫₀ʸ α)² dy`, the shear-dispersion coefficient.
    pub fn effective_delta(&self) -> f64 {
        if matches!(self.shape, Shape::Zero) {
            return 0.0;
        }
        let breaks = match &self.shape {
            Shape::Spline(s) => s.knots().to_vec(),
            _ => vec![0.0, 0.5, 1.0],
        };
        quad::gauss_legendre_panels(|y| self.a(y).powi(2), &breaks)
    }

    /// Cosine coefficients `ᾱ_n`, n = 1..=n_max, of `ᾱ(y') = α(y'/L)` on `[0, L]`.
    pub fn fourier_coeffs(&self, length: f64, n_max: usize) -> Result<Vec<f64>> {
        if !(length > 0.0) {
            return Err(invalid("L", "must be positive"));
        }
        if n_max < 1 {
            return Err(invalid("n_max", "must be at least 1"));
        }
        let coeffs = (1..=n_max)
            .map(|n| {
                let w = n as f64 * std::f64::consts::PI / length;
                let integral = quad::simpson_with(
                    |s| self.alpha((s / length).clamp(0.0, 1.0)) * (w * s).cos(),
                    0.0,
                    length,
                    8 * (n + 8),
                );
                2.0 / length * integral
            })
            .collect();
        Ok(coeffs)
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_search_max(flow: &FlowProfile, n: usize) -> (f64, f64) {
        (0..=n)
            .map(|i| i as f64 / n as f64)
            .map(|y| (y, flow.alpha(y)))
            .fold((0.0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b })
    }

    #[test]
    fn eval_builtins() {
        assert_eq!(FlowProfile::couette().eval(0.5).unwrap(), 0.0);
        assert!((FlowProfile::poiseuille().eval(0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(FlowProfile::couette().eval(0.0).unwrap(), -0.5);
    }

    #[test]
    fn eval_rejects_outside_domain() {
        let f = FlowProfile::couette();
        assert!(matches!(f.eval(1.5), Err(Error::Domain { .. })));
        assert!(matches!(f.eval(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn poiseuille_extrema_match_grid_search() {
        let flow = FlowProfile::poiseuille();
        let ex = flow.extrema().unwrap();
        let (y, a) = grid_search_max(&flow, 100_000);
        assert!((ex.y_max - y).abs() < 1e-4 && (ex.y_max - 0.5).abs() < 1e-15);
        assert!((ex.alpha_max - a).abs() < 1e-9);
        assert_eq!(ex.second_derivative_at_max, -4.0);
        // Finite-difference check of α''.
        let h = 1e-4;
        let fd = (flow.alpha(0.5 + h) - 2.0 * flow.alpha(0.5) + flow.alpha(0.5 - h)) / (h * h);
        assert!((fd + 4.0).abs() < 1e-6);
        assert!(ex.is_regular_interior());
    }

    #[test]
    fn couette_maximum_on_boundary() {
        let ex = FlowProfile::couette().extrema().unwrap();
        assert_eq!(ex.alpha_max, 0.5);
        assert_eq!(ex.y_max, 1.0);
        assert!(ex.boundary_max);
    }

    #[test]
    fn zero_flow_is_flagged_trivial() {
        assert_eq!(FlowProfile::zero().extrema(), Err(Error::TrivialFlow));
        assert_eq!(FlowProfile::zero().effective_delta(), 0.0);
    }

    #[test]
    fn couette_integrals_match_symbolic() {
        let it = FlowProfile::couette().integrals(64).unwrap();
        assert!((it.a[32] + 1.0 / 8.0).abs() < 1e-13);
        assert!(it.a[64].abs() < 1e-13);
        // phi = y^3/6 - y^2/4, mean -1/24; trapezoid is O(h^2).
        assert!((it.phi_mean() + 1.0 / 24.0).abs() < 1e-4);
        let exact_mean = quad::simpson(|y| FlowProfile::couette().phi(y), 0.0, 1.0);
        assert!((exact_mean + 1.0 / 24.0).abs() < 1e-13);
        for (y, p) in it.grid.iter().zip(&it.phi) {
            assert!((p - (y.powi(3) / 6.0 - y * y / 4.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_endpoint_slopes_vanish() {
        for flow in [FlowProfile::couette(), FlowProfile::poiseuille()] {
            let n = 200;
            let it = flow.integrals(n).unwrap();
            let h = it.spacing();
            let left = (it.phi[1] - it.phi[0]) / h;
            let right = (it.phi[n] - it.phi[n - 1]) / h;
            assert!(left.abs() <= h && right.abs() <= h, "{left} {right}");
            assert!(it.a[n].abs() < 1e-13);
        }
    }

    #[test]
    fn delta_builtins() {
        assert!((FlowProfile::couette().effective_delta() - 1.0 / 120.0).abs() < 1e-12);
        assert!((FlowProfile::poiseuille().effective_delta() - 1.0 / 1890.0).abs() < 1e-12);
    }

    #[test]
    fn delta_agrees_with_fine_trapezoid_of_tabulated_a() {
        for flow in [FlowProfile::couette(), FlowProfile::poiseuille()] {
            let it = flow.integrals(20_000).unwrap();
            let sq: Vec<f64> = it.a.iter().map(|a| a * a).collect();
            let trap = quad::trapezoid(&sq, it.spacing());
            assert!((trap - flow.effective_delta()).abs() < 1e-8);
        }
    }

    #[test]
    fn fourier_couette_closed_form() {
        let c = FlowProfile::couette().fourier_coeffs(1.0, 4).unwrap();
        assert!((c[0] + 4.0 / (PI * PI)).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12);
        assert!((c[2] + 4.0 / (9.0 * PI * PI)).abs() < 1e-12);
        // Coefficients do not depend on the channel scaling.
        let c2 = FlowProfile::couette().fourier_coeffs(3.0, 4).unwrap();
        assert!((c2[0] - c[0]).abs() < 1e-11);
    }

    #[test]
    fn fourier_reconstruction_error_decreases() {
        for flow in [FlowProfile::couette(), FlowProfile::poiseuille()] {
            let coeffs = flow.fourier_coeffs(1.0, 64).unwrap();
            let err = |m: usize| {
                let n = 2000;
                let sq: Vec<f64> = (0..=n)
                    .map(|i| {
                        let y = i as f64 / n as f64;
                        let s: f64 = coeffs[..m]
                            .iter()
                            .enumerate()
                            .map(|(j, c)| c * ((j + 1) as f64 * PI * y).cos())
                            .sum();
                        (flow.alpha(y) - s).powi(2)
                    })
                    .collect();
                quad::trapezoid(&sq, 1.0 / n as f64).sqrt()
            };
            let errs: Vec<f64> = [2, 4, 8, 16, 32, 64].iter().map(|&m| err(m)).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        }
    }

    #[test]
    fn parse_flow_file_and_recentre() {
        let mut text = String::from("# shifted Poiseuille\nn 41\n");
        for i in 0..=40 {
            let y = i as f64 / 40.0;
            text.push_str(&format!("{y} {}\n", -2.0 * y * y + 2.0 * y - 1.0 / 3.0 + 0.25));
        }
        let flow = FlowProfile::parse(&text).unwrap();
        assert_eq!(flow.kind(), FlowKind::Tabulated);
        assert_eq!(flow.sample_count(), Some(41));
        assert!((flow.mean_shift() - 0.25).abs() < 1e-4);
        assert!(flow.a(1.0).abs() < 1e-12);
        let ex = flow.extrema().unwrap();
        assert!((ex.y_max - 0.5).abs() < 1e-3);
        assert!(!ex.boundary_max);
        assert!((ex.second_derivative_at_max + 4.0).abs() < 0.1);
        assert!((flow.effective_delta() - 1.0 / 1890.0).abs() < 1e-6);
    }

    #[test]
    fn parse_rejects_bad_files() {
        assert!(FlowProfile::parse("").is_err());
        assert!(FlowProfile::parse("n 3\n0 0\n0.5 0\n1 0\n").is_err()); // too few for a spline
        assert!(FlowProfile::parse("n 5\n0 1\n0.25 1\n0.5 1\n1 1\n").is_err()); // count mismatch
        assert!(FlowProfile::parse("n 4\n0 0\n0.6 1\n0.5 -1\n1 0\n").is_err());
        assert!(FlowProfile::parse("m 4\n").is_err());
    }
}
