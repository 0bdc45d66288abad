//! Composite quadrature used throughout the crate.
//!
//! Integrals are computed with composite Simpson, doubling the panel count
//! until two successive estimates agree to `1e-12` absolute or `1e-10`
//! relative. Grid-based helpers use the trapezoid rule, which is the rule
//! that matches the ghost-point Neumann discretisations in `spectral`.

/// Absolute agreement between successive Simpson estimates.
pub const ABS_TOL: f64 = 1e-12;
/// Relative agreement between successive Simpson estimates.
pub const REL_TOL: f64 = 1e-10;

const MAX_LEVEL: u32 = 22;

/// Integrate `f` over `[a, b]` with default tolerances.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    simpson_with(f, a, b, 16)
}

/// As [`simpson`], starting from at least `min_panels` intervals.
///
/// Oscillatory integrands must start above their Nyquist count, otherwise
/// the doubling loop can lock onto an aliased value.
pub fn simpson_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, min_panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n = min_panels.max(2).next_power_of_two();
    let mut h = (b - a) / n as f64;
    let ends = f(a) + f(b);
    let interior: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    let mut trap = h * (0.5 * ends + interior);
    let mut prev: Option<f64> = None;
    let mut agreed = 0;
    for _ in 0..MAX_LEVEL {
        // Refine: add midpoints.
        let mids: f64 = (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum();
        let trap_fine = 0.5 * trap + 0.5 * h * mids;
        let est = (4.0 * trap_fine - trap) / 3.0;
        n *= 2;
        h *= 0.5;
        trap = trap_fine;
        if let Some(p) = prev {
            let diff = (est - p).abs();
            if diff < ABS_TOL || diff < REL_TOL * est.abs() {
                agreed += 1;
                if agreed >= 2 {
                    return est;
                }
            } else {
                agreed = 0;
            }
        }
        prev = Some(est);
    }
    prev.unwrap_or(trap)
}

/// Five-point Gauss–Legendre rule applied on each interval `[x[i], x[i+1]]`;
/// exact for piecewise polynomials of degree ≤ 9 with those breakpoints.
pub fn gauss_legendre_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    breaks
        .windows(2)
        .map(|w| {
            let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            r * NODES.iter().zip(WEIGHTS).map(|(x, wt)| wt * f(c + r * x)).sum::<f64>()
        })
        .sum()
}

/// Trapezoid weights for `n` equally spaced nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Trapezoid integral of samples on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * (values[0] + values[n - 1]) + inner)
        }
    }
}

/// Trapezoid mean of samples on a uniform grid covering the whole interval.
pub fn trapezoid_mean(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return values.first().copied().unwrap_or(0.0);
    }
    trapezoid(values, 1.0 / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_nine() {
        let v = gauss_legendre_panels(|x| x.powi(9) - 3.0 * x.powi(4), &[0.0, 0.3, 1.0]);
        assert!((v - (0.1 - 0.6)).abs() < 1e-15, "{v}");
    }

    #[test]
    fn polynomial_exact() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0);
        assert!((v - 0.0).abs() < 1e-13);
        let v = simpson(|x| x.powi(4), 0.0, 1.0);
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_needs_min_panels() {
        let n = 128.0;
        let v = simpson_with(|x| (n * std::f64::consts::PI * x).cos().powi(2), 0.0, 1.0, 8 * 128);
        assert!((v - 0.5).abs() < 1e-11);
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        // Fixed-panel Simpson errors fall by ~16 per doubling.
        let fixed = |n: usize| {
            let h = 1.0 / n as f64;
            let f = |x: f64| x.exp();
            let mut s = f(0.0) + f(1.0);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * h);
            }
            s * h / 3.0
        };
        let exact = std::f64::consts::E - 1.0;
        let e1 = (fixed(8) - exact).abs();
        let e2 = (fixed(16) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn trapezoid_mean_of_linear_is_exact() {
        let v: Vec<f64> = (0..11).map(|i| i as f64 / 10.0 - 0.5).collect();
        assert!(trapezoid_mean(&v).abs() < 1e-15);
    }
}
