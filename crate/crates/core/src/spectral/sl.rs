//! Sturm–Liouville problem `−ψ'' − kα(y)ψ = λψ`, `ψ'(0) = ψ'(1) = 0`.

use serde::Serialize;

use super::tridiag::SymTridiag;
use super::{check_grid, neumann_offdiag, nodal_normalised, BoundsReport, EigenProblem, EigenSolution};
use crate::error::{invalid, Result};
use crate::flows::FlowProfile;
use crate::quad;

/// Smallest eigenvalue and its positive, unit-integral eigenfunction.
pub fn sl_principal(flow: &FlowProfile, k: f64, n: usize) -> Result<EigenSolution> {
    check_grid(n)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(invalid("k", "must be finite and nonnegative"));
    }
    let grid: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    if k == 0.0 || flow.is_trivial() {
        return Ok(EigenSolution {
            problem: EigenProblem::Sl { k },
            lambda0: 0.0,
            eigenfunction: vec![1.0; n + 1],
            grid,
            n,
            residual: 0.0,
            positivity_margin: 1.0,
        });
    }
    let t = operator(flow, k, n);
    let z = t.eigenvector(t.smallest_eigenvalue())?;
    let psi = nodal_normalised(&z, 1.0);
    let lambda0 = energy_quotient(flow, k, &psi);
    let residual = t.relative_residual(lambda0, &z);
    let positivity_margin = psi.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(EigenSolution {
        problem: EigenProblem::Sl { k },
        lambda0,
        grid,
        eigenfunction: psi,
        n,
        residual,
        positivity_margin,
    })
}

/// Grid samples of α with their trapezoid mean removed, so that the
/// constant function is orthogonal to the discrete flow as it is to α.
fn centred_alpha(flow: &FlowProfile, n: usize) -> Vec<f64> {
    let alpha: Vec<f64> = (0..=n).map(|j| flow.alpha(j as f64 / n as f64)).collect();
    let mean = quad::trapezoid_mean(&alpha);
    alpha.into_iter().map(|a| a - mean).collect()
}

/// Symmetrised discrete operator; exposed for Rayleigh-quotient checks.
pub fn operator(flow: &FlowProfile, k: f64, n: usize) -> SymTridiag {
    let h = 1.0 / n as f64;
    let d = centred_alpha(flow, n).into_iter().map(|a| 2.0 / (h * h) - k * a).collect();
    let e = neumann_offdiag(n, -1.0);
    SymTridiag::new(d, e)
}

/// Rayleigh quotient in nodal form, `(Σ(Δψ)²/h² − kΣwαψ²) / Σwψ²`.
/// Unlike the Sturm count it keeps full relative precision when `λ₀ ≈ −k²Δ` is tiny.
fn energy_quotient(flow: &FlowProfile, k: f64, psi: &[f64]) -> f64 {
    let n = psi.len() - 1;
    let h = 1.0 / n as f64;
    let grad: f64 = psi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / (h * h);
    let w = quad::trapezoid_weights(n + 1, 1.0);
    let alpha = centred_alpha(flow, n);
    let pot: f64 = (0..=n).map(|j| w[j] * alpha[j] * psi[j] * psi[j]).sum();
    let norm: f64 = (0..=n).map(|j| w[j] * psi[j] * psi[j]).sum();
    (grad - k * pot) / norm
}

/// `−kα_M < λ₀ < −kα_m` (closed at `k = 0`).
pub fn sl_bounds(flow: &FlowProfile, k: f64, lambda0: f64) -> Result<BoundsReport> {
    if k == 0.0 || flow.is_trivial() {
        return Ok(BoundsReport::check(0.0, 0.0, lambda0));
    }
    let ex = flow.extrema()?;
    let mut report = BoundsReport::check(-k * ex.alpha_max, -k * ex.alpha_min, lambda0);
    report.satisfied &= lambda0 < 0.0;
    Ok(report)
}

/// Coefficient `c` in `λ₀(k) = −c k² + O(k³)`: equal to `∫₀¹ (∫₀ʸ α)² dy`.
pub fn sl_small_k_coefficient(flow: &FlowProfile) -> f64 {
    flow.effective_delta()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeKAsymptote {
    pub value: f64,
    pub leading: f64,
    /// `(1/√2)(−α''(y_M))^{1/2} k^{1/2}`; absent for boundary or degenerate maxima.
    pub correction: Option<f64>,
    pub boundary_max: bool,
    pub degenerate: bool,
}

/// `λ₀ ≈ −α_M k + (1/√2)(−α''_M)^{1/2} k^{1/2}` for a nondegenerate interior
/// maximum; the leading term alone otherwise.
pub fn sl_large_k_asymptote(flow: &FlowProfile, k: f64) -> Result<LargeKAsymptote> {
    let ex = flow.extrema()?;
    let leading = -ex.alpha_max * k;
    let correction = if ex.is_regular_interior() && ex.second_derivative_at_max < 0.0 {
        Some((-ex.second_derivative_at_max).sqrt() * k.sqrt() / std::f64::consts::SQRT_2)
    } else {
        None
    };
    Ok(LargeKAsymptote {
        value: leading + correction.unwrap_or(0.0),
        leading,
        correction,
        boundary_max: ex.boundary_max,
        degenerate: ex.degenerate,
    })
}

/// `γ₀ = (2/v*)(log ψ₀ − ⟨log ψ₀⟩)` on the solution grid.
pub fn sl_interface(solution: &EigenSolution, v_star: f64) -> Result<Vec<f64>> {
    if !(v_star > 0.0) {
        return Err(invalid("v_star", "must be positive"));
    }
    Ok(solution
        .centred_log()?
        .into_iter()
        .map(|l| 2.0 / v_star * l)
        .collect())
}

/// Half of the width of the set where the eigenfunction exceeds half its
/// maximum, with linear interpolation at the two edges.
pub fn eigenfunction_half_width(solution: &EigenSolution) -> f64 {
    let psi = &solution.eigenfunction;
    let y = &solution.grid;
    let (imax, &pmax) = psi
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
    let half = 0.5 * pmax;
    let cross = |i: usize, j: usize| y[i] + (half - psi[i]) / (psi[j] - psi[i]) * (y[j] - y[i]);
    let mut right = *y.last().unwrap();
    for j in imax..psi.len() - 1 {
        if psi[j + 1] < half {
            right = cross(j, j + 1);
            break;
        }
    }
    let mut left = y[0];
    for j in (1..=imax).rev() {
        if psi[j - 1] < half {
            left = cross(j, j - 1);
            break;
        }
    }
    0.5 * (right - left)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_k_is_constant() {
        let s = sl_principal(&FlowProfile::poiseuille(), 0.0, 100).unwrap();
        assert_eq!(s.lambda0, 0.0);
        assert!(s.eigenfunction.iter().all(|&v| v == 1.0));
        let g = sl_interface(&s, 1.0).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn couette_small_k() {
        let k = 0.05;
        let s = sl_principal(&FlowProfile::couette(), k, 400).unwrap();
        let expect = -k * k / 120.0;
        assert!((expect + 2.083e-5).abs() < 1e-8);
        assert!((s.lambda0 - expect).abs() < k.powi(3), "{} vs {expect}", s.lambda0);
    }

    #[test]
    fn bounds_and_rayleigh() {
        for flow in [FlowProfile::couette(), FlowProfile::poiseuille()] {
            for k in [0.1, 1.0, 10.0, 100.0] {
                let s = sl_principal(&flow, k, 200).unwrap();
                assert!(sl_bounds(&flow, k, s.lambda0).unwrap().satisfied);
                assert!(s.residual < 1e-8, "{}", s.residual);
                assert!(s.positivity_margin > 0.0);
                let t = operator(&flow, k, 200);
                let z: Vec<f64> = s
                    .eigenfunction
                    .iter()
                    .enumerate()
                    .map(|(j, v)| if j == 0 || j == 200 { v / 2f64.sqrt() } else { *v })
                    .collect();
                assert!((t.rayleigh(&z) - s.lambda0).abs() < 1e-8);
                let integral = quad::trapezoid(&s.eigenfunction, 1.0 / 200.0);
                assert!((integral - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_k_coefficient_matches_delta() {
        let c = FlowProfile::couette();
        assert!((sl_small_k_coefficient(&c) - 1.0 / 120.0).abs() < 1e-12);
        assert!((sl_small_k_coefficient(&FlowProfile::poiseuille()) - 1.0 / 1890.0).abs() < 1e-12);
        assert_eq!(sl_small_k_coefficient(&FlowProfile::zero()), 0.0);
    }

    #[test]
    fn large_k_asymptote_forms() {
        let p = sl_large_k_asymptote(&FlowProfile::poiseuille(), 1600.0).unwrap();
        assert!((p.value - (-1600.0 / 6.0 + 2f64.sqrt() * 40.0)).abs() < 1e-10);
        assert!((p.value + 210.10).abs() < 0.01);
        let c = sl_large_k_asymptote(&FlowProfile::couette(), 10.0).unwrap();
        assert_eq!(c.value, -5.0);
        assert!(c.boundary_max && c.correction.is_none());
    }

    #[test]
    fn second_order_convergence() {
        let flow = FlowProfile::poiseuille();
        let l = |n| sl_principal(&flow, 20.0, n).unwrap().lambda0;
        let (a, b, c) = (l(100), l(200), l(400));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn interface_mean_zero() {
        let s = sl_principal(&FlowProfile::couette(), 1.0, 200).unwrap();
        let g = sl_interface(&s, 1.2).unwrap();
        assert!(quad::trapezoid_mean(&g).abs() < 1e-12);
    }

    #[test]
    fn interface_amplitude_against_k() {
        // The raw maximum grows with k; the k-scaled maximum decreases.
        for flow in [FlowProfile::couette(), FlowProfile::poiseuille()] {
            let maxima: Vec<(f64, f64)> = [0.2, 1.0, 5.0]
                .iter()
                .map(|&k| {
                    let s = sl_principal(&flow, k, 400).unwrap();
                    let g = sl_interface(&s, 1.0).unwrap();
                    let m = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    (m, m / k)
                })
                .collect();
            assert!(maxima.windows(2).all(|w| w[1].0 > w[0].0), "{maxima:?}");
            assert!(maxima.windows(2).all(|w| w[1].1 < w[0].1), "{maxima:?}");
        }
    }
}
