//! Quadratic eigenproblem `φ'' + (λ² − Aᾱ(y')λ + f'(1))φ = 0` on `[0, L]`.
//!
//! Rescaling `y = y'/L` turns the problem into
//! `Bφ_yy + (λ² − Aα(y)λ + f'(1))φ = 0` on `[0, 1]`. After discretisation,
//! `T(λ) = B D₂ + diag(λ² − Aα_jλ + f'(1))` is symmetric tridiagonal. Its top
//! eigenvalue `μ(λ)` is convex in `λ` with `μ(0) = f'(1) < 0`, so the smallest
//! positive eigenvalue is the unique positive zero of `μ`, and the
//! corresponding null vector is the Perron vector of `T(λ₀)`, hence positive.
//! [`qevp_principal`] brackets that zero with Sturm counts.
//!
//! [`qevp_companion`] solves the same discrete problem through the
//! first-order companion linearisation with a dense eigensolver. It is
//! `O(N³)` and meant for cross-checks at small `N`.

use nalgebra::DMatrix;

use super::tridiag::SymTridiag;
use super::{check_grid, h_function, neumann_offdiag, nodal_normalised, BoundsReport, EigenProblem, EigenSolution};
use crate::error::{invalid, Error, Result};
use crate::flows::FlowProfile;

fn check_inputs(a: f64, b: f64, fprime_at_one: f64, n: usize) -> Result<()> {
    check_grid(n)?;
    if !(a >= 0.0) || !a.is_finite() {
        return Err(invalid("A", "must be finite and nonnegative"));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(invalid("B", "must be finite and positive"));
    }
    if !(fprime_at_one < 0.0) {
        return Err(invalid("fp1", "f'(1) must be negative"));
    }
    Ok(())
}

fn operator(alpha: &[f64], a: f64, b: f64, fp1: f64, lambda: f64) -> SymTridiag {
    let n = alpha.len() - 1;
    let h = 1.0 / n as f64;
    let d = alpha
        .iter()
        .map(|&al| -2.0 * b / (h * h) + lambda * lambda - a * al * lambda + fp1)
        .collect();
    SymTridiag::new(d, neumann_offdiag(n, b))
}

/// True when `T(λ)` has a nonnegative eigenvalue.
fn top_nonnegative(t: &SymTridiag) -> bool {
    t.count_below(0.0) < t.len()
}

/// Smallest positive eigenvalue with a positive eigenfunction.
pub fn qevp_principal(flow: &FlowProfile, a: f64, b: f64, fprime_at_one: f64, n: usize) -> Result<EigenSolution> {
    check_inputs(a, b, fprime_at_one, n)?;
    let alpha: Vec<f64> = (0..=n).map(|j| flow.alpha(j as f64 / n as f64)).collect();
    let amax = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut lo = 0.0;
    let mut hi = h_function(a * amax, fprime_at_one) * (1.0 + 1e-12) + 1e-300;
    let mut expansions = 0;
    while !top_nonnegative(&operator(&alpha, a, b, fprime_at_one, hi)) {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Solver("no positive eigenvalue of the quadratic problem".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if top_nonnegative(&operator(&alpha, a, b, fprime_at_one, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda0 = 0.5 * (lo + hi);
    let t = operator(&alpha, a, b, fprime_at_one, lambda0);
    // Null vector of T(λ₀) is its top eigenvector: the bottom one of −T.
    let neg = SymTridiag::new(t.d.iter().map(|v| -v).collect(), t.e.iter().map(|v| -v).collect());
    let mu = neg.smallest_eigenvalue();
    let z = neg.eigenvector(mu)?;
    let residual = t.relative_residual(0.0, &z);
    let length = 1.0 / b.sqrt();
    let phi = nodal_normalised(&z, length);
    let positivity_margin = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(positivity_margin > 0.0) {
        return Err(Error::Solver(format!(
            "quadratic eigenfunction not sign-definite (min {positivity_margin:e})"
        )));
    }
    Ok(EigenSolution {
        problem: EigenProblem::Qevp { a, b, fprime_at_one },
        lambda0,
        grid: (0..=n).map(|j| length * j as f64 / n as f64).collect(),
        eigenfunction: phi,
        n,
        residual,
        positivity_margin,
    })
}

/// `H(Aα_m) < λ₀ < H(Aα_M)`, collapsing to `λ₀ = H(0)` for `A = 0` or a
/// trivial flow.
pub fn qevp_bounds(flow: &FlowProfile, a: f64, fprime_at_one: f64, lambda0: f64) -> Result<BoundsReport> {
    if a == 0.0 || flow.is_trivial() {
        let h0 = h_function(0.0, fprime_at_one);
        return Ok(BoundsReport {
            lower: h0,
            upper: h0,
            satisfied: (lambda0 - h0).abs() <= 1e-9,
        });
    }
    let ex = flow.extrema()?;
    Ok(BoundsReport::check(
        h_function(a * ex.alpha_min, fprime_at_one),
        h_function(a * ex.alpha_max, fprime_at_one),
        lambda0,
    ))
}

/// `v̄ = |f'(1)|/λ₀`; the `u_c → 1` speed is `(1 − u_c)v̄`.
pub fn qevp_speed_factor(lambda0: f64, fprime_at_one: f64) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(invalid("lambda0", "must be positive"));
    }
    Ok(fprime_at_one.abs() / lambda0)
}

/// `ζ(y') = (⟨log φ⟩ − log φ(y'))/λ₀` on the solution grid.
pub fn qevp_interface(solution: &EigenSolution) -> Result<Vec<f64>> {
    let centred = solution.centred_log()?;
    Ok(centred.into_iter().map(|l| -l / solution.lambda0).collect())
}

/// Result of the companion-linearisation route.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionResult {
    pub lambda0: f64,
    /// First block of the eigenvector, largest entry normalised to one.
    pub eigenvector: Vec<f64>,
    /// Real positive eigenvalues examined, ascending.
    pub candidates: Vec<f64>,
}

/// Companion linearisation `[[0, I], [−K, A diag α]]` with
/// `K = B D₂ + f'(1) I` (unsymmetrised ghost-point form); keeps real
/// positive eigenvalues whose first eigenvector block is sign-definite and
/// returns the smallest.
pub fn qevp_companion(flow: &FlowProfile, a: f64, b: f64, fprime_at_one: f64, n: usize) -> Result<CompanionResult> {
    check_inputs(a, b, fprime_at_one, n)?;
    let m = n + 1;
    let h = 1.0 / n as f64;
    let c = b / (h * h);
    let alpha: Vec<f64> = (0..m).map(|j| flow.alpha(j as f64 * h)).collect();
    let mut k = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        k[(j, j)] = -2.0 * c + fprime_at_one;
        if j == 0 {
            k[(0, 1)] = 2.0 * c;
        } else if j == n {
            k[(n, n - 1)] = 2.0 * c;
        } else {
            k[(j, j - 1)] = c;
            k[(j, j + 1)] = c;
        }
    }
    let mut comp = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for j in 0..m {
        comp[(j, m + j)] = 1.0;
        comp[(m + j, m + j)] = a * alpha[j];
        for i in 0..m {
            comp[(m + j, i)] = -k[(j, i)];
        }
    }
    let eig = comp.complex_eigenvalues();
    let mut candidates: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()) && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    candidates.sort_by(f64::total_cmp);
    for &lam in &candidates {
        let mut q = k.clone();
        for j in 0..m {
            q[(j, j)] += lam * lam - a * alpha[j] * lam;
        }
        let svd = q.svd(false, true);
        let vt = svd.v_t.as_ref().unwrap();
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &s)| if s < b.1 { (i, s) } else { b });
        let mut v: Vec<f64> = vt.row(imin).iter().cloned().collect();
        let big = v.iter().cloned().fold(0.0, |acc: f64, x| if x.abs() > acc.abs() { x } else { acc });
        v.iter_mut().for_each(|x| *x /= big);
        if v.iter().all(|&x| x > 0.0) {
            return Ok(CompanionResult {
                lambda0: lam,
                eigenvector: v,
                candidates,
            });
        }
    }
    Err(Error::Solver(
        "no real positive eigenvalue with a sign-definite eigenvector".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn no_flow_gives_unit_eigenvalue() {
        for b in [0.1, 1.0, 10.0] {
            let s = qevp_principal(&FlowProfile::couette(), 0.0, b, -1.0, 400).unwrap();
            assert!((s.lambda0 - 1.0).abs() < 1e-8, "{}", s.lambda0);
            let z = qevp_interface(&s).unwrap();
            assert!(z.iter().all(|v| v.abs() < 1e-10));
            assert!((qevp_speed_factor(s.lambda0, -1.0).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn couette_unit_bounds_and_monotone_interface() {
        let flow = FlowProfile::couette();
        let s = qevp_principal(&flow, 1.0, 1.0, -1.0, 400).unwrap();
        assert!(s.lambda0 > 0.78078 && s.lambda0 < 1.28078);
        assert!(qevp_bounds(&flow, 1.0, -1.0, s.lambda0).unwrap().satisfied);
        assert!(s.residual < 1e-8);
        let z = qevp_interface(&s).unwrap();
        let dz: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(dz.iter().all(|&d| d > 0.0) || dz.iter().all(|&d| d < 0.0));
        assert!(quad::trapezoid(&z, s.length() / s.n as f64).abs() < 1e-8);
        let integral = quad::trapezoid(&s.eigenfunction, s.length() / s.n as f64);
        assert!((integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_route_agrees() {
        for (flow, a, b) in [
            (FlowProfile::couette(), 1.0, 1.0),
            (FlowProfile::poiseuille(), 2.0, 0.1),
            (FlowProfile::couette(), 5.0, 10.0),
        ] {
            let n = 60;
            let s = qevp_principal(&flow, a, b, -1.0, n).unwrap();
            let c = qevp_companion(&flow, a, b, -1.0, n).unwrap();
            assert!((s.lambda0 - c.lambda0).abs() < 1e-9, "{} vs {}", s.lambda0, c.lambda0);
            let big = s.eigenfunction.iter().cloned().fold(0.0, f64::max);
            for (x, y) in s.eigenfunction.iter().zip(&c.eigenvector) {
                assert!((x / big - y).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn second_order_refinement() {
        let flow = FlowProfile::poiseuille();
        let l = |n| qevp_principal(&flow, 2.0, 1.0, -1.0, n).unwrap().lambda0;
        let (a, b, c) = (l(100), l(200), l(400));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = FlowProfile::couette();
        assert!(qevp_principal(&f, -1.0, 1.0, -1.0, 100).is_err());
        assert!(qevp_principal(&f, 1.0, 0.0, -1.0, 100).is_err());
        assert!(qevp_principal(&f, 1.0, 1.0, 0.5, 100).is_err());
        assert!(qevp_principal(&f, 1.0, 1.0, -1.0, 10).is_err());
        assert!(qevp_speed_factor(0.0, -1.0).is_err());
    }
}
