//! Asymptotic front speeds and interface shapes across the `(A, B, u_c)`
//! parameter plane, with a deterministic dispatcher.
//!
//! Every result carries an order tag and a numeric size for its neglected
//! terms, so overlapping formulas can be compared against each other.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::flows::FlowProfile;
use crate::ptw1d::{self, solve_vstar};
use crate::quad;
use crate::reaction::ReactionSpec;
use crate::spectral::{qevp, sl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegimeTag {
    #[serde(rename = "large_A")]
    LargeA,
    #[serde(rename = "small_B_balanced_A")]
    SmallBBalancedA,
    #[serde(rename = "small_A_composite")]
    SmallAComposite,
    #[serde(rename = "slowly_varying")]
    SlowlyVarying,
    #[serde(rename = "uc_near_one")]
    UcNearOne,
}

impl RegimeTag {
    /// Dispatch precedence, highest first.
    pub const ALL: [RegimeTag; 5] = [
        RegimeTag::LargeA,
        RegimeTag::SmallBBalancedA,
        RegimeTag::SmallAComposite,
        RegimeTag::SlowlyVarying,
        RegimeTag::UcNearOne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::LargeA => "large_A",
            RegimeTag::SmallBBalancedA => "small_B_balanced_A",
            RegimeTag::SmallAComposite => "small_A_composite",
            RegimeTag::SlowlyVarying => "slowly_varying",
            RegimeTag::UcNearOne => "uc_near_one",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interface curve `ζ(y)` sampled on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interface {
    pub y: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl Interface {
    pub fn mean(&self) -> f64 {
        quad::trapezoid_mean(&self.zeta)
    }

    pub fn max(&self) -> f64 {
        self.zeta.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontResult {
    pub regime: RegimeTag,
    pub v_hat: f64,
    pub v_star: f64,
    pub leading_term: f64,
    pub correction_term: f64,
    pub error_order: String,
    /// Size of the neglected terms with unit constant.
    pub error_estimate: f64,
    pub interface: Option<Interface>,
}

/// Validity bands used by [`regime_select`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeBands {
    pub large_a_min: f64,
    pub large_a_ratio_lo: f64,
    pub large_a_ratio_hi: f64,
    pub large_a_n_max: u32,
    pub small_a_max: f64,
    pub small_b_max: f64,
    pub small_b_a_lo: f64,
    pub small_b_a_hi: f64,
    pub uc_near_one_min: f64,
    pub slowly_varying_b_min: f64,
}

impl Default for RegimeBands {
    fn default() -> Self {
        Self {
            large_a_min: 10.0,
            large_a_ratio_lo: 0.1,
            large_a_ratio_hi: 10.0,
            large_a_n_max: 4,
            small_a_max: 0.2,
            small_b_max: 0.01,
            small_b_a_lo: 0.2,
            small_b_a_hi: 10.0,
            uc_near_one_min: 0.9,
            slowly_varying_b_min: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeSelection {
    pub primary: Option<RegimeTag>,
    /// Every regime whose band contains the point, in precedence order.
    pub applicable: Vec<RegimeTag>,
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid("A", "must be finite and positive"));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(invalid("B", "must be finite and positive"));
    }
    Ok(())
}

fn check_vstar(v_star: f64) -> Result<()> {
    if !(v_star > 0.0) {
        return Err(invalid("v_star", "must be positive"));
    }
    Ok(())
}

fn unit_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|j| j as f64 / n as f64).collect()
}

/// Exponent index `n ∈ 1..=8` of the distinguished limit `B = B̄A^{2/n}`
/// nearest to the given point.
pub fn distinguished_limit_index(a: f64, b: f64) -> u32 {
    (1..=8u32)
        .min_by(|&n, &m| {
            let f = |n: u32| (b.ln() - 2.0 / n as f64 * a.ln()).abs();
            f(n).total_cmp(&f(m))
        })
        .unwrap()
}

/// Homogenised strong-advection speed `√(1 + (A²/B)Δ)·v*`.
///
/// When the point is nearest a limit `B = B̄A^{2/n}` with `n > 1`, the
/// one-term form `√(Δ/B̄)A^{1−1/n}v*` is reported as `leading_term`; it is the
/// large-`A²Δ/B` limit of the same expression.
pub fn speed_large_a(flow: &FlowProfile, a: f64, b: f64, v_star: f64) -> Result<FrontResult> {
    check_ab(a, b)?;
    check_vstar(v_star)?;
    let delta = flow.effective_delta();
    let v_hat = (1.0 + a * a / b * delta).sqrt() * v_star;
    let n = distinguished_limit_index(a, b);
    let (leading, error_order) = if n == 1 {
        (v_hat, "o(1)".to_string())
    } else {
        let nf = n as f64;
        let b_bar = b / a.powf(2.0 / nf);
        (
            (delta / b_bar).sqrt() * a.powf(1.0 - 1.0 / nf) * v_star,
            format!("o(A^(1-1/{n}))"),
        )
    };
    Ok(FrontResult {
        regime: RegimeTag::LargeA,
        v_hat,
        v_star,
        leading_term: leading,
        correction_term: v_hat - leading,
        error_order,
        error_estimate: v_star / a,
        interface: None,
    })
}

/// Weak-advection composite `v* − A λ₀(k)/k`, `k = ½v*A/B`, with interface `γ₀`.
pub fn speed_small_a(flow: &FlowProfile, a: f64, b: f64, v_star: f64, n: usize) -> Result<FrontResult> {
    check_ab(a, b)?;
    check_vstar(v_star)?;
    let k = 0.5 * v_star * a / b;
    let sol = sl::sl_principal(flow, k, n)?;
    let correction = -a * sol.lambda0 / k;
    let gamma = sl::sl_interface(&sol, v_star)?;
    Ok(FrontResult {
        regime: RegimeTag::SmallAComposite,
        v_hat: v_star + correction,
        v_star,
        leading_term: v_star,
        correction_term: correction,
        error_order: "O(A^2)".into(),
        error_estimate: a * a,
        interface: Some(Interface {
            y: sol.grid,
            zeta: gamma,
        }),
    })
}

/// Thin-front speed `v* + Aα_M` with interface `B^{-1/2} z₀(y)`.
pub fn speed_small_b(flow: &FlowProfile, a: f64, b: f64, v_star: f64, n: usize) -> Result<FrontResult> {
    check_ab(a, b)?;
    check_vstar(v_star)?;
    let ex = flow.extrema()?;
    let correction = a * ex.alpha_max;
    let shape = interface_small_b(flow, a, b, v_star, n)?;
    Ok(FrontResult {
        regime: RegimeTag::SmallBBalancedA,
        v_hat: v_star + correction,
        v_star,
        leading_term: v_star,
        correction_term: correction,
        error_order: "O(B^(1/2))".into(),
        error_estimate: b.sqrt(),
        interface: Some(Interface {
            y: shape.y,
            zeta: shape.z,
        }),
    })
}

/// `u_c → 1` speed `(1 − u_c)|f'(1)|/λ₀(A, B)` from the quadratic eigenproblem.
pub fn speed_uc_near1(
    flow: &FlowProfile,
    a: f64,
    b: f64,
    u_c: f64,
    fprime_at_one: f64,
    n: usize,
) -> Result<FrontResult> {
    if !(u_c > 0.0 && u_c < 1.0) {
        return Err(invalid("u_c", format!("{u_c} not in (0, 1)")));
    }
    let sol = qevp::qevp_principal(flow, a, b, fprime_at_one, n)?;
    let vbar = qevp::qevp_speed_factor(sol.lambda0, fprime_at_one)?;
    let v_hat = (1.0 - u_c) * vbar;
    let leading = (1.0 - u_c) * fprime_at_one.abs().sqrt();
    let zeta = qevp::qevp_interface(&sol)?;
    Ok(FrontResult {
        regime: RegimeTag::UcNearOne,
        v_hat,
        v_star: leading,
        leading_term: leading,
        correction_term: v_hat - leading,
        error_order: "o(1-u_c)".into(),
        error_estimate: (1.0 - u_c).powi(2),
        interface: Some(Interface {
            y: unit_grid(n),
            zeta,
        }),
    })
}

/// Wide-channel speed `v*`, with the linear-response interface.
pub fn speed_slowly_varying(flow: &FlowProfile, a: f64, b: f64, v_star: f64, n: usize, bands: &RegimeBands) -> Result<FrontResult> {
    if !(a >= 0.0) {
        return Err(invalid("A", "must be nonnegative"));
    }
    if !(b > 0.0) {
        return Err(invalid("B", "must be positive"));
    }
    check_vstar(v_star)?;
    let (error_order, error_estimate) = if a <= bands.small_a_max {
        ("O(A^2/B)", a * a / b)
    } else {
        ("O(B^-1)", (1.0 + a * a) / b)
    };
    Ok(FrontResult {
        regime: RegimeTag::SlowlyVarying,
        v_hat: v_star,
        v_star,
        leading_term: v_star,
        correction_term: 0.0,
        error_order: error_order.into(),
        error_estimate,
        interface: Some(interface_balanced(flow, a, b, n)?),
    })
}

/// `ζ(y) = (A/B)(⟨φ⟩ − φ(y))`, `φ = ∫₀ʸ∫₀^s α`.
pub fn interface_balanced(flow: &FlowProfile, a: f64, b: f64, n: usize) -> Result<Interface> {
    if !(b > 0.0) {
        return Err(invalid("B", "must be positive"));
    }
    if n < 16 {
        return Err(invalid("N", "need at least 16 intervals"));
    }
    let mean = quad::simpson(|y| flow.phi(y), 0.0, 1.0);
    let y = unit_grid(n);
    let zeta = y.iter().map(|&s| a / b * (mean - flow.phi(s))).collect();
    Ok(Interface { y, zeta })
}

/// The balanced interface rebuilt from `n_modes` cosine modes of α:
/// `(A/B) Σ α_n/(nπ)² cos(nπy)`.
pub fn interface_balanced_fourier(flow: &FlowProfile, a: f64, b: f64, n: usize, n_modes: usize) -> Result<Interface> {
    let coeffs = flow.fourier_coeffs(1.0, n_modes)?;
    let y = unit_grid(n);
    let pi = std::f64::consts::PI;
    let zeta = y
        .iter()
        .map(|&s| {
            a / b
                * coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let w = (i + 1) as f64 * pi;
                        c / (w * w) * (w * s).cos()
                    })
                    .sum::<f64>()
        })
        .collect();
    Ok(Interface { y, zeta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBInterface {
    pub y: Vec<f64>,
    pub psi: Vec<f64>,
    pub z0: Vec<f64>,
    /// `B^{-1/2} z₀`.
    pub z: Vec<f64>,
    pub c: f64,
}

/// Thin-front interface: `ψ = v*/(v* + A(α_M − α))` and
/// `z₀ψ = c ± ∫√(1 − ψ²)` (sign switching at `y_M`), `c` fixed by `∫z₀ = 0`.
pub fn interface_small_b(flow: &FlowProfile, a: f64, b: f64, v_star: f64, n: usize) -> Result<SmallBInterface> {
    check_ab(a, b)?;
    check_vstar(v_star)?;
    if n < 16 {
        return Err(invalid("N", "need at least 16 intervals"));
    }
    let ex = flow.extrema()?;
    let am = ex.alpha_max;
    let psi_of = |y: f64| v_star / (v_star + a * (am - flow.alpha(y)));
    let y = unit_grid(n);
    if let Some(&bad) = y.iter().find(|&&s| am - flow.alpha(s) < -1e-12) {
        return Err(Error::Solver(format!("flow exceeds its computed maximum at y={bad}")));
    }
    let psi: Vec<f64> = y.iter().map(|&s| psi_of(s)).collect();
    let root = |s: f64| (1.0 - psi_of(s).powi(2)).max(0.0).sqrt();

    // Cumulative ∫₀ʸ √(1−ψ²) cell by cell, with an extra node at y_M.
    let ym = ex.y_max;
    let head = quad::simpson(root, 0.0, ym);
    let mut plain = vec![0.0; n + 1];
    for j in 0..n {
        plain[j + 1] = plain[j] + quad::simpson(root, y[j], y[j + 1]);
    }
    let signed: Vec<f64> = y
        .iter()
        .zip(&plain)
        .map(|(&s, &p)| if s < ym { p } else { 2.0 * head - p })
        .collect();

    let inv: Vec<f64> = psi.iter().map(|p| 1.0 / p).collect();
    let num: Vec<f64> = signed.iter().zip(&inv).map(|(j, i)| j * i).collect();
    let c = -quad::trapezoid_mean(&num) / quad::trapezoid_mean(&inv);
    let z0: Vec<f64> = signed.iter().zip(&inv).map(|(j, i)| (c + j) * i).collect();
    let scale = 1.0 / b.sqrt();
    let z = z0.iter().map(|v| v * scale).collect();
    Ok(SmallBInterface { y, psi, z0, z, c })
}

/// Regimes whose bands contain `(A, B, u_c)`.
pub fn regime_select(a: f64, b: f64, u_c: f64, bands: &RegimeBands) -> RegimeSelection {
    let mut applicable = Vec::new();
    let large_a = a >= bands.large_a_min
        && (1..=bands.large_a_n_max).any(|n| {
            let r = b / a.powf(2.0 / n as f64);
            (bands.large_a_ratio_lo..=bands.large_a_ratio_hi).contains(&r)
        });
    if large_a {
        applicable.push(RegimeTag::LargeA);
    }
    if b <= bands.small_b_max && a > bands.small_b_a_lo && a < bands.small_b_a_hi {
        applicable.push(RegimeTag::SmallBBalancedA);
    }
    if a > 0.0 && a <= bands.small_a_max {
        applicable.push(RegimeTag::SmallAComposite);
    }
    if b >= bands.slowly_varying_b_min && a <= 1.0 {
        applicable.push(RegimeTag::SlowlyVarying);
    }
    if u_c >= bands.uc_near_one_min {
        applicable.push(RegimeTag::UcNearOne);
    }
    RegimeSelection {
        primary: applicable.first().copied(),
        applicable,
    }
}

/// Evaluate one regime's formula at a point (bands are not consulted).
#[allow(clippy::too_many_arguments)]
pub fn speed_for_regime(
    tag: RegimeTag,
    flow: &FlowProfile,
    a: f64,
    b: f64,
    reaction: &ReactionSpec,
    v_star: f64,
    n: usize,
    bands: &RegimeBands,
) -> Result<FrontResult> {
    match tag {
        RegimeTag::LargeA => speed_large_a(flow, a, b, v_star),
        RegimeTag::SmallBBalancedA => speed_small_b(flow, a, b, v_star, n),
        RegimeTag::SmallAComposite => speed_small_a(flow, a, b, v_star, n),
        RegimeTag::SlowlyVarying => speed_slowly_varying(flow, a, b, v_star, n, bands),
        RegimeTag::UcNearOne => speed_uc_near1(flow, a, b, reaction.u_c, reaction.fprime_at_one(), n),
    }
}

/// Select the primary regime for the point and evaluate it.
pub fn estimate_speed(
    flow: &FlowProfile,
    a: f64,
    b: f64,
    reaction: &ReactionSpec,
    bands: &RegimeBands,
    n: usize,
) -> Result<FrontResult> {
    let sel = regime_select(a, b, reaction.u_c, bands);
    let tag = sel.primary.ok_or(Error::NoRegime { a, b, u_c: reaction.u_c })?;
    let v_star = if tag == RegimeTag::UcNearOne {
        0.0
    } else {
        solve_vstar(reaction, ptw1d::DEFAULT_TOL)?.v_star
    };
    speed_for_regime(tag, flow, a, b, reaction, v_star, n, bands)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectionMaximum {
    pub b_max: f64,
    pub correction: f64,
    /// True when the maximiser sits on an end of the search interval.
    pub at_boundary: bool,
}

/// Maximise the composite correction `−Aλ₀(k)/k` over `B ∈ [b_lo, b_hi]` by
/// golden-section search in `log B`.
pub fn composite_correction_maximizer(
    flow: &FlowProfile,
    a: f64,
    v_star: f64,
    b_lo: f64,
    b_hi: f64,
    n: usize,
) -> Result<CorrectionMaximum> {
    if !(b_lo > 0.0 && b_hi > b_lo) {
        return Err(invalid("B range", "need 0 < b_lo < b_hi"));
    }
    let corr = |lb: f64| -> Result<f64> { Ok(speed_small_a(flow, a, lb.exp(), v_star, n)?.correction_term) };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (b_lo.ln(), b_hi.ln());
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (corr(x1)?, corr(x2)?);
    while hi - lo > 1e-6 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = corr(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = corr(x1)?;
        }
    }
    let mut best = (0.5 * (lo + hi), corr(0.5 * (lo + hi))?);
    for end in [b_lo.ln(), b_hi.ln()] {
        let f = corr(end)?;
        if f >= best.1 {
            best = (end, f);
        }
    }
    let tol = 1e-4;
    Ok(CorrectionMaximum {
        b_max: best.0.exp(),
        correction: best.1,
        at_boundary: (best.0 - b_lo.ln()).abs() < tol || (best.0 - b_hi.ln()).abs() < tol,
    })
}
