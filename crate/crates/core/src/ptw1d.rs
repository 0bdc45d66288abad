//! Advectionless cut-off front: the speed `v*(u_c)` and the profile `U_T(ξ)`.
//!
//! On `ξ ≥ 0` the reaction is off and `U_T = u_c e^{-v ξ}` exactly. On
//! `ξ < 0` the profile solves `U'' + vU' + f(U) = 0` and must join the
//! saddle `(1, 0)` as `ξ → -∞`. The speed is found by shooting leftward from
//! `ξ = 0` with `U = u_c`, `U' = -v u_c` and bisecting on the outcome:
//! overshooting `U = 1` means `v` is too large, a turning point (`U'` changing
//! sign) means `v` is too small.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::reaction::ReactionSpec;

/// Default tolerance on `v*`.
pub const DEFAULT_TOL: f64 = 1e-10;

const OVERSHOOT: f64 = 1e-6;
const SADDLE_BALL: f64 = 1e-8;
/// Distance from `U = 1` at which the stored profile is launched.
const LAUNCH_EPS: f64 = 1e-8;
const PROFILE_MAX_STEP: f64 = 0.01;

/// Integrator controls for the shooting and profile integrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOptions {
    /// Local error target per step (step-doubling estimate).
    pub local_tol: f64,
    pub max_step: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            local_tol: 1e-13,
            max_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Overshoot,
    Undershoot,
    Converged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ptw1dSolution {
    pub v_star: f64,
    pub u_c: f64,
    /// `|U(-Ξ) - 1|` at the far left end of the stored trajectory.
    pub shooting_residual: f64,
    /// `|U'(0⁻) + v* u_c|`: derivative mismatch against the exact tail.
    pub matching_residual: f64,
    /// Width of the final bisection interval.
    pub bracket: f64,
    pub lambda_plus: f64,
    /// Fitted `A₋∞` in `U_T ~ 1 - A₋∞ e^{λ₊ ξ}`; diagnostic only.
    pub a_minus_inf: f64,
    /// Stored trajectory on `[-Ξ, 0]`, increasing `ξ`.
    xi: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl Ptw1dSolution {
    /// Stored abscissae (`ξ ≤ 0`, increasing).
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// Left end `-Ξ` of the stored trajectory.
    pub fn left_end(&self) -> f64 {
        self.xi[0]
    }

    /// `U_T(ξ)`: exact tail for `ξ ≥ 0`, Hermite interpolation of the stored
    /// trajectory on `[-Ξ, 0)`, and the fitted `λ₊` exponential further left.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::Extrapolation {
                xi,
                left: self.left_end(),
            });
        }
        if xi >= 0.0 {
            return Ok(self.u_c * (-self.v_star * xi).exp());
        }
        let left = self.left_end();
        if xi < left {
            let gap = 1.0 - self.u[0];
            return Ok(1.0 - gap * (self.lambda_plus * (xi - left)).exp());
        }
        let i = match self.xi.binary_search_by(|p| p.total_cmp(&xi)) {
            Ok(i) => return Ok(self.u[i]),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.xi[i], self.xi[i + 1]);
        let h = x1 - x0;
        let t = (xi - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.u[i] + h10 * h * self.du[i] + h01 * self.u[i + 1] + h11 * h * self.du[i + 1])
    }

    /// Evaluate the profile on a grid.
    pub fn profile(&self, xi_grid: &[f64]) -> Result<Vec<f64>> {
        xi_grid.iter().map(|&x| self.eval(x)).collect()
    }
}

/// `λ₊(v) = ½(√(v² + 4|f'(1)|) − v)`, the decay rate of `1 − U_T` at `-∞`.
pub fn decay_rate_lambda_plus(v: f64, fprime_at_one: f64) -> f64 {
    0.5 * ((v * v + 4.0 * fprime_at_one.abs()).sqrt() - v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UcRegime {
    SmallUc,
    LargeUc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VstarApprox {
    pub value: f64,
    pub error_order: &'static str,
}

/// Closed-form limits of `v*`: `2 − π²/(ln u_c)²` as `u_c → 0`, and
/// `(1 − u_c)|f'(1)|^{1/2}` as `u_c → 1`.
pub fn vstar_asymptotic(u_c: f64, fprime_at_one: f64, regime: UcRegime) -> Result<VstarApprox> {
    if !(u_c > 0.0 && u_c < 1.0) {
        return Err(invalid("u_c", format!("{u_c} not in (0, 1)")));
    }
    Ok(match regime {
        UcRegime::SmallUc => VstarApprox {
            value: 2.0 - (std::f64::consts::PI / u_c.ln()).powi(2),
            error_order: "O(1/|ln u_c|^3)",
        },
        UcRegime::LargeUc => VstarApprox {
            value: (1.0 - u_c) * fprime_at_one.abs().sqrt(),
            error_order: "O((1-u_c)^2)",
        },
    })
}

type State = [f64; 2];

#[inline]
fn rhs(reaction: &ReactionSpec, v: f64, y: State) -> State {
    [y[1], -v * y[1] - reaction.f(y[0])]
}

fn rk4(reaction: &ReactionSpec, v: f64, y: State, h: f64) -> State {
    let add = |a: State, b: State, s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = rhs(reaction, v, y);
    let k2 = rhs(reaction, v, add(y, k1, 0.5 * h));
    let k3 = rhs(reaction, v, add(y, k2, 0.5 * h));
    let k4 = rhs(reaction, v, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Adaptive RK4 by step doubling; `h` carries the direction of integration.
struct Stepper<'a> {
    reaction: &'a ReactionSpec,
    v: f64,
    opts: ShootOptions,
    h: f64,
}

impl Stepper<'_> {
    /// Take one accepted step from `y`; returns the step used and the new state.
    fn step(&mut self, y: State) -> Result<(f64, State)> {
        for _ in 0..200 {
            let h = self.h;
            let full = rk4(self.reaction, self.v, y, h);
            let half = rk4(self.reaction, self.v, rk4(self.reaction, self.v, y, 0.5 * h), 0.5 * h);
            let err = ((full[0] - half[0]).abs().max((full[1] - half[1]).abs())) / 15.0;
            let factor = if err == 0.0 {
                4.0
            } else {
                (0.9 * (self.opts.local_tol / err).powf(0.2)).clamp(0.2, 4.0)
            };
            let next = (h * factor).abs().min(self.opts.max_step) * h.signum();
            if err <= self.opts.local_tol {
                self.h = next;
                // Richardson-corrected state.
                let y1 = [
                    half[0] + (half[0] - full[0]) / 15.0,
                    half[1] + (half[1] - full[1]) / 15.0,
                ];
                return Ok((h, y1));
            }
            self.h = next;
        }
        Err(Error::Solver("step size underflow in travelling-wave integration".into()))
    }
}

fn shoot(reaction: &ReactionSpec, v: f64, opts: ShootOptions) -> Result<Outcome> {
    let u_c = reaction.u_c;
    let lam = decay_rate_lambda_plus(v, reaction.fprime_at_one());
    let s_max = 100.0 + 200.0 / lam;
    let mut stepper = Stepper {
        reaction,
        v,
        opts,
        h: -opts.max_step.min(1e-3),
    };
    let mut y = [u_c, -v * u_c];
    let mut s = 0.0;
    while s < s_max {
        let (h, y1) = stepper.step(y)?;
        s -= h;
        y = y1;
        if y[0] > 1.0 + OVERSHOOT {
            return Ok(Outcome::Overshoot);
        }
        if y[1] > 0.0 {
            return Ok(Outcome::Undershoot);
        }
    }
    if (1.0 - y[0]).abs() < SADDLE_BALL && y[1].abs() < SADDLE_BALL {
        Ok(Outcome::Converged)
    } else {
        Err(Error::Solver(format!(
            "leftward trajectory at v={v} neither settled nor escaped (U={}, U'={})",
            y[0], y[1]
        )))
    }
}

/// Solve for `v*(u_c)` with default integrator settings.
pub fn solve_vstar(reaction: &ReactionSpec, tol: f64) -> Result<Ptw1dSolution> {
    solve_vstar_with(reaction, tol, ShootOptions::default())
}

pub fn solve_vstar_with(reaction: &ReactionSpec, tol: f64, opts: ShootOptions) -> Result<Ptw1dSolution> {
    if !(tol >= 1e-12) {
        return Err(invalid("tol", "must be at least 1e-12"));
    }
    if !(reaction.fprime_at_one() < 0.0) {
        return Err(Error::NotKpp("f'(1) must be negative".into()));
    }
    let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
    match shoot(reaction, hi, opts)? {
        Outcome::Overshoot => {}
        other => {
            return Err(Error::Bracket(format!(
                "expected overshoot at v=2, trajectory gave {other:?}"
            )))
        }
    }
    let mut v_star = None;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match shoot(reaction, mid, opts)? {
            Outcome::Overshoot => hi = mid,
            Outcome::Undershoot => lo = mid,
            Outcome::Converged => {
                v_star = Some(mid);
                break;
            }
        }
    }
    let bracket = hi - lo;
    let v = v_star.unwrap_or(0.5 * (lo + hi));
    build_profile(reaction, v, bracket, opts)
}

fn build_profile(reaction: &ReactionSpec, v: f64, bracket: f64, opts: ShootOptions) -> Result<Ptw1dSolution> {
    let u_c = reaction.u_c;
    let lam = decay_rate_lambda_plus(v, reaction.fprime_at_one());
    // Finer storage so Hermite interpolation resolves U'' as well.
    let store = ShootOptions {
        max_step: opts.max_step.min(PROFILE_MAX_STEP),
        ..opts
    };
    let mut stepper = Stepper {
        reaction,
        v,
        opts: store,
        h: store.max_step,
    };
    let mut y = [1.0 - LAUNCH_EPS, -lam * LAUNCH_EPS];
    let mut xi = vec![0.0];
    let mut us = vec![y[0]];
    let mut dus = vec![y[1]];
    let mut t = 0.0;
    let t_max = 1e4 / v.max(1e-3);
    loop {
        let (h, y1) = stepper.step(y)?;
        if y1[0] <= u_c {
            // Land exactly on U = u_c with secant iterations on the step length.
            let (mut h_a, mut g_a) = (0.0, y[0] - u_c);
            let (mut h_b, mut g_b) = (h, y1[0] - u_c);
            let mut land = y1;
            let mut h_land = h;
            for _ in 0..50 {
                let h_new = h_b - g_b * (h_b - h_a) / (g_b - g_a);
                let trial = rk4(reaction, v, rk4(reaction, v, y, 0.5 * h_new), 0.5 * h_new);
                let g = trial[0] - u_c;
                land = trial;
                h_land = h_new;
                if g.abs() < 1e-15 {
                    break;
                }
                (h_a, g_a, h_b, g_b) = (h_b, g_b, h_new, g);
            }
            t += h_land;
            xi.push(t);
            us.push(u_c);
            dus.push(land[1]);
            break;
        }
        t += h;
        y = y1;
        xi.push(t);
        us.push(y[0]);
        dus.push(y[1]);
        if y[1] > 0.0 || t > t_max {
            return Err(Error::Solver(format!(
                "profile integration failed to reach u_c={u_c} at v={v}"
            )));
        }
    }
    let shift = t;
    xi.iter_mut().for_each(|x| *x -= shift);
    if us.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Solver("travelling-wave profile is not strictly decreasing".into()));
    }
    let matching_residual = (dus[dus.len() - 1] + v * u_c).abs();
    let a_minus_inf = LAUNCH_EPS * (-lam * xi[0]).exp();
    Ok(Ptw1dSolution {
        v_star: v,
        u_c,
        shooting_residual: (us[0] - 1.0).abs(),
        matching_residual,
        bracket,
        lambda_plus: lam,
        a_minus_inf,
        xi,
        u: us,
        du: dus,
    })
}
