//! Explicit finite-difference solver for the two-dimensional cut-off KPP
//! equation `u_t + Aα(y)u_x = u_xx + B u_yy + f_c(u)` in a channel with
//! no-flux walls, started from a step.
//!
//! The streamwise domain is a moving window of `nx` cells that is shifted by
//! whole cells to keep the front centred; lab-frame positions add the
//! accumulated shift back. The wall-normal grid has `ny` intervals
//! (`ny + 1` rows including both walls).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::flows::FlowProfile;
use crate::quad;
use crate::reaction::ReactionSpec;

/// Fraction of rows allowed to miss a crossing before extraction fails.
pub const MAX_MISSING_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub a: f64,
    pub b: f64,
    pub reaction: ReactionSpec,
    pub flow: FlowProfile,
    /// Streamwise cells.
    pub nx: usize,
    /// Wall-normal intervals.
    pub ny: usize,
    /// Window half-width.
    pub x_extent: f64,
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Shift the window by whole cells to follow the front.
    pub recenter: bool,
    /// Fixed time step; `None` uses `cfl_safety` times the stability limit.
    pub dt: Option<f64>,
    /// Time between interface samples.
    pub sample_interval: f64,
    /// Stop once successive speed estimates change by less than this
    /// relative amount; zero runs to `t_end`.
    pub plateau_tol: f64,
    /// Time between plateau checks.
    pub check_interval: f64,
}

impl SimParams {
    /// Defaults: 2048 × 128 grid, half-width of 40 front widths plus the
    /// drift `Aα_M t_end` when the window is not recentred.
    pub fn new(flow: FlowProfile, reaction: ReactionSpec, a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            reaction,
            flow,
            nx: 2048,
            ny: 128,
            x_extent: 40.0,
            cfl_safety: 0.9,
            t_end: 40.0,
            recenter: true,
            dt: None,
            sample_interval: 0.05,
            plateau_tol: 1e-3,
            check_interval: 5.0,
        }
    }

    /// Half-width used when none is given explicitly.
    pub fn default_extent(&self) -> f64 {
        let drift = if self.recenter {
            0.0
        } else {
            let am = self.flow.extrema().map(|e| e.alpha_max.abs().max(e.alpha_min.abs())).unwrap_or(0.0);
            self.a * am * self.t_end
        };
        40.0 + drift
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.ny < 16 {
            return Err(invalid("grid", "nx and ny must be at least 16"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 0.9) {
            return Err(invalid("cfl_safety", "must lie in (0, 0.9]"));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(invalid("A", "must be finite and nonnegative"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(invalid("B", "must be finite and positive"));
        }
        if !(self.x_extent > 0.0) {
            return Err(invalid("x_extent", "must be positive"));
        }
        if !(self.t_end > 0.0) {
            return Err(invalid("t_end", "must be positive"));
        }
        if !(self.sample_interval > 0.0) {
            return Err(invalid("sample_interval", "must be positive"));
        }
        if self.x_extent / self.hx() < 8.0 {
            return Err(invalid("x_extent", "window too small to hold the front"));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.x_extent / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    /// Largest stable explicit step, `1 / (2/h_x² + 2B/h_y² + A max|α|/h_x + max f')`.
    pub fn dt_limit(&self) -> f64 {
        let (hx, hy) = (self.hx(), self.hy());
        let amax = self.velocities().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        1.0 / (2.0 / (hx * hx) + 2.0 * self.b / (hy * hy) + amax / hx + self.reaction.max_fprime())
    }

    pub fn time_step(&self) -> Result<f64> {
        let limit = self.cfl_safety * self.dt_limit();
        match self.dt {
            None => Ok(limit),
            Some(dt) if dt > 0.0 && dt <= limit => Ok(dt),
            Some(dt) => Err(Error::Cfl { dt, limit }),
        }
    }

    /// Streamwise velocity `Aα(y_j)` on each row.
    pub fn velocities(&self) -> Vec<f64> {
        self.y_grid().iter().map(|&y| self.a * self.flow.alpha(y)).collect()
    }

    pub fn y_grid(&self) -> Vec<f64> {
        (0..=self.ny).map(|j| j as f64 / self.ny as f64).collect()
    }

    /// Window coordinate of cell `i`; cell `nx/2` sits at zero.
    pub fn x_of(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.hx()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Row-major field, `ny + 1` rows of `nx` cells.
    pub u: Vec<f64>,
    pub t: f64,
    /// Whole cells the window has moved downstream.
    pub shift: i64,
    pub steps: u64,
    nx: usize,
}

impl SimState {
    pub fn row(&self, j: usize) -> &[f64] {
        &self.u[j * self.nx..(j + 1) * self.nx]
    }

    pub fn rows(&self) -> usize {
        self.u.len() / self.nx
    }

    /// Lab-frame position of the window origin.
    pub fn origin(&self, hx: f64) -> f64 {
        self.shift as f64 * hx
    }
}

/// Step initial data: `u = 1` for `x < 0`, `0` for `x ≥ 0`.
pub fn init_state(params: &SimParams) -> Result<SimState> {
    params.validate()?;
    let (nx, rows) = (params.nx, params.ny + 1);
    let mut u = vec![0.0; nx * rows];
    for row in u.chunks_mut(nx) {
        row[..nx / 2].fill(1.0);
    }
    Ok(SimState {
        u,
        t: 0.0,
        shift: 0,
        steps: 0,
        nx,
    })
}

/// Precomputed stencil coefficients plus a scratch buffer.
pub struct Stepper {
    dt: f64,
    cx: f64,
    cy: f64,
    /// `dt·Aα_j/h_x` per row.
    adv: Vec<f64>,
    reaction: ReactionSpec,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(params: &SimParams) -> Result<Self> {
        params.validate()?;
        let dt = params.time_step()?;
        let (hx, hy) = (params.hx(), params.hy());
        Ok(Self {
            dt,
            cx: dt / (hx * hx),
            cy: dt * params.b / (hy * hy),
            adv: params.velocities().into_iter().map(|c| dt * c / hx).collect(),
            reaction: params.reaction.clone(),
            scratch: Vec::new(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One explicit Euler step: central diffusion, upwind advection, cut-off
    /// reaction; mirrored rows at the walls, ends held at 1 and 0.
    pub fn step(&mut self, state: &mut SimState) {
        let nx = state.nx;
        let rows = state.rows();
        self.scratch.resize(state.u.len(), 0.0);
        let u = &state.u;
        let (dt, cx, cy) = (self.dt, self.cx, self.cy);
        let adv = &self.adv;
        let reaction = &self.reaction;
        self.scratch.par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
            let jm = if j == 0 { 1 } else { j - 1 };
            let jp = if j + 1 == rows { rows - 2 } else { j + 1 };
            let r = &u[j * nx..(j + 1) * nx];
            let rm = &u[jm * nx..(jm + 1) * nx];
            let rp = &u[jp * nx..(jp + 1) * nx];
            let c = adv[j];
            out[0] = 1.0;
            out[nx - 1] = 0.0;
            for i in 1..nx - 1 {
                let v = r[i];
                let upwind = if c >= 0.0 { c * (v - r[i - 1]) } else { c * (r[i + 1] - v) };
                out[i] = v + cx * (r[i - 1] - 2.0 * v + r[i + 1]) + cy * (rm[i] - 2.0 * v + rp[i]) - upwind
                    + dt * reaction.eval_fc(v);
            }
        });
        std::mem::swap(&mut state.u, &mut self.scratch);
        state.steps += 1;
        state.t = state.steps as f64 * dt;
    }
}

/// Advance `state` by one step, refusing steps that break the stability bound.
pub fn step(state: &mut SimState, params: &SimParams) -> Result<()> {
    Stepper::new(params)?.step(state);
    Ok(())
}

/// Move the window `cells` cells downstream, filling new cells with zero.
pub fn shift_window(state: &mut SimState, cells: usize) {
    let nx = state.nx;
    if cells == 0 {
        return;
    }
    for row in state.u.chunks_mut(nx) {
        let keep = nx.saturating_sub(cells);
        row.copy_within(nx - keep.., 0);
        row[keep..].fill(0.0);
    }
    state.shift += cells as i64;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterfaceSample {
    pub t: f64,
    /// Mean interface position in the lab frame.
    pub s: f64,
    /// Crossing minus `s` per row; NaN where no crossing was found.
    pub zeta: Vec<f64>,
    pub found: Vec<bool>,
}

impl InterfaceSample {
    pub fn is_complete(&self) -> bool {
        self.found.iter().all(|&f| f)
    }
}

/// First crossing of the level `u_c` in a row, in window coordinates. A node
/// with `u = u_c` exactly belongs to the unreacted side.
pub fn row_crossing(row: &[f64], u_c: f64, params: &SimParams) -> Option<f64> {
    let i = (1..row.len()).find(|&i| row[i] <= u_c && row[i - 1] > u_c)?;
    let frac = (row[i - 1] - u_c) / (row[i - 1] - row[i]);
    Some(params.x_of(i - 1) + frac * params.hx())
}

/// Locate the `u = u_c` level curve row by row and split it into mean
/// position and mean-zero shape.
pub fn extract_interface(state: &SimState, params: &SimParams) -> Result<InterfaceSample> {
    let rows = state.rows();
    let u_c = params.reaction.u_c;
    let cross: Vec<Option<f64>> = (0..rows).map(|j| row_crossing(state.row(j), u_c, params)).collect();
    let missing = cross.iter().filter(|c| c.is_none()).count();
    if missing as f64 > MAX_MISSING_FRACTION * rows as f64 {
        return Err(Error::Interface { missing, rows });
    }
    // Trapezoid mean over the rows that have a crossing.
    let w = quad::trapezoid_weights(rows, 1.0);
    let (mut num, mut den) = (0.0, 0.0);
    for (c, wj) in cross.iter().zip(&w) {
        if let Some(x) = c {
            num += wj * x;
            den += wj;
        }
    }
    let mean = num / den;
    Ok(InterfaceSample {
        t: state.t,
        s: mean + state.origin(params.hx()),
        zeta: cross.iter().map(|c| c.map_or(f64::NAN, |x| x - mean)).collect(),
        found: cross.iter().map(|c| c.is_some()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimHistory {
    pub samples: Vec<InterfaceSample>,
    pub measured_speed: Option<f64>,
    pub speed_stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    pub speed: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Minimum number of samples in a speed fit.
pub const MIN_FIT_SAMPLES: usize = 20;

/// Least-squares slope of `s(t)` over the trailing `window_fraction` of the
/// sampled time span.
pub fn measure_speed(samples: &[InterfaceSample], window_fraction: f64) -> Result<SpeedFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(invalid("window_fraction", "must lie in (0, 1]"));
    }
    let have = samples.len();
    if have < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            have,
        });
    }
    let (t0, t1) = (samples[0].t, samples[have - 1].t);
    let cut = t1 - window_fraction * (t1 - t0);
    let tail: Vec<(f64, f64)> = samples.iter().filter(|s| s.t >= cut).map(|s| (s.t, s.s)).collect();
    if tail.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            have: tail.len(),
        });
    }
    let (slope, stderr) = linear_fit(&tail);
    Ok(SpeedFit {
        speed: slope,
        stderr,
        samples: tail.len(),
    })
}

/// Slope and its standard error for `y = a + b x`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = if points.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, stderr)
}

/// `∫₀¹∫ f_c(u) dx dy` over the window: the rate at which burnt area grows.
pub fn reaction_integral_speed(state: &SimState, params: &SimParams) -> Result<f64> {
    let nx = params.nx;
    let edge_tol = 1e-6;
    let rows = state.rows();
    for j in 0..rows {
        let r = state.row(j);
        if r[1] < 1.0 - edge_tol || r[nx - 2] > edge_tol {
            return Err(Error::WindowEdge);
        }
    }
    let hx = params.hx();
    let per_row: Vec<f64> = (0..rows)
        .map(|j| state.row(j).iter().map(|&v| params.reaction.eval_fc(v)).sum::<f64>() * hx)
        .collect();
    Ok(quad::trapezoid_mean(&per_row))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallTimeReport {
    pub samples: usize,
    /// Least-squares `c` in `s ≈ c√t`.
    pub s_coefficient: f64,
    /// `2 erfc⁻¹(2u_c)`.
    pub s_expected: f64,
    pub s_rel_error: f64,
    /// Least-squares `c_j` in `ζ_j ≈ c_j t`.
    pub zeta_rate: Vec<f64>,
    /// `max_j |c_j − Aα_j| / max_j |Aα_j|`.
    pub zeta_rel_error: f64,
}

/// Compare early samples with the diffusive law `s ~ 2erfc⁻¹(2u_c)√t` and
/// the advective law `ζ ~ Aα(y)t`.
pub fn small_time_check(samples: &[InterfaceSample], params: &SimParams, t_lo: f64, t_hi: f64) -> Result<SmallTimeReport> {
    let early: Vec<&InterfaceSample> = samples
        .iter()
        .filter(|s| s.t >= t_lo && s.t <= t_hi && s.is_complete())
        .collect();
    if early.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            have: early.len(),
        });
    }
    let s_coefficient = early.iter().map(|s| s.s * s.t.sqrt()).sum::<f64>() / early.iter().map(|s| s.t).sum::<f64>();
    let s_expected = 2.0 * statrs::function::erf::erfc_inv(2.0 * params.reaction.u_c);
    let tt: f64 = early.iter().map(|s| s.t * s.t).sum();
    let rows = params.ny + 1;
    let zeta_rate: Vec<f64> = (0..rows)
        .map(|j| early.iter().map(|s| s.zeta[j] * s.t).sum::<f64>() / tt)
        .collect();
    let target = params.velocities();
    let scale = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = zeta_rate
        .iter()
        .zip(&target)
        .fold(0.0f64, |m, (c, a)| m.max((c - a).abs()));
    Ok(SmallTimeReport {
        samples: early.len(),
        s_coefficient,
        s_expected,
        s_rel_error: if s_expected != 0.0 {
            (s_coefficient - s_expected).abs() / s_expected.abs()
        } else {
            s_coefficient.abs()
        },
        zeta_rate,
        zeta_rel_error: if scale > 0.0 { err / scale } else { err },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutcome {
    pub speed: f64,
    pub speed_stderr: f64,
    /// Burnt-area rate at the final time, when the window allows it.
    pub reaction_speed: Option<f64>,
    pub converged: bool,
    pub t_final: f64,
    pub dt: f64,
    pub steps: u64,
    pub final_sample: InterfaceSample,
    pub history: SimHistory,
}

/// Step from the initial step profile, sampling the interface and
/// recentring the window, until the speed estimate settles or `t_end`.
pub fn run_to_ptw(params: &SimParams) -> Result<SimOutcome> {
    let mut state = init_state(params)?;
    let mut stepper = Stepper::new(params)?;
    let (samples, state, converged) = run_loop(params, &mut stepper, &mut state)?;
    let fit = measure_speed(&samples, 0.5)?;
    let final_sample = samples.last().cloned().expect("at least one sample");
    Ok(SimOutcome {
        speed: fit.speed,
        speed_stderr: fit.stderr,
        reaction_speed: reaction_integral_speed(state, params).ok(),
        converged,
        t_final: state.t,
        dt: stepper.dt(),
        steps: state.steps,
        final_sample,
        history: SimHistory {
            samples,
            measured_speed: Some(fit.speed),
            speed_stderr: Some(fit.stderr),
        },
    })
}

/// Run until `t_end` (or a plateau), sampling every `sample_interval`.
pub fn run_loop<'a>(
    params: &SimParams,
    stepper: &mut Stepper,
    state: &'a mut SimState,
) -> Result<(Vec<InterfaceSample>, &'a mut SimState, bool)> {
    let dt = stepper.dt();
    let steps_per_sample = ((params.sample_interval / dt).round() as u64).max(1);
    let samples_per_check = ((params.check_interval / params.sample_interval).round() as usize).max(MIN_FIT_SAMPLES);
    let total = (params.t_end / dt).ceil() as u64;
    let hx = params.hx();
    let mut samples = Vec::new();
    let mut last_speed: Option<f64> = None;
    let mut converged = false;
    while state.steps < total {
        stepper.step(state);
        if !state.steps.is_multiple_of(steps_per_sample) && state.steps != total {
            continue;
        }
        let sample = extract_interface(state, params)?;
        if params.recenter {
            let centre = sample.s - state.origin(hx);
            if centre >= hx {
                shift_window(state, (centre / hx).floor() as usize);
            }
        }
        samples.push(sample);
        if params.plateau_tol > 0.0 && samples.len() % samples_per_check == 0 && samples.len() >= 2 * samples_per_check {
            let fit = measure_speed(&samples[samples.len() - samples_per_check..], 1.0)?;
            if let Some(prev) = last_speed {
                if ((fit.speed - prev) / fit.speed).abs() < params.plateau_tol {
                    converged = true;
                    break;
                }
            }
            last_speed = Some(fit.speed);
        }
    }
    Ok((samples, state, converged))
}

/// Cosine similarity of two curves, ignoring entries where either is NaN.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        if x.is_nan() || y.is_nan() {
            continue;
        }
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    ab / (aa.sqrt() * bb.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, u_c: f64, flow: FlowProfile) -> SimParams {
        let mut p = SimParams::new(flow, ReactionSpec::fisher(u_c).unwrap(), a, b);
        p.nx = 256;
        p.ny = 16;
        p.x_extent = 10.0;
        p
    }

    #[test]
    fn initial_step() {
        let p = params(0.0, 1.0, 0.3, FlowProfile::zero());
        let s = init_state(&p).unwrap();
        let mid = p.nx / 2;
        assert_eq!(p.x_of(mid), 0.0);
        for j in 0..=p.ny {
            let r = s.row(j);
            assert_eq!(r[0], 1.0);
            assert_eq!(r[mid - 1], 1.0);
            assert_eq!(r[mid], 0.0);
            assert_eq!(r[p.nx - 1], 0.0);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = params(0.0, 1.0, 0.3, FlowProfile::zero());
        p.cfl_safety = 0.95;
        assert!(init_state(&p).is_err());
        let mut p = params(0.0, 1.0, 0.3, FlowProfile::zero());
        p.ny = 8;
        assert!(init_state(&p).is_err());
        let mut p = params(0.0, 1.0, 0.3, FlowProfile::zero());
        p.dt = Some(p.dt_limit());
        assert_eq!(Stepper::new(&p).err().unwrap().kind(), "cfl");
    }

    #[test]
    fn steps_keep_bounds_and_row_symmetry() {
        let mut p = params(2.0, 0.5, 0.3, FlowProfile::poiseuille());
        let mut s = init_state(&p).unwrap();
        let mut st = Stepper::new(&p).unwrap();
        for _ in 0..500 {
            st.step(&mut s);
            assert!(s.u.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        // Poiseuille is symmetric about the centreline.
        for j in 0..=p.ny {
            let gap = s.row(j).iter().zip(s.row(p.ny - j)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(gap < 1e-13, "{gap}");
        }
        p.a = 0.0;
        let mut s = init_state(&p).unwrap();
        let mut st = Stepper::new(&p).unwrap();
        for _ in 0..200 {
            st.step(&mut s);
        }
        for j in 1..=p.ny {
            assert_eq!(s.row(j), s.row(0));
        }
    }

    #[test]
    fn pure_diffusion_at_half_level_stays_put() {
        // Reaction is off everywhere below u_c just under one; the u = 1/2
        // level of the diffusing step stays at the cell midpoint.
        let p = params(0.0, 1.0, 1.0 - 1e-12, FlowProfile::zero());
        let mut s = init_state(&p).unwrap();
        let mut st = Stepper::new(&p).unwrap();
        let mut half = p.clone();
        half.reaction = ReactionSpec::fisher(0.5).unwrap();
        let mut positions = Vec::new();
        for k in 0..400 {
            st.step(&mut s);
            if k % 10 == 9 {
                positions.push(extract_interface(&s, &half).unwrap());
            }
        }
        let fit = measure_speed(&positions, 1.0).unwrap();
        assert!(fit.speed.abs() < 1e-10, "{}", fit.speed);
        assert!((positions[0].s + 0.5 * p.hx()).abs() < 1e-12);
        assert!(reaction_integral_speed(&s, &p).unwrap().abs() < 1e-9);
    }

    #[test]
    fn crossing_tie_and_interpolation() {
        let p = params(0.0, 1.0, 0.5, FlowProfile::zero());
        let mut row = vec![1.0; p.nx];
        row[130..].fill(0.0);
        row[129] = 0.75;
        row[130] = 0.5;
        assert_eq!(row_crossing(&row, 0.5, &p), Some(p.x_of(130)));
        row[130] = 0.25;
        let x = row_crossing(&row, 0.5, &p).unwrap();
        assert!((x - p.x_of(129) - 0.5 * p.hx()).abs() < 1e-12);
        assert_eq!(row_crossing(&vec![0.2; p.nx], 0.5, &p), None);
    }

    #[test]
    fn extraction_is_mean_zero_and_flags_missing_rows() {
        let p = params(1.0, 1.0, 0.3, FlowProfile::couette());
        let mut s = init_state(&p).unwrap();
        let mut st = Stepper::new(&p).unwrap();
        for _ in 0..300 {
            st.step(&mut s);
        }
        let sample = extract_interface(&s, &p).unwrap();
        assert!(quad::trapezoid_mean(&sample.zeta).abs() < 1e-13);
        assert!(sample.zeta[0] < 0.0 && sample.zeta[p.ny] > 0.0);
        let nx = p.nx;
        for j in 0..3 {
            s.u[j * nx..(j + 1) * nx].fill(0.0);
        }
        assert_eq!(extract_interface(&s, &p).unwrap_err().kind(), "interface");
    }

    #[test]
    fn measure_speed_recovers_slope() {
        let samples: Vec<InterfaceSample> = (0..50)
            .map(|k| {
                let t = k as f64 * 0.1;
                InterfaceSample {
                    t,
                    s: 3.0 + 1.25 * t + 1e-3 * (7.0 * t).sin(),
                    zeta: vec![0.0; 3],
                    found: vec![true; 3],
                }
            })
            .collect();
        let fit = measure_speed(&samples, 0.5).unwrap();
        assert!((fit.speed - 1.25).abs() < 1e-3);
        assert!(fit.stderr > 0.0 && fit.stderr < 1e-3);
        assert_eq!(measure_speed(&samples[..10], 1.0).unwrap_err().kind(), "insufficient_samples");
    }

    #[test]
    fn window_shift_is_frame_invariant() {
        let mut p = params(0.5, 1.0, 0.3, FlowProfile::couette());
        p.x_extent = 20.0;
        p.nx = 512;
        p.t_end = 4.0;
        p.sample_interval = 0.1;
        p.plateau_tol = 0.0;
        let moving = run_to_ptw(&p).unwrap();
        p.recenter = false;
        let fixed = run_to_ptw(&p).unwrap();
        for (m, f) in moving.history.samples.iter().zip(&fixed.history.samples) {
            assert_eq!(m.t, f.t);
            assert!((m.s - f.s).abs() < 1e-10, "{} {}", m.s, f.s);
        }
    }

    #[test]
    fn rows_become_monotone() {
        let p = params(1.0, 0.5, 0.3, FlowProfile::poiseuille());
        let mut s = init_state(&p).unwrap();
        let mut st = Stepper::new(&p).unwrap();
        for _ in 0..2000 {
            st.step(&mut s);
        }
        for j in 0..=p.ny {
            assert!(s.row(j).windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn cosine_similarity_basics() {
        assert!((cosine_similarity(&[1.0, 2.0], &[2.0, 4.0]) - 1.0).abs() < 1e-15);
        assert!((cosine_similarity(&[1.0, f64::NAN, 0.0], &[0.0, 3.0, 1.0])).abs() < 1e-15);
    }
}
