//! Invariant suite behind `kppf validate`.

use kppf_core::ptw1d::{self, solve_vstar};
use kppf_core::regimes::{self, interface_balanced, interface_balanced_fourier};
use kppf_core::sim2d::{run_to_ptw, SimParams};
use kppf_core::spectral::{self, DEFAULT_N};
use kppf_core::{FlowProfile, ReactionSpec, RegimeBands};
use serde::Serialize;
use serde_json::json;

use crate::context::{tol_scale, Ctx};
use crate::error::{CliError, CliResult};
use crate::format::num;
use crate::ValidateArgs;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured discrepancy, or NaN for yes/no checks.
    pub value: f64,
    pub tol: f64,
    pub detail: String,
}

struct Suite {
    scale: f64,
    checks: Vec<Check>,
}

impl Suite {
    /// Record `value ≤ tol·scale`.
    fn within(&mut self, name: &str, value: f64, tol: f64) {
        let tol = tol * self.scale;
        self.checks.push(Check {
            name: name.into(),
            passed: value <= tol,
            value,
            tol,
            detail: format!("{} <= {}", num(value), num(tol)),
        });
    }

    fn holds(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            value: f64::NAN,
            tol: f64::NAN,
            detail: detail.into(),
        });
    }

    /// Run `f`, turning an error into a failed check.
    fn guard(&mut self, name: &str, f: impl FnOnce(&mut Self) -> kppf_core::Result<()>) {
        if let Err(e) = f(self) {
            self.holds(name, false, format!("{}: {e}", e.kind()));
        }
    }
}

fn builtins() -> [(&'static str, FlowProfile); 2] {
    [("couette", FlowProfile::couette()), ("poiseuille", FlowProfile::poiseuille())]
}

fn flows(s: &mut Suite) {
    for ((name, flow), exact) in builtins().into_iter().zip([1.0 / 120.0, 1.0 / 1890.0]) {
        s.within(&format!("flows.{name}.delta"), (flow.effective_delta() - exact).abs(), 1e-9);
        s.guard(&format!("flows.{name}.integrals"), |s| {
            let ints = flow.integrals(256)?;
            s.within(&format!("flows.{name}.zero_mean"), ints.a.last().unwrap().abs(), 1e-10);
            Ok(())
        });
    }
}

fn reaction(s: &mut Suite) {
    s.guard("reaction.fisher_kpp", |s| {
        let r = ReactionSpec::fisher(0.5)?.validate_kpp(1000)?;
        s.holds("reaction.fisher_kpp", r.passed(), format!("{} violations", r.violations.len()));
        Ok(())
    });
    s.guard("reaction.cubic_rejected", |s| {
        // u(1-u)(1+5u) exceeds u near the origin.
        let r = ReactionSpec::poly(vec![1.0, 4.0, -5.0], 0.5)?.validate_kpp(1000)?;
        s.holds("reaction.cubic_rejected", !r.passed(), format!("{} violations", r.violations.len()));
        Ok(())
    });
}

fn ptw(s: &mut Suite) {
    s.guard("ptw1d.near_one", |s| {
        let uc = 0.99;
        let sol = solve_vstar(&ReactionSpec::fisher(uc)?, ptw1d::DEFAULT_TOL)?;
        let d = 1.0 - uc;
        s.within("ptw1d.near_one", (sol.v_star - d).abs(), 5.0 * d * d);
        s.within("ptw1d.residual", sol.shooting_residual, 1e-6);
        Ok(())
    });
    s.guard("ptw1d.range", |s| {
        let v = solve_vstar(&ReactionSpec::fisher(0.3)?, ptw1d::DEFAULT_TOL)?.v_star;
        s.holds("ptw1d.range", v > 0.0 && v < 2.0, format!("v*(0.3) = {}", num(v)));
        Ok(())
    });
}

fn qevp(s: &mut Suite) {
    for b in [0.1, 1.0, 10.0] {
        let name = format!("qevp.no_flow.B={b}");
        s.guard(&name.clone(), |s| {
            let sol = spectral::qevp_principal(&FlowProfile::couette(), 0.0, b, -1.0, DEFAULT_N)?;
            s.within(&name, (sol.lambda0 - 1.0).abs(), 1e-5);
            Ok(())
        });
    }
    for (fname, flow) in builtins() {
        for (a, b) in [(0.5, 0.1), (2.0, 1.0), (10.0, 10.0)] {
            let name = format!("qevp.bounds.{fname}.A={a}.B={b}");
            s.guard(&name.clone(), |s| {
                let sol = spectral::qevp_principal(&flow, a, b, -1.0, DEFAULT_N)?;
                let r = spectral::qevp_bounds(&flow, a, -1.0, sol.lambda0)?;
                s.holds(
                    &name,
                    r.satisfied,
                    format!("{} in ({}, {})", num(sol.lambda0), num(r.lower), num(r.upper)),
                );
                Ok(())
            });
        }
    }
}

fn sl(s: &mut Suite) {
    s.guard("sl.k0", |s| {
        let sol = spectral::sl_principal(&FlowProfile::poiseuille(), 0.0, DEFAULT_N)?;
        s.within("sl.k0", sol.lambda0.abs(), 1e-10);
        Ok(())
    });
    for k in [0.01, 0.05] {
        let name = format!("sl.small_k.k={k}");
        s.guard(&name.clone(), |s| {
            let sol = spectral::sl_principal(&FlowProfile::couette(), k, DEFAULT_N)?;
            s.within(&name, (sol.lambda0 + k * k / 120.0).abs(), 2.0 * k * k * k);
            Ok(())
        });
    }
    for (fname, flow) in builtins() {
        for k in [1.0, 20.0] {
            let name = format!("sl.bounds.{fname}.k={k}");
            s.guard(&name.clone(), |s| {
                let sol = spectral::sl_principal(&flow, k, DEFAULT_N)?;
                let r = spectral::sl_bounds(&flow, k, sol.lambda0)?;
                s.holds(
                    &name,
                    r.satisfied,
                    format!("{} in ({}, {})", num(sol.lambda0), num(r.lower), num(r.upper)),
                );
                Ok(())
            });
        }
    }
}

fn interfaces(s: &mut Suite) {
    for (fname, flow) in builtins() {
        let name = format!("interface.fourier.{fname}");
        s.guard(&name.clone(), |s| {
            let closed = interface_balanced(&flow, 1.0, 1.0, 200)?;
            let modes = interface_balanced_fourier(&flow, 1.0, 1.0, 200, 128)?;
            let gap = closed
                .zeta
                .iter()
                .zip(&modes.zeta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            s.within(&name, gap, 1e-6);
            Ok(())
        });
    }
}

fn enhancement(s: &mut Suite) {
    let bands = RegimeBands::default();
    for (fname, flow) in builtins() {
        for (a, b, uc) in [(0.1, 1.0, 0.3), (20.0, 1.0, 0.3), (1.0, 0.001, 0.3), (1.0, 1.0, 0.95)] {
            let name = format!("enhancement.{fname}.A={a}.B={b}.uc={uc}");
            s.guard(&name.clone(), |s| {
                let r = regimes::estimate_speed(&flow, a, b, &ReactionSpec::fisher(uc)?, &bands, DEFAULT_N)?;
                s.holds(
                    &name,
                    r.v_hat > r.v_star,
                    format!("{}: {} > {}", r.regime, num(r.v_hat), num(r.v_star)),
                );
                Ok(())
            });
        }
    }
}

fn simulation(s: &mut Suite) {
    s.guard("sim2d.no_flow", |s| {
        let reaction = ReactionSpec::fisher(0.3)?;
        let v = solve_vstar(&reaction, ptw1d::DEFAULT_TOL)?.v_star;
        let mut p = SimParams::new(FlowProfile::zero(), reaction, 0.0, 1.0);
        p.nx = 512;
        p.ny = 16;
        p.x_extent = 20.0;
        p.t_end = 12.0;
        p.sample_interval = 0.1;
        p.plateau_tol = 0.0;
        let out = run_to_ptw(&p)?;
        s.within("sim2d.no_flow", (out.speed - v).abs() / v, 0.03);
        Ok(())
    });
}

fn flow_file(s: &mut Suite, path: &std::path::Path) {
    let name = format!("flow_file.{}", path.display());
    match FlowProfile::from_file(path) {
        Ok(flow) => {
            let delta = flow.effective_delta();
            s.holds(&name, delta.is_finite() && delta >= 0.0, format!("delta = {}", num(delta)));
        }
        Err(e) => s.holds(&name, false, format!("{}: {e}", e.kind())),
    }
}

pub fn run_suite(flow_path: Option<&std::path::Path>, scale: f64) -> Vec<Check> {
    let mut s = Suite {
        scale,
        checks: Vec::new(),
    };
    flows(&mut s);
    reaction(&mut s);
    ptw(&mut s);
    qevp(&mut s);
    sl(&mut s);
    interfaces(&mut s);
    enhancement(&mut s);
    simulation(&mut s);
    if let Some(p) = flow_path {
        flow_file(&mut s, p);
    }
    s.checks
}

pub fn run(args: ValidateArgs) -> CliResult<()> {
    let scale = tol_scale()?;
    let mut ctx = Ctx::new(&["validate"], None)?;
    if let Some(p) = ctx.path("flow-file", args.flow_file.clone()) {
        if let Ok(bytes) = std::fs::read(&p) {
            ctx.input_digest("flow_file", &bytes);
        }
    }
    let out = ctx.path("out", args.out.clone());

    let checks = run_suite(args.flow_file.as_deref(), scale);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());

    if let Some(path) = out {
        let report = json!({ "tol_scale": scale, "failed": failed, "checks": checks });
        ctx.write(&path, &crate::format::json_text(&report))?;
        ctx.write_manifest(&path, json!({ "passed": checks.len() - failed, "failed": failed }))?;
    }
    if failed > 0 {
        return Err(CliError::compute("validation", format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
