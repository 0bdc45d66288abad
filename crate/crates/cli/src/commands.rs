use std::path::{Path, PathBuf};

use kppf_core::ptw1d::{self, solve_vstar};
use kppf_core::regimes::{self, FrontResult, RegimeBands, RegimeTag};
use kppf_core::sim2d::{self, SimParams};
use kppf_core::spectral::{self, DEFAULT_N};
use kppf_core::{FlowProfile, ReactionSpec};
use serde_json::{json, Value};

use crate::context::{manifest_path, Ctx, RunManifest};
use crate::error::{CliError, CliResult};
use crate::format::{self, num};
use crate::{DeltaArgs, InterfaceArgs, QevpArgs, ReplayArgs, SimulateArgs, SlArgs, SpeedArgs, VstarArgs};

fn print_json(value: &Value) {
    print!("{}", format::json_text(value));
}

pub fn vstar(args: VstarArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["vstar"], cfg)?;
    let reaction = ctx.reaction(&args.reaction, true)?;
    let tol = ctx.f64("tol", args.tol, Some(ptw1d::DEFAULT_TOL))?;
    let profile = ctx.path("profile", args.profile);
    let sol = solve_vstar(&reaction, tol)?;
    let out = json!({
        "u_c": sol.u_c,
        "v_star": sol.v_star,
        "residual": sol.shooting_residual,
        "matching_residual": sol.matching_residual,
        "bracket": sol.bracket,
        "lambda_plus": sol.lambda_plus,
    });
    if let Some(path) = profile {
        // Stored trajectory, then the exact tail ahead of the threshold.
        let mut xi = sol.xi().to_vec();
        xi.extend((1..=200).map(|i| i as f64 * 0.05));
        let u = sol.profile(&xi)?;
        ctx.write(&path, &format::csv_xy("xi", "u", &xi, &u))?;
        ctx.grid("profile_points", xi.len());
        ctx.write_manifest(&path, out.clone())?;
    }
    print_json(&out);
    Ok(())
}

fn bounds_json(b: &spectral::BoundsReport) -> Value {
    json!({ "lower": b.lower, "upper": b.upper, "satisfied": b.satisfied })
}

fn eigen_output(ctx: &mut Ctx, sol: &spectral::EigenSolution, mut out: Value, path: Option<PathBuf>) -> CliResult<()> {
    out["N"] = json!(sol.n);
    out["residual"] = json!(sol.residual);
    out["positivity_margin"] = json!(sol.positivity_margin);
    ctx.grid("N", sol.n);
    if let Some(path) = path {
        ctx.write(&path, &format::csv_xy("y", "value", &sol.grid, &sol.eigenfunction))?;
        ctx.write_manifest(&path, out.clone())?;
    }
    print_json(&out);
    Ok(())
}

pub fn eigen_qevp(args: QevpArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["eigen", "qevp"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    let a = ctx.f64("A", args.a, None)?;
    let b = ctx.f64("B", args.b, None)?;
    let fp1 = ctx.f64("fp1", args.fp1, Some(-1.0))?;
    let n = ctx.usize("N", args.n, DEFAULT_N)?;
    let path = ctx.path("eigenfunction", args.eigenfunction);
    let sol = spectral::qevp_principal(&flow, a, b, fp1, n)?;
    let bounds = spectral::qevp_bounds(&flow, a, fp1, sol.lambda0)?;
    let out = json!({
        "problem": "qevp",
        "lambda0": sol.lambda0,
        "speed_factor": spectral::qevp_speed_factor(sol.lambda0, fp1)?,
        "bounds": bounds_json(&bounds),
    });
    eigen_output(&mut ctx, &sol, out, path)
}

pub fn eigen_sl(args: SlArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["eigen", "sl"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    let k = ctx.f64("k", args.k, None)?;
    let n = ctx.usize("N", args.n, DEFAULT_N)?;
    let path = ctx.path("eigenfunction", args.eigenfunction);
    let sol = spectral::sl_principal(&flow, k, n)?;
    let bounds = spectral::sl_bounds(&flow, k, sol.lambda0)?;
    let out = json!({
        "problem": "sl",
        "lambda0": sol.lambda0,
        "half_width": spectral::eigenfunction_half_width(&sol),
        "bounds": bounds_json(&bounds),
    });
    eigen_output(&mut ctx, &sol, out, path)
}

pub fn delta(args: DeltaArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["delta"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    println!("{}", num(flow.effective_delta()));
    Ok(())
}

/// Evaluate a regime (or the band-selected one for `auto`).
pub fn front(
    tag: &str,
    flow: &FlowProfile,
    a: f64,
    b: f64,
    reaction: &ReactionSpec,
    n: usize,
) -> CliResult<(FrontResult, Vec<RegimeTag>)> {
    let bands = RegimeBands::default();
    let sel = regimes::regime_select(a, b, reaction.u_c, &bands);
    let tag = if tag == "auto" {
        sel.primary.ok_or(kppf_core::Error::NoRegime { a, b, u_c: reaction.u_c })?
    } else {
        RegimeTag::parse(tag).ok_or_else(|| CliError::usage(format!("unknown regime: {tag}")))?
    };
    let v_star = if tag == RegimeTag::UcNearOne {
        0.0
    } else {
        solve_vstar(reaction, ptw1d::DEFAULT_TOL)?.v_star
    };
    let r = regimes::speed_for_regime(tag, flow, a, b, reaction, v_star, n, &bands)?;
    Ok((r, sel.applicable))
}

pub fn front_json(r: &FrontResult, applicable: &[RegimeTag]) -> Value {
    json!({
        "regime": r.regime,
        "v_hat": r.v_hat,
        "v_star": r.v_star,
        "leading_term": r.leading_term,
        "correction_term": r.correction_term,
        "error_order": r.error_order,
        "error_estimate": r.error_estimate,
        "applicable": applicable,
    })
}

pub fn speed(args: SpeedArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["speed"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    let a = ctx.f64("A", args.a, None)?;
    let b = ctx.f64("B", args.b, None)?;
    let reaction = ctx.reaction(&args.reaction, true)?;
    let regime = ctx.string("regime", args.regime, Some("auto"))?;
    let n = ctx.usize("N", args.n, DEFAULT_N)?;
    let (r, applicable) = front(&regime, &flow, a, b, &reaction, n)?;
    print_json(&front_json(&r, &applicable));
    Ok(())
}

pub fn interface(args: InterfaceArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["interface"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    let a = ctx.f64("A", args.a, None)?;
    let b = ctx.f64("B", args.b, None)?;
    let reaction = ctx.reaction(&args.reaction, true)?;
    let regime = ctx.string("regime", args.regime, Some("auto"))?;
    let n = ctx.usize("N", args.n, DEFAULT_N)?;
    let out = ctx.path("out", args.out);
    let (r, applicable) = front(&regime, &flow, a, b, &reaction, n)?;
    let shape = r.interface.as_ref().ok_or_else(|| {
        CliError::compute("no_interface", format!("regime {} provides no interface shape", r.regime))
    })?;
    let text = format::csv_xy("y", "zeta", &shape.y, &shape.zeta);
    match out {
        Some(path) => {
            ctx.grid("N", n);
            ctx.write(&path, &text)?;
            let mut summary = front_json(&r, &applicable);
            summary["zeta_max"] = json!(shape.max());
            summary["zeta_mean"] = json!(shape.mean());
            ctx.write_manifest(&path, summary)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// Trailing least-squares slope over up to `window` samples, per sample.
fn running_speed(samples: &[sim2d::InterfaceSample], window: usize) -> Vec<f64> {
    (0..samples.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let pts = &samples[lo..=i];
            if pts.len() < 2 {
                return f64::NAN;
            }
            let n = pts.len() as f64;
            let mt = pts.iter().map(|s| s.t).sum::<f64>() / n;
            let ms = pts.iter().map(|s| s.s).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|s| (s.t - mt) * (s.s - ms)).sum();
            let sxx: f64 = pts.iter().map(|s| (s.t - mt).powi(2)).sum();
            sxy / sxx
        })
        .collect()
}

pub fn simulate(args: SimulateArgs, cfg: Option<&Path>) -> CliResult<()> {
    let mut ctx = Ctx::new(&["simulate"], cfg)?;
    let flow = ctx.flow(args.flow)?;
    let a = ctx.f64("A", args.a, None)?;
    let b = ctx.f64("B", args.b, None)?;
    let reaction = ctx.reaction(&args.reaction, true)?;
    let mut p = SimParams::new(flow.clone(), reaction.clone(), a, b);
    p.nx = ctx.usize("nx", args.nx, p.nx)?;
    p.ny = ctx.usize("ny", args.ny, p.ny)?;
    p.t_end = ctx.f64("t-end", args.t_end, Some(p.t_end))?;
    p.recenter = ctx.bool("recenter", args.recenter, p.recenter)?;
    p.x_extent = ctx.f64("x-extent", args.x_extent, Some(p.default_extent()))?;
    p.cfl_safety = ctx.f64("cfl", args.cfl, Some(p.cfl_safety))?;
    p.dt = ctx.opt_f64("dt", args.dt)?;
    p.sample_interval = ctx.f64("sample-interval", args.sample_interval, Some(p.sample_interval))?;
    p.plateau_tol = ctx.f64("plateau-tol", args.plateau_tol, Some(p.plateau_tol))?;
    let prefix = ctx
        .path("out-prefix", args.out_prefix)
        .unwrap_or_else(|| PathBuf::from("sim"));
    let outcome = sim2d::run_to_ptw(&p)?;

    let samples = &outcome.history.samples;
    let est = running_speed(samples, sim2d::MIN_FIT_SAMPLES);
    let rows: Vec<Vec<String>> = samples
        .iter()
        .zip(&est)
        .map(|(s, v)| vec![num(s.t), num(s.s), num(*v)])
        .collect();
    let with_suffix = |suffix: &str| {
        let name = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        prefix.with_file_name(format!("{name}_{suffix}"))
    };
    let history_path = with_suffix("history.csv");
    let zeta_path = with_suffix("zeta.csv");
    ctx.write(&history_path, &format::csv(&["t", "s", "speed_est"], &rows))?;
    ctx.write(&zeta_path, &format::csv_xy("y", "zeta_final", &p.y_grid(), &outcome.final_sample.zeta))?;

    ctx.grid("nx", p.nx);
    ctx.grid("ny", p.ny);
    ctx.grid("hx", p.hx());
    ctx.grid("hy", p.hy());
    ctx.grid("dt", outcome.dt);
    ctx.grid("steps", outcome.steps);

    let v_star = solve_vstar(&reaction, ptw1d::DEFAULT_TOL)?.v_star;
    let regime = front("auto", &flow, a, b, &reaction, DEFAULT_N)
        .ok()
        .map(|(r, _)| json!({ "regime": r.regime, "v_hat": r.v_hat, "error_order": r.error_order }));
    let summary = json!({
        "measured_speed": outcome.speed,
        "speed_stderr": outcome.speed_stderr,
        "reaction_integral_speed": outcome.reaction_speed,
        "converged": outcome.converged,
        "t_final": outcome.t_final,
        "samples": samples.len(),
        "cross_check": {
            "v_star": v_star,
            "measured_minus_v_star": outcome.speed - v_star,
            "asymptotic": regime,
        },
    });
    ctx.write_manifest_at(with_suffix("manifest.json"), summary.clone())?;
    print_json(&summary);
    Ok(())
}

pub fn replay(args: ReplayArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.manifest).map_err(|e| CliError::io(&args.manifest, e))?;
    let recorded: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("not a run manifest: {e}")))?;
    let argv = std::iter::once("kppf".to_string()).chain(recorded.argv.iter().cloned());
    let cli = <crate::Cli as clap::Parser>::try_parse_from(argv)
        .map_err(|e| CliError::usage(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, crate::Command::Replay(_)) {
        return Err(CliError::usage("a replay manifest cannot replay itself"));
    }
    crate::run(cli)?;
    if !args.check {
        return Ok(());
    }
    let mut mismatches = Vec::new();
    for (path, digest) in &recorded.artifacts {
        let now = std::fs::read(path)
            .map(|b| crate::context::sha256_hex(&b))
            .unwrap_or_default();
        if &now != digest {
            mismatches.push(path.clone());
        }
    }
    let primary = recorded.artifacts.keys().next().map(PathBuf::from);
    if let Some(primary) = primary {
        let fresh_path = find_manifest(&primary, &args.manifest);
        let fresh: RunManifest = serde_json::from_str(
            &std::fs::read_to_string(&fresh_path).map_err(|e| CliError::io(&fresh_path, e))?,
        )
        .map_err(|e| CliError::compute("replay_mismatch", e.to_string()))?;
        if fresh.outputs != recorded.outputs {
            mismatches.push("outputs".into());
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::compute("replay_mismatch", format!("differs: {}", mismatches.join(", "))))
    }
}

/// The replayed run rewrites its manifest at the recorded location.
fn find_manifest(primary: &Path, recorded: &Path) -> PathBuf {
    let beside = manifest_path(primary);
    if beside.exists() {
        beside
    } else {
        recorded.to_path_buf()
    }
}
