//! Parameter sweeps over a Cartesian grid described in a flat text file:
//!
//! ```text
//! target = vbar
//! axis.flow = couette, poiseuille
//! axis.A = logspace(-1, 1, 9)
//! axis.B = 0.1, 1, 10
//! fixed.N = 400
//! output = vbar.csv
//! interfaces = vbar_curves      # optional, per-point curve files
//! ```
//!
//! Rows follow the axis order of the file with the last axis varying fastest.

use std::collections::BTreeMap;
use std::path::PathBuf;

use kppf_core::ptw1d::{self, solve_vstar};
use kppf_core::spectral::{self, DEFAULT_N};
use kppf_core::{FlowProfile, ReactionKind, ReactionSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{canonical, parse_list};
use crate::context::Ctx;
use crate::error::{CliError, CliResult};
use crate::format::{self, num};
use crate::SweepArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Vstar,
    Vbar,
    Sl,
    Speed,
    Delta,
}

impl Target {
    fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "vstar" => Target::Vstar,
            "vbar" => Target::Vbar,
            "sl" => Target::Sl,
            "speed" => Target::Speed,
            "delta" => Target::Delta,
            other => return Err(CliError::usage(format!("unknown sweep target: {other}"))),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Target::Vstar => "vstar",
            Target::Vbar => "vbar",
            Target::Sl => "sl",
            Target::Speed => "speed",
            Target::Delta => "delta",
        }
    }

    fn params(self) -> &'static [&'static str] {
        match self {
            Target::Vstar => &["uc", "reaction", "poly_coeffs", "tol"],
            Target::Vbar => &["flow", "A", "B", "fp1", "N"],
            Target::Sl => &["flow", "k", "N", "v_star"],
            Target::Speed => &["flow", "A", "B", "uc", "reaction", "poly_coeffs", "regime", "N"],
            Target::Delta => &["flow"],
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Target::Vstar => &["v_star", "residual", "lambda_plus"],
            Target::Vbar => &["lambda0", "vbar", "residual", "bound_lower", "bound_upper", "bounds_ok"],
            Target::Sl => &["lambda0", "residual", "half_width", "gamma_max", "gamma_max_over_k"],
            Target::Speed => &["regime", "v_hat", "v_star", "leading_term", "correction_term", "error_estimate"],
            Target::Delta => &["delta"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: Target,
    /// Axes in file order, each with its values as text.
    pub axes: Vec<(String, Vec<String>)>,
    pub fixed: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
    pub interfaces: Option<PathBuf>,
}

fn expand_axis(text: &str) -> CliResult<Vec<String>> {
    let t = text.trim();
    for (prefix, log) in [("logspace(", true), ("linspace(", false)] {
        if let Some(inner) = t.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
            let parts = parse_list(inner)?;
            if parts.len() != 3 || parts[2] < 1.0 || parts[2].fract() != 0.0 {
                return Err(CliError::usage(format!("{t}: expected (start, stop, count)")));
            }
            let (a, b, n) = (parts[0], parts[1], parts[2] as usize);
            return Ok((0..n)
                .map(|i| {
                    let s = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                    let v = if log { 10f64.powf(s) } else { s };
                    format!("{v:e}")
                })
                .collect());
        }
    }
    Ok(t.trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect())
}

impl SweepSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut target = None;
        let mut axes: Vec<(String, Vec<String>)> = Vec::new();
        let mut fixed = BTreeMap::new();
        let mut output = None;
        let mut interfaces = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("grid line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if let Some(name) = k.strip_prefix("axis.") {
                let name = canonical(name);
                let values = expand_axis(v)?;
                if values.is_empty() {
                    return Err(CliError::usage(format!("axis {name} is empty")));
                }
                if axes.iter().any(|(n, _)| *n == name) {
                    return Err(CliError::usage(format!("axis {name} given twice")));
                }
                axes.push((name, values));
            } else if let Some(name) = k.strip_prefix("fixed.") {
                fixed.insert(canonical(name), v.to_string());
            } else {
                match k {
                    "target" => target = Some(Target::parse(v)?),
                    "output" => output = Some(PathBuf::from(v)),
                    "interfaces" => interfaces = Some(PathBuf::from(v)),
                    other => return Err(CliError::usage(format!("unknown grid key: {other}"))),
                }
            }
        }
        let target = target.ok_or_else(|| CliError::usage("grid file has no target"))?;
        if axes.is_empty() {
            return Err(CliError::usage("grid file defines no axis"));
        }
        for name in axes.iter().map(|(n, _)| n).chain(fixed.keys()) {
            if !target.params().contains(&name.as_str()) {
                return Err(CliError::usage(format!("parameter {name} is not used by target {}", target.name())));
            }
            if axes.iter().any(|(n, _)| n == name) && fixed.contains_key(name) {
                return Err(CliError::usage(format!("{name} is both an axis and fixed")));
            }
        }
        Ok(Self {
            target,
            axes,
            fixed,
            output,
            interfaces,
        })
    }

    /// Every grid point as a parameter map, last axis fastest.
    pub fn points(&self) -> Vec<BTreeMap<String, String>> {
        let mut points = vec![self.fixed.clone()];
        for (name, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(name.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        points
    }
}

struct Point<'a>(&'a BTreeMap<String, String>);

impl Point<'_> {
    fn f64(&self, name: &str, default: Option<f64>) -> Result<f64, String> {
        match self.0.get(name) {
            Some(s) => s.parse().map_err(|_| format!("{name}: not a number")),
            None => default.ok_or_else(|| format!("missing parameter {name}")),
        }
    }

    fn usize(&self, name: &str, default: usize) -> Result<usize, String> {
        match self.0.get(name) {
            Some(s) => s.parse().map_err(|_| format!("{name}: not an integer")),
            None => Ok(default),
        }
    }

    fn str(&self, name: &str, default: Option<&str>) -> Result<String, String> {
        self.0
            .get(name)
            .cloned()
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| format!("missing parameter {name}"))
    }

    fn flow(&self) -> Result<FlowProfile, String> {
        let name = self.str("flow", None)?;
        FlowProfile::builtin(&name).ok_or_else(|| format!("unknown flow {name}"))
    }

    fn reaction(&self) -> Result<ReactionSpec, String> {
        let kind = match self.str("reaction", Some("fisher"))?.as_str() {
            "fisher" => ReactionKind::Fisher,
            "poly" => ReactionKind::Poly {
                coeffs: parse_list(&self.str("poly_coeffs", None)?).map_err(|e| e.message)?,
            },
            other => return Err(format!("unknown reaction {other}")),
        };
        let spec = ReactionSpec::new(kind, self.f64("uc", None)?).map_err(|e| e.to_string())?;
        if let ReactionKind::Poly { .. } = spec.kind {
            spec.validate_kpp(1000)
                .and_then(|r| r.into_result())
                .map_err(|e| e.to_string())?;
        }
        Ok(spec)
    }
}

/// Output cells plus an optional curve for one point.
type PointResult = Result<(Vec<String>, Option<(Vec<f64>, Vec<f64>)>), (String, String)>;

fn failure(e: kppf_core::Error) -> (String, String) {
    (e.kind().to_string(), e.to_string())
}

fn usage_failure(msg: String) -> (String, String) {
    ("usage".to_string(), msg)
}

fn evaluate(target: Target, params: &BTreeMap<String, String>) -> PointResult {
    let p = Point(params);
    match target {
        Target::Vstar => {
            let reaction = p.reaction().map_err(usage_failure)?;
            let tol = p.f64("tol", Some(ptw1d::DEFAULT_TOL)).map_err(usage_failure)?;
            let s = solve_vstar(&reaction, tol).map_err(failure)?;
            Ok((vec![num(s.v_star), num(s.shooting_residual), num(s.lambda_plus)], None))
        }
        Target::Vbar => {
            let flow = p.flow().map_err(usage_failure)?;
            let a = p.f64("A", None).map_err(usage_failure)?;
            let b = p.f64("B", None).map_err(usage_failure)?;
            let fp1 = p.f64("fp1", Some(-1.0)).map_err(usage_failure)?;
            let n = p.usize("N", DEFAULT_N).map_err(usage_failure)?;
            let sol = spectral::qevp_principal(&flow, a, b, fp1, n).map_err(failure)?;
            let vbar = spectral::qevp_speed_factor(sol.lambda0, fp1).map_err(failure)?;
            let bounds = spectral::qevp_bounds(&flow, a, fp1, sol.lambda0).map_err(failure)?;
            let zeta = spectral::qevp_interface(&sol).map_err(failure)?;
            let y: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
            Ok((
                vec![
                    num(sol.lambda0),
                    num(vbar),
                    num(sol.residual),
                    num(bounds.lower),
                    num(bounds.upper),
                    (bounds.satisfied as u8).to_string(),
                ],
                Some((y, zeta)),
            ))
        }
        Target::Sl => {
            let flow = p.flow().map_err(usage_failure)?;
            let k = p.f64("k", None).map_err(usage_failure)?;
            let n = p.usize("N", DEFAULT_N).map_err(usage_failure)?;
            let v = p.f64("v_star", Some(1.0)).map_err(usage_failure)?;
            let sol = spectral::sl_principal(&flow, k, n).map_err(failure)?;
            let gamma = spectral::sl_interface(&sol, v).map_err(failure)?;
            let gmax = gamma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let scaled = if k > 0.0 { gmax / k } else { f64::NAN };
            Ok((
                vec![
                    num(sol.lambda0),
                    num(sol.residual),
                    num(spectral::eigenfunction_half_width(&sol)),
                    num(gmax),
                    num(scaled),
                ],
                Some((sol.grid.clone(), gamma)),
            ))
        }
        Target::Speed => {
            let flow = p.flow().map_err(usage_failure)?;
            let a = p.f64("A", None).map_err(usage_failure)?;
            let b = p.f64("B", None).map_err(usage_failure)?;
            let reaction = p.reaction().map_err(usage_failure)?;
            let regime = p.str("regime", Some("auto")).map_err(usage_failure)?;
            let n = p.usize("N", DEFAULT_N).map_err(usage_failure)?;
            let (r, _) = crate::commands::front(&regime, &flow, a, b, &reaction, n).map_err(|e| (e.kind, e.message))?;
            let curve = r.interface.map(|i| (i.y, i.zeta));
            Ok((
                vec![
                    r.regime.to_string(),
                    num(r.v_hat),
                    num(r.v_star),
                    num(r.leading_term),
                    num(r.correction_term),
                    num(r.error_estimate),
                ],
                curve,
            ))
        }
        Target::Delta => {
            let flow = p.flow().map_err(usage_failure)?;
            Ok((vec![num(flow.effective_delta())], None))
        }
    }
}

pub fn run(args: SweepArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.grid_file).map_err(|e| CliError::io(&args.grid_file, e))?;
    let spec = SweepSpec::parse(&text)?;
    let output = args
        .output
        .clone()
        .or_else(|| spec.output.clone())
        .ok_or_else(|| CliError::usage("no output path: set `output` in the grid file or pass --output"))?;

    let mut ctx = Ctx::new(&["sweep"], None)?;
    ctx.string("grid-file", Some(args.grid_file.display().to_string()), None)?;
    ctx.path("output", Some(output.clone()));
    ctx.input_digest("grid_file", text.as_bytes());

    let points = spec.points();
    let results: Vec<PointResult> = points.par_iter().map(|p| evaluate(spec.target, p)).collect();

    let mut header: Vec<&str> = vec!["index"];
    header.extend(spec.axes.iter().map(|(n, _)| n.as_str()));
    header.extend(spec.target.columns());
    header.push("error");
    let width = spec.target.columns().len();
    let mut rows = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    for (i, (point, result)) in points.iter().zip(&results).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(spec.axes.iter().map(|(n, _)| {
            let v = &point[n];
            v.parse::<f64>().map_or_else(|_| v.clone(), num)
        }));
        match result {
            Ok((cells, _)) => {
                row.extend(cells.iter().cloned());
                row.push(String::new());
            }
            Err((kind, message)) => {
                row.extend(std::iter::repeat_n("nan".to_string(), width));
                row.push(kind.clone());
                failures.push(json!({ "index": i, "kind": kind, "message": message }));
            }
        }
        rows.push(row);
    }
    ctx.write(&output, &format::csv(&header, &rows))?;

    if let Some(dir) = &spec.interfaces {
        for (i, result) in results.iter().enumerate() {
            if let Ok((_, Some((y, z)))) = result {
                ctx.write(&dir.join(format!("point_{i:04}.csv")), &format::csv_xy("y", "value", y, z))?;
            }
        }
    }

    ctx.grid("points", points.len());
    let axes: Value = spec
        .axes
        .iter()
        .map(|(n, v)| json!({ "name": n, "values": v }))
        .collect();
    let summary = json!({
        "target": spec.target.name(),
        "axes": axes,
        "fixed": spec.fixed,
        "rows": rows.len(),
        "failures": failures,
    });
    ctx.write_manifest(&output, summary)?;
    println!("{}", output.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes_and_ranges() {
        let s = SweepSpec::parse("target = vbar\naxis.flow = couette, poiseuille\naxis.A = logspace(-1, 1, 3)\nfixed.B = 1\n").unwrap();
        assert_eq!(s.axes[1].1.len(), 3);
        assert_eq!(s.axes[1].1[1].parse::<f64>().unwrap(), 1.0);
        let pts = s.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0]["flow"], "couette");
        assert_eq!(pts[3]["flow"], "poiseuille");
        assert_eq!(pts[4]["B"], "1");
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SweepSpec::parse("target = vbar\naxis.A =\n").is_err());
        assert!(SweepSpec::parse("target = vbar\n").is_err());
        assert!(SweepSpec::parse("target = vbar\naxis.k = 1\n").is_err());
        assert!(SweepSpec::parse("target = nope\naxis.A = 1\n").is_err());
        assert!(SweepSpec::parse("axis.A = 1\n").is_err());
        assert!(SweepSpec::parse("target = vbar\naxis.A = linspace(0, 1, 2.5)\n").is_err());
    }
}
