//! Parameter resolution (flag > config > default) and run manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kppf_core::{FlowProfile, ReactionKind, ReactionSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{parse_list, Config};
use crate::error::{CliError, CliResult};
use crate::format;

/// Keys a config file may set.
pub const CONFIG_KEYS: &[&str] = &[
    "A",
    "B",
    "uc",
    "flow",
    "reaction",
    "poly_coeffs",
    "tol",
    "fp1",
    "N",
    "k",
    "v_star",
    "regime",
    "nx",
    "ny",
    "t_end",
    "x_extent",
    "cfl",
    "dt",
    "sample_interval",
    "plateau_tol",
    "recenter",
];

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub wall_clock_s: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    /// Arguments that reproduce the run with no config file.
    pub argv: Vec<String>,
    pub params: BTreeMap<String, Value>,
    pub grid: BTreeMap<String, Value>,
    pub outputs: Value,
    /// Artifact path to SHA-256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
    /// Input file role to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub env: BTreeMap<String, String>,
    /// Machine-dependent facts; excluded from reproducibility comparisons.
    pub runtime: Runtime,
}

pub struct Ctx {
    config: Config,
    command: Vec<String>,
    argv: Vec<String>,
    params: BTreeMap<String, Value>,
    grid: BTreeMap<String, Value>,
    inputs: BTreeMap<String, String>,
    artifacts: BTreeMap<String, String>,
    started: Instant,
}

impl Ctx {
    pub fn new(command: &[&str], config_path: Option<&Path>) -> CliResult<Self> {
        let mut inputs = BTreeMap::new();
        let config = match config_path {
            Some(p) => {
                let (cfg, text) = Config::load(p)?;
                if let Some(bad) = cfg.keys().find(|k| !CONFIG_KEYS.contains(k)) {
                    return Err(CliError::usage(format!("unknown config key: {bad}")));
                }
                inputs.insert("config".into(), sha256_hex(text.as_bytes()));
                cfg
            }
            None => Config::default(),
        };
        Ok(Self {
            config,
            command: command.iter().map(|s| s.to_string()).collect(),
            argv: command.iter().map(|s| s.to_string()).collect(),
            params: BTreeMap::new(),
            grid: BTreeMap::new(),
            inputs,
            artifacts: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    fn record(&mut self, name: &str, text: String, value: Value) {
        self.argv.push(format!("--{name}"));
        self.argv.push(text);
        self.params.insert(name.replace('-', "_"), value);
    }

    fn lookup(&self, name: &str) -> Option<&str> {
        self.config.get(&crate::config::canonical(name))
    }

    pub fn f64(&mut self, name: &str, flag: Option<f64>, default: Option<f64>) -> CliResult<f64> {
        let v = match flag {
            Some(v) => v,
            None => match self.lookup(name) {
                Some(s) => s
                    .parse()
                    .map_err(|_| CliError::usage(format!("config {name}: not a number: {s}")))?,
                None => default.ok_or_else(|| CliError::usage(format!("missing required parameter --{name}")))?,
            },
        };
        self.record(name, format!("{v:e}"), Value::from(v));
        Ok(v)
    }

    pub fn opt_f64(&mut self, name: &str, flag: Option<f64>) -> CliResult<Option<f64>> {
        if flag.is_none() && self.lookup(name).is_none() {
            return Ok(None);
        }
        self.f64(name, flag, None).map(Some)
    }

    pub fn usize(&mut self, name: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        let v = match flag {
            Some(v) => v,
            None => match self.lookup(name) {
                Some(s) => s
                    .parse()
                    .map_err(|_| CliError::usage(format!("config {name}: not an integer: {s}")))?,
                None => default,
            },
        };
        self.record(name, v.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn bool(&mut self, name: &str, flag: Option<bool>, default: bool) -> CliResult<bool> {
        let v = match flag {
            Some(v) => v,
            None => match self.lookup(name) {
                Some(s) => s
                    .parse()
                    .map_err(|_| CliError::usage(format!("config {name}: expected true or false: {s}")))?,
                None => default,
            },
        };
        self.record(name, v.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn string(&mut self, name: &str, flag: Option<String>, default: Option<&str>) -> CliResult<String> {
        let v = flag
            .or_else(|| self.lookup(name).map(str::to_string))
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| CliError::usage(format!("missing required parameter --{name}")))?;
        self.record(name, v.clone(), Value::from(v.clone()));
        Ok(v)
    }

    /// Optional output path; recorded only when given.
    pub fn path(&mut self, name: &str, flag: Option<PathBuf>) -> Option<PathBuf> {
        let p = flag?;
        let text = p.display().to_string();
        self.record(name, text.clone(), Value::from(text));
        Some(p)
    }

    pub fn grid(&mut self, key: &str, value: impl Into<Value>) {
        self.grid.insert(key.into(), value.into());
    }

    pub fn input_digest(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.into(), sha256_hex(bytes));
    }

    /// Built-in flow name, or a path to a flow table file.
    pub fn flow(&mut self, flag: Option<String>) -> CliResult<FlowProfile> {
        let name = self.string("flow", flag, None)?;
        if let Some(f) = FlowProfile::builtin(&name) {
            return Ok(f);
        }
        let text = std::fs::read_to_string(&name)
            .map_err(|e| CliError::usage(format!("flow {name}: not a built-in flow and not readable: {e}")))?;
        self.input_digest("flow", text.as_bytes());
        Ok(FlowProfile::parse(&text)?)
    }

    pub fn reaction(&mut self, flags: &crate::ReactionArgs, need_uc: bool) -> CliResult<ReactionSpec> {
        let kind = self.string("reaction", flags.reaction.clone(), Some("fisher"))?;
        let kind = match kind.as_str() {
            "fisher" => ReactionKind::Fisher,
            "poly" => {
                let text = self.string("poly-coeffs", flags.poly_coeffs.clone(), None)?;
                ReactionKind::Poly {
                    coeffs: parse_list(&text)?,
                }
            }
            other => return Err(CliError::usage(format!("unknown reaction: {other}"))),
        };
        let uc = if need_uc {
            self.f64("uc", flags.uc, None)?
        } else {
            self.f64("uc", flags.uc, Some(0.5))?
        };
        let spec = ReactionSpec::new(kind, uc)?;
        if let ReactionKind::Poly { .. } = spec.kind {
            spec.validate_kpp(1000)?.into_result()?;
        }
        Ok(spec)
    }

    /// Write an artifact and remember its digest.
    pub fn write(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
        self.artifacts
            .insert(path.display().to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn manifest(&self, outputs: Value) -> RunManifest {
        let mut outputs = outputs;
        format::round_json(&mut outputs);
        let mut env = BTreeMap::new();
        for key in ["KPPF_TOL_SCALE"] {
            if let Ok(v) = std::env::var(key) {
                env.insert(key.to_string(), v);
            }
        }
        RunManifest {
            tool: "kppf".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.clone(),
            argv: self.argv.clone(),
            params: self.params.clone(),
            grid: self.grid.clone(),
            outputs,
            artifacts: self.artifacts.clone(),
            inputs: self.inputs.clone(),
            env,
            runtime: Runtime {
                wall_clock_s: self.started.elapsed().as_secs_f64(),
                threads: rayon::current_num_threads(),
            },
        }
    }

    /// Write the manifest for the primary artifact `primary` beside it.
    pub fn write_manifest(&self, primary: &Path, outputs: Value) -> CliResult<PathBuf> {
        self.write_manifest_at(manifest_path(primary), outputs)
    }

    /// Write the manifest to an explicit path.
    pub fn write_manifest_at(&self, path: PathBuf, outputs: Value) -> CliResult<PathBuf> {
        let text = format::json_text(&self.manifest(outputs));
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// `dir/name.csv` → `dir/name_manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let stem = primary.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    primary.with_file_name(format!("{stem}_manifest.json"))
}

/// Tolerance multiplier from `KPPF_TOL_SCALE` (default 1).
pub fn tol_scale() -> CliResult<f64> {
    match std::env::var("KPPF_TOL_SCALE") {
        Err(_) => Ok(1.0),
        Ok(s) => match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(CliError::usage(format!("KPPF_TOL_SCALE must be a positive number, got {s}"))),
        },
    }
}
