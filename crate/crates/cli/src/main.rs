//! `kppf`: command-line front end for the cut-off KPP front library.

mod commands;
mod config;
mod context;
mod error;
mod format;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::error::{CliError, CliResult, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "kppf", version, about = "Front speeds and interface shapes for cut-off KPP fronts in channel shear flows")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any parameter.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Advectionless cut-off front speed v*(u_c).
    Vstar(VstarArgs),
    /// Principal eigenvalue problems.
    Eigen {
        #[command(subcommand)]
        problem: EigenCommand,
    },
    /// Effective diffusivity constant Δ of a flow.
    Delta(DeltaArgs),
    /// Asymptotic front speed in the regime covering (A, B, u_c).
    Speed(SpeedArgs),
    /// Asymptotic interface shape ζ(y) as CSV.
    Interface(InterfaceArgs),
    /// Direct simulation of the two-dimensional front.
    Simulate(SimulateArgs),
    /// Evaluate a target over a parameter grid.
    Sweep(SweepArgs),
    /// Run the invariant suite.
    Validate(ValidateArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct ReactionArgs {
    /// Cut-off threshold.
    #[arg(long)]
    pub uc: Option<f64>,
    /// `fisher` or `poly`.
    #[arg(long)]
    pub reaction: Option<String>,
    /// Polynomial coefficients `c1, c2, ...` of `f(u) = Σ c_k u^k`.
    #[arg(long, allow_hyphen_values = true)]
    pub poly_coeffs: Option<String>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct VstarArgs {
    #[command(flatten)]
    pub reaction: ReactionArgs,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the wave profile (xi, u) to this CSV file.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum EigenCommand {
    /// Quadratic problem governing the u_c → 1 speed.
    Qevp(QevpArgs),
    /// Sturm–Liouville problem of the weak-advection regime.
    Sl(SlArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct QevpArgs {
    #[arg(long)]
    pub flow: Option<String>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// f'(1); default -1 (Fisher).
    #[arg(long)]
    pub fp1: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Write (y, value) of the eigenfunction to this CSV file.
    #[arg(long)]
    pub eigenfunction: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SlArgs {
    #[arg(long)]
    pub flow: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub eigenfunction: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long)]
    pub flow: Option<String>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SpeedArgs {
    #[arg(long)]
    pub flow: Option<String>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub reaction: ReactionArgs,
    /// Regime tag, or `auto` to use the band rules.
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct InterfaceArgs {
    #[arg(long)]
    pub flow: Option<String>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub reaction: ReactionArgs,
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long)]
    pub flow: Option<String>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub reaction: ReactionArgs,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub x_extent: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub sample_interval: Option<f64>,
    /// Relative speed change that ends the run early; 0 disables.
    #[arg(long)]
    pub plateau_tol: Option<f64>,
    #[arg(long, action = ArgAction::Set)]
    pub recenter: Option<bool>,
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Sweep description: `target`, `axis.<name>`, `fixed.<name>`, `output`.
    #[arg(long)]
    pub grid_file: PathBuf,
    /// Overrides the `output` key of the grid file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Also ingest and check this flow table file.
    #[arg(long)]
    pub flow_file: Option<PathBuf>,
    /// Write the JSON report here (with a manifest beside it).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Fail unless outputs and artifacts match the recorded ones.
    #[arg(long)]
    pub check: bool,
}

fn init_threads() -> CliResult<()> {
    if let Ok(s) = std::env::var("KPPF_THREADS") {
        let n: usize = s
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("KPPF_THREADS must be a positive integer, got {s}")))?;
        // A second initialisation (replay re-entering run) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Vstar(a) => commands::vstar(a, cfg),
        Command::Eigen { problem } => match problem {
            EigenCommand::Qevp(a) => commands::eigen_qevp(a, cfg),
            EigenCommand::Sl(a) => commands::eigen_sl(a, cfg),
        },
        Command::Delta(a) => commands::delta(a, cfg),
        Command::Speed(a) => commands::speed(a, cfg),
        Command::Interface(a) => commands::interface(a, cfg),
        Command::Simulate(a) => commands::simulate(a, cfg),
        Command::Sweep(a) => sweep::run(a),
        Command::Validate(a) => validate::run(a),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = init_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code.clamp(1, EXIT_USAGE) as u8)
        }
    }
}
