use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "bohmz",
    version,
    about = "Bohmian phase-space partition functions: marginal curves, limit sweeps, bath tables and self-checks"
)]
pub struct Cli {
    /// Flat `key = value` file, or a JSON output whose manifest is reused.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Reduced Planck constant.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Boltzmann constant.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kb: Option<f64>,
    /// Worker threads for sampling; output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized marginal partition curves for several (sigma, kbt) pairs.
    Fig1(Fig1Args),
    /// Unified versus classical partition function along a parameter sweep.
    Limits(LimitsArgs),
    /// Bath partition functions, criterion table and memory kernel.
    Bath(BathArgs),
    /// A single marginal partition curve, optionally with dZ/dt.
    Marginal(MarginalArgs),
    /// Bohmian trajectories as (t, x, v) samples.
    Trajectory(TrajectoryArgs),
    /// Partition functions, temperature criterion and average energies at one state point.
    Partition(PartitionArgs),
    /// Run every oracle comparison and print the discrepancy report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct SystemArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct QuadArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub window_sigmas: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_subdiv: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Fig1Args {
    /// Packet width; repeat for several series.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigma: Vec<f64>,
    /// Temperature k_B T; repeat for several series.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kbt: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Emit raw values instead of normalizing to 1 at t = 0.
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MarginalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kbt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub raw: bool,
    /// Add the exact and shorthand-bracket dZ/dt columns.
    #[arg(long)]
    pub derivative: bool,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Sigma,
    Kbt,
    Hbar,
}

impl SweepVar {
    pub fn key(self) -> &'static str {
        match self {
            SweepVar::Sigma => "sigma",
            SweepVar::Kbt => "kbt",
            SweepVar::Hbar => "hbar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Raw,
    PhaseSpace,
}

#[derive(Debug, Clone, Args)]
pub struct LimitsArgs {
    #[arg(long, value_enum)]
    pub vary: Option<SweepVar>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    pub log: bool,
    /// Hold m sigma^2 at this value by setting m = K / sigma^2.
    #[arg(long, value_name = "K")]
    pub fixed_m_sigma2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kbt: Option<f64>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BathArgs {
    /// CSV with header `mass,omega,coupling`, one oscillator per row.
    #[arg(long, value_name = "FILE")]
    pub bath_file: Option<PathBuf>,
    /// Generate `n` oscillators with linear frequency and coupling grids.
    #[arg(long, value_name = "N")]
    pub ohmic_n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kernel_tmax: Option<f64>,
    #[arg(long)]
    pub kernel_samples: Option<usize>,
    /// On a failing criterion, print the criterion table instead of exiting with 2.
    #[arg(long)]
    pub allow_divergent: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Harmonic,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepperArg {
    Rk45,
    Rk4,
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum)]
    pub potential: Option<PotentialArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    /// Starting position; repeat for several trajectories.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    #[arg(long, value_enum)]
    pub stepper: Option<StepperArg>,
    /// Step of the fixed RK4 stepper.
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ode_rel_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ode_abs_tol: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kbt: Option<f64>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub tail_tol: Option<f64>,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Profile {
    /// Full sample counts.
    #[default]
    Default,
    /// Fewer random points and times, same tolerances.
    Quick,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Number of random points per check; `default` when omitted.
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Fault injection: scales hbar inside the closed-form quantum potential only.
    #[arg(long, hide = true)]
    pub perturb_q_hbar: Option<f64>,
}
