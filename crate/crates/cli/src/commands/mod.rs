//! One module per subcommand; each returns tables plus the resolved config.

pub mod bath;
pub mod curves;
pub mod limits;
pub mod partition;
pub mod trajectory;
pub mod verify;

use std::collections::BTreeMap;

use bohmz_core::{Constants, QuadratureConfig, SystemParams};

use crate::args::{MeasureArg, QuadArgs, SystemArgs};
use crate::config::{ConfigFile, Resolver};
use crate::error::{CliError, CliResult};
use crate::output::Output;
use bohmz_core::partition::Measure;

pub struct Context<'a> {
    pub file: Option<&'a ConfigFile>,
    pub hbar: Option<f64>,
    pub kb: Option<f64>,
}

impl<'a> Context<'a> {
    pub fn resolver(&self) -> Resolver<'a> {
        Resolver::new(self.file)
    }
}

pub struct CommandResult {
    pub command: &'static str,
    pub config: BTreeMap<String, String>,
    pub output: Output,
    /// Set by `verify` when a check fails; the output is still written.
    pub failure: Option<String>,
}

impl CommandResult {
    pub fn ok(command: &'static str, res: Resolver<'_>, output: Output) -> Self {
        Self {
            command,
            config: res.finish(),
            output,
            failure: None,
        }
    }
}

pub fn constants(res: &mut Resolver<'_>, ctx: &Context<'_>) -> CliResult<Constants> {
    let hbar = res.f64("hbar", ctx.hbar, 1.0)?;
    let kb = res.f64("kb", ctx.kb, 1.0)?;
    Ok(Constants::new(hbar, kb)?)
}

pub fn harmonic(
    res: &mut Resolver<'_>,
    args: &SystemArgs,
    constants: Constants,
) -> CliResult<SystemParams> {
    let mass = res.f64("mass", args.mass, 1.0)?;
    let omega = res.f64("omega", args.omega, 1.0)?;
    Ok(SystemParams::harmonic(mass, omega, constants)?)
}

pub fn quadrature(res: &mut Resolver<'_>, args: &QuadArgs) -> CliResult<QuadratureConfig> {
    let d = QuadratureConfig::default();
    let cfg = QuadratureConfig {
        window_sigmas: res.f64("window_sigmas", args.window_sigmas, d.window_sigmas)?,
        rel_tol: res.f64("rel_tol", args.rel_tol, d.rel_tol)?,
        abs_tol: res.f64("abs_tol", args.abs_tol, d.abs_tol)?,
        max_subdiv: res.usize("max_subdiv", args.max_subdiv, d.max_subdiv)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn measure(res: &mut Resolver<'_>, flag: Option<MeasureArg>) -> CliResult<Measure> {
    let flag = flag.map(|m| match m {
        MeasureArg::Raw => "raw",
        MeasureArg::PhaseSpace => "phase-space",
    });
    match res.string("measure", flag, "phase-space").as_str() {
        "raw" => Ok(Measure::Raw),
        "phase-space" => Ok(Measure::PhaseSpace),
        other => Err(CliError::usage(format!("unknown measure `{other}`"))),
    }
}

pub fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::usage(format!("`{name}` must be > 0")))
    }
}
