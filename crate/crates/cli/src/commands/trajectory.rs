//! `trajectory`: Bohmian paths as `(t, x, v)` rows.

use bohmz_core::trajectories::{integrate, Stepper, TrajectoryConfig};
use bohmz_core::wavepacket::WavepacketInit;
use bohmz_core::SystemParams;
use rayon::prelude::*;

use super::{constants, positive, CommandResult, Context};
use crate::args::TrajectoryArgs;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Output, Table};

pub fn run(args: &TrajectoryArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let constants = constants(&mut res, ctx)?;
    let potential = args.potential.map(|p| match p {
        crate::args::PotentialArg::Harmonic => "harmonic",
        crate::args::PotentialArg::Free => "free",
    });
    let mass = res.f64("mass", args.system.mass, 1.0)?;
    let params = match res.string("potential", potential, "harmonic").as_str() {
        "harmonic" => {
            let omega = res.f64("omega", args.system.omega, 1.0)?;
            SystemParams::harmonic(mass, omega, constants)?
        }
        "free" => SystemParams::free(mass, constants)?,
        other => return Err(CliError::usage(format!("unknown potential `{other}`"))),
    };
    let sigma = res.f64("sigma", args.sigma, 0.5)?;
    let x0 = res.f64("x0", args.x0, 1.0)?;
    let p0 = res.f64("p0", args.p0, 0.0)?;
    let starts = res.f64_list("start", &args.start, &[x0])?;
    let tmax = positive("tmax", res.f64("tmax", args.tmax, 5.0)?)?;
    let record_every = res.usize("record_every", args.record_every, 1)?;
    let stepper_flag = args.stepper.map(|s| match s {
        crate::args::StepperArg::Rk45 => "rk45",
        crate::args::StepperArg::Rk4 => "rk4",
    });
    let stepper = match res.string("stepper", stepper_flag, "rk45").as_str() {
        "rk45" => Stepper::Rk45Adaptive {
            rel_tol: res.f64("ode_rel_tol", args.ode_rel_tol, 1e-9)?,
            abs_tol: res.f64("ode_abs_tol", args.ode_abs_tol, 1e-12)?,
        },
        "rk4" => Stepper::Rk4Fixed {
            dt: res.f64("dt", args.dt, 1e-3)?,
        },
        other => return Err(CliError::usage(format!("unknown stepper `{other}`"))),
    };
    let cfg = TrajectoryConfig::new(stepper, tmax, record_every)?;
    let init = WavepacketInit::new(x0, p0, sigma)?;

    let paths = starts
        .par_iter()
        .map(|&x| integrate(&params, &init, x, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(
        "trajectory",
        &[
            ("path", "1"),
            ("t", "time"),
            ("x", "length"),
            ("v", "velocity"),
        ],
    );
    for (i, path) in paths.iter().enumerate() {
        for ((t, x), v) in path.times.iter().zip(&path.positions).zip(&path.velocities) {
            table.push(vec![
                Cell::Int(i as i64),
                (*t).into(),
                (*x).into(),
                (*v).into(),
            ]);
        }
    }
    Ok(CommandResult::ok("trajectory", res, Output::table(table)))
}
