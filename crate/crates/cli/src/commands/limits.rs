//! `limits`: unified versus classical partition function along a sweep.

use bohmz_core::partition::{
    classical_z_closed_form, criterion_ratio, unified_z_gaussian_closed_form, Measure,
};
use bohmz_core::{Constants, Error, SystemParams, ThermalSpec};

use super::{constants, measure, positive, CommandResult, Context};
use crate::args::{LimitsArgs, SweepVar};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Output, Table};

pub fn sweep_points(from: f64, to: f64, points: usize, log: bool) -> CliResult<Vec<f64>> {
    if points < 2 {
        return Err(CliError::usage("points must be at least 2"));
    }
    if from >= to {
        return Err(CliError::usage("sweep needs from < to"));
    }
    if log && from <= 0.0 {
        return Err(CliError::usage("log sweep needs from > 0"));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / n;
            if i + 1 == points {
                to
            } else if log {
                from * (to / from).powf(f)
            } else {
                from + (to - from) * f
            }
        })
        .collect())
}

pub fn run(args: &LimitsArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let base = constants(&mut res, ctx)?;
    let vary_flag = args.vary.map(SweepVar::key);
    let vary = match res.string("vary", vary_flag, "sigma").as_str() {
        "sigma" => SweepVar::Sigma,
        "kbt" => SweepVar::Kbt,
        "hbar" => SweepVar::Hbar,
        other => return Err(CliError::usage(format!("cannot sweep `{other}`"))),
    };
    let from = res.f64("from", args.from, 0.5)?;
    let to = res.f64("to", args.to, 4.0)?;
    let points = res.usize("points", args.points, 21)?;
    let log = res.flag("log", args.log)?;
    let fixed = res.opt_f64("fixed_m_sigma2", args.fixed_m_sigma2)?;
    let sigma0 = positive("sigma", res.f64("sigma", args.sigma, 1.0)?)?;
    let kbt0 = positive("kbt", res.f64("kbt", args.kbt, 1.0)?)?;
    let mass0 = res.f64("mass", args.system.mass, 1.0)?;
    let omega = res.f64("omega", args.system.omega, 1.0)?;
    let measure = measure(&mut res, args.measure)?;
    let values = sweep_points(from, to, points, log)?;

    let mut table = Table::new(
        "limits",
        &[
            (vary.key(), unit_of(vary)),
            ("mass", "mass"),
            ("z_u", "1"),
            ("z_cl", "1"),
            ("ratio", "1"),
            ("criterion_ratio", "1"),
            ("status", "-"),
        ],
    );
    for v in values {
        let (sigma, kbt, hbar) = match vary {
            SweepVar::Sigma => (v, kbt0, base.hbar),
            SweepVar::Kbt => (sigma0, v, base.hbar),
            SweepVar::Hbar => (sigma0, kbt0, v),
        };
        let mass = fixed.map_or(mass0, |k| k / (sigma * sigma));
        let constants = Constants::new(hbar, base.boltzmann)?;
        let params = SystemParams::harmonic(mass, omega, constants)?;
        let thermal = ThermalSpec::from_kbt(kbt)?;
        let z_cl = classical_z_closed_form(&params, &thermal)?.value;
        let z_cl = match measure {
            Measure::PhaseSpace => z_cl,
            Measure::Raw => z_cl * 2.0 * std::f64::consts::PI * hbar,
        };
        let r = criterion_ratio(mass, sigma, hbar, &thermal);
        let row = match unified_z_gaussian_closed_form(&params, sigma, &thermal, measure) {
            Ok(z_u) => vec![
                z_u.value.into(),
                z_cl.into(),
                (z_u.value / z_cl).into(),
                r.into(),
                "ok".into(),
            ],
            Err(Error::DivergentIntegral { .. }) => {
                vec![
                    Cell::Missing,
                    z_cl.into(),
                    Cell::Missing,
                    r.into(),
                    "divergent".into(),
                ]
            }
            Err(e) => return Err(e.into()),
        };
        let mut full = vec![v.into(), mass.into()];
        full.extend(row);
        table.push(full);
    }
    Ok(CommandResult::ok("limits", res, Output::table(table)))
}

fn unit_of(v: SweepVar) -> &'static str {
    match v {
        SweepVar::Sigma => "length",
        SweepVar::Kbt => "energy",
        SweepVar::Hbar => "action",
    }
}
