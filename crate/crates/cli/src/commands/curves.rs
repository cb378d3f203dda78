//! `fig1` and `marginal`: marginal partition curves.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use bohmz_core::partition::{
    classicality_criterion, marginal_z, marginal_z_derivative, uniform_times, MarginalCurve,
};
use bohmz_core::wavepacket::WavepacketInit;
use bohmz_core::{Constants, QuadratureConfig, SystemParams, ThermalSpec};
use rayon::prelude::*;

use super::{constants, harmonic, positive, quadrature, CommandResult, Context};
use crate::args::{Fig1Args, MarginalArgs};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Output, Series, Table};

pub const FIG1_SIGMA: [f64; 3] = [0.45, 0.45, 0.65];
pub const FIG1_KBT: [f64; 3] = [2.0, 5.0, 2.0];
pub const DEFAULT_SAMPLES: usize = 400;

/// Pairs the two lists: equal lengths zip, a single entry broadcasts.
pub fn pair_lists(sigma: &[f64], kbt: &[f64]) -> CliResult<Vec<(f64, f64)>> {
    match (sigma.len(), kbt.len()) {
        (0, _) | (_, 0) => Err(CliError::usage("sigma and kbt lists must be non-empty")),
        (a, b) if a == b => Ok(sigma.iter().copied().zip(kbt.iter().copied()).collect()),
        (1, _) => Ok(kbt.iter().map(|&k| (sigma[0], k)).collect()),
        (_, 1) => Ok(sigma.iter().map(|&s| (s, kbt[0])).collect()),
        (a, b) => Err(CliError::usage(format!(
            "cannot pair {a} sigma values with {b} kbt values"
        ))),
    }
}

struct CurveSpec {
    params: SystemParams,
    init: WavepacketInit,
    thermal: ThermalSpec,
}

fn check_criterion(spec: &CurveSpec, constants: &Constants) -> CliResult<()> {
    let report =
        classicality_criterion(spec.params.mass, spec.init.sigma, &spec.thermal, constants);
    if report.classical_ok {
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "sigma = {}, kbt = {}: beta hbar^2 / (4 m sigma^2) = {} >= 1",
            spec.init.sigma,
            spec.thermal.kbt(),
            report.dimensionless_ratio
        )))
    }
}

fn sample_curve(
    spec: &CurveSpec,
    times: &[f64],
    quad: &QuadratureConfig,
    normalize: bool,
) -> CliResult<MarginalCurve> {
    let values = times
        .par_iter()
        .map(|&t| marginal_z(&spec.params, &spec.init, &spec.thermal, t, quad))
        .collect::<Result<Vec<_>, _>>()?;
    let mut curve = MarginalCurve {
        times: times.to_vec(),
        values,
        normalized: false,
        sigma: spec.init.sigma,
        kbt: spec.thermal.kbt(),
        x0: spec.init.x0,
        p0: spec.init.p0,
    };
    if normalize {
        curve.normalize();
    }
    Ok(curve)
}

fn curve_table() -> Table {
    Table::new(
        "marginal",
        &[
            ("series", "1"),
            ("sigma", "length"),
            ("kbt", "energy"),
            ("x0", "length"),
            ("p0", "momentum"),
            ("t", "time"),
            ("z", "1"),
        ],
    )
}

fn series_of(curve: &MarginalCurve) -> Series {
    let params = BTreeMap::from([
        ("sigma".to_string(), curve.sigma),
        ("kbt".to_string(), curve.kbt),
        ("x0".to_string(), curve.x0),
        ("p0".to_string(), curve.p0),
    ]);
    Series {
        params,
        times: curve.times.clone(),
        values: curve.values.clone(),
        extra: BTreeMap::new(),
    }
}

fn push_rows(table: &mut Table, index: usize, curve: &MarginalCurve) {
    for (t, z) in curve.times.iter().zip(&curve.values) {
        table.push(vec![
            Cell::Int(index as i64),
            curve.sigma.into(),
            curve.kbt.into(),
            curve.x0.into(),
            curve.p0.into(),
            (*t).into(),
            (*z).into(),
        ]);
    }
}

fn time_grid(tmax: f64, samples: usize) -> CliResult<Vec<f64>> {
    if samples < 2 {
        return Err(CliError::usage("samples must be at least 2"));
    }
    positive("tmax", tmax)?;
    Ok(uniform_times(tmax, samples))
}

pub fn fig1(args: &Fig1Args, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let constants = constants(&mut res, ctx)?;
    let params = harmonic(&mut res, &args.system, constants)?;
    let quad = quadrature(&mut res, &args.quad)?;

    // Without explicit lists the three reference series are produced. If only
    // one list is given, the other defaults to a single entry.
    let sigma_given = res.has("sigma", !args.sigma.is_empty());
    let kbt_given = res.has("kbt", !args.kbt.is_empty());
    let (sigma_default, kbt_default): (&[f64], &[f64]) = if sigma_given || kbt_given {
        (&FIG1_SIGMA[..1], &FIG1_KBT[..1])
    } else {
        (&FIG1_SIGMA, &FIG1_KBT)
    };
    let sigmas = res.f64_list("sigma", &args.sigma, sigma_default)?;
    let kbts = res.f64_list("kbt", &args.kbt, kbt_default)?;
    let x0 = res.f64("x0", args.x0, 1.0)?;
    let p0 = res.f64("p0", args.p0, 0.0)?;
    let tmax = res.f64("tmax", args.tmax, 4.0 * PI)?;
    let samples = res.usize("samples", args.samples, DEFAULT_SAMPLES)?;
    let raw = res.flag("raw", args.raw)?;
    let times = time_grid(tmax, samples)?;

    let specs = pair_lists(&sigmas, &kbts)?
        .into_iter()
        .map(|(sigma, kbt)| {
            Ok(CurveSpec {
                params,
                init: WavepacketInit::new(x0, p0, sigma)?,
                thermal: ThermalSpec::from_kbt(kbt)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    for spec in &specs {
        check_criterion(spec, &constants)?;
    }

    let mut table = curve_table();
    let mut series = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let curve = sample_curve(spec, &times, &quad, !raw)?;
        push_rows(&mut table, i, &curve);
        series.push(series_of(&curve));
    }
    Ok(CommandResult::ok(
        "fig1",
        res,
        Output {
            tables: vec![table],
            series: Some(series),
        },
    ))
}

pub fn marginal(args: &MarginalArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let constants = constants(&mut res, ctx)?;
    let params = harmonic(&mut res, &args.system, constants)?;
    let quad = quadrature(&mut res, &args.quad)?;
    let sigma = res.f64("sigma", args.sigma, FIG1_SIGMA[0])?;
    let kbt = res.f64("kbt", args.kbt, FIG1_KBT[0])?;
    let x0 = res.f64("x0", args.x0, 1.0)?;
    let p0 = res.f64("p0", args.p0, 0.0)?;
    let tmax = res.f64("tmax", args.tmax, 4.0 * PI)?;
    let samples = res.usize("samples", args.samples, DEFAULT_SAMPLES)?;
    let raw = res.flag("raw", args.raw)?;
    let derivative = res.flag("derivative", args.derivative)?;
    let times = time_grid(tmax, samples)?;

    let spec = CurveSpec {
        params,
        init: WavepacketInit::new(x0, p0, sigma)?,
        thermal: ThermalSpec::from_kbt(kbt)?,
    };
    check_criterion(&spec, &constants)?;
    let curve = sample_curve(&spec, &times, &quad, !raw)?;
    let mut table = curve_table();
    push_rows(&mut table, 0, &curve);
    let mut series = series_of(&curve);

    if derivative {
        let d = times
            .par_iter()
            .map(|&t| marginal_z_derivative(&spec.params, &spec.init, &spec.thermal, t, &quad))
            .collect::<Result<Vec<_>, _>>()?;
        // Derivatives share the normalization of the curve.
        let scale = if raw {
            1.0
        } else {
            marginal_z(&spec.params, &spec.init, &spec.thermal, times[0], &quad)?
        };
        let exact: Vec<f64> = d.iter().map(|v| v.exact / scale).collect();
        let printed: Vec<f64> = d.iter().map(|v| v.printed / scale).collect();
        table.columns.push(("dzdt_exact".into(), "1/time".into()));
        table.columns.push(("dzdt_printed".into(), "1/time".into()));
        for (row, (e, p)) in table.rows.iter_mut().zip(exact.iter().zip(&printed)) {
            row.push((*e).into());
            row.push((*p).into());
        }
        series.extra.insert("dzdt_exact".into(), exact);
        series.extra.insert("dzdt_printed".into(), printed);
    }

    Ok(CommandResult::ok(
        "marginal",
        res,
        Output {
            tables: vec![table],
            series: Some(vec![series]),
        },
    ))
}
