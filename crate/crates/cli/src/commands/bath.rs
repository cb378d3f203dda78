//! `bath`: bath partition functions, per-oscillator criterion and kernel samples.

use std::path::Path;

use bohmz_core::bath::{
    bath_classicality, classical_bath_z, large_n_ratio, memory_kernel, oscillator_correction,
    unified_bath_z, unified_oscillator_quadrature, BathSpec, Oscillator,
};
use bohmz_core::partition::uniform_times;
use bohmz_core::ThermalSpec;

use super::{constants, positive, quadrature, CommandResult, Context};
use crate::args::BathArgs;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Output, Table};

/// Reads a CSV with header `mass,omega,coupling`; `#` lines are comments.
pub fn parse_bath_file(text: &str) -> CliResult<Vec<Oscillator>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .map(|(_, l)| l.split(',').map(str::trim).collect())
        .unwrap_or_default();
    if header != ["mass", "omega", "coupling"] {
        return Err(CliError::usage(
            "bath file header must be `mass,omega,coupling`",
        ));
    }
    lines
        .map(|(i, l)| {
            let fields: Vec<f64> = l
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::usage(format!("bath file line {}: not a number", i + 1)))?;
            match fields[..] {
                [m, w, c] => Ok(Oscillator::new(m, w, c)?),
                _ => Err(CliError::usage(format!(
                    "bath file line {}: expected 3 fields",
                    i + 1
                ))),
            }
        })
        .collect()
}

fn load_bath(path: &Path) -> CliResult<Vec<Oscillator>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read bath file {}: {e}", path.display())))?;
    parse_bath_file(&text)
}

pub fn run(args: &BathArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let constants = constants(&mut res, ctx)?;
    let quad = quadrature(&mut res, &args.quad)?;
    let beta = positive("beta", res.f64("beta", args.beta, 1.0)?)?;
    let sigma = res.f64("sigma", args.sigma, 1.0)?;
    let q0 = res.f64("q0", args.q0, 0.0)?;
    let kernel_tmax = positive(
        "kernel_tmax",
        res.f64("kernel_tmax", args.kernel_tmax, 10.0)?,
    )?;
    let kernel_samples = res.usize("kernel_samples", args.kernel_samples, 101)?;
    let allow_divergent = res.flag("allow_divergent", args.allow_divergent)?;
    if kernel_samples < 2 {
        return Err(CliError::usage("kernel_samples must be at least 2"));
    }

    let file_flag = args
        .bath_file
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned());
    let oscillators = if let Some(path) = res.opt_string("bath_file", file_flag.as_deref()) {
        load_bath(Path::new(&path))?
    } else {
        let n = res.usize("ohmic_n", args.ohmic_n, 1)?;
        let m0 = res.f64("m0", args.m0, 1.0)?;
        let omega_max = res.f64("omega_max", args.omega_max, 1.0)?;
        let coupling = res.f64("coupling", args.coupling, 1.0)?;
        if n == 0 {
            return Err(CliError::usage("ohmic_n must be at least 1"));
        }
        BathSpec::ohmic(n, m0, omega_max, coupling, sigma, q0)?.oscillators
    };
    let bath = BathSpec::new(oscillators, sigma, q0)?;
    let thermal = ThermalSpec::from_beta(beta)?;
    let criterion = bath_classicality(&bath, &thermal, &constants);

    let mut osc_table = Table::new(
        "oscillators",
        &[
            ("index", "1"),
            ("mass", "mass"),
            ("omega", "1/time"),
            ("coupling", "coupling"),
            ("criterion_ratio", "1"),
            ("classical_ok", "-"),
            ("correction", "1"),
            ("correction_quadrature", "1"),
        ],
    );
    for (i, (o, rep)) in bath
        .oscillators
        .iter()
        .zip(&criterion.per_oscillator)
        .enumerate()
    {
        let (c, cq) = if rep.classical_ok {
            let c = oscillator_correction(o, sigma, &thermal, &constants)?;
            let z3 =
                unified_oscillator_quadrature(o, sigma, q0, &thermal, &constants, &quad)?.value;
            let zb = 2.0 * std::f64::consts::PI / (beta * o.omega);
            (Cell::Num(c), Cell::Num(z3 / zb))
        } else {
            (Cell::Missing, Cell::Missing)
        };
        osc_table.push(vec![
            Cell::Int(i as i64),
            o.mass.into(),
            o.omega.into(),
            o.coupling.into(),
            rep.dimensionless_ratio.into(),
            Cell::Bool(rep.classical_ok),
            c,
            cq,
        ]);
    }

    if !criterion.all_ok {
        if allow_divergent {
            return Ok(CommandResult::ok("bath", res, Output::table(osc_table)));
        }
        let failing: Vec<String> = criterion
            .per_oscillator
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.classical_ok)
            .map(|(i, r)| format!("#{i} (ratio {})", r.dimensionless_ratio))
            .collect();
        return Err(CliError::Domain(format!(
            "bath criterion fails for oscillators {}; rerun with --allow-divergent for the table",
            failing.join(", ")
        )));
    }

    let zb = classical_bath_z(&bath, &thermal).value;
    let zu = unified_bath_z(&bath, &thermal, &constants)?;
    let mut summary = Table::new("summary", &[("quantity", "-"), ("value", "1")]);
    let mut row = |name: &str, v: Cell| summary.push(vec![name.into(), v]);
    row("n", Cell::Int(bath.len() as i64));
    row("z_b", zb.into());
    row("z_b_prime_exact", zu.exact.value.into());
    row("z_b_prime_two_pi", zu.two_pi_factor.value.into());
    row("exact_over_z_b", (zu.exact.value / zb).into());
    row("two_pi_residual", zu.residual().into());
    let m0 = bath.oscillators[0].mass;
    if bath.oscillators.iter().all(|o| o.mass == m0) {
        let l = large_n_ratio(m0, bath.len(), sigma, &thermal, &constants)?;
        row("large_n_approx", l.approx.into());
        row("large_n_exact", l.exact.into());
        row("large_n_rel_err", l.rel_err.into());
    } else {
        row("large_n_approx", Cell::Missing);
        row("large_n_exact", Cell::Missing);
        row("large_n_rel_err", Cell::Missing);
    }

    let mut kernel = Table::new("kernel", &[("t", "time"), ("nu", "coupling^2 time^2")]);
    for t in uniform_times(kernel_tmax, kernel_samples) {
        kernel.push(vec![t.into(), memory_kernel(&bath, t).into()]);
    }

    Ok(CommandResult::ok(
        "bath",
        res,
        Output {
            tables: vec![summary, osc_table, kernel],
            series: None,
        },
    ))
}
