//! `partition`: every partition function, the criterion and average energies at one state point.

use bohmz_core::partition::{
    average_energy, classical_z, classical_z_closed_form, classicality_criterion, heat_capacity,
    quantum_z, quantum_z_closed_form, unified_z_gaussian_closed_form,
    unified_z_gaussian_quadrature, EnergyMode, Method, PartitionResult,
};
use bohmz_core::{Error, ThermalSpec};

use super::{constants, harmonic, measure, positive, quadrature, CommandResult, Context};
use crate::args::PartitionArgs;
use crate::error::CliResult;
use crate::output::{Cell, Output, Table};

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
        Method::EigenSum => "eigen_sum",
    }
}

/// Divergence becomes an empty row; other failures abort.
fn soft<T>(r: Result<T, Error>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DivergentIntegral { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: &PartitionArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let constants = constants(&mut res, ctx)?;
    let params = harmonic(&mut res, &args.system, constants)?;
    let quad = quadrature(&mut res, &args.quad)?;
    let sigma = positive("sigma", res.f64("sigma", args.sigma, 1.0)?)?;
    let kbt = res.f64("kbt", args.kbt, 1.0)?;
    let measure = measure(&mut res, args.measure)?;
    let tail_tol = res.f64("tail_tol", args.tail_tol, 1e-16)?;
    let thermal = ThermalSpec::from_kbt(kbt)?;

    let mut table = Table::new(
        "partition",
        &[
            ("quantity", "-"),
            ("method", "-"),
            ("value", "see quantity"),
            ("est_error", "see quantity"),
        ],
    );
    let mut push_z = |name: &str, fallback: Method, r: Option<PartitionResult>| {
        let (method, value, err) = match r {
            Some(r) => (
                method_name(r.method),
                Cell::Num(r.value),
                Cell::Num(r.est_error),
            ),
            None => (
                method_name(fallback),
                Cell::Text("divergent".into()),
                Cell::Missing,
            ),
        };
        table.push(vec![name.into(), method.into(), value, err]);
    };
    push_z(
        "classical_z",
        Method::ClosedForm,
        Some(classical_z_closed_form(&params, &thermal)?),
    );
    push_z(
        "classical_z",
        Method::Quadrature,
        Some(classical_z(&params, &thermal, &quad)?),
    );
    push_z(
        "quantum_z",
        Method::ClosedForm,
        Some(quantum_z_closed_form(&params, &thermal)?),
    );
    push_z(
        "quantum_z",
        Method::EigenSum,
        Some(quantum_z(&params, &thermal, tail_tol)?),
    );
    push_z(
        "unified_z",
        Method::ClosedForm,
        soft(unified_z_gaussian_closed_form(
            &params, sigma, &thermal, measure,
        ))?,
    );
    push_z(
        "unified_z",
        Method::Quadrature,
        soft(unified_z_gaussian_quadrature(
            &params, sigma, &thermal, &quad, measure,
        ))?,
    );

    let crit = classicality_criterion(params.mass, sigma, &thermal, &constants);
    let mut push =
        |name: &str, v: Cell| table.push(vec![name.into(), "closed_form".into(), v, Cell::Missing]);
    push("t_min", crit.t_min.into());
    push("criterion_ratio", crit.dimensionless_ratio.into());
    push("classical_ok", Cell::Bool(crit.classical_ok));
    push("thermal_de_broglie", crit.thermal_de_broglie.into());

    for (name, mode) in [
        ("quantum_eigen", EnergyMode::QuantumEigen),
        ("classical_limit", EnergyMode::ClassicalLimit),
        ("unified_gaussian", EnergyMode::UnifiedGaussian),
    ] {
        let e = soft(average_energy(mode, &params, &thermal, sigma, &quad))?;
        let c = soft(heat_capacity(mode, &params, &thermal, sigma, &quad))?;
        let cell = |v: Option<f64>| v.map_or(Cell::Text("divergent".into()), Cell::Num);
        table.push(vec![
            format!("average_energy_{name}").as_str().into(),
            "derived".into(),
            cell(e),
            Cell::Missing,
        ]);
        table.push(vec![
            format!("heat_capacity_{name}").as_str().into(),
            "derived".into(),
            cell(c),
            Cell::Missing,
        ]);
    }
    Ok(CommandResult::ok("partition", res, Output::table(table)))
}
