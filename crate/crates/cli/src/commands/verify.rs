//! `verify`: every closed form against its independent oracle, plus the
//! residuals of the three shorthand formulas that disagree with them.

use std::f64::consts::PI;

use bohmz_core::bath::{
    large_n_ratio, oscillator_correction, unified_bath_z, unified_oscillator_quadrature, BathSpec,
    Oscillator,
};
use bohmz_core::numeric::diff;
use bohmz_core::oracle::{
    energy_fd, gaussian_correction_quadrature, hamilton_jacobi_residual, quantum_potential_fd,
    rel_err, time_scale,
};
use bohmz_core::partition::{
    criterion_ratio, gaussian_correction, marginal_z, marginal_z_derivative, quantum_z,
    quantum_z_closed_form, unified_z_gaussian_closed_form, unified_z_gaussian_quadrature, Measure,
};
use bohmz_core::trajectories::{integrate, scaling_solution, TrajectoryConfig};
use bohmz_core::wavepacket::{evolve, WavepacketInit};
use bohmz_core::{natural_units, QuadratureConfig, SystemParams, ThermalSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CommandResult, Context};
use crate::args::{Profile, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::output::{Output, Table};

const SEED: u64 = 0x5eed_b0b2;

struct Budget {
    points: usize,
    packets: usize,
    paths: usize,
}

impl Budget {
    fn of(profile: Profile) -> Self {
        match profile {
            Profile::Default => Budget {
                points: 100,
                packets: 5,
                paths: 10,
            },
            Profile::Quick => Budget {
                points: 20,
                packets: 2,
                paths: 3,
            },
        }
    }
}

/// Outcome of one oracle comparison; `measured` is NaN when the computation failed.
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

pub struct Discrepancy {
    pub name: &'static str,
    pub residual: f64,
    pub note: &'static str,
}

pub struct Report {
    pub checks: Vec<Check>,
    pub discrepancies: Vec<Discrepancy>,
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN must survive so a broken oracle cannot pass.
    values.into_iter().fold(0.0, |acc: f64, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

fn systems() -> [SystemParams; 2] {
    let units = natural_units();
    [
        SystemParams::harmonic(1.0, 1.0, units).expect("valid"),
        SystemParams::free(1.0, units).expect("valid"),
    ]
}

fn random_packet(rng: &mut ChaCha8Rng) -> WavepacketInit {
    WavepacketInit::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.35..1.2),
    )
    .expect("valid packet")
}

/// Random `(packet, t, x)` with `x` within three widths of the centre.
fn random_points(
    rng: &mut ChaCha8Rng,
    params: &SystemParams,
    n: usize,
) -> Vec<(WavepacketInit, f64, f64)> {
    (0..n)
        .map(|_| {
            let init = random_packet(rng);
            let t = rng.random_range(0.0..3.0 * time_scale(params, &init));
            let s = evolve(params, &init, t);
            let x = s.q + rng.random_range(-3.0..3.0) * s.width();
            (init, t, x)
        })
        .collect()
}

pub fn run_checks(profile: Profile, perturb_q_hbar: Option<f64>) -> Report {
    let budget = Budget::of(profile);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let quad = QuadratureConfig::default();
    let q_scale = perturb_q_hbar.map_or(1.0, |f| f * f);
    let mut checks = Vec::new();

    let mut q_err = Vec::new();
    let mut e_err = Vec::new();
    let mut hj_err = Vec::new();
    let mut printed_err = Vec::new();
    for params in systems() {
        for (init, t, x) in random_points(&mut rng, &params, budget.points) {
            let s = evolve(&params, &init, t);
            let q_closed = q_scale * s.quantum_potential(x);
            q_err.push(rel_err(
                q_closed,
                quantum_potential_fd(&s, x),
                s.quantum_potential_coefficients().c0,
            ));
            let e_scale = s.energy_coefficients().c0;
            e_err.push(rel_err(
                s.energy(x),
                energy_fd(&params, &init, t, x),
                e_scale,
            ));
            hj_err.push(hamilton_jacobi_residual(&params, &init, t, x).abs() / e_scale);
            printed_err.push(rel_err(s.energy_printed(x), s.energy(x), e_scale));
        }
    }
    checks.push(Check {
        name: "quantum_potential_fd",
        measured: max_of(q_err),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "energy_minus_dsdt",
        measured: max_of(e_err),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "hamilton_jacobi",
        measured: max_of(hj_err),
        tolerance: 1e-6,
    });

    let thermal = ThermalSpec::from_beta(1.0).expect("valid");
    let c = gaussian_correction(1.0, 1.0, &thermal, &natural_units());
    let c_quad = gaussian_correction_quadrature(1.0, 1.0, 1.0, &thermal, &quad);
    let measured = match (c, c_quad) {
        (Ok(a), Ok(b)) => rel_err(a, b, 0.0),
        _ => f64::NAN,
    };
    checks.push(Check {
        name: "gaussian_correction",
        measured,
        tolerance: 1e-8,
    });

    let harmonic = systems()[0];
    let zu = unified_z_gaussian_closed_form(&harmonic, 1.0, &thermal, Measure::PhaseSpace);
    let zu_quad =
        unified_z_gaussian_quadrature(&harmonic, 1.0, &thermal, &quad, Measure::PhaseSpace);
    let measured = match (zu, zu_quad) {
        (Ok(a), Ok(b)) => rel_err(b.value, a.value, 0.0),
        _ => f64::NAN,
    };
    checks.push(Check {
        name: "unified_z_quadrature",
        measured,
        tolerance: 1e-7,
    });

    let eig = (0..=40).map(|i| {
        let x = 0.01 * (5000.0f64).powf(i as f64 / 40.0);
        let th = ThermalSpec::from_beta(x).expect("valid");
        match (
            quantum_z(&harmonic, &th, 1e-16),
            quantum_z_closed_form(&harmonic, &th),
        ) {
            (Ok(a), Ok(b)) => rel_err(a.value, b.value, 0.0),
            _ => f64::NAN,
        }
    });
    checks.push(Check {
        name: "quantum_z_eigensum",
        measured: max_of(eig),
        tolerance: 1e-10,
    });

    // Time derivative of the marginal Z against differences of Z itself.
    let mut dz_err = Vec::new();
    let mut bracket_err = Vec::new();
    for params in systems() {
        for _ in 0..budget.packets {
            let init = random_packet(&mut rng);
            let th = ThermalSpec::from_kbt(rng.random_range(1.0..5.0)).expect("valid");
            if criterion_ratio(params.mass, init.sigma, params.hbar(), &th) >= 1.0 {
                continue;
            }
            let ts = time_scale(&params, &init);
            let t = rng.random_range(0.1..2.0) * ts;
            let d = marginal_z_derivative(&params, &init, &th, t, &quad);
            let z = marginal_z(&params, &init, &th, t, &quad);
            let fd = diff::derivative(
                |s| marginal_z(&params, &init, &th, s, &quad).unwrap_or(f64::NAN),
                t,
                1e-3 * ts,
            );
            match (d, z) {
                (Ok(d), Ok(z)) => {
                    let scale = z / ts;
                    dz_err.push(rel_err(d.exact, fd, scale));
                    bracket_err.push(rel_err(d.printed, d.exact, scale));
                }
                _ => dz_err.push(f64::NAN),
            }
        }
    }
    checks.push(Check {
        name: "marginal_dzdt",
        measured: max_of(dz_err),
        tolerance: 1e-6,
    });

    // Mean energy along the evolution and against the eigenbasis.
    let mut drift = Vec::new();
    let mut spectral = Vec::new();
    for _ in 0..budget.packets {
        let init = random_packet(&mut rng);
        let states: Vec<_> = (0..20)
            .map(|i| evolve(&harmonic, &init, 0.35 * i as f64))
            .collect();
        let h0 = states[0].mean_energy(&quad).unwrap_or(f64::NAN);
        drift.extend(
            states
                .iter()
                .map(|s| rel_err(s.mean_energy(&quad).unwrap_or(f64::NAN), h0, 0.0)),
        );
        let k_max = 60;
        let dec = states[0]
            .spectral_grid(k_max)
            .and_then(|g| states[0].spectral_project(k_max, &g));
        spectral.push(dec.map_or(f64::NAN, |d| rel_err(d.mean_energy(), h0, 0.0)));
    }
    checks.push(Check {
        name: "energy_conservation",
        measured: max_of(drift),
        tolerance: 1e-8,
    });
    checks.push(Check {
        name: "spectral_energy",
        measured: max_of(spectral),
        tolerance: 1e-8,
    });

    let mut traj = Vec::new();
    for params in systems() {
        for _ in 0..budget.paths {
            let init = random_packet(&mut rng);
            let x_start = init.x0 + rng.random_range(-2.0..2.0) * init.sigma;
            let cfg = TrajectoryConfig::adaptive(5.0).expect("valid");
            let err = integrate(&params, &init, x_start, &cfg).map_or(f64::NAN, |path| {
                max_of(
                    path.times
                        .iter()
                        .zip(&path.positions)
                        .map(|(&t, &x)| (x - scaling_solution(&params, &init, x_start, t)).abs()),
                )
            });
            traj.push(err);
        }
    }
    checks.push(Check {
        name: "trajectory_scaling",
        measured: max_of(traj),
        tolerance: 1e-6,
    });

    let units = natural_units();
    let osc_err = [(1.0, 1.0, 1.0), (2.0, 0.5, 0.3), (0.8, 2.5, -1.2)].map(|(m, w, c)| {
        let osc = Oscillator::new(m, w, c).expect("valid");
        let zb = 2.0 * PI / (thermal.beta * w);
        let exact = oscillator_correction(&osc, 1.0, &thermal, &units);
        let quad3 = unified_oscillator_quadrature(&osc, 1.0, 0.3, &thermal, &units, &quad);
        match (exact, quad3) {
            (Ok(e), Ok(q)) => rel_err(q.value / zb, e, 0.0),
            _ => f64::NAN,
        }
    });
    checks.push(Check {
        name: "bath_oscillator_quadrature",
        measured: max_of(osc_err),
        tolerance: 1e-8,
    });

    let large_n = [(0.01, 10), (0.25, 4), (0.1, 100)].map(|(r, n)| {
        let th = ThermalSpec::from_beta(4.0 * r).expect("valid");
        large_n_ratio(1.0, n, 1.0, &th, &units).map_or(f64::NAN, |l| {
            (l.rel_err - (1.0 - (1.0 - r).powf(n as f64 / 2.0)).abs()).abs()
        })
    });
    checks.push(Check {
        name: "large_n_rel_err",
        measured: max_of(large_n),
        tolerance: 1e-12,
    });

    let bath = BathSpec::new(
        vec![Oscillator::new(1.0, 1.0, 1.0).expect("valid")],
        1.0,
        0.0,
    )
    .expect("valid");
    let bath_residual = unified_bath_z(&bath, &thermal, &units).map_or(f64::NAN, |z| z.residual());

    let discrepancies = vec![
        Discrepancy {
            name: "energy_form",
            residual: max_of(printed_err),
            note: "E(x,t) with V(q) in place of V(x) vs -dS/dt, max relative",
        },
        Discrepancy {
            name: "dzdt_bracket",
            residual: max_of(bracket_err),
            note: "dZ/dt bracket (dP/dt + P dE/dt) vs exact, relative to Z per unit time",
        },
        Discrepancy {
            name: "bath_2pi",
            residual: bath_residual,
            note: "Z'_B with a 2 pi C factor per oscillator vs exact Z_B C, relative",
        },
    ];
    Report {
        checks,
        discrepancies,
    }
}

pub fn run(args: &VerifyArgs, ctx: &Context<'_>) -> CliResult<CommandResult> {
    let mut res = ctx.resolver();
    let flag = args.profile.map(|p| match p {
        Profile::Default => "default",
        Profile::Quick => "quick",
    });
    let profile = match res.string("profile", flag, "default").as_str() {
        "default" => Profile::Default,
        "quick" => Profile::Quick,
        other => return Err(CliError::usage(format!("unknown profile `{other}`"))),
    };
    let report = run_checks(profile, args.perturb_q_hbar);

    let mut checks = Table::new(
        "checks",
        &[
            ("name", "-"),
            ("measured", "1"),
            ("tolerance", "1"),
            ("status", "-"),
        ],
    );
    for c in &report.checks {
        checks.push(vec![
            c.name.into(),
            c.measured.into(),
            c.tolerance.into(),
            if c.passed() { "pass" } else { "fail" }.into(),
        ]);
    }
    let mut disc = Table::new(
        "discrepancies",
        &[("name", "-"), ("residual", "1"), ("note", "-")],
    );
    for d in &report.discrepancies {
        disc.push(vec![d.name.into(), d.residual.into(), d.note.into()]);
    }
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name)
        .collect();
    let mut result = CommandResult::ok(
        "verify",
        res,
        Output {
            tables: vec![checks, disc],
            series: None,
        },
    );
    if !failed.is_empty() {
        result.failure = Some(format!("oracle checks failed: {}", failed.join(", ")));
    }
    Ok(result)
}
