//! Partition functions: classical phase-space, quantum eigenvalue sum, the
//! unified Gaussian form, and the marginal partition function at a fixed
//! trajectory initial condition.

use alloc::vec::Vec;
use core::f64::consts::PI;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::quadrature;
use crate::params::{
    potential_value, Constants, Potential, QuadratureConfig, SystemParams, ThermalSpec,
};
use crate::wavepacket::{evolve, WavepacketInit};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    EigenSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult {
    pub value: f64,
    pub est_error: f64,
    pub method: Method,
}

impl PartitionResult {
    fn closed(value: f64) -> Self {
        Self {
            value,
            est_error: 0.0,
            method: Method::ClosedForm,
        }
    }
}

/// Phase-space measure for integrals over `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// `dx dp`.
    Raw,
    /// `dx dp / (2 pi hbar)`.
    #[default]
    PhaseSpace,
}

impl Measure {
    fn factor(self, hbar: f64) -> f64 {
        match self {
            Measure::Raw => 1.0,
            Measure::PhaseSpace => 1.0 / (2.0 * PI * hbar),
        }
    }
}

fn harmonic_omega(params: &SystemParams) -> Result<f64> {
    match params.potential {
        Potential::Harmonic { omega } => Ok(omega),
        // The configuration integral of the free particle is unbounded.
        Potential::Free => Err(Error::DivergentIntegral {
            ratio: f64::INFINITY,
        }),
    }
}

/// Thermal standard deviations of `x` and `p` under `exp(-beta H)`.
fn thermal_spreads(params: &SystemParams, omega: f64, beta: f64) -> (f64, f64) {
    let m = params.mass;
    ((1.0 / (beta * m * omega * omega)).sqrt(), (m / beta).sqrt())
}

/// Classical `Z = integral exp(-beta H) dx dp / (2 pi hbar)` by nested quadrature.
pub fn classical_z(
    params: &SystemParams,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    let beta = thermal.beta;
    let m = params.mass;
    let (sx, sp) = thermal_spreads(params, omega, beta);
    let w = quad.window_sigmas;
    let est = quadrature::integrate_fallible(
        |x| {
            let vx = potential_value(params, x);
            quadrature::integrate(
                |p| (-beta * (p * p / (2.0 * m) + vx)).exp(),
                -w * sp,
                w * sp,
                quad,
            )
            .map(|e| e.value)
        },
        -w * sx,
        w * sx,
        quad,
    )?;
    let norm = Measure::PhaseSpace.factor(params.hbar());
    Ok(PartitionResult {
        value: est.value * norm,
        est_error: est.abs_error * norm,
        method: Method::Quadrature,
    })
}

/// `1 / (beta hbar omega)`.
pub fn classical_z_closed_form(
    params: &SystemParams,
    thermal: &ThermalSpec,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    Ok(PartitionResult::closed(
        1.0 / (thermal.beta * params.hbar() * omega),
    ))
}

/// `sum_k exp(-beta hbar omega (k + 1/2))`, truncated once the geometric tail
/// bound drops below `tail_tol` times the partial sum.
pub fn quantum_z(
    params: &SystemParams,
    thermal: &ThermalSpec,
    tail_tol: f64,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    if !(tail_tol > 0.0) {
        return Err(Error::invalid("tail_tol", "must be > 0"));
    }
    let x = thermal.beta * params.hbar() * omega;
    let ratio = (-x).exp();
    let tail_factor = 1.0 / -(-x).exp_m1();
    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut k = 0u64;
    loop {
        let term = (-x * (k as f64 + 0.5)).exp();
        // Neumaier summation keeps ~1e-16 relative accuracy over many terms.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        let tail = term * ratio * tail_factor;
        if tail <= tail_tol * (sum + compensation) || term == 0.0 {
            return Ok(PartitionResult {
                value: sum + compensation,
                est_error: tail,
                method: Method::EigenSum,
            });
        }
        k += 1;
    }
}

/// `1 / (2 sinh(beta hbar omega / 2))`.
pub fn quantum_z_closed_form(
    params: &SystemParams,
    thermal: &ThermalSpec,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    let x = thermal.beta * params.hbar() * omega;
    Ok(PartitionResult::closed(1.0 / (2.0 * (0.5 * x).sinh())))
}

/// `beta hbar^2 / (4 m sigma^2)`; the Gaussian form converges iff this is below one.
pub fn criterion_ratio(mass: f64, sigma: f64, hbar: f64, thermal: &ThermalSpec) -> f64 {
    thermal.beta * hbar * hbar / (4.0 * mass * sigma * sigma)
}

/// Factor produced by the `x` integral of the Gaussian-form partition function,
/// `C = (1 - r)^{-1/2} exp(-r)` with `r = beta hbar^2 / (4 m sigma^2)`.
pub fn gaussian_correction(
    mass: f64,
    sigma: f64,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> Result<f64> {
    let r = criterion_ratio(mass, sigma, constants.hbar, thermal);
    correction_from_ratio(r)
}

pub(crate) fn correction_from_ratio(r: f64) -> Result<f64> {
    if !(r < 1.0) {
        return Err(Error::DivergentIntegral { ratio: r });
    }
    Ok((-r - 0.5 * (-r).ln_1p()).exp())
}

/// Both evaluations of the Gaussian-form unified partition function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnifiedGaussianZ {
    pub closed_form: PartitionResult,
    pub quadrature: PartitionResult,
}

impl UnifiedGaussianZ {
    pub fn rel_diff(&self) -> f64 {
        (self.quadrature.value - self.closed_form.value).abs() / self.closed_form.value.abs()
    }
}

/// `Z_u = C * integral exp(-beta (p0^2/2m + V(x0))) dx0 dp0`, factorized.
pub fn unified_z_gaussian_closed_form(
    params: &SystemParams,
    sigma: f64,
    thermal: &ThermalSpec,
    measure: Measure,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    let c = gaussian_correction(params.mass, sigma, thermal, &params.constants)?;
    let beta = thermal.beta;
    let m = params.mass;
    let momentum = (2.0 * PI * m / beta).sqrt();
    let position = (2.0 * PI / (beta * m * omega * omega)).sqrt();
    Ok(PartitionResult::closed(
        momentum * position * c * measure.factor(params.hbar()),
    ))
}

/// The same triple integral over `(x0, p0, x)` by nested adaptive quadrature.
pub fn unified_z_gaussian_quadrature(
    params: &SystemParams,
    sigma: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
    measure: Measure,
) -> Result<PartitionResult> {
    let omega = harmonic_omega(params)?;
    let hbar = params.hbar();
    let m = params.mass;
    let beta = thermal.beta;
    let r = criterion_ratio(m, sigma, hbar, thermal);
    if !(r < 1.0) {
        return Err(Error::DivergentIntegral { ratio: r });
    }
    let (sx, sp) = thermal_spreads(params, omega, beta);
    let w = quad.window_sigmas;
    let half_x = w * sigma / (1.0 - r).sqrt();
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let q_const = hbar * hbar / (4.0 * m * sigma * sigma);
    let q_curv = hbar * hbar / (8.0 * m * sigma.powi(4));

    let est = quadrature::integrate_fallible(
        |x0| {
            let v0 = potential_value(params, x0);
            quadrature::integrate_fallible(
                |p0| {
                    let classical = p0 * p0 / (2.0 * m) + v0;
                    quadrature::integrate(
                        |x| {
                            let u = x - x0;
                            // One exponent: near the threshold P_G underflows
                            // where the quantum factor overflows.
                            norm * (-u * u / (2.0 * sigma * sigma)
                                - beta * (classical + q_const - q_curv * u * u))
                                .exp()
                        },
                        x0 - half_x,
                        x0 + half_x,
                        quad,
                    )
                    .map(|e| e.value)
                },
                -w * sp,
                w * sp,
                quad,
            )
            .map(|e| e.value)
        },
        -w * sx,
        w * sx,
        quad,
    )?;
    let f = measure.factor(hbar);
    Ok(PartitionResult {
        value: est.value * f,
        est_error: est.abs_error * f,
        method: Method::Quadrature,
    })
}

pub fn unified_z_gaussian(
    params: &SystemParams,
    sigma: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
    measure: Measure,
) -> Result<UnifiedGaussianZ> {
    Ok(UnifiedGaussianZ {
        closed_form: unified_z_gaussian_closed_form(params, sigma, thermal, measure)?,
        quadrature: unified_z_gaussian_quadrature(params, sigma, thermal, quad, measure)?,
    })
}

/// Integration domain for `P exp(-beta E)` at one instant, after checking that
/// the total quadratic exponent `-(2 Re alpha + beta c2) u^2` is confining.
///
/// Returns `(lo, hi)` centred on the peak of the integrand with
/// `window_sigmas` of its own standard deviation on each side.
fn marginal_window(
    params: &SystemParams,
    init: &WavepacketInit,
    thermal: &ThermalSpec,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<(crate::WavepacketState, f64, f64)> {
    let state = evolve(params, init, t);
    let coef = state.energy_coefficients();
    let beta = thermal.beta;
    let curvature = 2.0 * state.alpha.re + beta * coef.c2;
    if !(curvature > 0.0) {
        return Err(Error::DivergentIntegral {
            ratio: -beta * coef.c2 / (2.0 * state.alpha.re),
        });
    }
    let peak = state.q - beta * coef.c1 / (2.0 * curvature);
    let half = quad.window_sigmas / (2.0 * curvature).sqrt();
    Ok((state, peak - half, peak + half))
}

/// `Z_(x0,p0)(t) = integral P(x, t) exp(-beta E(x, t)) dx` for a single prepared packet.
pub fn marginal_z(
    params: &SystemParams,
    init: &WavepacketInit,
    thermal: &ThermalSpec,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let (state, lo, hi) = marginal_window(params, init, thermal, t, quad)?;
    let beta = thermal.beta;
    quadrature::integrate(|x| boltzmann_density(&state, beta, x), lo, hi, quad).map(|e| e.value)
}

/// `P exp(-beta E)` as a single exponential, so that a vanishing density and
/// a growing Boltzmann factor never meet as `0 * inf`.
fn boltzmann_density(state: &crate::WavepacketState, beta: f64, x: f64) -> f64 {
    (state.log_density(x) - beta * state.energy(x)).exp()
}

/// `dZ/dt` two ways: the exact derivative of the marginal integral
/// `integral (dP/dt - beta P dE/dt) exp(-beta E) dx`, and the shorthand
/// bracket `integral (dP/dt + P dE/dt) exp(-beta E) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalDerivative {
    pub exact: f64,
    pub printed: f64,
}

pub fn marginal_z_derivative(
    params: &SystemParams,
    init: &WavepacketInit,
    thermal: &ThermalSpec,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<MarginalDerivative> {
    let (state, lo, hi) = marginal_window(params, init, thermal, t, quad)?;
    let beta = thermal.beta;
    let weight = |x: f64| boltzmann_density(&state, beta, x);
    // The derivative can vanish through cancellation, so the error target is
    // anchored to Z per unit natural time rather than to the result itself.
    let z = quadrature::integrate(weight, lo, hi, quad)?.value;
    let quad = &QuadratureConfig {
        abs_tol: quad
            .abs_tol
            .max(quad.rel_tol * z / crate::oracle::time_scale(params, init)),
        ..*quad
    };
    let exact = quadrature::integrate(
        |x| {
            (state.log_density_time_derivative(x) - beta * state.energy_time_derivative(x))
                * weight(x)
        },
        lo,
        hi,
        quad,
    )?;
    let printed = quadrature::integrate(
        |x| (state.log_density_time_derivative(x) + state.energy_time_derivative(x)) * weight(x),
        lo,
        hi,
        quad,
    )?;
    Ok(MarginalDerivative {
        exact: exact.value,
        printed: printed.value,
    })
}

/// Sampled `Z_(x0,p0)(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub normalized: bool,
    pub sigma: f64,
    pub kbt: f64,
    pub x0: f64,
    pub p0: f64,
}

impl MarginalCurve {
    /// Divides by the first sample so that `values[0] == 1`.
    pub fn normalize(&mut self) {
        if self.normalized || self.values.is_empty() {
            return;
        }
        let first = self.values[0];
        for v in &mut self.values {
            *v /= first;
        }
        self.values[0] = 1.0;
        self.normalized = true;
    }

    /// Peak-to-trough range of the sampled values.
    pub fn amplitude(&self) -> f64 {
        let max = self
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// `samples` uniformly spaced times on `[0, t_max]`, endpoints included.
pub fn uniform_times(t_max: f64, samples: usize) -> Vec<f64> {
    if samples < 2 {
        return alloc::vec![0.0];
    }
    let dt = t_max / (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            if i + 1 == samples {
                t_max
            } else {
                i as f64 * dt
            }
        })
        .collect()
}

pub fn marginal_curve(
    params: &SystemParams,
    init: &WavepacketInit,
    thermal: &ThermalSpec,
    times: &[f64],
    quad: &QuadratureConfig,
    normalize: bool,
) -> Result<MarginalCurve> {
    let values = times
        .iter()
        .map(|&t| marginal_z(params, init, thermal, t, quad))
        .collect::<Result<Vec<_>>>()?;
    let mut curve = MarginalCurve {
        times: times.to_vec(),
        values,
        normalized: false,
        sigma: init.sigma,
        kbt: thermal.kbt(),
        x0: init.x0,
        p0: init.p0,
    };
    if normalize {
        curve.normalize();
    }
    Ok(curve)
}

/// Temperature criterion for the Gaussian form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    /// `hbar^2 / (4 m sigma^2 k_B)`.
    pub t_min: f64,
    /// `beta hbar^2 / (4 m sigma^2)`.
    pub dimensionless_ratio: f64,
    pub classical_ok: bool,
    /// `sqrt(2 pi hbar^2 beta / m)`.
    pub thermal_de_broglie: f64,
}

pub fn classicality_criterion(
    mass: f64,
    sigma: f64,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> CriterionReport {
    let hbar = constants.hbar;
    let ratio = criterion_ratio(mass, sigma, hbar, thermal);
    CriterionReport {
        t_min: hbar * hbar / (4.0 * mass * sigma * sigma * constants.boltzmann),
        dimensionless_ratio: ratio,
        classical_ok: ratio < 1.0,
        thermal_de_broglie: (2.0 * PI * hbar * hbar * thermal.beta / mass).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// `hbar omega / 2 + hbar omega / (exp(beta hbar omega) - 1)`.
    QuantumEigen,
    /// Classical thermal average plus the constant `hbar^2 / (4 m sigma^2)`.
    ClassicalLimit,
    /// `-d log Z_u / d beta` of the Gaussian-form partition function.
    UnifiedGaussian,
}

/// Relative `beta` step for the unified-mode log-derivative.
const BETA_STEP_REL: f64 = 1e-5;
/// Relative `beta` step for heat capacities.
const HEAT_STEP_REL: f64 = 1e-3;

/// `<H>_C = integral H exp(-beta H) / integral exp(-beta H)` by quadrature.
pub fn classical_mean_energy(
    params: &SystemParams,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let omega = harmonic_omega(params)?;
    let beta = thermal.beta;
    let m = params.mass;
    let (sx, sp) = thermal_spreads(params, omega, beta);
    let w = quad.window_sigmas;
    let moment = |power: i32| {
        quadrature::integrate_fallible(
            |x| {
                let vx = potential_value(params, x);
                quadrature::integrate(
                    |p| {
                        let h = p * p / (2.0 * m) + vx;
                        h.powi(power) * (-beta * h).exp()
                    },
                    -w * sp,
                    w * sp,
                    quad,
                )
                .map(|e| e.value)
            },
            -w * sx,
            w * sx,
            quad,
        )
        .map(|e| e.value)
    };
    Ok(moment(1)? / moment(0)?)
}

pub fn average_energy(
    mode: EnergyMode,
    params: &SystemParams,
    thermal: &ThermalSpec,
    sigma: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let hbar = params.hbar();
    match mode {
        EnergyMode::QuantumEigen => {
            let omega = harmonic_omega(params)?;
            let e = hbar * omega;
            Ok(0.5 * e + e / (thermal.beta * e).exp_m1())
        }
        EnergyMode::ClassicalLimit => Ok(classical_mean_energy(params, thermal, quad)?
            + hbar * hbar / (4.0 * params.mass * sigma * sigma)),
        EnergyMode::UnifiedGaussian => {
            let log_z = |beta: f64| -> Result<f64> {
                let th = ThermalSpec::from_beta(beta)?;
                Ok(
                    unified_z_gaussian_closed_form(params, sigma, &th, Measure::PhaseSpace)?
                        .value
                        .ln(),
                )
            };
            let beta = thermal.beta;
            let central =
                |h: f64| -> Result<f64> { Ok((log_z(beta + h)? - log_z(beta - h)?) / (2.0 * h)) };
            let h = BETA_STEP_REL * beta;
            let coarse = central(h)?;
            let fine = central(0.5 * h)?;
            Ok(-(4.0 * fine - coarse) / 3.0)
        }
    }
}

/// `d<E>/dT` by central differences in `beta` with one Richardson step.
pub fn heat_capacity(
    mode: EnergyMode,
    params: &SystemParams,
    thermal: &ThermalSpec,
    sigma: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let beta = thermal.beta;
    let energy = |b: f64| average_energy(mode, params, &ThermalSpec::from_beta(b)?, sigma, quad);
    let central =
        |h: f64| -> Result<f64> { Ok((energy(beta + h)? - energy(beta - h)?) / (2.0 * h)) };
    let h = HEAT_STEP_REL * beta;
    let de_dbeta = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
    // dT = -dbeta / (k_B beta^2)
    Ok(-params.constants.boltzmann * beta * beta * de_dbeta)
}
