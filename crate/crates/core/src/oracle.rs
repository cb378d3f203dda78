//! Independent cross-checks for the closed forms.
//!
//! Nothing here reads the closed-form coefficients it is meant to verify:
//! the quantum potential is rebuilt from finite differences of `R = sqrt(P)`,
//! the energy from time differences of the phase `S`, and Gaussian factors
//! from adaptive quadrature of the raw integrands.

use crate::numeric::{diff, quadrature};
use crate::params::{potential_value, Potential, QuadratureConfig, SystemParams, ThermalSpec};
use crate::wavepacket::{evolve, WavepacketInit, WavepacketState};
use crate::Result;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

/// Spatial step for second differences, relative to the packet width.
pub const SPACE_STEP_REL: f64 = 1e-3;
/// Time step for phase differences, relative to the natural time scale.
pub const TIME_STEP_REL: f64 = 1e-4;

/// `|a - b| / max(|b|, scale)`.
pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / b.abs().max(scale.abs())
}

/// `1/omega` for the oscillator, the spreading time `2 m sigma^2 / hbar` for
/// the free particle.
pub fn time_scale(params: &SystemParams, init: &WavepacketInit) -> f64 {
    match params.potential {
        Potential::Harmonic { omega } => 1.0 / omega,
        Potential::Free => 2.0 * params.mass * init.sigma * init.sigma / params.hbar(),
    }
}

/// `-(hbar^2 / 2 m R) R''` with `R''` from 5-point differences plus Richardson.
pub fn quantum_potential_fd(state: &WavepacketState, x: f64) -> f64 {
    let h = SPACE_STEP_REL * state.width();
    let r = state.amplitude(x);
    let r2 = diff::second_derivative(|y| state.amplitude(y), x, h);
    let hbar = state.params.hbar();
    -hbar * hbar / (2.0 * state.params.mass * r) * r2
}

/// `-dS/dt` from central time differences of the total phase.
pub fn energy_fd(params: &SystemParams, init: &WavepacketInit, t: f64, x: f64) -> f64 {
    let h = TIME_STEP_REL * time_scale(params, init);
    -diff::derivative(|s| evolve(params, init, s).phase(x), t, h)
}

/// Residual of the quantum Hamilton-Jacobi equation
/// `-dS/dt - [(dS/dx)^2/2m + V + Q]`, every term by finite differences.
pub fn hamilton_jacobi_residual(
    params: &SystemParams,
    init: &WavepacketInit,
    t: f64,
    x: f64,
) -> f64 {
    let state = evolve(params, init, t);
    let hx = SPACE_STEP_REL * state.width();
    let ds_dx = diff::derivative(|y| state.phase(y), x, hx);
    energy_fd(params, init, t, x)
        - (ds_dx * ds_dx / (2.0 * params.mass)
            + potential_value(params, x)
            + quantum_potential_fd(&state, x))
}

/// `integral P_G(x) exp[beta (hbar^2 (x-x0)^2 / 8 m sigma^4 - hbar^2 / 4 m sigma^2)] dx`
/// by adaptive quadrature.
///
/// The window is widened by `1/sqrt(1 - ratio)` to follow the broadened
/// integrand near the divergence threshold.
pub fn gaussian_correction_quadrature(
    mass: f64,
    sigma: f64,
    hbar: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let beta = thermal.beta;
    let ratio = beta * hbar * hbar / (4.0 * mass * sigma * sigma);
    if ratio >= 1.0 {
        return Err(crate::Error::DivergentIntegral { ratio });
    }
    let norm = 1.0 / ((2.0 * core::f64::consts::PI).sqrt() * sigma);
    let integrand = |u: f64| {
        let quantum = hbar * hbar * u * u / (8.0 * mass * sigma.powi(4))
            - hbar * hbar / (4.0 * mass * sigma * sigma);
        norm * (-u * u / (2.0 * sigma * sigma) + beta * quantum).exp()
    };
    let half = quad.window_sigmas * sigma / (1.0 - ratio).sqrt();
    quadrature::integrate(integrand, -half, half, quad).map(|e| e.value)
}
