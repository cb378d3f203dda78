//! Closed-form Gaussian wavepackets for the harmonic oscillator and the free
//! particle, and the Bohmian quantities read off their polar decomposition.
//!
//! The wavefunction is
//!
//! ```text
//! psi(x, t) = A exp[-alpha(t) u^2 + i p(t) u / hbar + i gamma(t) / hbar],   u = x - q(t)
//! ```
//!
//! with `A = (2 Re alpha / pi)^{1/4}` fixed by normalization, so that
//! `R = |psi|` and `S = -hbar Im alpha u^2 + p u + gamma` are explicit. Every
//! pointwise quantity (quantum potential, energy) is a quadratic polynomial in
//! `u`, exposed as [`CenteredQuadratic`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::numeric::{quadrature, special};
use crate::params::{potential_value, Grid1D, Potential, QuadratureConfig, SystemParams};
use crate::{Error, Result};

/// Initial Gaussian `P(x, 0) = N(x0, sigma^2)` carrying mean momentum `p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketInit {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
}

impl WavepacketInit {
    pub fn new(x0: f64, p0: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", "must be finite and > 0"));
        }
        if !(x0.is_finite() && p0.is_finite()) {
            return Err(Error::invalid("initial condition", "must be finite"));
        }
        Ok(Self { x0, p0, sigma })
    }

    /// Packet whose width stays constant under harmonic evolution,
    /// `sigma^2 = hbar / (2 m omega)`.
    pub fn coherent(params: &SystemParams, x0: f64, p0: f64) -> Result<Self> {
        let omega = params.omega().ok_or(Error::invalid(
            "potential",
            "coherent packets need a harmonic potential",
        ))?;
        Self::new(x0, p0, (params.hbar() / (2.0 * params.mass * omega)).sqrt())
    }

    /// `alpha_0 = 1 / (4 sigma^2)`.
    pub fn alpha0(&self) -> f64 {
        0.25 / (self.sigma * self.sigma)
    }
}

/// `c0 + c1 u + c2 u^2` in the displacement `u = x - q(t)` from the packet center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredQuadratic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CenteredQuadratic {
    pub fn eval(&self, u: f64) -> f64 {
        self.c0 + u * (self.c1 + u * self.c2)
    }
}

/// Wavepacket at time `t`; see the module docs for the parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketState {
    pub alpha: Complex64,
    pub q: f64,
    pub p: f64,
    /// Real part of `gamma(t)`: the global phase (classical action minus the
    /// Gouy term). The imaginary part only rescales the amplitude and is
    /// absorbed into `A`.
    pub gamma: f64,
    pub t: f64,
    pub init: WavepacketInit,
    pub params: SystemParams,
}

/// Closed-form state at time `t`.
pub fn evolve(params: &SystemParams, init: &WavepacketInit, t: f64) -> WavepacketState {
    let m = params.mass;
    let hbar = params.hbar();
    let alpha0 = init.alpha0();
    let WavepacketInit { x0, p0, .. } = *init;

    let (alpha, q, p, gamma) = match params.potential {
        Potential::Harmonic { omega } => {
            let a = m * omega / (2.0 * hbar);
            let (s, c) = (omega * t).sin_cos();
            let alpha =
                Complex64::new(a * alpha0 * c, a * a * s) / Complex64::new(a * c, alpha0 * s);
            let q = x0 * c + p0 / (m * omega) * s;
            let p = p0 * c - m * omega * x0 * s;
            let (s2, c2) = (2.0 * omega * t).sin_cos();
            let action = (p0 * p0 / (2.0 * m) - 0.5 * m * omega * omega * x0 * x0) * s2
                / (2.0 * omega)
                + 0.5 * p0 * x0 * c2;
            let gouy = unwrapped_arg(omega * t, alpha0 / a);
            (alpha, q, p, action - 0.5 * hbar * gouy)
        }
        Potential::Free => {
            let tau = 2.0 * hbar * alpha0 * t / m;
            let alpha = Complex64::new(alpha0, 0.0) / Complex64::new(1.0, tau);
            let q = x0 + p0 * t / m;
            // Classical action p0^2 t / 2m (note the sign) minus the Gouy phase.
            let gamma = p0 * p0 * t / (2.0 * m) - 0.5 * hbar * tau.atan();
            (alpha, q, p0, gamma)
        }
    };

    WavepacketState {
        alpha,
        q,
        p,
        gamma,
        t,
        init: *init,
        params: *params,
    }
}

/// `arg(cos theta + i k sin theta)` for `k > 0`, continued through every
/// branch cut so that it is smooth and increasing in `theta`. It agrees with
/// `theta` at multiples of `pi/2` and never departs from it by `pi/2` or more.
fn unwrapped_arg(theta: f64, k: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let principal = (k * s).atan2(c);
    let turns = ((theta - principal) / (2.0 * PI)).round();
    principal + 2.0 * PI * turns
}

impl WavepacketState {
    pub fn at(params: &SystemParams, init: &WavepacketInit, t: f64) -> Self {
        evolve(params, init, t)
    }

    fn mass(&self) -> f64 {
        self.params.mass
    }

    fn hbar(&self) -> f64 {
        self.params.hbar()
    }

    /// Standard deviation of `P(., t)`: `1 / (2 sqrt(Re alpha))`.
    pub fn width(&self) -> f64 {
        0.5 / self.alpha.re.sqrt()
    }

    /// `R(x, t) = |psi|`.
    pub fn amplitude(&self, x: f64) -> f64 {
        let u = x - self.q;
        (2.0 * self.alpha.re / PI).powf(0.25) * (-self.alpha.re * u * u).exp()
    }

    /// `P(x, t) = |psi|^2`.
    pub fn density(&self, x: f64) -> f64 {
        let u = x - self.q;
        (2.0 * self.alpha.re / PI).sqrt() * (-2.0 * self.alpha.re * u * u).exp()
    }

    /// Phase `S(x, t)` of `psi = R exp(i S / hbar)`.
    pub fn phase(&self, x: f64) -> f64 {
        let u = x - self.q;
        -self.hbar() * self.alpha.im * u * u + self.p * u + self.gamma
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude(x), self.phase(x) / self.hbar())
    }

    /// `dS/dx = -2 hbar Im alpha (x - q) + p`.
    pub fn phase_gradient(&self, x: f64) -> f64 {
        -2.0 * self.hbar() * self.alpha.im * (x - self.q) + self.p
    }

    /// `Q = -(hbar^2 / 2mR) d^2R/dx^2` as a polynomial in `x - q`.
    pub fn quantum_potential_coefficients(&self) -> CenteredQuadratic {
        let k = self.hbar() * self.hbar() / self.mass();
        let re = self.alpha.re;
        CenteredQuadratic {
            c0: k * re,
            c1: 0.0,
            c2: -2.0 * k * re * re,
        }
    }

    pub fn quantum_potential(&self, x: f64) -> f64 {
        self.quantum_potential_coefficients().eval(x - self.q)
    }

    /// Bohmian energy `E = -dS/dt = (dS/dx)^2/2m + V + Q` as a polynomial in `x - q`.
    pub fn energy_coefficients(&self) -> CenteredQuadratic {
        let m = self.mass();
        let hbar = self.hbar();
        let stiffness = self.params.stiffness();
        let (re, im) = (self.alpha.re, self.alpha.im);
        CenteredQuadratic {
            c0: self.p * self.p / (2.0 * m)
                + potential_value(&self.params, self.q)
                + hbar * hbar * re / m,
            c1: -2.0 * hbar * im * self.p / m + stiffness * self.q,
            c2: 2.0 * hbar * hbar * (im * im - re * re) / m + 0.5 * stiffness,
        }
    }

    /// Pointwise energy `E(x, t; x0, p0)`.
    pub fn energy(&self, x: f64) -> f64 {
        self.energy_coefficients().eval(x - self.q)
    }

    /// The energy in the form `p(t)^2/2m + V(q(t)) + Q(x, t)` with the
    /// textbook closed-form `Q` (harmonic) or the shortened free-particle
    /// expression. Kept only to measure how far that form is from
    /// `-dS/dt`; use [`Self::energy`] for physics.
    pub fn energy_printed(&self, x: f64) -> f64 {
        let m = self.mass();
        let hbar = self.hbar();
        let alpha0 = self.init.alpha0();
        let u = x - self.q;
        match self.params.potential {
            Potential::Harmonic { omega } => {
                let a = m * omega / (2.0 * hbar);
                let (s, c) = (omega * self.t).sin_cos();
                let den = alpha0 * alpha0 * s * s + a * a * c * c;
                let diff = a * a - alpha0 * alpha0;
                let q2 = -(2.0 * hbar * hbar * a * a / m)
                    * (a * a * alpha0 * alpha0 - diff * diff * s * s * c * c)
                    / (den * den);
                let q1 = -(2.0 * a * hbar * self.p / m) * diff * s * c / den;
                let q0 = (hbar * hbar / m) * a * a * alpha0 / den;
                self.p * self.p / (2.0 * m)
                    + 0.5 * m * omega * omega * self.q * self.q
                    + q2 * u * u
                    + q1 * u
                    + q0
            }
            Potential::Free => {
                let tau = 2.0 * hbar * alpha0 * self.t / m;
                let d = 1.0 + tau * tau;
                let n = 1.0 - tau * tau;
                self.p * self.p / (2.0 * m)
                    - (2.0 * hbar * hbar / m) * alpha0 * alpha0 * n * n / (d * d) * u * u
                    + (2.0 * hbar * alpha0 * self.p / m) * tau / d * u
                    + (hbar * hbar / m) * alpha0 / d
            }
        }
    }

    /// `d alpha / dt = -2 i hbar alpha^2 / m + i m omega^2 / (2 hbar)`.
    pub fn alpha_rate(&self) -> Complex64 {
        let hbar = self.hbar();
        let i = Complex64::new(0.0, 1.0);
        -i * (2.0 * hbar / self.mass()) * self.alpha * self.alpha
            + i * (self.params.stiffness() / (2.0 * hbar))
    }

    /// `ln P(x, t)`.
    pub fn log_density(&self, x: f64) -> f64 {
        let u = x - self.q;
        0.5 * (2.0 * self.alpha.re / PI).ln() - 2.0 * self.alpha.re * u * u
    }

    /// `d ln P / dt` at fixed `x`.
    pub fn log_density_time_derivative(&self, x: f64) -> f64 {
        let u = x - self.q;
        let re = self.alpha.re;
        let re_dot = self.alpha_rate().re;
        let q_dot = self.p / self.mass();
        re_dot / (2.0 * re) - 2.0 * re_dot * u * u + 4.0 * re * u * q_dot
    }

    /// `dP/dt` at fixed `x`.
    pub fn density_time_derivative(&self, x: f64) -> f64 {
        self.density(x) * self.log_density_time_derivative(x)
    }

    /// `dE/dt` at fixed `x`.
    pub fn energy_time_derivative(&self, x: f64) -> f64 {
        let m = self.mass();
        let hbar = self.hbar();
        let stiffness = self.params.stiffness();
        let u = x - self.q;
        let (re, im) = (self.alpha.re, self.alpha.im);
        let rate = self.alpha_rate();
        let q_dot = self.p / m;
        let p_dot = -stiffness * self.q;
        let coef = self.energy_coefficients();

        let c0_dot = hbar * hbar * rate.re / m;
        let c1_dot = -2.0 * hbar * (rate.im * self.p + im * p_dot) / m + stiffness * q_dot;
        let c2_dot = 4.0 * hbar * hbar * (im * rate.im - re * rate.re) / m;
        c0_dot + c1_dot * u + c2_dot * u * u - q_dot * (coef.c1 + 2.0 * coef.c2 * u)
    }

    /// Integration window `q +- window_sigmas * width`.
    pub fn window(&self, quad: &QuadratureConfig) -> (f64, f64) {
        let half = quad.window_sigmas * self.width();
        (self.q - half, self.q + half)
    }

    /// `<H> = integral P E dx` by adaptive quadrature.
    pub fn mean_energy(&self, quad: &QuadratureConfig) -> Result<f64> {
        let (lo, hi) = self.window(quad);
        let coef = self.energy_coefficients();
        quadrature::integrate(|x| self.density(x) * coef.eval(x - self.q), lo, hi, quad)
            .map(|e| e.value)
    }

    /// Overlaps `c_k = integral phi_k(x) psi(x, t) dx` with the oscillator
    /// eigenfunctions `k = 0..=k_max`, by the trapezoidal rule on `grid`.
    pub fn spectral_project(&self, k_max: usize, grid: &Grid1D) -> Result<SpectralDecomposition> {
        let omega = self.params.omega().ok_or(Error::invalid(
            "potential",
            "spectral projection needs a harmonic potential",
        ))?;
        let m = self.mass();
        let hbar = self.hbar();
        let inv_len = (m * omega / hbar).sqrt();
        let reach_packet = 10.0 * self.width();
        let reach_basis = ((2 * k_max + 1) as f64).sqrt() / inv_len;
        if grid.lo > (self.q - reach_packet).min(-reach_basis)
            || grid.hi < (self.q + reach_packet).max(reach_basis)
        {
            return Err(Error::invalid(
                "grid",
                "must cover 10 packet widths and the basis turning points",
            ));
        }

        let h = grid.spacing();
        let scale = inv_len.sqrt();
        let mut coefficients = vec![Complex64::new(0.0, 0.0); k_max + 1];
        let mut basis = vec![0.0; k_max + 1];
        for i in 0..grid.n {
            let x = grid.point(i);
            let w = if i == 0 || i + 1 == grid.n {
                0.5 * h
            } else {
                h
            };
            special::hermite_functions(x * inv_len, &mut basis);
            let psi = self.psi(x) * (w * scale);
            for (c, phi) in coefficients.iter_mut().zip(&basis) {
                *c += psi * *phi;
            }
        }
        let energies = (0..=k_max)
            .map(|k| hbar * omega * (k as f64 + 0.5))
            .collect();
        let decomposition = SpectralDecomposition {
            coefficients,
            energies,
        };
        let captured = decomposition.norm();
        if captured < 1.0 - 1e-8 {
            return Err(Error::TruncationInsufficient {
                captured_norm: captured,
            });
        }
        Ok(decomposition)
    }

    /// A grid adequate for [`Self::spectral_project`] with `k_max` states.
    pub fn spectral_grid(&self, k_max: usize) -> Result<Grid1D> {
        let omega = self.params.omega().ok_or(Error::invalid(
            "potential",
            "spectral projection needs a harmonic potential",
        ))?;
        let len = (self.hbar() / (self.mass() * omega)).sqrt();
        let reach_basis = (((2 * k_max + 1) as f64).sqrt() + 8.0) * len;
        let reach_packet = 14.0 * self.width();
        let lo = (self.q - reach_packet).min(-reach_basis);
        let hi = (self.q + reach_packet).max(reach_basis);
        // Resolve both the packet (width, local wavelength) and the top basis state.
        let k_local = self
            .phase_gradient(lo)
            .abs()
            .max(self.phase_gradient(hi).abs())
            / self.hbar();
        let basis_wavelength = len / ((2 * k_max + 1) as f64).sqrt();
        let mut h = (self.width() / 12.0).min(basis_wavelength / 12.0);
        if k_local > 0.0 {
            h = h.min(0.5 / k_local);
        }
        let n = ((hi - lo) / h).ceil() as usize + 1;
        Grid1D::new(lo, hi, n.max(3))
    }
}

/// Expansion `psi = sum_k c_k phi_k` in oscillator eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub coefficients: Vec<Complex64>,
    pub energies: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn truncation(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `sum_k |c_k|^2`.
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum_k |c_k|^2 E_k`.
    pub fn mean_energy(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.energies)
            .map(|(c, e)| c.norm_sqr() * e)
            .sum()
    }
}
