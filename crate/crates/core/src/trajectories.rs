//! Bohmian trajectories of Gaussian packets in first-order guidance form
//! `dx/dt = (dS/dx) / m`.

use alloc::vec::Vec;

use crate::numeric::{diff, ode, special};
use crate::params::SystemParams;
use crate::wavepacket::{evolve, WavepacketInit, WavepacketState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepper {
    Rk4Fixed { dt: f64 },
    Rk45Adaptive { rel_tol: f64, abs_tol: f64 },
}

impl Default for Stepper {
    fn default() -> Self {
        Stepper::Rk45Adaptive {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub stepper: Stepper,
    pub t_max: f64,
    pub record_every: usize,
}

impl TrajectoryConfig {
    pub fn new(stepper: Stepper, t_max: f64, record_every: usize) -> Result<Self> {
        let cfg = Self {
            stepper,
            t_max,
            record_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.stepper {
            Stepper::Rk4Fixed { dt } if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::invalid("dt", "must be > 0"));
            }
            Stepper::Rk45Adaptive { rel_tol, abs_tol } if !(rel_tol > 0.0 && abs_tol > 0.0) => {
                return Err(Error::invalid("tolerance", "must be > 0"));
            }
            _ => {}
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid("t_max", "must be > 0"));
        }
        Ok(())
    }

    /// Adaptive default stepper over `[0, t_max]`, every step recorded.
    pub fn adaptive(t_max: f64) -> Result<Self> {
        Self::new(Stepper::default(), t_max, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl TrajectoryPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_position(&self) -> Option<f64> {
        self.positions.last().copied()
    }
}

pub fn bohmian_velocity(state: &WavepacketState, x: f64) -> f64 {
    state.phase_gradient(x) / state.params.mass
}

/// `-dQ/dx = 4 hbar^2 (Re alpha)^2 (x - q) / m`.
pub fn quantum_force(state: &WavepacketState, x: f64) -> f64 {
    let coef = state.quantum_potential_coefficients();
    -(coef.c1 + 2.0 * coef.c2 * (x - state.q))
}

pub fn integrate(
    params: &SystemParams,
    init: &WavepacketInit,
    x_start: f64,
    cfg: &TrajectoryConfig,
) -> Result<TrajectoryPath> {
    if !x_start.is_finite() {
        return Err(Error::invalid("x_start", "must be finite"));
    }
    cfg.validate()?;
    let field = |t: f64, x: f64| bohmian_velocity(&evolve(params, init, t), x);
    let sol = match cfg.stepper {
        Stepper::Rk4Fixed { dt } => ode::rk4(field, 0.0, x_start, cfg.t_max, dt, cfg.record_every)?,
        Stepper::Rk45Adaptive { rel_tol, abs_tol } => ode::dopri45(
            field,
            0.0,
            x_start,
            cfg.t_max,
            rel_tol,
            abs_tol,
            cfg.record_every,
        )?,
    };
    let velocities = sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&t, &x)| field(t, x))
        .collect();
    Ok(TrajectoryPath {
        times: sol.times,
        positions: sol.states,
        velocities,
    })
}

/// Exact trajectory of the Gaussian flow: the offset from the centre scales
/// with the packet width, `x(t) = q(t) + (x_start - x0) w(t) / w(0)`.
pub fn scaling_solution(params: &SystemParams, init: &WavepacketInit, x_start: f64, t: f64) -> f64 {
    let s = evolve(params, init, t);
    s.q + (x_start - init.x0) * s.width() / init.sigma
}

/// Largest `|achieved - c|` over the quantiles after transporting each
/// `c`-quantile of `P(., 0)` along its trajectory to time `t`.
pub fn equivariance_check(
    params: &SystemParams,
    init: &WavepacketInit,
    quantiles: &[f64],
    t: f64,
    stepper: Stepper,
) -> Result<f64> {
    let state = evolve(params, init, t);
    let mut worst: f64 = 0.0;
    for &c in quantiles {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid("quantile", "must lie in (0, 1)"));
        }
        let x_start = init.x0 + init.sigma * special::normal_quantile(c);
        let x_end = if t == 0.0 {
            x_start
        } else {
            let cfg = TrajectoryConfig::new(stepper, t, usize::MAX)?;
            integrate(params, init, x_start, &cfg)?
                .last_position()
                .expect("non-empty path")
        };
        let achieved = special::normal_cdf((x_end - state.q) / state.width());
        worst = worst.max((achieved - c).abs());
    }
    Ok(worst)
}

/// `d^2x/dt^2` at `t = 0` along the integrated trajectory starting at
/// `x_start`, from forward differences of the path velocity with one
/// Richardson step.
pub fn initial_acceleration(
    params: &SystemParams,
    init: &WavepacketInit,
    x_start: f64,
    h: f64,
    stepper: Stepper,
) -> Result<f64> {
    let v0 = bohmian_velocity(&evolve(params, init, 0.0), x_start);
    let slope = |dt: f64| -> Result<f64> {
        let path = integrate(
            params,
            init,
            x_start,
            &TrajectoryConfig::new(stepper, dt, usize::MAX)?,
        )?;
        let v = *path.velocities.last().expect("non-empty path");
        Ok((v - v0) / dt)
    };
    let coarse = slope(h)?;
    let fine = slope(0.5 * h)?;
    Ok(2.0 * fine - coarse)
}

/// `-dQ/dx` by central differences, for cross-checking `quantum_force`.
pub fn quantum_force_fd(state: &WavepacketState, x: f64) -> f64 {
    -diff::derivative(|y| state.quantum_potential(y), x, 1e-3 * state.width())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{natural_units, Constants};

    fn free() -> SystemParams {
        SystemParams::free(1.0, natural_units()).unwrap()
    }

    fn ho() -> SystemParams {
        SystemParams::harmonic(1.0, 1.0, natural_units()).unwrap()
    }

    #[test]
    fn velocity_at_centre_is_classical() {
        let init = WavepacketInit::new(0.5, 1.5, 0.7).unwrap();
        for params in [free(), ho()] {
            let s = evolve(&params, &init, 1.1);
            assert!((bohmian_velocity(&s, s.q) - s.p / params.mass).abs() < 1e-14);
        }
        let s0 = evolve(&free(), &init, 0.0);
        assert_eq!(bohmian_velocity(&s0, 3.0), 1.5);
    }

    #[test]
    fn free_velocity_follows_width() {
        let sigma = 1.0;
        let init = WavepacketInit::new(0.0, 0.4, sigma).unwrap();
        // hbar t / (2 m sigma^2) = 1
        let t = 2.0;
        let s = evolve(&free(), &init, t);
        let width = |t: f64| sigma * (1.0 + (t / 2.0) * (t / 2.0)).sqrt();
        let ds = diff::derivative(width, t, 1e-3);
        let v = bohmian_velocity(&s, s.q + width(t));
        assert!((v - (0.4 + ds)).abs() < 1e-10);
    }

    #[test]
    fn paths_follow_scaling_solution() {
        let cfg = TrajectoryConfig::adaptive(5.0).unwrap();
        for params in [free(), ho()] {
            let init = WavepacketInit::new(1.0, -0.3, 0.6).unwrap();
            for c in [-2.0, 0.0, 0.7, 1.5] {
                let x_start = init.x0 + c * init.sigma;
                let path = integrate(&params, &init, x_start, &cfg).unwrap();
                assert_eq!(*path.times.last().unwrap(), 5.0);
                for (t, x) in path.times.iter().zip(&path.positions) {
                    let exact = scaling_solution(&params, &init, x_start, *t);
                    assert!((x - exact).abs() < 1e-6, "t={t}");
                }
            }
        }
    }

    #[test]
    fn trajectories_do_not_cross() {
        let init = WavepacketInit::new(0.0, 0.8, 0.3).unwrap();
        let cfg = TrajectoryConfig::new(Stepper::Rk4Fixed { dt: 1e-2 }, 5.0, 10).unwrap();
        let paths: Vec<_> = (0..50)
            .map(|i| integrate(&ho(), &init, -1.0 + 0.04 * i as f64, &cfg).unwrap())
            .collect();
        for pair in paths.windows(2) {
            for (a, b) in pair[0].positions.iter().zip(&pair[1].positions) {
                assert!(a < b);
            }
        }
    }

    #[test]
    fn rk4_global_error_is_fourth_order() {
        let init = WavepacketInit::new(0.0, 1.0, 0.3).unwrap();
        let x_start = init.x0 + init.sigma;
        let exact = scaling_solution(&free(), &init, x_start, 5.0);
        let err = |dt: f64| {
            let cfg = TrajectoryConfig::new(Stepper::Rk4Fixed { dt }, 5.0, usize::MAX).unwrap();
            (integrate(&free(), &init, x_start, &cfg)
                .unwrap()
                .last_position()
                .unwrap()
                - exact)
                .abs()
        };
        let e = [err(1e-2), err(5e-3), err(2.5e-3)];
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn quantum_force_reference() {
        let init = WavepacketInit::new(0.3, 0.0, 0.5).unwrap();
        let s = evolve(&ho(), &init, 0.0);
        assert_eq!(quantum_force(&s, s.q), 0.0);
        let x = 0.9;
        let expect = (x - 0.3) / (4.0 * 0.5f64.powi(4));
        assert!((quantum_force(&s, x) - expect).abs() < 1e-12);
        let s = evolve(&ho(), &init, 1.7);
        for x in [-0.5, 0.1, 0.8] {
            let fd = quantum_force_fd(&s, x);
            assert!((quantum_force(&s, x) - fd).abs() < 1e-8 * fd.abs());
        }
    }

    #[test]
    fn equivariance() {
        let qs: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
        let init = WavepacketInit::new(0.5, 0.2, 0.4).unwrap();
        let st = Stepper::default();
        assert!(equivariance_check(&free(), &init, &[0.5], 2.0, st).unwrap() < 1e-8);
        assert!(equivariance_check(&free(), &init, &qs, 3.0, st).unwrap() < 1e-6);
        assert!(equivariance_check(&ho(), &init, &qs, 2.2, st).unwrap() < 1e-6);
        assert!(equivariance_check(&ho(), &init, &[1.0], 2.2, st).is_err());
    }

    #[test]
    fn acceleration_deviation_halves_with_sigma() {
        let k = 1.0;
        let c = 1.0;
        let mut dev = Vec::new();
        for sigma in [0.5f64, 0.25, 0.125] {
            let params =
                SystemParams::harmonic(k / (sigma * sigma), 1.0, Constants::default()).unwrap();
            let init = WavepacketInit::new(1.0, 0.0, sigma).unwrap();
            let x_start = init.x0 + c * sigma;
            let st = Stepper::Rk45Adaptive {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
            };
            let a = initial_acceleration(&params, &init, x_start, 1e-3, st).unwrap();
            let d = a + x_start;
            assert!(
                (d - c * sigma / (4.0 * k * k)).abs() < 0.01 * d,
                "sigma={sigma} d={d}"
            );
            dev.push(d);
        }
        for w in dev.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 0.2);
        }
    }
}
