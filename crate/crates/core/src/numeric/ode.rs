//! Explicit Runge-Kutta integrators for scalar first-order ODEs `y' = f(t, y)`.

use alloc::vec::Vec;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Sampled solution; `times` is strictly increasing and always ends at `t_end`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub steps: usize,
}

impl OdeSolution {
    fn push(&mut self, t: f64, y: f64) {
        self.times.push(t);
        self.states.push(y);
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.states.last()?))
    }
}

/// Classical fourth-order Runge-Kutta with uniform steps.
///
/// The step is shrunk to `(t_end - t0) / ceil((t_end - t0) / dt)` so that the
/// last step lands on `t_end`. Every `record_every`-th step is stored, plus
/// the initial and final points.
pub fn rk4<F>(
    mut f: F,
    t0: f64,
    y0: f64,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<OdeSolution>
where
    F: FnMut(f64, f64) -> f64,
{
    if !(dt > 0.0) || !(t_end > t0) {
        return Err(Error::invalid("rk4", "requires dt > 0 and t_end > t0"));
    }
    let span = t_end - t0;
    let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let every = record_every.max(1);

    let mut sol = OdeSolution::default();
    sol.push(t0, y0);
    let mut y = y0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let step = i + 1;
        if step == n {
            sol.push(t_end, y);
        } else if step % every == 0 {
            sol.push(t0 + step as f64 * h, y);
        }
    }
    sol.steps = n;
    Ok(sol)
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand-Prince 5(4) with local extrapolation and FSAL.
///
/// Steps are accepted when `|err| <= abs_tol + rel_tol * max(|y_n|, |y_{n+1}|)`.
pub fn dopri45<F>(
    mut f: F,
    t0: f64,
    y0: f64,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    record_every: usize,
) -> Result<OdeSolution>
where
    F: FnMut(f64, f64) -> f64,
{
    if !(rel_tol > 0.0 && abs_tol > 0.0) || !(t_end > t0) {
        return Err(Error::invalid(
            "dopri45",
            "requires positive tolerances and t_end > t0",
        ));
    }
    const SAFETY: f64 = 0.9;
    const MIN_FACTOR: f64 = 0.2;
    const MAX_FACTOR: f64 = 5.0;
    let every = record_every.max(1);
    let span = t_end - t0;

    let mut sol = OdeSolution::default();
    sol.push(t0, y0);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y);

    // Initial step from the first derivative scale.
    let scale0 = abs_tol + rel_tol * y.abs();
    let mut h = if k1.abs() > 0.0 {
        (0.01 * scale0 / k1.abs()).max(1e-6 * span)
    } else {
        1e-3 * span
    };
    h = h.min(span);

    let mut accepted = 0usize;
    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepFailure { t, step: h });
        }

        let k2 = f(t + C2 * h, y + h * A21 * k1);
        let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(
            t + C5 * h,
            y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
        );
        let k6 = f(
            t + h,
            y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
        );
        let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = f(t + h, y_new);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        let scale = abs_tol + rel_tol * y.abs().max(y_new.abs());
        let ratio = err.abs() / scale;
        if !ratio.is_finite() {
            h *= MIN_FACTOR;
            continue;
        }

        if ratio <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            accepted += 1;
            if t >= t_end || accepted.is_multiple_of(every) {
                sol.push(t, y);
            }
            let factor = if ratio == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * ratio.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            h *= (SAFETY * ratio.powf(-0.25)).clamp(MIN_FACTOR, 1.0);
        }
    }
    sol.steps = accepted;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential_decay() {
        let sol = rk4(|_, y| -y, 0.0, 1.0, 2.0, 1e-2, 10).unwrap();
        let (t, y) = sol.last().unwrap();
        assert_eq!(t, 2.0);
        assert!((y - (-2.0f64).exp()).abs() < 1e-9);
        assert!(sol.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |dt: f64| {
            let sol = rk4(|t, _| t.cos(), 0.0, 0.0, 3.0, dt, 1).unwrap();
            (sol.last().unwrap().1 - 3.0f64.sin()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn dopri_matches_closed_form() {
        let sol = dopri45(|t, y| y * t.cos(), 0.0, 1.0, 10.0, 1e-10, 1e-12, 1).unwrap();
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y - t.sin().exp()).abs() < 1e-8 * t.sin().exp().max(1.0));
        }
        assert_eq!(*sol.times.last().unwrap(), 10.0);
        assert!(sol.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dopri_blowup_is_step_failure() {
        // y' = y^2, y(0) = 1 blows up at t = 1.
        let err = dopri45(|_, y| y * y, 0.0, 1.0, 2.0, 1e-8, 1e-10, 1).unwrap_err();
        assert!(matches!(err, Error::StepFailure { .. }));
    }

    #[test]
    fn invalid_inputs() {
        assert!(rk4(|_, y| y, 0.0, 1.0, 0.0, 0.1, 1).is_err());
        assert!(dopri45(|_, y| y, 0.0, 1.0, 1.0, 0.0, 1e-9, 1).is_err());
        assert!(dopri45(|_, y| y, 1.0, 1.0, 0.5, 1e-9, 1e-9, 1).is_err());
    }
}
