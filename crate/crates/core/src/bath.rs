//! Harmonic heat bath linearly coupled to a tagged particle, with every
//! oscillator prepared in the same Gaussian packet of width `sigma`.

use alloc::vec::Vec;
use core::f64::consts::PI;
// libm-backed float methods; unused when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::quadrature;
use crate::params::{Constants, QuadratureConfig, ThermalSpec};
use crate::partition::{
    classicality_criterion, correction_from_ratio, criterion_ratio, CriterionReport, Method,
    PartitionResult,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub mass: f64,
    pub omega: f64,
    pub coupling: f64,
}

impl Oscillator {
    pub fn new(mass: f64, omega: f64, coupling: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("mass", "must be > 0"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be > 0"));
        }
        if !coupling.is_finite() {
            return Err(Error::invalid("coupling", "must be finite"));
        }
        Ok(Self {
            mass,
            omega,
            coupling,
        })
    }

    /// Minimum of the shifted well, `c q / omega^2`.
    pub fn equilibrium(&self, q: f64) -> f64 {
        self.coupling * q / (self.omega * self.omega)
    }

    fn energy(&self, x: f64, p: f64, q: f64) -> f64 {
        let d = x - self.equilibrium(q);
        p * p / (2.0 * self.mass) + 0.5 * self.mass * self.omega * self.omega * d * d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub oscillators: Vec<Oscillator>,
    pub sigma: f64,
    pub q0: f64,
}

impl BathSpec {
    pub fn new(oscillators: Vec<Oscillator>, sigma: f64, q0: f64) -> Result<Self> {
        if oscillators.is_empty() {
            return Err(Error::invalid("oscillators", "must be non-empty"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", "must be > 0"));
        }
        if !q0.is_finite() {
            return Err(Error::invalid("q0", "must be finite"));
        }
        Ok(Self {
            oscillators,
            sigma,
            q0,
        })
    }

    /// `n` oscillators of mass `m0` with `omega_k = k omega_max / n` and
    /// `c_k = coupling k / n`, `k = 1..=n`.
    pub fn ohmic(
        n: usize,
        m0: f64,
        omega_max: f64,
        coupling: f64,
        sigma: f64,
        q0: f64,
    ) -> Result<Self> {
        let oscillators = (1..=n)
            .map(|k| {
                let f = k as f64 / n as f64;
                Oscillator::new(m0, omega_max * f, coupling * f)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(oscillators, sigma, q0)
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    /// The bath restricted to oscillator `i`.
    pub fn singleton(&self, i: usize) -> Option<Self> {
        Some(Self {
            oscillators: alloc::vec![*self.oscillators.get(i)?],
            sigma: self.sigma,
            q0: self.q0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathInitialState {
    pub positions: Vec<f64>,
    pub momenta: Vec<f64>,
}

impl BathInitialState {
    pub fn new(bath: &BathSpec, positions: Vec<f64>, momenta: Vec<f64>) -> Result<Self> {
        if positions.len() != bath.len() || momenta.len() != bath.len() {
            return Err(Error::invalid(
                "initial state",
                "length must equal oscillator count",
            ));
        }
        Ok(Self { positions, momenta })
    }

    /// Every oscillator at rest in its shifted minimum.
    pub fn equilibrium(bath: &BathSpec) -> Self {
        Self {
            positions: bath
                .oscillators
                .iter()
                .map(|o| o.equilibrium(bath.q0))
                .collect(),
            momenta: alloc::vec![0.0; bath.len()],
        }
    }
}

/// `nu(t) = sum c^2 / omega^2 cos(omega t)`.
pub fn memory_kernel(bath: &BathSpec, t: f64) -> f64 {
    bath.oscillators
        .iter()
        .map(|o| o.coupling * o.coupling / (o.omega * o.omega) * (o.omega * t).cos())
        .sum()
}

/// `F(t) = sum { m c [X(0) - c q0 / omega^2] cos(omega t) + c P(0) sin(omega t) / omega }`.
pub fn noise_force(bath: &BathSpec, init: &BathInitialState, t: f64) -> Result<f64> {
    if init.positions.len() != bath.len() || init.momenta.len() != bath.len() {
        return Err(Error::invalid(
            "initial state",
            "length must equal oscillator count",
        ));
    }
    Ok(bath
        .oscillators
        .iter()
        .zip(init.positions.iter().zip(&init.momenta))
        .map(|(o, (&x, &p))| {
            let wt = o.omega * t;
            o.mass * o.coupling * (x - o.equilibrium(bath.q0)) * wt.cos()
                + o.coupling * p * wt.sin() / o.omega
        })
        .sum())
}

/// `Z_B = prod 2 pi / (beta omega)` over raw `dX dP`.
pub fn classical_bath_z(bath: &BathSpec, thermal: &ThermalSpec) -> PartitionResult {
    let value = bath
        .oscillators
        .iter()
        .fold(1.0, |acc, o| acc * 2.0 * PI / (thermal.beta * o.omega));
    PartitionResult {
        value,
        est_error: 0.0,
        method: Method::ClosedForm,
    }
}

/// One oscillator's `integral exp(-beta H) dX dP` by nested quadrature.
pub fn classical_oscillator_quadrature(
    osc: &Oscillator,
    q0: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureConfig,
) -> Result<PartitionResult> {
    let beta = thermal.beta;
    let sx = 1.0 / (osc.omega * (beta * osc.mass).sqrt());
    let sp = (osc.mass / beta).sqrt();
    let w = quad.window_sigmas;
    let centre = osc.equilibrium(q0);
    let est = quadrature::integrate_fallible(
        |x| {
            quadrature::integrate(
                |p| (-beta * osc.energy(x, p, q0)).exp(),
                -w * sp,
                w * sp,
                quad,
            )
            .map(|e| e.value)
        },
        centre - w * sx,
        centre + w * sx,
        quad,
    )?;
    Ok(PartitionResult {
        value: est.value,
        est_error: est.abs_error,
        method: Method::Quadrature,
    })
}

/// Per-oscillator factor `(1 - r)^{-1/2} exp(-r)` with `r = beta hbar^2 / (4 m sigma^2)`.
pub fn oscillator_correction(
    osc: &Oscillator,
    sigma: f64,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> Result<f64> {
    correction_from_ratio(criterion_ratio(osc.mass, sigma, constants.hbar, thermal))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnifiedBathZ {
    /// `Z_B * prod C_alpha`.
    pub exact: PartitionResult,
    /// `Z_B * prod (2 pi C_alpha)`.
    pub two_pi_factor: PartitionResult,
}

impl UnifiedBathZ {
    /// `(two_pi_factor - exact) / exact`.
    pub fn residual(&self) -> f64 {
        (self.two_pi_factor.value - self.exact.value) / self.exact.value
    }
}

pub fn unified_bath_z(
    bath: &BathSpec,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> Result<UnifiedBathZ> {
    let zb = classical_bath_z(bath, thermal).value;
    let mut exact = zb;
    let mut with_two_pi = zb;
    for o in &bath.oscillators {
        let c = oscillator_correction(o, bath.sigma, thermal, constants)?;
        exact *= c;
        with_two_pi *= 2.0 * PI * c;
    }
    Ok(UnifiedBathZ {
        exact: PartitionResult {
            value: exact,
            est_error: 0.0,
            method: Method::ClosedForm,
        },
        two_pi_factor: PartitionResult {
            value: with_two_pi,
            est_error: 0.0,
            method: Method::ClosedForm,
        },
    })
}

/// One oscillator's `integral P_G exp(-beta E) dX(0) dP(0) dX` by nested quadrature.
pub fn unified_oscillator_quadrature(
    osc: &Oscillator,
    sigma: f64,
    q0: f64,
    thermal: &ThermalSpec,
    constants: &Constants,
    quad: &QuadratureConfig,
) -> Result<PartitionResult> {
    let beta = thermal.beta;
    let hbar = constants.hbar;
    let m = osc.mass;
    let r = criterion_ratio(m, sigma, hbar, thermal);
    if !(r < 1.0) {
        return Err(Error::DivergentIntegral { ratio: r });
    }
    let sx = 1.0 / (osc.omega * (beta * m).sqrt());
    let sp = (m / beta).sqrt();
    let w = quad.window_sigmas;
    let centre = osc.equilibrium(q0);
    let half = w * sigma / (1.0 - r).sqrt();
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let q_const = hbar * hbar / (4.0 * m * sigma * sigma);
    let q_curv = hbar * hbar / (8.0 * m * sigma.powi(4));

    let est = quadrature::integrate_fallible(
        |x0| {
            quadrature::integrate_fallible(
                |p0| {
                    let classical = osc.energy(x0, p0, q0);
                    quadrature::integrate(
                        |x| {
                            let u = x - x0;
                            norm * (-u * u / (2.0 * sigma * sigma)
                                - beta * (classical + q_const - q_curv * u * u))
                                .exp()
                        },
                        x0 - half,
                        x0 + half,
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
        centre - w * sx,
        centre + w * sx,
        quad,
    )?;
    Ok(PartitionResult {
        value: est.value,
        est_error: est.abs_error,
        method: Method::Quadrature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeNRatio {
    /// `exp(-N r)`.
    pub approx: f64,
    /// `[(1 - r)^{-1/2} exp(-r)]^N`.
    pub exact: f64,
    /// `|approx - exact| / exact`.
    pub rel_err: f64,
}

/// Compares the large-`N` approximation of `Z'_B / Z_B` for a uniform bath of
/// mass `m0` against the exact product.
pub fn large_n_ratio(
    m0: f64,
    n: usize,
    sigma: f64,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> Result<LargeNRatio> {
    let r = criterion_ratio(m0, sigma, constants.hbar, thermal);
    let c = correction_from_ratio(r)?;
    let n_f = n as f64;
    let approx = (-n_f * r).exp();
    let exact = c.powi(n as i32);
    Ok(LargeNRatio {
        approx,
        exact,
        rel_err: (approx - exact).abs() / exact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathCriterion {
    pub per_oscillator: Vec<CriterionReport>,
    pub all_ok: bool,
}

pub fn bath_classicality(
    bath: &BathSpec,
    thermal: &ThermalSpec,
    constants: &Constants,
) -> BathCriterion {
    let per_oscillator: Vec<_> = bath
        .oscillators
        .iter()
        .map(|o| classicality_criterion(o.mass, bath.sigma, thermal, constants))
        .collect();
    let all_ok = per_oscillator.iter().all(|r| r.classical_ok);
    BathCriterion {
        per_oscillator,
        all_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::natural_units;
    use proptest::prelude::*;

    fn beta(b: f64) -> ThermalSpec {
        ThermalSpec::from_beta(b).unwrap()
    }

    fn single(m: f64, w: f64, c: f64, sigma: f64, q0: f64) -> BathSpec {
        BathSpec::new(alloc::vec![Oscillator::new(m, w, c).unwrap()], sigma, q0).unwrap()
    }

    #[test]
    fn kernel_values() {
        let bath = single(1.0, 2.0, 2.0, 1.0, 0.0);
        assert_eq!(memory_kernel(&bath, 0.0), 1.0);
        assert!((memory_kernel(&bath, PI / 2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn noise_values() {
        let bath = single(1.0, 1.0, 1.0, 1.0, 0.0);
        let init = BathInitialState::new(&bath, alloc::vec![1.0], alloc::vec![1.0]).unwrap();
        assert!((noise_force(&bath, &init, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(noise_force(&bath, &init, 0.0).unwrap(), 1.0);

        let bath = BathSpec::ohmic(5, 1.3, 2.0, 0.7, 1.0, 0.4).unwrap();
        let eq = BathInitialState::equilibrium(&bath);
        for t in [0.0, 0.3, 2.9, 11.0] {
            assert!(noise_force(&bath, &eq, t).unwrap().abs() < 1e-15);
        }
        assert!(BathInitialState::new(&bath, alloc::vec![0.0], alloc::vec![0.0]).is_err());
    }

    #[test]
    fn classical_bath_values() {
        let one = classical_bath_z(&single(1.0, 1.0, 0.5, 1.0, 0.0), &beta(1.0));
        assert!((one.value - 2.0 * PI).abs() < 1e-15);
        let two = BathSpec::new(
            alloc::vec![
                Oscillator::new(1.0, 1.0, 0.0).unwrap(),
                Oscillator::new(1.0, 2.0, 0.0).unwrap()
            ],
            1.0,
            0.0,
        )
        .unwrap();
        assert!((classical_bath_z(&two, &beta(1.0)).value - 2.0 * PI * PI).abs() < 1e-13);

        let q = QuadratureConfig::default();
        let osc = Oscillator::new(1.0, 1.0, 0.8).unwrap();
        let a = classical_oscillator_quadrature(&osc, 0.0, &beta(1.0), &q)
            .unwrap()
            .value;
        let b = classical_oscillator_quadrature(&osc, 2.5, &beta(1.0), &q)
            .unwrap()
            .value;
        assert!((a - 2.0 * PI).abs() < 1e-10 * 2.0 * PI);
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn unified_bath_values() {
        let c = natural_units();
        let bath = single(1.0, 1.0, 0.0, 1.0, 0.0);
        let z = unified_bath_z(&bath, &beta(1.0), &c).unwrap();
        let expect = 2.0 * PI * (-0.25f64).exp() / 0.75f64.sqrt();
        assert!((z.exact.value - expect).abs() < 1e-14);
        assert!((z.residual() - (2.0 * PI - 1.0)).abs() < 1e-12);

        let quad = unified_oscillator_quadrature(
            &bath.oscillators[0],
            1.0,
            0.0,
            &beta(1.0),
            &c,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((quad.value - expect).abs() < 1e-8 * expect);

        let wide = single(1.0, 1.0, 0.0, 100.0, 0.0);
        let z = unified_bath_z(&wide, &beta(1.0), &c).unwrap();
        let zb = classical_bath_z(&wide, &beta(1.0)).value;
        assert!((z.exact.value / zb - 1.0).abs() < 1e-4);
    }

    #[test]
    fn unified_bath_factorizes_and_ignores_coupling() {
        let c = natural_units();
        let th = beta(0.8);
        let bath = BathSpec::ohmic(6, 1.5, 3.0, 0.9, 0.7, 0.3).unwrap();
        let whole = unified_bath_z(&bath, &th, &c).unwrap().exact.value;
        let product: f64 = (0..bath.len())
            .map(|i| {
                unified_bath_z(&bath.singleton(i).unwrap(), &th, &c)
                    .unwrap()
                    .exact
                    .value
            })
            .product();
        assert!((whole - product).abs() < 1e-10 * whole);

        let other = BathSpec::ohmic(6, 1.5, 3.0, -4.0, 0.7, -2.0).unwrap();
        assert_eq!(unified_bath_z(&other, &th, &c).unwrap().exact.value, whole);
        assert_eq!(
            classical_bath_z(&other, &th).value,
            classical_bath_z(&bath, &th).value
        );
    }

    #[test]
    fn correction_depends_only_on_mass_sigma_squared() {
        let c = natural_units();
        let th = beta(1.0);
        let a = BathSpec::new(
            alloc::vec![
                Oscillator::new(1.0, 1.0, 0.0).unwrap(),
                Oscillator::new(4.0, 2.0, 0.0).unwrap()
            ],
            0.8,
            0.0,
        )
        .unwrap();
        // Same masses, so same {m sigma^2}; different frequencies.
        let b = BathSpec::new(
            alloc::vec![
                Oscillator::new(4.0, 0.3, 1.0).unwrap(),
                Oscillator::new(1.0, 5.0, 2.0).unwrap()
            ],
            0.8,
            1.0,
        )
        .unwrap();
        let ratio = |bath: &BathSpec| {
            unified_bath_z(bath, &th, &c).unwrap().exact.value / classical_bath_z(bath, &th).value
        };
        assert!((ratio(&a) - ratio(&b)).abs() < 1e-15);
    }

    #[test]
    fn large_n_values() {
        let c = natural_units();
        // r = beta hbar^2 / (4 m sigma^2) = 0.01 with sigma = 5.
        let l = large_n_ratio(1.0, 10, 5.0, &beta(1.0), &c).unwrap();
        assert!((l.rel_err - (1.0 - 0.99f64.powi(5))).abs() < 1e-12);
        assert!((l.rel_err - 0.049).abs() < 1e-3);

        let l = large_n_ratio(1.0, 4, 1.0, &beta(1.0), &c).unwrap();
        let expect = ((-0.25f64).exp() / 0.75f64.sqrt()).powi(4);
        assert!((l.exact - expect).abs() < 1e-14);
        assert!((l.approx - (-1.0f64).exp()).abs() < 1e-15);

        assert!(large_n_ratio(1.0, 3, 0.5, &beta(1.0), &c).is_err());
    }

    #[test]
    fn criterion_gates() {
        let c = natural_units();
        let bath = single(1.0, 1.0, 0.0, 0.5, 0.0);
        let fail = bath_classicality(&bath, &beta(4.0), &c);
        assert!(!fail.all_ok);
        assert!((fail.per_oscillator[0].dimensionless_ratio - 4.0).abs() < 1e-15);
        assert!(matches!(
            unified_bath_z(&bath, &beta(4.0), &c),
            Err(Error::DivergentIntegral { .. })
        ));
        let pass = bath_classicality(&bath, &beta(0.5), &c);
        assert!(pass.all_ok);

        let mixed = BathSpec::new(
            alloc::vec![
                Oscillator::new(10.0, 1.0, 0.0).unwrap(),
                Oscillator::new(0.1, 1.0, 0.0).unwrap()
            ],
            0.5,
            0.0,
        )
        .unwrap();
        let r = bath_classicality(&mixed, &beta(1.0), &c);
        assert!(r.per_oscillator[0].classical_ok && !r.per_oscillator[1].classical_ok && !r.all_ok);
    }

    proptest! {
        #[test]
        fn kernel_even_and_bounded(
            t in -50.0f64..50.0,
            ws in proptest::collection::vec(0.1f64..5.0, 1..8),
            cs in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let osc = ws.iter().zip(&cs).map(|(&w, &c)| Oscillator::new(1.0, w, c).unwrap()).collect();
            let bath = BathSpec::new(osc, 1.0, 0.0).unwrap();
            prop_assert_eq!(memory_kernel(&bath, t), memory_kernel(&bath, -t));
            prop_assert!(memory_kernel(&bath, 0.0) + 1e-12 >= memory_kernel(&bath, t).abs());
        }
    }
}
