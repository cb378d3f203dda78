//! Constants, system parameters and numerical configuration.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Reduced Planck constant and Boltzmann constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub boltzmann: f64,
}

impl Constants {
    pub fn new(hbar: f64, boltzmann: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::invalid("hbar", "must be finite and > 0"));
        }
        if !(boltzmann > 0.0 && boltzmann.is_finite()) {
            return Err(Error::invalid("boltzmann", "must be finite and > 0"));
        }
        Ok(Self { hbar, boltzmann })
    }
}

impl Default for Constants {
    fn default() -> Self {
        natural_units()
    }
}

/// `hbar = k_B = 1`. Together with `m = omega = 1` this is the unit system of
/// the marginal partition-function curves: energy in `m omega^2 x0^2`, time
/// in `1/omega`.
pub fn natural_units() -> Constants {
    Constants {
        hbar: 1.0,
        boltzmann: 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Harmonic { omega: f64 },
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub mass: f64,
    pub potential: Potential,
    pub constants: Constants,
}

impl SystemParams {
    pub fn harmonic(mass: f64, omega: f64, constants: Constants) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be finite and > 0"));
        }
        Self::new(mass, Potential::Harmonic { omega }, constants)
    }

    pub fn free(mass: f64, constants: Constants) -> Result<Self> {
        Self::new(mass, Potential::Free, constants)
    }

    pub fn new(mass: f64, potential: Potential, constants: Constants) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("mass", "must be finite and > 0"));
        }
        if let Potential::Harmonic { omega } = potential {
            if !(omega > 0.0 && omega.is_finite()) {
                return Err(Error::invalid("omega", "must be finite and > 0"));
            }
        }
        Ok(Self {
            mass,
            potential,
            constants,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    pub fn omega(&self) -> Option<f64> {
        match self.potential {
            Potential::Harmonic { omega } => Some(omega),
            Potential::Free => None,
        }
    }

    /// `m omega^2` (zero for the free particle).
    pub fn stiffness(&self) -> f64 {
        match self.potential {
            Potential::Harmonic { omega } => self.mass * omega * omega,
            Potential::Free => 0.0,
        }
    }
}

/// `V(x)`: `m omega^2 x^2 / 2` for the oscillator, zero for the free particle.
pub fn potential_value(params: &SystemParams, x: f64) -> f64 {
    0.5 * params.stiffness() * x * x
}

/// Inverse temperature `beta = 1/(k_B T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub beta: f64,
}

impl ThermalSpec {
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", "must be finite and > 0"));
        }
        Ok(Self { beta })
    }

    /// Thermal energy `k_B T` given directly.
    pub fn from_kbt(kbt: f64) -> Result<Self> {
        if !(kbt > 0.0 && kbt.is_finite()) {
            return Err(Error::invalid("kbt", "must be finite and > 0"));
        }
        Ok(Self { beta: 1.0 / kbt })
    }

    pub fn from_temperature(temperature: f64, constants: &Constants) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::invalid("temperature", "must be finite and > 0"));
        }
        Self::from_beta(1.0 / (constants.boltzmann * temperature))
    }

    pub fn kbt(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn temperature(&self, constants: &Constants) -> f64 {
        1.0 / (self.beta * constants.boltzmann)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Half-width of Gaussian integration windows in units of the packet width.
    pub window_sigmas: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdiv: usize,
}

impl QuadratureConfig {
    pub fn new(window_sigmas: f64, rel_tol: f64, abs_tol: f64, max_subdiv: usize) -> Result<Self> {
        let cfg = Self {
            window_sigmas,
            rel_tol,
            abs_tol,
            max_subdiv,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window_sigmas >= 6.0 && self.window_sigmas.is_finite()) {
            return Err(Error::invalid("window_sigmas", "must be >= 6"));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("tolerance", "must be > 0"));
        }
        if self.max_subdiv == 0 {
            return Err(Error::invalid("max_subdiv", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            window_sigmas: 12.0,
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdiv: 400,
        }
    }
}

/// Uniform grid `lo, lo + h, ..., hi` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("grid", "requires finite lo < hi"));
        }
        if n < 3 {
            return Err(Error::invalid("grid", "requires n >= 3"));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}
