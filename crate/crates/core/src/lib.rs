//! Phase-space partition functions built on Bohmian trajectories.
//!
//! The crate is `no_std` (it needs `alloc` for sample buffers) and contains
//! only closed-form physics and the numerical kernels that check it:
//!
//! * [`params`]: physical constants, system and thermal parameters, grids.
//! * [`wavepacket`]: analytic Gaussian wavepackets for the harmonic oscillator
//!   and the free particle, with density, phase, quantum potential and the
//!   pointwise Bohmian energy `E = -dS/dt`.
//! * [`trajectories`]: the guidance field and trajectory integration.
//! * [`partition`]: classical, quantum, unified (Gaussian) and marginal
//!   partition functions, the temperature criterion and average energies.
//! * [`bath`]: Caldeira-Leggett bath kernels and partition functions.
//! * [`oracle`]: finite-difference and quadrature cross-checks that do not
//!   share code paths with the closed forms they verify.
//! * [`numeric`]: adaptive Gauss-Kronrod quadrature, Runge-Kutta steppers,
//!   finite-difference stencils and special functions.
#![no_std]
// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod bath;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod partition;
pub mod trajectories;
pub mod wavepacket;

pub use error::{Error, Result};
pub use params::{
    natural_units, potential_value, Constants, Grid1D, Potential, QuadratureConfig, SystemParams,
    ThermalSpec,
};
pub use wavepacket::{evolve, WavepacketInit, WavepacketState};
