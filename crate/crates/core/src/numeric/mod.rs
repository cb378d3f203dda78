//! Numerical kernels shared by the physics modules.

pub mod diff;
pub mod ode;
pub mod quadrature;
pub mod special;
