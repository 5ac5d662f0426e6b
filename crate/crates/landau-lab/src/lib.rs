//! Numerical laboratory for two-species electrostatic kinetic dynamics near a
//! stable homogeneous equilibrium: dispersion-margin certification, the closed
//! Volterra density equation with a resolvent-kernel cross-check, a spectral
//! two-species solver for the nonlinear perturbation system, and Gevrey-weight
//! generator-functional diagnostics certifying exponential field decay.

pub mod equilibria;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod harness;
pub mod linear;
pub mod penrose;
pub mod quad;
pub mod series;
pub mod sim;

pub use error::{LandauError, Result};
