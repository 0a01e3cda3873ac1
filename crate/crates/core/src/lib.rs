//! Equilibrium thermodynamics of one-dimensional quantum oscillators from the
//! zero-mode decomposition of the imaginary-time path integral.
//!
//! Paths with coincident endpoints are written as `x(τ) = x₀ + y(τ)` with
//! `y(0) = y(β) = 0`. The boundary value `x₀` is the zero mode of a sine-series
//! (modified Matsubara) expansion; integrating the Dirichlet fluctuations `y`
//! leaves an effective statistical theory for `x₀` alone.
//!
//! Module map:
//!
//! * [`model`]: potentials, units, dimensionless parameters.
//! * [`series`]: odd extension, sine series, derivative-jump identity.
//! * [`green`]: Dirichlet Green functions, determinants, kernel integrals.
//! * [`zeromode`]: quadratic partition function, first-order correction,
//!   effective potential, classical limit, harmonic closed forms.
//! * [`thermo`]: free energy, internal energy, specific heat per method.
//! * [`oracle`]: exact spectra by basis diagonalization and the one-loop
//!   perturbative reference.
//! * [`quad`]: Gauss–Legendre quadrature with adaptive panels.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod green;
pub(crate) mod hyper;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod series;
pub mod thermo;
pub mod zeromode;

pub use error::{Error, Result};
pub use green::DirichletKernel;
pub use model::{DimensionlessView, PotentialSpec, ThermalState};
pub use quad::QuadratureConfig;
pub use thermo::{MethodTag, ThermoPoint};
