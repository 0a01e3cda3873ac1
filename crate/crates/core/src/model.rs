//! Potentials, thermal states and the dimensionless parameterisation.
//!
//! Natural units throughout: ħ = k_B = 1. The potential is
//! `V(x) = ½mω²x² + (λ/4)x⁴`.
//!
//! Internally the zero-mode machinery works in the mass-rescaled coordinate
//! `u = √m·x`, in which the kinetic term has unit mass and the quartic
//! coupling becomes `κ = λ/m²`. Every public entry point takes the
//! dimensionful `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    mass: f64,
    omega: f64,
    lambda: f64,
}

impl PotentialSpec {
    pub fn new(mass: f64, omega: f64, lambda: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be non-negative, got {omega}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        if omega == 0.0 && lambda == 0.0 {
            return Err(Error::InvalidParameter(
                "omega and lambda cannot both vanish (free particle has no equilibrium)".into(),
            ));
        }
        Ok(Self { mass, omega, lambda })
    }

    /// Unit-mass anharmonic oscillator `½ω²x² + (λ/4)x⁴`.
    pub fn anharmonic(omega: f64, lambda: f64) -> Result<Self> {
        Self::new(1.0, omega, lambda)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Quartic coupling in the mass-rescaled coordinate, `λ/m²`.
    pub fn kappa(&self) -> f64 {
        self.lambda / (self.mass * self.mass)
    }

    pub fn is_free(&self) -> bool {
        self.lambda == 0.0
    }

    pub fn potential_value(&self, x: f64) -> f64 {
        let x2 = x * x;
        0.5 * self.mass * self.omega * self.omega * x2 + 0.25 * self.lambda * x2 * x2
    }

    /// `ω̄(x₀) = √(ω² + 3λx₀²/m)`, the curvature frequency of `V` at `x₀`.
    pub fn effective_frequency(&self, x0: f64) -> f64 {
        (self.omega * self.omega + 3.0 * self.lambda * x0 * x0 / self.mass).sqrt()
    }

    /// `α(x₀) = ω²x₀ + λx₀³/m = V′(x₀)/m`.
    pub fn linear_source(&self, x0: f64) -> f64 {
        self.omega * self.omega * x0 + self.lambda * x0 * x0 * x0 / self.mass
    }

    pub fn to_dimensionless(&self, state: &ThermalState) -> Result<DimensionlessView> {
        if self.omega == 0.0 {
            return Err(Error::MasslessView);
        }
        Ok(DimensionlessView {
            g: self.lambda / (self.mass * self.mass * self.omega.powi(3)),
            theta: self.omega * state.beta(),
        })
    }

    /// Mass-rescaled coordinate `u = √m·x`.
    pub fn rescale(&self, x: f64) -> f64 {
        self.mass.sqrt() * x
    }

    pub fn unscale(&self, u: f64) -> f64 {
        u / self.mass.sqrt()
    }

    /// `V` as a function of `u`: `½ω²u² + (κ/4)u⁴`.
    pub(crate) fn rescaled_potential(&self, u: f64) -> f64 {
        let u2 = u * u;
        0.5 * self.omega * self.omega * u2 + 0.25 * self.kappa() * u2 * u2
    }

    /// `ω̄² = V″(u)`.
    pub(crate) fn rescaled_frequency_sq(&self, u: f64) -> f64 {
        self.omega * self.omega + 3.0 * self.kappa() * u * u
    }

    /// `V′(u) = ω²u + κu³`.
    pub(crate) fn rescaled_source(&self, u: f64) -> f64 {
        self.omega * self.omega * u + self.kappa() * u * u * u
    }
}

/// Free function form of [`PotentialSpec::potential_value`].
pub fn potential_value(spec: &PotentialSpec, x: f64) -> f64 {
    spec.potential_value(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    beta: f64,
}

impl ThermalState {
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn from_temperature(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {t}"
            )));
        }
        Ok(Self { beta: 1.0 / t })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// `g = λ/(m²ω³)` and `Θ = ωβ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessView {
    pub g: f64,
    pub theta: f64,
}

impl DimensionlessView {
    /// Inverse of [`PotentialSpec::to_dimensionless`] for a given mass and frequency.
    pub fn to_dimensionful(&self, mass: f64, omega: f64) -> Result<(PotentialSpec, ThermalState)> {
        if !(omega > 0.0) {
            return Err(Error::MasslessView);
        }
        let spec = PotentialSpec::new(mass, omega, self.g * mass * mass * omega.powi(3))?;
        let state = ThermalState::from_beta(self.theta / omega)?;
        Ok((spec, state))
    }

    /// Dimensionless temperature `1/Θ` (temperature in units of ω).
    pub fn reduced_temperature(&self) -> f64 {
        1.0 / self.theta
    }
}

/// `q = √(λ/(mω²))·x`, the dimensionless coordinate.
pub fn dimensionless_coordinate(spec: &PotentialSpec, x: f64) -> Result<f64> {
    if spec.omega() == 0.0 {
        return Err(Error::MasslessView);
    }
    Ok((spec.lambda() / (spec.mass() * spec.omega() * spec.omega())).sqrt() * x)
}
