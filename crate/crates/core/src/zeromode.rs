//! The effective theory of the zero mode.
//!
//! Integrating the Dirichlet fluctuations around a fixed boundary value `x₀`
//! to quadratic order gives a positive weight `w(u₀)` on the mass-rescaled
//! zero mode `u₀ = √m·x₀`, and `Z₂ = ∫du₀ w(u₀)`. The cubic and quartic
//! remainders enter at first order through Gaussian moments of the
//! fluctuation, which yields `δ⁽¹⁾Z`.
//!
//! Normalization: `w` is a density per unit `u₀`, fixed so that at `λ = 0`
//! the `u₀` integral reproduces the harmonic-oscillator partition function
//! exactly. All integrals over `u₀` are shifted by `ln w(0)` so that low
//! temperatures never underflow.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::green::DirichletKernel;
use crate::hyper::ln_one_minus_exp;
use crate::model::PotentialSpec;
use crate::quad::{Estimate, Integrator, QuadratureConfig};

/// `F = ω/2 + ln(1 − e^{−βω})/β`.
pub fn sho_free_energy_closed(omega: f64, beta: f64) -> Result<f64> {
    check_sho(omega, beta)?;
    Ok(0.5 * omega + ln_one_minus_exp(beta * omega) / beta)
}

/// `ln Z` of the oscillator assembled from the boundary decomposition:
/// fluctuation determinant times the Gaussian integral over `x₀` of
/// `exp(−ω tanh(βω/2) x₀²)`.
pub fn sho_ln_partition_boundary(omega: f64, beta: f64) -> Result<f64> {
    check_sho(omega, beta)?;
    let ln_det = DirichletKernel::new(omega, beta)?.ln_det_prefactor();
    let curvature = omega * (0.5 * beta * omega).tanh();
    Ok(0.5 * ln_det + 0.5 * (PI / curvature).ln())
}

/// `(2cosh βω − 2)^{−1/2}` by way of [`sho_ln_partition_boundary`].
pub fn sho_partition_boundary(omega: f64, beta: f64) -> Result<f64> {
    Ok(sho_ln_partition_boundary(omega, beta)?.exp())
}

fn check_sho(omega: f64, beta: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::MasslessPropagator);
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// Solution of `ẍ = ω²x` with `x(0) = x(β) = x₀`:
/// `x₀ cosh(ω(τ − β/2))/cosh(ωβ/2)`.
pub fn classical_path(omega: f64, beta: f64, x0: f64, tau: f64) -> f64 {
    let num = (-omega * tau).exp() + (-omega * (beta - tau)).exp();
    x0 * num / (1.0 + (-omega * beta).exp())
}

/// Action of [`classical_path`]: `mωx₀² tanh(βω/2)`.
pub fn classical_boundary_action(mass: f64, omega: f64, beta: f64, x0: f64) -> f64 {
    mass * omega * x0 * x0 * (0.5 * beta * omega).tanh()
}

/// Ingredients of the quadratic weight at one zero-mode value.
///
/// `log_weight` is the log of the density per unit `u₀ = √m·x₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveWeight {
    pub x0: f64,
    pub omega_bar: f64,
    /// `βV(x₀)`.
    pub s_const: f64,
    /// Gaussian completion `(α²/2)∫∫G ≥ 0`.
    pub sigma_eta: f64,
    /// `ln(ω̄/(2π sinh ω̄β))`.
    pub log_det_prefactor: f64,
    pub log_weight: f64,
}

impl EffectiveWeight {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

fn weight_at_u(spec: &PotentialSpec, beta: f64, u0: f64) -> EffectiveWeight {
    let omega_bar = spec.rescaled_frequency_sq(u0).sqrt();
    let alpha = spec.rescaled_source(u0);
    let kernel = DirichletKernel::new(omega_bar, beta).expect("validated beta and frequency");
    let s_const = beta * spec.rescaled_potential(u0);
    let sigma_eta = 0.5 * alpha * alpha * kernel.kernel_total_integral();
    let log_det_prefactor = kernel.ln_det_prefactor();
    EffectiveWeight {
        x0: spec.unscale(u0),
        omega_bar,
        s_const,
        sigma_eta,
        log_det_prefactor,
        log_weight: 0.5 * log_det_prefactor - s_const + sigma_eta,
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// Quadratic weight at the dimensionful zero mode `x0`.
pub fn quadratic_weight(spec: &PotentialSpec, beta: f64, x0: f64) -> Result<EffectiveWeight> {
    check_beta(beta)?;
    Ok(weight_at_u(spec, beta, spec.rescale(x0)))
}

/// Panel width for `u₀` integrals: the Gaussian width `1/√(ω tanh(βω/2))`
/// or the quartic width `(12/(βκ))^{1/4}`, whichever is narrower.
fn panel_width(spec: &PotentialSpec, beta: f64) -> f64 {
    let w = spec.omega();
    let gauss = if w > 0.0 {
        1.0 / (w * (0.5 * beta * w).tanh()).sqrt()
    } else {
        f64::INFINITY
    };
    let quartic = if spec.kappa() > 0.0 {
        (12.0 / (beta * spec.kappa())).powf(0.25)
    } else {
        f64::INFINITY
    };
    gauss.min(quartic)
}

/// `ln Z₂` together with the relative quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPartition {
    pub ln_z: f64,
    pub rel_error: f64,
}

/// `ln Z₂ = ln w(0) + ln[2∫₀^∞ w(u₀)/w(0) du₀]`.
pub fn ln_partition_quadratic(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<LogPartition> {
    check_beta(beta)?;
    let q = Integrator::new(*cfg)?;
    let shift = weight_at_u(spec, beta, 0.0).log_weight;
    let est = q.integrate_half_line(panel_width(spec, beta), |u| {
        (weight_at_u(spec, beta, u).log_weight - shift).exp()
    })?;
    Ok(LogPartition {
        ln_z: shift + (2.0 * est.value).ln(),
        rel_error: est.error / est.value,
    })
}

/// `Z₂ = ∫du₀ w(u₀)`.
pub fn partition_quadratic(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_partition_quadratic(spec, beta, cfg)?.ln_z.exp())
}

/// Mean fluctuation profile `I₀(θ) = −α∫₀^L G(θ, θ′)dθ′`
/// `= (α/ω̄²)(cosh ω̄θ − sinh ω̄θ·tanh(ω̄L/2) − 1)`.
pub fn i0_profile(omega_bar: f64, length: f64, alpha: f64, theta: f64) -> Result<f64> {
    let k = DirichletKernel::new(omega_bar, length)?;
    Ok(-alpha * k.kernel_row_integral(theta)?)
}

/// Bracket `−∫₀^β dθ ⟨S_I⟩-density` at `u₀`; the first-order correction
/// density is this times `w(u₀)`.
fn correction_bracket(spec: &PotentialSpec, beta: f64, u0: f64, q: &Integrator) -> Result<f64> {
    let kappa = spec.kappa();
    let omega_bar = spec.rescaled_frequency_sq(u0).sqrt();
    let alpha = spec.rescaled_source(u0);
    let k = DirichletKernel::new(omega_bar, beta)?;
    let c3 = kappa * u0;
    let c4 = 0.25 * kappa;
    let f = |t: f64| {
        let g = k.value_unchecked(t, t);
        let i0 = -alpha * k.row_unchecked(t);
        let i2 = i0 * i0;
        c3 * i0 * (i2 + 3.0 * g) + c4 * (i2 * i2 + 6.0 * i2 * g + 3.0 * g * g)
    };
    let half = 0.5 * beta;
    // mixed signs are possible, so fix an absolute floor from the integrand scale
    let scale = f(0.5 * half).abs() + f(half).abs();
    let floor = 1e-13 * scale * half;
    let est = q.integrate_with_floor(0.0, half, floor, f)?;
    Ok(-2.0 * est.value)
}

fn inner_integrator(cfg: &QuadratureConfig) -> Result<Integrator> {
    Integrator::new(QuadratureConfig {
        rel_tol: cfg.rel_tol.max(1e-11),
        ..*cfg
    })
}

/// First-order correction density at the dimensionful zero mode `x0`,
/// per unit `u₀`: `w(u₀)·(−∫dθ [κu₀(I₀³ + 3I₀G) + (κ/4)(I₀⁴ + 6I₀²G + 3G²)])`
/// with `G = G(θ, θ)`.
pub fn correction_first_order(spec: &PotentialSpec, beta: f64, x0: f64) -> Result<f64> {
    correction_first_order_with(spec, beta, x0, &QuadratureConfig::default())
}

pub fn correction_first_order_with(spec: &PotentialSpec, beta: f64, x0: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_beta(beta)?;
    if spec.kappa() == 0.0 {
        return Ok(0.0);
    }
    let u0 = spec.rescale(x0);
    let q = inner_integrator(cfg)?;
    Ok(weight_at_u(spec, beta, u0).weight() * correction_bracket(spec, beta, u0, &q)?)
}

/// `Z₂` and `δ⁽¹⁾Z`, both stored relative to the common scale `e^{ln_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovedPartition {
    pub ln_scale: f64,
    pub z2: Estimate,
    pub delta: Estimate,
}

impl ImprovedPartition {
    /// `δ⁽¹⁾Z / Z₂`.
    pub fn ratio(&self) -> f64 {
        self.delta.value / self.z2.value
    }

    /// `|δ⁽¹⁾Z| > Z₂/2`: the first-order term is no longer a small correction.
    pub fn near_breakdown(&self) -> bool {
        self.ratio().abs() > 0.5
    }

    pub fn ln_z2(&self) -> f64 {
        self.ln_scale + self.z2.value.ln()
    }

    /// `ln(Z₂ + δ⁽¹⁾Z)`; `None` when the sum is not positive.
    pub fn ln_improved(&self) -> Option<f64> {
        let r = self.ratio();
        (r > -1.0).then(|| self.ln_z2() + r.ln_1p())
    }

    pub fn rel_error(&self) -> f64 {
        (self.z2.error + self.delta.error) / (self.z2.value + self.delta.value).abs()
    }
}

/// Computes `Z₂` and `δ⁽¹⁾Z` on a common scale without forming either
/// absolutely.
pub fn improved_components(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<ImprovedPartition> {
    check_beta(beta)?;
    let outer = Integrator::new(*cfg)?;
    let width = panel_width(spec, beta);
    let shift = weight_at_u(spec, beta, 0.0).log_weight;
    let z2 = outer.integrate_half_line(width, |u| (weight_at_u(spec, beta, u).log_weight - shift).exp())?;
    let delta = if spec.kappa() == 0.0 {
        Estimate { value: 0.0, error: 0.0 }
    } else {
        let inner = inner_integrator(cfg)?;
        let mut failure = None;
        let est = outer.integrate_half_line(width, |u| {
            let w = (weight_at_u(spec, beta, u).log_weight - shift).exp();
            if w == 0.0 {
                return 0.0;
            }
            match correction_bracket(spec, beta, u, &inner) {
                Ok(b) => w * b,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        est
    };
    Ok(ImprovedPartition {
        ln_scale: shift + std::f64::consts::LN_2,
        z2,
        delta,
    })
}

/// `Z₂ + δ⁽¹⁾Z`, or [`Error::Breakdown`] when the sum is not positive.
pub fn partition_improved(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let parts = improved_components(spec, beta, cfg)?;
    parts.ln_improved().map(f64::exp).ok_or(Error::Breakdown {
        temperature: 1.0 / beta,
        value: (parts.z2.value + parts.delta.value) * parts.ln_scale.exp(),
    })
}

/// `V_eff(x₀) = −T ln[w(u₀)·√(2π/T)]`, so that
/// `Z₂ = ∫dx₀ √(mT/2π) e^{−βV_eff(x₀)}`.
pub fn effective_potential(spec: &PotentialSpec, beta: f64, x0: f64) -> Result<f64> {
    let w = quadratic_weight(spec, beta, x0)?;
    Ok(-(w.log_weight + 0.5 * (2.0 * PI * beta).ln()) / beta)
}

/// `Z₂` rebuilt from [`effective_potential`] by integrating over `x₀`.
pub fn partition_from_effective_potential(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_beta(beta)?;
    let q = Integrator::new(*cfg)?;
    let norm = (spec.mass() / (2.0 * PI * beta)).sqrt();
    let v0 = effective_potential(spec, beta, 0.0)?;
    let width = panel_width(spec, beta) / spec.mass().sqrt();
    let est = q.integrate_half_line(width, |x| {
        let v = effective_potential(spec, beta, x).expect("beta validated above");
        (-beta * (v - v0)).exp()
    })?;
    Ok(2.0 * norm * (-beta * v0).exp() * est.value)
}

/// `ln Z_cl` with `Z_cl = √(mT/2π)∫dx₀ e^{−βV(x₀)}`.
pub fn ln_partition_classical(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<LogPartition> {
    check_beta(beta)?;
    let q = Integrator::new(*cfg)?;
    let w = spec.omega();
    let gauss = if w > 0.0 {
        1.0 / (w * beta.sqrt())
    } else {
        f64::INFINITY
    };
    let quartic = if spec.kappa() > 0.0 {
        (4.0 / (beta * spec.kappa())).powf(0.25)
    } else {
        f64::INFINITY
    };
    let est = q.integrate_half_line(gauss.min(quartic), |u| (-beta * spec.rescaled_potential(u)).exp())?;
    Ok(LogPartition {
        ln_z: 0.5 * (1.0 / (2.0 * PI * beta)).ln() + (2.0 * est.value).ln(),
        rel_error: est.error / est.value,
    })
}

pub fn partition_classical(spec: &PotentialSpec, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_partition_classical(spec, beta, cfg)?.ln_z.exp())
}

/// Closed form of the classical partition function when only one of the
/// two terms of the potential is present; `None` otherwise.
///
/// `λ = 0`: `T/ω`. `ω = 0`: `√(T/2π)·2Γ(5/4)(4T/κ)^{1/4}`.
pub fn partition_classical_closed(spec: &PotentialSpec, beta: f64) -> Option<f64> {
    let t = 1.0 / beta;
    if spec.kappa() == 0.0 {
        Some(t / spec.omega())
    } else if spec.omega() == 0.0 {
        // Γ(5/4) = Γ(1/4)/4
        let gamma_5_4 = 3.625_609_908_221_908 / 4.0;
        Some((t / (2.0 * PI)).sqrt() * 2.0 * gamma_5_4 * (4.0 * t / spec.kappa()).powf(0.25))
    } else {
        None
    }
}
