//! Dirichlet Green functions of `−d²/dτ² + ω̄²` on `[0, L]`, their determinant
//! prefactor and kernel integrals, plus the periodic thermal propagator.
//!
//! All hyperbolic ratios are written in terms of decaying exponentials,
//! e.g. `sinh a · sinh b / sinh c = e^{a+b−c}(1−e^{−2a})(1−e^{−2b}) / (2(1−e^{−2c}))`,
//! so the same expression is accurate from `ω̄L = 0` (the free-particle limit)
//! up to arbitrarily large `ω̄L` with no branch switch and no overflow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyper::{decay_ratio, ln_sinhc, one_minus_tanhc, tanhc_deficit_scaled};
use crate::quad::{Integrator, QuadratureConfig};

/// Green function parameters: effective frequency `ω̄ ≥ 0` and interval
/// length `L > 0` (β in dimensionful use, Θ in dimensionless use).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletKernel {
    omega_bar: f64,
    length: f64,
}

impl DirichletKernel {
    pub fn new(omega_bar: f64, length: f64) -> Result<Self> {
        if !(omega_bar.is_finite() && omega_bar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "effective frequency must be non-negative, got {omega_bar}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interval length must be positive, got {length}"
            )));
        }
        Ok(Self { omega_bar, length })
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn check(&self, what: &'static str, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.length;
        if !(t >= -slack && t <= self.length + slack) {
            return Err(Error::Domain {
                what,
                value: t,
                lo: 0.0,
                hi: self.length,
            });
        }
        Ok(t.clamp(0.0, self.length))
    }

    /// `G(τ, τ′) = sinh(ω̄τ_<) sinh(ω̄(L−τ_>)) / (ω̄ sinh ω̄L)`.
    pub fn green_value(&self, tau: f64, tau_p: f64) -> Result<f64> {
        let t = self.check("tau", tau)?;
        let tp = self.check("tau'", tau_p)?;
        Ok(self.value_unchecked(t, tp))
    }

    pub(crate) fn value_unchecked(&self, t: f64, tp: f64) -> f64 {
        let (lo, hi) = if t <= tp { (t, tp) } else { (tp, t) };
        let l = self.length;
        let w = self.omega_bar;
        let right = l - hi;
        if lo == 0.0 || right == 0.0 {
            return 0.0;
        }
        (-w * (hi - lo)).exp() * (lo * right / l) * decay_ratio(2.0 * w * lo) * decay_ratio(2.0 * w * right)
            / decay_ratio(2.0 * w * l)
    }

    /// Coincident-point value `G(τ, τ)`.
    pub fn diagonal(&self, tau: f64) -> Result<f64> {
        let t = self.check("tau", tau)?;
        Ok(self.value_unchecked(t, t))
    }

    /// `ln(ω̄ / (2π sinh ω̄L))`.
    pub fn ln_det_prefactor(&self) -> f64 {
        -(2.0 * PI * self.length).ln() - ln_sinhc(self.omega_bar * self.length)
    }

    /// `ω̄ / (2π sinh ω̄L)`; its square root is the Gaussian fluctuation integral.
    pub fn det_prefactor(&self) -> f64 {
        self.ln_det_prefactor().exp()
    }

    /// The same prefactor from the Gelfand–Yaglom initial-value problem
    /// `u″ = ω̄²u, u(0) = 0, u′(0) = 1`, prefactor `= 1/(2π u(L))`.
    pub fn det_prefactor_gelfand_yaglom(&self) -> f64 {
        let w2 = self.omega_bar * self.omega_bar;
        let x = self.omega_bar * self.length;
        // RK4 global error ~ x·(hω̄)⁴; Richardson removes the leading term
        let steps = ((x / 2e-3).ceil() as usize).max(2000);
        let u_end = gelfand_yaglom(|_| w2, self.length, steps);
        1.0 / (2.0 * PI * u_end)
    }

    /// `∫₀^L∫₀^L G = L/ω̄² − 2(cosh ω̄L − 1)/(ω̄³ sinh ω̄L)`, with limit `L³/12`.
    pub fn kernel_total_integral(&self) -> f64 {
        let l = self.length;
        let w = self.omega_bar;
        let y = 0.5 * w * l;
        if y < 0.1 {
            // L/ω̄² · (1 − tanh(y)/y) = (L³/4) · (1 − tanh(y)/y)/y²
            0.25 * l * l * l * tanhc_deficit_scaled(y)
        } else {
            l / (w * w) - 2.0 * y.tanh() / (w * w * w)
        }
    }

    /// `∫₀^L G(τ, τ′) dτ′ = [1 − cosh(ω̄(τ − L/2))/cosh(ω̄L/2)] / ω̄²`.
    pub fn kernel_row_integral(&self, tau: f64) -> Result<f64> {
        let t = self.check("tau", tau)?;
        Ok(self.row_unchecked(t))
    }

    pub(crate) fn row_unchecked(&self, t: f64) -> f64 {
        let w = self.omega_bar;
        let l = self.length;
        let r = l - t;
        // 2 sinh(ω̄τ/2) sinh(ω̄(L−τ)/2) / (ω̄² cosh(ω̄L/2))
        t * r * decay_ratio(w * t) * decay_ratio(w * r) / (1.0 + (-w * l).exp())
    }

    /// `∫₀^L G(θ, θ)² dθ` by adaptive quadrature.
    pub fn diag_square_integral(&self) -> f64 {
        let cfg = QuadratureConfig {
            rel_tol: 1e-12,
            ..Default::default()
        };
        let q = Integrator::new(cfg).expect("default quadrature config is valid");
        let half = 0.5 * self.length;
        let est = q
            .integrate(0.0, half, |t| {
                let g = self.value_unchecked(t, t);
                g * g
            })
            .expect("smooth bounded integrand on a finite interval");
        2.0 * est.value
    }

    /// Upper bound `tanh(ω̄L/2)/(2ω̄)` on `|G|`, attained at `τ = τ′ = L/2`.
    pub fn sup_bound(&self) -> f64 {
        let y = 0.5 * self.omega_bar * self.length;
        // tanh(y)/(2ω̄) = (L/4)·tanh(y)/y
        0.25 * self.length * (1.0 - one_minus_tanhc(y))
    }
}

/// Free function form of [`DirichletKernel::green_value`].
pub fn green_value(k: &DirichletKernel, tau: f64, tau_p: f64) -> Result<f64> {
    k.green_value(tau, tau_p)
}

/// Solves `u″ = W(τ)u` on `[0, L]` with `u(0) = 0`, `u′(0) = 1` and returns `u(L)`.
///
/// Classical RK4 at `steps` and `2·steps`, combined by one Richardson step.
pub fn gelfand_yaglom<W: Fn(f64) -> f64>(weight: W, length: f64, steps: usize) -> f64 {
    let coarse = rk4_shoot(&weight, length, steps);
    let fine = rk4_shoot(&weight, length, 2 * steps);
    fine + (fine - coarse) / 15.0
}

fn rk4_shoot<W: Fn(f64) -> f64>(weight: &W, length: f64, steps: usize) -> f64 {
    let h = length / steps as f64;
    let (mut u, mut v) = (0.0f64, 1.0f64);
    for i in 0..steps {
        let t = i as f64 * h;
        let wm = weight(t + 0.5 * h);
        let (k1u, k1v) = (v, weight(t) * u);
        let (k2u, k2v) = (v + 0.5 * h * k1v, wm * (u + 0.5 * h * k1u));
        let (k3u, k3v) = (v + 0.5 * h * k2v, wm * (u + 0.5 * h * k2u));
        let (k4u, k4v) = (v + h * k3v, weight(t + h) * (u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    u
}

/// Periodic thermal propagator `Δ_F(τ) = [(1+n)e^{−ωτ} + n e^{ωτ}]/(2ω)`,
/// `n = 1/(e^{βω} − 1)`.
pub fn free_propagator(omega: f64, beta: f64, tau: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::MasslessPropagator);
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if !(0.0..=beta).contains(&tau) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
            lo: 0.0,
            hi: beta,
        });
    }
    let num = (-omega * tau).exp() + (-omega * (beta - tau)).exp();
    Ok(num / (-2.0 * omega * (-omega * beta).exp_m1()))
}
