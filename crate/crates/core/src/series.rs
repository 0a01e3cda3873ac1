//! The modified Matsubara expansion.
//!
//! A path on `[0, β]` with `x(0) = x(β) = x₀` is extended to `[−β, β]` so that
//! `x̃ − x₀` is odd; the extension has a pure sine series, and restricting back
//! gives `x(τ) ≐ x₀ + Σ xₙ sin(ω̂ₙτ)` with `ω̂ₙ = nπ/β`. Unlike the periodic
//! expansion this places no constraint on `ẋ(0)` versus `ẋ(β)`, so boundary
//! terms of non-periodic paths survive.
//!
//! The sine series does force `ẍ` to vanish at the endpoints. Actions here only
//! involve first derivatives, so that restriction is documented and left alone.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::quad::simpson_weights;

/// Samples of a path on a uniform grid `τᵢ = start + i·(end − start)/(N − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    start: f64,
    end: f64,
    values: Vec<f64>,
}

impl SampledPath {
    /// Path on `[0, β]`.
    pub fn new(beta: f64, values: Vec<f64>) -> Result<Self> {
        Self::on_interval(0.0, beta, values)
    }

    pub fn on_interval(start: f64, end: f64, values: Vec<f64>) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidParameter(format!("empty interval [{start}, {end}]")));
        }
        if values.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "a sampled path needs at least 3 points, got {}",
                values.len()
            )));
        }
        Ok(Self { start, end, values })
    }

    /// Samples `f` at `n_grid` uniform points of `[0, β]`.
    pub fn from_fn<F: Fn(f64) -> f64>(beta: f64, n_grid: usize, f: F) -> Result<Self> {
        if n_grid < 3 {
            return Err(Error::InvalidParameter(format!(
                "a sampled path needs at least 3 points, got {n_grid}"
            )));
        }
        let h = beta / (n_grid - 1) as f64;
        let values = (0..n_grid).map(|i| f(i as f64 * h)).collect();
        Self::new(beta, values)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Interval length.
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.length() / (self.values.len() - 1) as f64
    }

    pub fn tau(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.end
        } else {
            self.start + i as f64 * self.spacing()
        }
    }

    /// Value at the left endpoint, the zero mode for a path on `[0, β]`.
    pub fn x0(&self) -> f64 {
        self.values[0]
    }
}

/// Odd extension of `x − x₀` from `[0, β]` to `[−β, β]`:
/// `x̃(τ) = 2x₀ − x(−τ)` for `τ < 0`.
pub fn odd_extend(path: &SampledPath) -> Result<SampledPath> {
    if path.start() != 0.0 {
        return Err(Error::InvalidParameter(
            "odd extension needs a path starting at tau = 0".into(),
        ));
    }
    let x0 = path.x0();
    let v = path.values();
    let n = v.len();
    let mut out = Vec::with_capacity(2 * n - 1);
    out.extend(v[1..].iter().rev().map(|&x| 2.0 * x0 - x));
    out.extend_from_slice(v);
    SampledPath::on_interval(-path.end(), path.end(), out)
}

/// `x(τ) ≐ x₀ + Σ_{n=1}^{N} xₙ sin(nπτ/β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    beta: f64,
    x0: f64,
    coeffs: Vec<f64>,
}

impl SineSeries {
    /// `coeffs[k]` multiplies `sin((k+1)πτ/β)`.
    pub fn new(beta: f64, x0: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { beta, x0, coeffs })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `ω̂ₙ = nπ/β`.
    pub fn frequency(&self, n: usize) -> f64 {
        n as f64 * PI / self.beta
    }

    /// Series truncated to its first `n` modes.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            beta: self.beta,
            x0: self.x0,
            coeffs: self.coeffs[..n.min(self.coeffs.len())].to_vec(),
        }
    }

    /// `Σ aₙ sin(nθ)` and `Σ aₙ n cos(nθ)` by rotating `e^{iθ}`.
    fn sums(&self, tau: f64) -> (f64, f64) {
        let theta = PI * tau / self.beta;
        let step = Complex64::from_polar(1.0, theta);
        let mut z = step;
        let (mut s, mut c) = (0.0, 0.0);
        for (k, a) in self.coeffs.iter().enumerate() {
            s += a * z.im;
            c += a * (k + 1) as f64 * z.re;
            z *= step;
        }
        (s, c)
    }

    /// `x₀ + Σ xₙ sin(ω̂ₙτ)`; exactly `x₀` at both endpoints.
    pub fn reconstruct(&self, tau: f64) -> Result<f64> {
        if !(0.0..=self.beta).contains(&tau) {
            return Err(Error::Domain {
                what: "tau",
                value: tau,
                lo: 0.0,
                hi: self.beta,
            });
        }
        if tau == 0.0 || tau == self.beta {
            return Ok(self.x0);
        }
        Ok(self.x0 + self.sums(tau).0)
    }

    /// Term-by-term derivative `Σ xₙ ω̂ₙ cos(ω̂ₙτ)`.
    pub fn derivative(&self, tau: f64) -> f64 {
        self.sums(tau).1 * PI / self.beta
    }

    /// Partial sum `Σ_{n ≤ N_partial} xₙ ω̂ₙ (cos ω̂ₙβ − 1)`, the series for `ẋ(β) − ẋ(0)`.
    ///
    /// The sum converges only conditionally (coefficients fall off like `1/n`
    /// for generic paths), so the truncation is explicit.
    pub fn derivative_jump(&self, n_partial: usize) -> Result<f64> {
        if n_partial > self.coeffs.len() {
            return Err(Error::InvalidParameter(format!(
                "partial sum of {n_partial} terms requested from a {}-term series",
                self.coeffs.len()
            )));
        }
        Ok(self.coeffs[..n_partial]
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            // n = k + 1 odd: cos(nπ) − 1 = −2
            .map(|(k, a)| -2.0 * a * self.frequency(k + 1))
            .sum())
    }

    /// Euclidean action `∫₀^β [½mẋ² + V(x)] dτ` of the truncated series.
    ///
    /// The kinetic term of the differentiated series is integrated exactly by
    /// cosine orthogonality, `∫ẋ² = (β/2) Σ xₙ² ω̂ₙ²`; the potential term by
    /// composite Simpson on the reconstructed path.
    pub fn action(&self, spec: &PotentialSpec) -> f64 {
        let kinetic: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let w = self.frequency(k + 1);
                a * a * w * w
            })
            .sum::<f64>()
            * 0.25
            * self.beta
            * spec.mass();
        let n_grid = (4 * self.coeffs.len()).max(2048) + 1;
        let h = self.beta / (n_grid - 1) as f64;
        let weights = simpson_weights(n_grid, h);
        let potential: f64 = (0..n_grid)
            .into_par_iter()
            .map(|i| {
                let tau = if i + 1 == n_grid { self.beta } else { i as f64 * h };
                let x = self.reconstruct(tau).expect("grid point inside [0, beta]");
                weights[i] * spec.potential_value(x)
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        kinetic + potential
    }
}

/// Sine coefficients `xₙ = (2/β) ∫₀^β (x(τ) − x₀) sin(ω̂ₙτ) dτ` by composite Simpson.
///
/// Requires `N ≤ N_grid/4` so that no coefficient is aliased.
pub fn sine_coefficients(path: &SampledPath, n: usize) -> Result<SineSeries> {
    if path.start() != 0.0 {
        return Err(Error::InvalidParameter(
            "sine coefficients need a path on [0, beta]".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("at least one sine mode is required".into()));
    }
    let limit = path.len() / 4;
    if n > limit {
        return Err(Error::GridTooCoarse {
            requested: n,
            grid: path.len(),
            limit,
        });
    }
    let beta = path.length();
    let x0 = path.x0();
    let h = path.spacing();
    let weights = simpson_weights(path.len(), h);
    let deviations: Vec<f64> = path.values().iter().zip(&weights).map(|(x, w)| w * (x - x0)).collect();
    let coeffs = (1..=n)
        .into_par_iter()
        .map(|k| {
            let step = Complex64::from_polar(1.0, k as f64 * PI * h / beta);
            let mut z = Complex64::new(1.0, 0.0);
            let mut acc = 0.0;
            for d in &deviations {
                acc += d * z.im;
                z *= step;
            }
            2.0 / beta * acc
        })
        .collect();
    SineSeries::new(beta, x0, coeffs)
}

/// Reconstructs `path` from its first `n` sine modes; convenience for
/// convergence studies.
pub fn reconstruct(series: &SineSeries, tau: f64) -> Result<f64> {
    series.reconstruct(tau)
}

/// Free function form of [`SineSeries::derivative_jump`].
pub fn derivative_jump(series: &SineSeries, n_partial: usize) -> Result<f64> {
    series.derivative_jump(n_partial)
}

/// Free function form of [`SineSeries::action`].
pub fn action_of_series(series: &SineSeries, spec: &PotentialSpec) -> f64 {
    series.action(spec)
}

/// Periodic expansion `x(τ) = Σ_{n=−K}^{K} cₙ e^{−iωₙτ}`, `ωₙ = 2πn/β`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatsubaraSeries {
    beta: f64,
    coeffs: Vec<Complex64>,
}

impl MatsubaraSeries {
    /// `coeffs` holds `c_{−K} … c_K`; its length must be odd.
    pub fn new(beta: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "Matsubara coefficients must run symmetrically from -K to K".into(),
            ));
        }
        Ok(Self { beta, coeffs })
    }

    /// Fit by discrete Fourier transform of the periodic samples
    /// (the duplicated endpoint is dropped). With `2K + 1` equal to the number
    /// of periodic samples the fit interpolates every sample exactly.
    pub fn fit(path: &SampledPath, k_max: usize) -> Result<Self> {
        let m = path.len() - 1;
        let limit = (m - 1) / 2;
        if k_max > limit {
            return Err(Error::GridTooCoarse {
                requested: k_max,
                grid: path.len(),
                limit,
            });
        }
        let samples = &path.values()[..m];
        let coeffs = (-(k_max as i64)..=k_max as i64)
            .map(|n| {
                let step = Complex64::from_polar(1.0, 2.0 * PI * n as f64 / m as f64);
                let mut z = Complex64::new(1.0, 0.0);
                let mut acc = Complex64::new(0.0, 0.0);
                for &x in samples {
                    acc += z * x;
                    z *= step;
                }
                acc / m as f64
            })
            .collect();
        Self::new(path.length(), coeffs)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let k = self.max_mode() as i64;
        if n.abs() > k {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + k) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Complex value `Σ cₙ e^{−iωₙτ}`.
    pub fn evaluate(&self, tau: f64) -> Complex64 {
        let k = self.max_mode() as i64;
        self.coeffs
            .iter()
            .zip(-k..=k)
            .map(|(c, n)| c * Complex64::from_polar(1.0, -2.0 * PI * n as f64 * tau / self.beta))
            .sum()
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.evaluate(tau).re
    }

    /// Samples the real part on `n_grid` points of `[0, β]`.
    pub fn sample(&self, n_grid: usize) -> Result<SampledPath> {
        SampledPath::from_fn(self.beta, n_grid, |t| self.value(t))
    }

    /// `Σ cₙ`: the boundary value of the periodic reconstruction. Returns the
    /// real part together with the imaginary residual.
    pub fn zero_mode_with_residual(&self) -> (f64, f64) {
        let s: Complex64 = self.coeffs.iter().sum();
        (s.re, s.im)
    }
}

pub fn matsubara_zero_mode(series: &MatsubaraSeries) -> f64 {
    series.zero_mode_with_residual().0
}
