//! Gauss–Legendre quadrature: fixed rules, globally adaptive bisection on a
//! finite interval, and panel-by-panel extension to the half line.
//!
//! Everything here is deterministic for a fixed configuration: node sets are
//! computed once and the refinement order depends only on the integrand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per (sub)panel.
    pub nodes_per_panel: usize,
    /// Width multiplier from one half-line panel to the next (≥ 1).
    pub panel_growth: f64,
    /// Stop extending once a panel adds less than this fraction of the total.
    pub tail_cutoff: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Upper bound on bisected subintervals inside one panel.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_panel: 16,
            panel_growth: 1.25,
            tail_cutoff: 1e-12,
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_panels: 64,
            max_subdivisions: 400,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("quadrature config: {msg}")));
        if self.nodes_per_panel < 2 {
            return bad("nodes_per_panel must be at least 2");
        }
        if !(self.panel_growth >= 1.0 && self.panel_growth.is_finite()) {
            return bad("panel_growth must be >= 1");
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff <= 1e-6) {
            return bad("tail_cutoff must lie in (0, 1e-6]");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_panels == 0 || self.max_subdivisions == 0 {
            return bad("panel and subdivision limits must be positive");
        }
        Ok(())
    }

    /// Same policy with every tolerance scaled by `factor`.
    pub fn with_tolerance_scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            tail_cutoff: (self.tail_cutoff * factor).min(1e-6),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule on [−1, 1] by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Reusable integrator holding one Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct Integrator {
    rule: GaussLegendre,
    config: QuadratureConfig,
}

impl Integrator {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            rule: GaussLegendre::new(config.nodes_per_panel),
            config,
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    fn piece<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: &mut F) -> Piece {
        let whole = self.rule.integrate(a, b, &mut *f);
        let m = 0.5 * (a + b);
        let split = self.rule.integrate(a, m, &mut *f) + self.rule.integrate(m, b, &mut *f);
        Piece {
            a,
            b,
            value: split,
            error: (split - whole).abs(),
        }
    }

    /// Globally adaptive integral over `[a, b]`.
    ///
    /// `floor` is an absolute error level below which refinement stops even if
    /// the relative target is not met (used for tail panels).
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> Result<Estimate> {
        self.integrate_with_floor(a, b, 0.0, f)
    }

    pub fn integrate_with_floor<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, floor: f64, mut f: F) -> Result<Estimate> {
        if a == b {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let mut pieces = vec![self.piece(a, b, &mut f)];
        loop {
            let value: f64 = pieces.iter().map(|p| p.value).sum();
            let error: f64 = pieces.iter().map(|p| p.error).sum();
            let target = self.config.abs_tol.max(self.config.rel_tol * value.abs()).max(floor);
            if error <= target {
                return Ok(Estimate { value, error });
            }
            if pieces.len() >= self.config.max_subdivisions {
                return Err(Error::NonConvergence(format!(
                    "[{a}, {b}]: error {error:e} above target {target:e} after {} subdivisions",
                    pieces.len()
                )));
            }
            let (worst, _) =
                pieces.iter().enumerate().fold(
                    (0, -1.0),
                    |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc },
                );
            let p = pieces.swap_remove(worst);
            let m = 0.5 * (p.a + p.b);
            if !(m > p.a && m < p.b) {
                return Err(Error::NonConvergence(format!(
                    "interval [{}, {}] cannot be bisected further",
                    p.a, p.b
                )));
            }
            pieces.push(self.piece(p.a, m, &mut f));
            pieces.push(self.piece(m, p.b, &mut f));
        }
    }

    /// `∫₀^∞ f`, extending panel by panel from the origin.
    ///
    /// Panels start at width `width` and grow by `panel_growth`. Extension stops
    /// once two consecutive panels each contribute less than `tail_cutoff` of
    /// the accumulated absolute integral.
    pub fn integrate_half_line<F: FnMut(f64) -> f64>(&self, width: f64, mut f: F) -> Result<Estimate> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "panel width must be positive, got {width}"
            )));
        }
        let mut a = 0.0;
        let mut w = width;
        let mut value = 0.0;
        let mut error = 0.0;
        let mut magnitude = 0.0;
        let mut quiet = 0;
        for _ in 0..self.config.max_panels {
            let floor = self.config.rel_tol * magnitude * 0.1;
            let est = self.integrate_with_floor(a, a + w, floor, &mut f)?;
            value += est.value;
            error += est.error;
            magnitude += est.value.abs();
            // two quiet panels in a row, so a sign change inside one panel
            // cannot end the extension early
            if est.value.abs() <= self.config.tail_cutoff * magnitude {
                quiet += 1;
                if quiet == 2 {
                    return Ok(Estimate { value, error });
                }
            } else {
                quiet = 0;
            }
            a += w;
            w *= self.config.panel_growth;
        }
        Err(Error::NonConvergence(format!(
            "half-line integral still growing after {} panels (reached {a})",
            self.config.max_panels
        )))
    }

    /// `∫_{−∞}^{∞} f` as two half lines; reference path for even integrands.
    pub fn integrate_full_line<F: FnMut(f64) -> f64>(&self, width: f64, mut f: F) -> Result<Estimate> {
        let right = self.integrate_half_line(width, &mut f)?;
        let left = self.integrate_half_line(width, |x| f(-x))?;
        Ok(Estimate {
            value: left.value + right.value,
            error: left.error + right.error,
        })
    }
}

/// Composite Simpson weights for `n` uniform samples with spacing `h`.
///
/// For an even number of intervals this is the plain 1-4-2-…-4-1 rule; for an
/// odd number the last three intervals use the 3/8 rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3, "Simpson's rule needs at least three samples");
    let intervals = n - 1;
    let mut w = vec![0.0; n];
    let simpson_end = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals - 3
    };
    let mut i = 0;
    while i < simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [2usize, 5, 16, 31] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            // degree 2n-1 exact
            let deg = 2 * n - 1;
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_boundary_layer() {
        let q = Integrator::new(QuadratureConfig::default()).unwrap();
        let est = q.integrate(0.0, 10.0, |x| (-50.0 * x).exp()).unwrap();
        let exact = (1.0 - (-500.0f64).exp()) / 50.0;
        assert!(((est.value - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn half_line_gaussian_and_quartic() {
        let q = Integrator::new(QuadratureConfig::default()).unwrap();
        let g = q.integrate_half_line(1.0, |x| (-x * x).exp()).unwrap();
        assert!((g.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // ∫₀^∞ e^{-x⁴} = Γ(5/4)
        let gamma_5_4 = 0.906_402_477_055_477;
        let r = q.integrate_half_line(0.7, |x| (-x.powi(4)).exp()).unwrap();
        assert!((r.value - gamma_5_4).abs() < 1e-13);
        let full = q.integrate_full_line(1.0, |x| (-(x - 0.3).powi(2)).exp()).unwrap();
        assert!((full.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn half_line_reports_runaway() {
        let cfg = QuadratureConfig {
            max_panels: 8,
            panel_growth: 1.0,
            ..Default::default()
        };
        let q = Integrator::new(cfg).unwrap();
        assert!(matches!(
            q.integrate_half_line(0.1, |x| (-x / 100.0).exp()),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig {
            tail_cutoff: 1e-3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn simpson_exact_for_cubics_both_parities() {
        for n in [3usize, 4, 9, 10, 101, 102] {
            let h = 2.0 / (n as f64 - 1.0);
            let w = simpson_weights(n, h);
            let s: f64 = (0..n)
                .map(|i| {
                    let x = i as f64 * h;
                    w[i] * (x * x * x - x + 1.0)
                })
                .sum();
            assert!((s - (4.0 - 2.0 + 2.0)).abs() < 1e-12, "n = {n}");
        }
    }
}
