//! Free energy, internal energy and specific heat for each method, the
//! ground-state estimate from the quadratic free energy, and `T_min`.
//!
//! Derivatives are taken in `s = ln T` with five-point central stencils at
//! steps `h = 0.01` and `h/2`, combined by one Richardson step:
//! `U = F − dF/ds` and `C = (dF/ds − d²F/ds²)/T`. The exact method instead
//! uses spectral moments.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::DirichletKernel;
use crate::model::PotentialSpec;
use crate::oracle::{converged_spectrum, exact_thermo, free_energy_oneloop, Spectrum};
use crate::quad::QuadratureConfig;
use crate::zeromode::{improved_components, ln_partition_classical, ln_partition_quadratic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Classical,
    Quadratic,
    Improved,
    Oneloop,
    Exact,
}

impl MethodTag {
    pub const ALL: [MethodTag; 5] = [
        MethodTag::Classical,
        MethodTag::Quadratic,
        MethodTag::Improved,
        MethodTag::Oneloop,
        MethodTag::Exact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Classical => "classical",
            MethodTag::Quadratic => "quadratic",
            MethodTag::Improved => "improved",
            MethodTag::Oneloop => "oneloop",
            MethodTag::Exact => "exact",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// Conditions attached to one point of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PointFlags {
    /// `Z₂ + δ⁽¹⁾Z ≤ 0` at this temperature; `F`, `U`, `C` are NaN.
    pub breakdown: bool,
    /// `F` is available but a stencil neighbour broke down; `U`, `C` are NaN.
    pub stencil_breakdown: bool,
    /// `|δ⁽¹⁾Z| > Z₂/2` somewhere on the stencil.
    pub near_breakdown: bool,
}

impl PointFlags {
    pub fn is_clear(&self) -> bool {
        *self == Self::default()
    }

    /// `;`-separated names, empty when clear.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.breakdown {
            parts.push("breakdown");
        }
        if self.stencil_breakdown {
            parts.push("stencil_breakdown");
        }
        if self.near_breakdown {
            parts.push("near_breakdown");
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub temperature: f64,
    pub free_energy: f64,
    pub internal_energy: f64,
    pub specific_heat: f64,
    /// Error estimate for `C`: stencil disagreement plus propagated
    /// quadrature noise (finite-difference methods), tail bound (exact).
    pub error: f64,
    pub flags: PointFlags,
}

/// `ln Z` with its relative error and the near-breakdown indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LnZ {
    value: f64,
    rel_error: f64,
    near_breakdown: bool,
}

fn ln_partition(
    method: MethodTag,
    spec: &PotentialSpec,
    beta: f64,
    cfg: &QuadratureConfig,
    spectrum: Option<&Spectrum>,
) -> Result<LnZ> {
    let plain = |value: f64, rel_error: f64| LnZ {
        value,
        rel_error,
        near_breakdown: false,
    };
    match method {
        MethodTag::Classical => {
            let p = ln_partition_classical(spec, beta, cfg)?;
            Ok(plain(p.ln_z, p.rel_error))
        }
        MethodTag::Quadratic => {
            let p = ln_partition_quadratic(spec, beta, cfg)?;
            Ok(plain(p.ln_z, p.rel_error))
        }
        MethodTag::Improved => {
            let p = improved_components(spec, beta, cfg)?;
            let value = p.ln_improved().ok_or(Error::Breakdown {
                temperature: 1.0 / beta,
                value: (p.z2.value + p.delta.value) * p.ln_scale.exp(),
            })?;
            Ok(LnZ {
                value,
                rel_error: p.rel_error(),
                near_breakdown: p.near_breakdown(),
            })
        }
        MethodTag::Oneloop => Ok(plain(-beta * free_energy_oneloop(spec, beta)?, 1e-16)),
        MethodTag::Exact => {
            let owned;
            let s = match spectrum {
                Some(s) => s,
                None => {
                    owned = converged_spectrum(spec, Some(beta))?;
                    &owned
                }
            };
            let t = exact_thermo(s, beta)?;
            Ok(plain(t.ln_z, t.tail_bound))
        }
    }
}

fn check_temperature(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {t}"
        )));
    }
    Ok(1.0 / t)
}

/// `F = −T ln Z` for `method`.
pub fn free_energy(method: MethodTag, spec: &PotentialSpec, t: f64) -> Result<f64> {
    free_energy_with(method, spec, t, &QuadratureConfig::default())
}

pub fn free_energy_with(method: MethodTag, spec: &PotentialSpec, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let beta = check_temperature(t)?;
    Ok(-t * ln_partition(method, spec, beta, cfg, None)?.value)
}

const LOG_STEP: f64 = 1e-2;
/// Stencil offsets in units of `h/2`.
const OFFSETS: [i32; 7] = [-4, -2, -1, 0, 1, 2, 4];

/// First and second derivatives from the seven samples at `OFFSETS`,
/// with their Richardson error estimates.
fn stencil(f: &[f64; 7], h: f64) -> (f64, f64, f64, f64) {
    let [m4, m2, m1, z, p1, p2, p4] = *f;
    let d1 = |a2: f64, a1: f64, b1: f64, b2: f64, s: f64| (a2 - 8.0 * a1 + 8.0 * b1 - b2) / (12.0 * s);
    let d2 = |a2: f64, a1: f64, c: f64, b1: f64, b2: f64, s: f64| {
        (-a2 + 16.0 * a1 - 30.0 * c + 16.0 * b1 - b2) / (12.0 * s * s)
    };
    let d1_coarse = d1(m4, m2, p2, p4, h);
    let d1_fine = d1(m2, m1, p1, p2, 0.5 * h);
    let d2_coarse = d2(m4, m2, z, p2, p4, h);
    let d2_fine = d2(m2, m1, z, p1, p2, 0.5 * h);
    let d1r = d1_fine + (d1_fine - d1_coarse) / 15.0;
    let d2r = d2_fine + (d2_fine - d2_coarse) / 15.0;
    (
        d1r,
        (d1_fine - d1_coarse).abs() / 15.0,
        d2r,
        (d2_fine - d2_coarse).abs() / 15.0,
    )
}

fn finite_difference_point(
    method: MethodTag,
    spec: &PotentialSpec,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<ThermoPoint> {
    let mut flags = PointFlags::default();
    let mut f = [0.0; 7];
    let mut noise = 0.0f64;
    for (k, off) in OFFSETS.iter().enumerate() {
        let tk = t * (0.5 * LOG_STEP * *off as f64).exp();
        match ln_partition(method, spec, 1.0 / tk, cfg, None) {
            Ok(z) => {
                f[k] = -tk * z.value;
                noise = noise.max(tk * z.rel_error.max(f64::EPSILON * z.value.abs()));
                flags.near_breakdown |= z.near_breakdown;
            }
            Err(e) if e.is_breakdown() => {
                if *off == 0 {
                    flags.breakdown = true;
                } else {
                    flags.stencil_breakdown = true;
                }
                f[k] = f64::NAN;
            }
            Err(e) => return Err(e),
        }
    }
    if flags.breakdown {
        flags.stencil_breakdown = false;
        return Ok(ThermoPoint {
            temperature: t,
            free_energy: f64::NAN,
            internal_energy: f64::NAN,
            specific_heat: f64::NAN,
            error: f64::NAN,
            flags,
        });
    }
    let (d1, e1, d2, e2) = stencil(&f, LOG_STEP);
    // stencil weights sum to at most 64/12 in units of 1/(h/2)²
    let h = 0.5 * LOG_STEP;
    let noise_d1 = noise * 2.0 / h;
    let noise_d2 = noise * 6.0 / (h * h);
    let error = (e1 + e2 + noise_d1 + noise_d2) / t;
    let (u, c) = if flags.stencil_breakdown {
        (f64::NAN, f64::NAN)
    } else {
        (f[3] - d1, (d1 - d2) / t)
    };
    Ok(ThermoPoint {
        temperature: t,
        free_energy: f[3],
        internal_energy: u,
        specific_heat: c,
        error,
        flags,
    })
}

fn exact_point(spectrum: &Spectrum, t: f64) -> Result<ThermoPoint> {
    let beta = 1.0 / t;
    let s = exact_thermo(spectrum, beta)?;
    Ok(ThermoPoint {
        temperature: t,
        free_energy: s.free_energy(beta),
        internal_energy: s.energy,
        specific_heat: s.heat_capacity,
        error: s.tail_bound * s.heat_capacity.max(1.0),
        flags: PointFlags::default(),
    })
}

/// One point per temperature; breakdowns are flagged, other failures abort.
pub fn thermo_curve(method: MethodTag, spec: &PotentialSpec, grid: &[f64]) -> Result<Vec<ThermoPoint>> {
    thermo_curve_with(method, spec, grid, &QuadratureConfig::default())
}

pub fn thermo_curve_with(
    method: MethodTag,
    spec: &PotentialSpec,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<ThermoPoint>> {
    for &t in grid {
        check_temperature(t)?;
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "temperature grid must be strictly increasing".into(),
        ));
    }
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    match method {
        MethodTag::Exact => {
            let t_max = grid[grid.len() - 1];
            let s = converged_spectrum(spec, Some(1.0 / t_max))?;
            grid.par_iter().map(|&t| exact_point(&s, t)).collect()
        }
        _ => grid
            .par_iter()
            .map(|&t| finite_difference_point(method, spec, t, cfg))
            .collect(),
    }
}

/// Location and value of the maximum of the quadratic free energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticMaximum {
    pub temperature: f64,
    pub free_energy: f64,
    /// The scan maximum sat strictly inside the scanned range.
    pub interior: bool,
}

/// Maximizes `F_quadratic(T)`: a 40-point log scan over
/// `[0.05, 5]·max(ω, κ^{1/3})`, then golden-section search to `1e−4` in `T`.
pub fn quadratic_maximum(spec: &PotentialSpec, cfg: &QuadratureConfig) -> Result<QuadraticMaximum> {
    let scale = spec.omega().max(spec.kappa().cbrt());
    let (lo, hi) = (0.05 * scale, 5.0 * scale);
    let n = 40;
    let ts: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect();
    let f = |t: f64| free_energy_with(MethodTag::Quadratic, spec, t, cfg);
    let fs = ts.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let best = (0..n).fold(0, |b, i| if fs[i] > fs[b] { i } else { b });
    let interior = best > 0 && best + 1 < n;
    let (mut a, mut b) = (ts[best.saturating_sub(1)], ts[(best + 1).min(n - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-4 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    let ft = f(t)?;
    let (temperature, free_energy) = [(t, ft), (c, fc), (d, fd), (ts[best], fs[best])]
        .into_iter()
        .fold((t, ft), |acc, p| if p.1 > acc.1 { p } else { acc });
    Ok(QuadraticMaximum {
        temperature,
        free_energy,
        interior,
    })
}

/// Ground-state energy estimated by the maximum of the quadratic free
/// energy; `ω/2` for the harmonic oscillator.
pub fn ground_state_estimate(spec: &PotentialSpec) -> Result<f64> {
    if spec.is_free() {
        return Ok(0.5 * spec.omega());
    }
    Ok(quadratic_maximum(spec, &QuadratureConfig::default())?.free_energy)
}

/// Root of `⟨S_I⟩(Θ) = (3g/4)∫₀^Θ G(θ, θ)² dθ = 1` at `ω̄ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TMin {
    pub theta: f64,
    /// `1/Θ`, in units of `ω`.
    pub t_min: f64,
}

/// `⟨S_I⟩` at the origin of the zero mode as a function of `Θ`.
pub fn interaction_expectation(g: f64, theta: f64) -> Result<f64> {
    Ok(0.75 * g * DirichletKernel::new(1.0, theta)?.diag_square_integral())
}

/// Bisection for `T_min(g)` on `Θ ∈ [1e−4, Θ_hi]`.
///
/// `Θ_hi = max(64/(3g), 4(40/g)^{1/3})`: the first term covers the large-`Θ`
/// regime where `⟨S_I⟩ ≈ 3gΘ/16`, the second the small-`Θ` regime where
/// `⟨S_I⟩ ≈ gΘ³/40`, which is where the root lies for `g ≳ 10`.
pub fn t_min(g: f64) -> Result<TMin> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter(format!("coupling must be positive, got {g}")));
    }
    let (mut lo, mut hi) = (1e-4, (64.0 / (3.0 * g)).max(4.0 * (40.0 / g).cbrt()));
    if hi <= lo {
        return Err(Error::InvalidParameter(format!(
            "coupling {g} too large for the bracket"
        )));
    }
    let f = |th: f64| interaction_expectation(g, th).map(|s| s - 1.0);
    if f(hi)? < 0.0 {
        return Err(Error::NoCrossing { g, theta_max: hi });
    }
    if f(lo)? > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "<S_I> already exceeds 1 at theta = {lo} for g = {g}"
        )));
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    Ok(TMin {
        theta,
        t_min: 1.0 / theta,
    })
}
