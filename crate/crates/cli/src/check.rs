//! Self-check suite: closed forms against independent numerics.
//!
//! The determinant is injectable so that a deliberately wrong formula can be
//! shown to trip the Gelfand–Yaglom cross-check.

use zmstat::green::DirichletKernel;
use zmstat::oracle::{free_energy_first_order_spectral, free_energy_oneloop};
use zmstat::quad::Integrator;
use zmstat::zeromode::{
    ln_partition_quadratic, partition_classical, partition_classical_closed, partition_from_effective_potential,
    partition_quadratic, quadratic_weight, sho_free_energy_closed, sho_ln_partition_boundary,
};
use zmstat::{PotentialSpec, QuadratureConfig};

/// `(ω̄, L) ↦ ω̄/(2π sinh ω̄L)`.
pub type DetFn = dyn Fn(f64, f64) -> f64 + Sync;

pub fn library_det(omega_bar: f64, length: f64) -> f64 {
    DirichletKernel::new(omega_bar, length)
        .map(|k| k.det_prefactor())
        .unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn(&DetFn) -> Result<String, String>);

const CHECKS: [Check; 12] = [
    ("sho_cross_method", sho_cross_method),
    ("free_theory_reduction", free_theory_reduction),
    ("green_ode_residual", green_ode_residual),
    ("green_derivative_jump", green_derivative_jump),
    ("green_boundary_and_symmetry", green_boundary_and_symmetry),
    ("det_gelfand_yaglom", det_gelfand_yaglom),
    ("kernel_integrals_vs_quadrature", kernel_integrals_vs_quadrature),
    ("large_argument_probe", large_argument_probe),
    ("weight_evenness", weight_evenness),
    ("effective_potential_reassembly", effective_potential_reassembly),
    ("classical_closed_forms", classical_closed_forms),
    ("oneloop_vs_level_shifts", oneloop_vs_level_shifts),
];

pub fn run_checks(det: &DetFn) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = match f(det) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome { name, passed, detail }
        })
        .collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn verdict(what: &str, err: f64, tol: f64) -> Result<String, String> {
    let msg = format!("{what}: max deviation {err:.3e} (tolerance {tol:.0e})");
    if err < tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn kernel(w: f64, l: f64) -> Result<DirichletKernel, String> {
    DirichletKernel::new(w, l).map_err(|e| e.to_string())
}

fn sho_cross_method(_: &DetFn) -> Result<String, String> {
    let mut err = 0.0f64;
    for bw in log_grid(0.05, 50.0, 40) {
        let a = sho_free_energy_closed(1.0, bw).map_err(|e| e.to_string())?;
        let b = -sho_ln_partition_boundary(1.0, bw).map_err(|e| e.to_string())? / bw;
        err = err.max((a - b).abs());
    }
    verdict("closed F vs boundary decomposition", err, 1e-12)
}

fn free_theory_reduction(_: &DetFn) -> Result<String, String> {
    let spec = PotentialSpec::anharmonic(1.0, 0.0).map_err(|e| e.to_string())?;
    let cfg = QuadratureConfig::default();
    let mut err = 0.0f64;
    for bw in log_grid(0.05, 50.0, 40) {
        let z2 = ln_partition_quadratic(&spec, bw, &cfg).map_err(|e| e.to_string())?.ln_z;
        let zb = sho_ln_partition_boundary(1.0, bw).map_err(|e| e.to_string())?;
        err = err.max((z2 - zb).exp_m1().abs());
    }
    verdict("Z2 at lambda = 0 vs oscillator", err, 1e-9)
}

fn green_ode_residual(_: &DetFn) -> Result<String, String> {
    let mut err = 0.0f64;
    for &(w, l) in &[(0.5, 1.0), (1.0, 1.0), (3.0, 2.0), (10.0, 1.5)] {
        let k = kernel(w, l)?;
        let h = 1e-3 / w.max(1.0);
        for &frac in &[0.3, 0.5] {
            let tp = frac * l;
            for i in 1..20 {
                let t = l * i as f64 / 20.0;
                if (t - tp).abs() < 3.0 * h {
                    continue;
                }
                let g = |x: f64| k.green_value(x, tp).unwrap_or(f64::NAN);
                let d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
                let scale = 1.0f64.max(w * w * k.sup_bound());
                err = err.max((-d2 + w * w * g(t)).abs() / scale);
            }
        }
    }
    verdict("-G'' + w^2 G away from the source", err, 1e-5)
}

fn green_derivative_jump(_: &DetFn) -> Result<String, String> {
    let mut err = 0.0f64;
    for &(w, l) in &[(0.5, 1.0), (1.0, 1.0), (3.0, 2.0), (10.0, 1.5)] {
        let k = kernel(w, l)?;
        let h = 1e-4 / w.max(1.0);
        for &frac in &[0.2, 0.5, 0.7] {
            let tp = frac * l;
            let g = |x: f64| k.green_value(x, tp).unwrap_or(f64::NAN);
            let right = (-3.0 * g(tp) + 4.0 * g(tp + h) - g(tp + 2.0 * h)) / (2.0 * h);
            let left = (3.0 * g(tp) - 4.0 * g(tp - h) + g(tp - 2.0 * h)) / (2.0 * h);
            err = err.max((right - left + 1.0).abs());
        }
    }
    verdict("dG/dtau jump at the source vs -1", err, 1e-6)
}

fn green_boundary_and_symmetry(_: &DetFn) -> Result<String, String> {
    for &(w, l) in &[(0.0, 1.0), (1.0, 1.0), (3.0, 2.0), (40.0, 30.0)] {
        let k = kernel(w, l)?;
        for i in 0..=10 {
            let t = l * i as f64 / 10.0;
            let ends = [k.green_value(0.0, t), k.green_value(l, t)];
            if ends.iter().any(|v| *v != Ok(0.0)) {
                return Err(format!("nonzero boundary value at w = {w}, L = {l}, tau = {t}"));
            }
            for j in 0..=10 {
                let s = l * j as f64 / 10.0;
                if k.green_value(t, s) != k.green_value(s, t) {
                    return Err(format!("asymmetric at ({t}, {s}) for w = {w}, L = {l}"));
                }
            }
        }
    }
    Ok("boundary values exactly 0, symmetry exact".into())
}

fn det_gelfand_yaglom(det: &DetFn) -> Result<String, String> {
    let mut err = 0.0f64;
    for &x in &[1e-6, 1e-3, 0.1, 1.0, 5.0, 20.0, 50.0] {
        for &l in &[0.5, 2.0] {
            let w = x / l;
            let gy = kernel(w, l)?.det_prefactor_gelfand_yaglom();
            err = err.max((det(w, l) / gy - 1.0).abs());
        }
    }
    verdict("determinant prefactor vs Gelfand-Yaglom", err, 1e-10)
}

fn kernel_integrals_vs_quadrature(_: &DetFn) -> Result<String, String> {
    let q = Integrator::new(QuadratureConfig::default()).map_err(|e| e.to_string())?;
    let mut err = 0.0f64;
    for &(w, l) in &[(0.0, 1.0), (1.0, 1.0), (2.0, 3.0), (8.0, 2.0)] {
        let k = kernel(w, l)?;
        let row_q = |t: f64| -> Result<f64, String> {
            let g = |s: f64| k.green_value(t, s).unwrap_or(f64::NAN);
            let a = q.integrate(0.0, t, g).map_err(|e| e.to_string())?.value;
            let b = q.integrate(t, l, g).map_err(|e| e.to_string())?.value;
            Ok(a + b)
        };
        for i in 0..=8 {
            let t = l * i as f64 / 8.0;
            let closed = k.kernel_row_integral(t).map_err(|e| e.to_string())?;
            err = err.max((closed - row_q(t)?).abs() / k.kernel_total_integral() * l);
        }
        let mut fail = None;
        let total = q
            .integrate(0.0, l, |t| match row_q(t) {
                Ok(v) => v,
                Err(e) => {
                    fail.get_or_insert(e);
                    0.0
                }
            })
            .map_err(|e| e.to_string())?
            .value;
        if let Some(e) = fail {
            return Err(e);
        }
        err = err.max((total / k.kernel_total_integral() - 1.0).abs());
    }
    verdict("row and total kernel integrals vs quadrature (relative)", err, 1e-8)
}

fn large_argument_probe(_: &DetFn) -> Result<String, String> {
    let k = kernel(1.0, 600.0)?;
    let g = k.green_value(300.0, 300.0).map_err(|e| e.to_string())?;
    let row = k.kernel_row_integral(300.0).map_err(|e| e.to_string())?;
    let ln_det = k.ln_det_prefactor();
    let ln_det_asym = -(2.0 * std::f64::consts::PI).ln() - 600.0 + 2f64.ln();
    let errs = [(g - 0.5).abs(), (row - 1.0).abs(), (ln_det / ln_det_asym - 1.0).abs()];
    if errs.iter().all(|e| e.is_finite() && *e < 1e-12) && k.det_prefactor() > 0.0 {
        Ok(format!(
            "w L = 600: G, row integral and ln det finite (max deviation {:.1e})",
            worst(errs)
        ))
    } else {
        Err(format!("w L = 600: deviations {errs:?}"))
    }
}

fn weight_evenness(_: &DetFn) -> Result<String, String> {
    for &(m, w, l) in &[(1.0, 1.0, 0.4), (2.0, 0.0, 3.0), (0.5, 2.0, 50.0)] {
        let spec = PotentialSpec::new(m, w, l).map_err(|e| e.to_string())?;
        for &beta in &[0.1, 1.0, 10.0] {
            for i in 0..20 {
                let x = 0.17 * i as f64;
                let a = quadratic_weight(&spec, beta, x).map_err(|e| e.to_string())?;
                let b = quadratic_weight(&spec, beta, -x).map_err(|e| e.to_string())?;
                if a.log_weight != b.log_weight || a.sigma_eta < 0.0 {
                    return Err(format!("weight not even or sigma_eta < 0 at x0 = {x}"));
                }
            }
        }
    }
    Ok("weights even, sigma_eta >= 0".into())
}

fn effective_potential_reassembly(_: &DetFn) -> Result<String, String> {
    let cfg = QuadratureConfig::default();
    let mut err = 0.0f64;
    for &(m, w, l, beta) in &[(1.0, 1.0, 0.4, 1.0), (2.0, 0.5, 3.0, 4.0), (1.0, 0.0, 0.4, 0.05)] {
        let spec = PotentialSpec::new(m, w, l).map_err(|e| e.to_string())?;
        let z = partition_quadratic(&spec, beta, &cfg).map_err(|e| e.to_string())?;
        let r = partition_from_effective_potential(&spec, beta, &cfg).map_err(|e| e.to_string())?;
        err = err.max((r / z - 1.0).abs());
    }
    verdict("Z2 rebuilt from V_eff", err, 1e-12)
}

fn classical_closed_forms(_: &DetFn) -> Result<String, String> {
    let cfg = QuadratureConfig::default();
    let mut err = 0.0f64;
    for spec in [
        PotentialSpec::new(1.0, 1.0, 0.0),
        PotentialSpec::new(1.0, 0.0, 0.4),
        PotentialSpec::new(3.0, 0.0, 2.0),
    ] {
        let spec = spec.map_err(|e| e.to_string())?;
        for &beta in &[0.02, 1.0, 5.0] {
            let z = partition_classical(&spec, beta, &cfg).map_err(|e| e.to_string())?;
            let c = partition_classical_closed(&spec, beta).ok_or("no closed form")?;
            err = err.max((z / c - 1.0).abs());
        }
    }
    verdict("classical Z vs Gaussian and Gamma-function forms", err, 1e-10)
}

fn oneloop_vs_level_shifts(_: &DetFn) -> Result<String, String> {
    let mut err = 0.0f64;
    for &l in &[0.01, 0.4, 2.0] {
        let spec = PotentialSpec::anharmonic(1.0, l).map_err(|e| e.to_string())?;
        for &beta in &[1.0, 3.0, 10.0] {
            let a = free_energy_oneloop(&spec, beta).map_err(|e| e.to_string())?;
            let b = free_energy_first_order_spectral(&spec, beta).map_err(|e| e.to_string())?;
            err = err.max((a - b).abs());
        }
    }
    verdict("one-loop F vs thermal sum of first-order level shifts", err, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_checks(&library_det) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn perturbed_determinant_is_caught() {
        let bad = |w: f64, l: f64| library_det(w, l) * (1.0 + 1e-6 * w * l);
        let out = run_checks(&bad);
        let gy = out.iter().find(|c| c.name == "det_gelfand_yaglom").unwrap();
        assert!(!gy.passed);
        assert!(out.iter().filter(|c| c.name != "det_gelfand_yaglom").all(|c| c.passed));
    }
}
