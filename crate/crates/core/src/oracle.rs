//! Reference results independent of the zero-mode machinery.
//!
//! * Exact spectra from diagonalizing `H = p²/2m + ½mω²x² + (λ/4)x⁴` in a
//!   truncated harmonic-oscillator basis. The quartic coefficient is `λ/4`;
//!   with `λ = 0.4` the ground state is `E₀ ≈ 0.559`, the known value for an
//!   `x⁴` coefficient of `0.1`.
//! * The first-order thermal perturbation result around the harmonic
//!   oscillator.
//!
//! Matrices are built in the mass-rescaled coordinate `u = √m·x`, where the
//! Hamiltonian becomes `P²/2 + ω²U²/2 + (κ/4)U⁴` with `κ = λ/m²`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hyper::coth;
use crate::model::PotentialSpec;
use crate::zeromode::sho_free_energy_closed;

/// Levels whose estimated error exceeds this are not used.
const LEVEL_TOL: f64 = 1e-9;
/// Largest ground-state shift accepted between basis sizes.
const GROUND_TOL: f64 = 1e-6;
/// Truncated tail may be at most this fraction of `Z`.
const TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_BASIS: usize = 128;
pub const MAX_BASIS: usize = 2048;

/// `⟨i|U²|j⟩` in the basis of frequency `ω_b`.
fn x2(i: usize, j: usize, wb: f64) -> f64 {
    let (lo, hi) = (i.min(j), i.max(j));
    match hi - lo {
        0 => (2 * lo + 1) as f64 / (2.0 * wb),
        2 => (((lo + 1) * (lo + 2)) as f64).sqrt() / (2.0 * wb),
        _ => 0.0,
    }
}

/// `⟨i|P²|j⟩`.
fn p2(i: usize, j: usize, wb: f64) -> f64 {
    let (lo, hi) = (i.min(j), i.max(j));
    match hi - lo {
        0 => wb * (lo as f64 + 0.5),
        2 => -0.5 * wb * (((lo + 1) * (lo + 2)) as f64).sqrt(),
        _ => 0.0,
    }
}

/// `⟨i|U⁴|j⟩ = Σ_k ⟨i|U²|k⟩⟨k|U²|j⟩`; exact because `U²` only couples
/// `k = i, i ± 2`.
fn x4(i: usize, j: usize, wb: f64) -> f64 {
    if i.abs_diff(j) > 4 {
        return 0.0;
    }
    [i.checked_sub(2), Some(i), Some(i + 2)]
        .into_iter()
        .flatten()
        .map(|k| x2(i, k, wb) * x2(k, j, wb))
        .sum()
}

fn h_element(spec: &PotentialSpec, wb: f64, i: usize, j: usize) -> f64 {
    let w2 = spec.omega() * spec.omega();
    0.5 * p2(i, j, wb) + 0.5 * w2 * x2(i, j, wb) + 0.25 * spec.kappa() * x4(i, j, wb)
}

/// Dense `N × N` Hamiltonian in the harmonic basis of frequency `ω_b`.
pub fn hamiltonian_matrix(spec: &PotentialSpec, omega_b: f64, n: usize) -> Result<DMatrix<f64>> {
    check_basis(omega_b, n)?;
    Ok(DMatrix::from_fn(n, n, |i, j| h_element(spec, omega_b, i, j)))
}

fn check_basis(omega_b: f64, n: usize) -> Result<()> {
    if !(omega_b > 0.0 && omega_b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "basis frequency must be positive, got {omega_b}"
        )));
    }
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "basis size must be at least 4, got {n}"
        )));
    }
    Ok(())
}

/// Basis frequency minimizing the Gaussian trial energy:
/// the positive root of `ω_b³ − ω²ω_b − 3κ/2 = 0`.
pub fn default_basis_frequency(spec: &PotentialSpec) -> f64 {
    let w2 = spec.omega() * spec.omega();
    let c = 1.5 * spec.kappa();
    let mut x = spec.omega().max(c.cbrt());
    for _ in 0..100 {
        let f = x * x * x - w2 * x - c;
        let step = f / (3.0 * x * x - w2);
        x -= step;
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    x
}

/// Sorted eigenvalues of `H` restricted to the first `n` basis states.
/// `H` conserves parity, so the even and odd blocks are solved separately.
fn eigenvalues(spec: &PotentialSpec, wb: f64, n: usize) -> Vec<f64> {
    let mut all = Vec::with_capacity(n);
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..n).step_by(2).collect();
        let m = idx.len();
        let block = DMatrix::from_fn(m, m, |a, b| h_element(spec, wb, idx[a], idx[b]));
        all.extend(SymmetricEigen::new(block).eigenvalues.iter().copied());
    }
    all.sort_by(f64::total_cmp);
    all
}

/// Certified low-lying levels with per-level error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub basis_size: usize,
    pub omega_b: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `|E_n(N) − E_n(N/2)|`, an upper bound for the variational error at `N`.
    pub errors: Vec<f64>,
}

impl Spectrum {
    pub fn ground(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest certified level.
    pub fn top(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum keeps at least one level")
    }
}

/// Diagonalizes at `N` and `N/2`. Levels are kept from the bottom up while
/// the two sizes agree to within `1e-9·max(1, |E|)`, at most `N/2` of them.
pub fn spectrum(spec: &PotentialSpec, n: usize, omega_b: f64) -> Result<Spectrum> {
    check_basis(omega_b, n)?;
    let half = eigenvalues(spec, omega_b, n / 2);
    let full = eigenvalues(spec, omega_b, n);
    certify(n, omega_b, &full, &half)
}

fn certify(n: usize, omega_b: f64, full: &[f64], half: &[f64]) -> Result<Spectrum> {
    let shift = (full[0] - half[0]).abs();
    if shift > GROUND_TOL {
        return Err(Error::SpectrumNotConverged { shift, tol: GROUND_TOL });
    }
    let mut eigenvalues = Vec::new();
    let mut errors = Vec::new();
    for (e, e_half) in full.iter().zip(half) {
        let err = (e - e_half).abs();
        if err > LEVEL_TOL * e.abs().max(1.0) && !eigenvalues.is_empty() {
            break;
        }
        eigenvalues.push(*e);
        errors.push(err);
    }
    Ok(Spectrum {
        basis_size: n,
        omega_b,
        eigenvalues,
        errors,
    })
}

/// Spectrum at the default basis frequency, doubling `N` from 128 until the
/// ground state is stable and, if `beta` is given, until the certified
/// levels leave a negligible Boltzmann tail at that temperature.
pub fn converged_spectrum(spec: &PotentialSpec, beta: Option<f64>) -> Result<Spectrum> {
    let wb = default_basis_frequency(spec);
    let mut n = DEFAULT_BASIS;
    let mut half = eigenvalues(spec, wb, n / 2);
    loop {
        let full = eigenvalues(spec, wb, n);
        let attempt = certify(n, wb, &full, &half);
        let last = n >= MAX_BASIS;
        match attempt {
            Ok(s) => match beta {
                None => return Ok(s),
                Some(b) => match exact_thermo(&s, b) {
                    Ok(_) => return Ok(s),
                    Err(e) if last => return Err(e),
                    Err(_) => {}
                },
            },
            Err(e) if last => return Err(e),
            Err(_) => {}
        }
        half = full;
        n *= 2;
    }
}

/// `ln Z`, `U = ⟨E⟩` and `C = β²Var(E)` from a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralThermo {
    pub ln_z: f64,
    pub energy: f64,
    pub heat_capacity: f64,
    /// Upper bound on the neglected tail relative to `Z`.
    pub tail_bound: f64,
}

impl SpectralThermo {
    pub fn free_energy(&self, beta: f64) -> f64 {
        -self.ln_z / beta
    }
}

/// Boltzmann sums over certified levels, shifted by `E₀`.
///
/// Levels above `E_max` are bounded by a geometric tail with the last level
/// spacing `Δ`, `e^{−β(E_max−E₀)}·e^{−βΔ}/(1 − e^{−βΔ})`, which holds because
/// the spacings do not shrink for these potentials.
pub fn exact_thermo(spectrum: &Spectrum, beta: f64) -> Result<SpectralThermo> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let e = &spectrum.eigenvalues;
    if e.len() < 2 {
        return Err(Error::InsufficientLevels {
            bound: f64::INFINITY,
            limit: TAIL_TOL,
        });
    }
    let e0 = e[0];
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for &en in e {
        let d = en - e0;
        let p = (-beta * d).exp();
        z += p;
        m1 += p * d;
        m2 += p * d * d;
    }
    let gap = e[e.len() - 1] - e[e.len() - 2];
    let bd = beta * gap;
    let tail = (-beta * (e[e.len() - 1] - e0)).exp() * (-bd).exp() / -(-bd).exp_m1();
    let bound = tail / z;
    if !(bound <= TAIL_TOL) {
        return Err(Error::InsufficientLevels { bound, limit: TAIL_TOL });
    }
    let mean = m1 / z;
    let var = (m2 / z - mean * mean).max(0.0);
    Ok(SpectralThermo {
        ln_z: -beta * e0 + z.ln(),
        energy: e0 + mean,
        heat_capacity: beta * beta * var,
        tail_bound: bound,
    })
}

/// `Z = Σ e^{−βE_n}` over certified levels.
pub fn partition_exact(spectrum: &Spectrum, beta: f64) -> Result<f64> {
    Ok(exact_thermo(spectrum, beta)?.ln_z.exp())
}

/// First-order thermal perturbation theory:
/// `F = ω/2 + ln(1 − e^{−βω})/β + (3κ/4)Δ_F(0)²`, `Δ_F(0) = coth(βω/2)/(2ω)`.
pub fn free_energy_oneloop(spec: &PotentialSpec, beta: f64) -> Result<f64> {
    let w = spec.omega();
    if w == 0.0 {
        return Err(Error::InfraredDivergent);
    }
    let f0 = sho_free_energy_closed(w, beta)?;
    let d = coth(0.5 * beta * w) / (2.0 * w);
    Ok(f0 + 0.75 * spec.kappa() * d * d)
}

/// The same order-`λ` free energy from level shifts:
/// `F₀ + Σ_n p_n E_n⁽¹⁾` with `E_n⁽¹⁾ = (κ/4)·3(2n² + 2n + 1)/(4ω²)` and
/// harmonic occupation probabilities `p_n`.
pub fn free_energy_first_order_spectral(spec: &PotentialSpec, beta: f64) -> Result<f64> {
    let w = spec.omega();
    if w == 0.0 {
        return Err(Error::InfraredDivergent);
    }
    let f0 = sho_free_energy_closed(w, beta)?;
    let q = (-beta * w).exp();
    let norm = -(-beta * w).exp_m1();
    let mut shift = 0.0;
    let mut p = norm;
    let mut n = 0.0f64;
    loop {
        let e1 = 0.25 * spec.kappa() * 3.0 * (2.0 * n * n + 2.0 * n + 1.0) / (4.0 * w * w);
        let term = p * e1;
        shift += term;
        if term <= 1e-17 * shift.abs() || p == 0.0 {
            break;
        }
        p *= q;
        n += 1.0;
    }
    Ok(f0 + shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anh(l: f64) -> PotentialSpec {
        PotentialSpec::anharmonic(1.0, l).unwrap()
    }

    #[test]
    fn matrix_examples() {
        let h = hamiltonian_matrix(&anh(0.0), 1.0, 8).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { i as f64 + 0.5 } else { 0.0 };
                assert!((h[(i, j)] - expect).abs() < 1e-15);
            }
        }
        let h = hamiltonian_matrix(&anh(0.4), 1.0, 16).unwrap();
        assert!((h[(0, 0)] - 0.575).abs() < 1e-15);
        assert!((&h - h.transpose()).amax() < 1e-14);
        assert!(hamiltonian_matrix(&anh(0.4), 1.0, 3).is_err());
    }

    #[test]
    fn x4_is_square_of_x2() {
        let n = 20;
        let wb = 1.3;
        let a = DMatrix::from_fn(n + 2, n + 2, |i, j| x2(i, j, wb));
        let sq = &a * &a;
        for i in 0..n {
            for j in 0..n {
                assert!((x4(i, j, wb) - sq[(i, j)]).abs() < 1e-13);
            }
        }
        // ⟨0|U⁴|0⟩ = 3/(4ω_b²)
        assert!((x4(0, 0, 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn basis_independence_free_theory() {
        let s = spectrum(&anh(0.0), 256, 1.4).unwrap();
        for (n, e) in s.eigenvalues.iter().take(10).enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn ground_state_examples() {
        let s = converged_spectrum(&anh(0.0), None).unwrap();
        assert!((s.ground() - 0.5).abs() < 1e-12);
        let s = converged_spectrum(&anh(0.4), None).unwrap();
        assert!((s.ground() - 0.559).abs() < 0.002);
        let s = converged_spectrum(&anh(200.0), None).unwrap();
        assert!((s.ground() - 2.5).abs() < 0.005);
    }

    #[test]
    fn basis_frequency_independence() {
        let spec = anh(0.4);
        let wb = default_basis_frequency(&spec);
        let a = spectrum(&spec, 256, wb).unwrap();
        let b = spectrum(&spec, 256, 1.5 * wb).unwrap();
        assert!((a.ground() - b.ground()).abs() <= a.errors[0] + b.errors[0] + 1e-12);
        assert!(a.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn variational_frequency() {
        assert!((default_basis_frequency(&anh(0.0)) - 1.0).abs() < 1e-15);
        let s = PotentialSpec::new(1.0, 0.0, 2.0).unwrap();
        assert!((default_basis_frequency(&s) - 3.0f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn partition_examples() {
        let s = converged_spectrum(&anh(0.0), Some(1.0)).unwrap();
        let z = partition_exact(&s, 1.0).unwrap();
        let expect = (-0.5f64).exp() / (1.0 - (-1.0f64).exp());
        assert!((z / expect - 1.0).abs() < 1e-10);
        assert!((z - 0.959_517).abs() < 5e-7);

        let s = converged_spectrum(&anh(0.4), Some(1.0)).unwrap();
        let f = exact_thermo(&s, 200.0).unwrap().free_energy(200.0);
        assert!((f - 0.559).abs() < 0.002);
    }

    #[test]
    fn refuses_truncated_tail() {
        let s = spectrum(&anh(0.4), 48, 1.0).unwrap();
        assert!(matches!(exact_thermo(&s, 0.01), Err(Error::InsufficientLevels { .. })));
    }

    #[test]
    fn oneloop_examples() {
        let f = free_energy_oneloop(&anh(0.0), 1.0).unwrap();
        assert!((f - sho_free_energy_closed(1.0, 1.0).unwrap()).abs() < 1e-15);
        let f = free_energy_oneloop(&anh(0.4), 1.0).unwrap();
        assert!((f - 0.392_527).abs() < 5e-7);
        let zero = PotentialSpec::new(1.0, 0.0, 0.4).unwrap();
        assert_eq!(free_energy_oneloop(&zero, 1.0), Err(Error::InfraredDivergent));
    }

    #[test]
    fn oneloop_matches_level_shift_sum() {
        for l in [0.01, 0.4, 2.0] {
            for beta in [1.0, 2.0, 5.0, 20.0] {
                let a = free_energy_oneloop(&anh(l), beta).unwrap();
                let b = free_energy_first_order_spectral(&anh(l), beta).unwrap();
                assert!((a - b).abs() < 1e-6, "λ = {l}, β = {beta}");
            }
        }
    }

    #[test]
    fn level_shift_matches_matrix_diagonal() {
        // E_n⁽¹⁾ from the matrix elements against the closed form
        for n in 0..30 {
            let closed = 3.0 * (2.0 * (n * n) as f64 + 2.0 * n as f64 + 1.0) / 4.0;
            assert!((x4(n, n, 1.0) - closed).abs() < 1e-12);
        }
    }
}
