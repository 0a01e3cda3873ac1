//! Acceptance suite: ten criteria, one PASS/FAIL line each, with wall-clock
//! budgets. Runs as a plain binary so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use zmstat::green::DirichletKernel;
use zmstat::model::PotentialSpec;
use zmstat::oracle::{converged_spectrum, exact_thermo};
use zmstat::quad::{Integrator, QuadratureConfig};
use zmstat::series::{sine_coefficients, MatsubaraSeries, SampledPath};
use zmstat::thermo::{free_energy, ground_state_estimate, t_min, thermo_curve, MethodTag};
use zmstat::zeromode::{
    classical_path, effective_potential, i0_profile, partition_from_effective_potential, partition_quadratic,
    quadratic_weight, sho_free_energy_closed, sho_partition_boundary,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn anh(l: f64) -> PotentialSpec {
    PotentialSpec::anharmonic(1.0, l).expect("valid coupling")
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn sho_identity() -> Outcome {
    let mut worst = 0.0f64;
    for bw in log_grid(0.05, 50.0, 40) {
        let closed = sho_free_energy_closed(1.0, bw).map_err(e2s)?;
        let boundary = -sho_partition_boundary(1.0, bw).map_err(e2s)?.ln() / bw;
        worst = worst.max((closed - boundary).abs());
    }
    ensure(worst < 1e-12, format!("max |ΔF| = {worst:.2e} (< 1e-12)"))
}

fn free_theory() -> Outcome {
    let mut worst = 0.0f64;
    for bw in log_grid(0.05, 50.0, 40) {
        let z2 = partition_quadratic(&anh(0.0), bw, &cfg()).map_err(e2s)?;
        // (2cosh βω − 2)^{−1/2} evaluated directly
        let z = 1.0 / (2.0 * bw.cosh() - 2.0).sqrt();
        worst = worst.max((z2 / z - 1.0).abs());
    }
    ensure(worst < 1e-9, format!("max relative error {worst:.2e} (< 1e-9)"))
}

fn green_certification() -> Outcome {
    let q = Integrator::new(cfg()).map_err(e2s)?;
    let (mut ode, mut jump, mut det, mut integ) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(w, l) in &[(0.5, 1.0), (1.0, 1.0), (3.0, 2.0), (10.0, 1.5)] {
        let k = DirichletKernel::new(w, l).map_err(e2s)?;
        let hs = 1e-3 / w.max(1.0);
        let hj = 1e-4 / w.max(1.0);
        for &tp in &[0.3 * l, 0.5 * l] {
            let g = |x: f64| k.green_value(x, tp).unwrap();
            for i in 1..20 {
                let t = l * i as f64 / 20.0;
                if (t - tp).abs() > 3.0 * hs {
                    let d2 = (g(t + hs) - 2.0 * g(t) + g(t - hs)) / (hs * hs);
                    ode = ode.max((w * w * g(t) - d2).abs() / (w * w * k.sup_bound()).max(1.0));
                }
                if k.green_value(0.0, t) != Ok(0.0) || k.green_value(l, t) != Ok(0.0) {
                    return Err(format!("nonzero boundary value at ω̄ = {w}, τ = {t}"));
                }
                if k.green_value(t, tp) != k.green_value(tp, t) {
                    return Err(format!("asymmetry at ({t}, {tp})"));
                }
            }
            let right = (-3.0 * g(tp) + 4.0 * g(tp + hj) - g(tp + 2.0 * hj)) / (2.0 * hj);
            let left = (3.0 * g(tp) - 4.0 * g(tp - hj) + g(tp - 2.0 * hj)) / (2.0 * hj);
            jump = jump.max((right - left + 1.0).abs());
        }
        let gy = k.det_prefactor_gelfand_yaglom();
        det = det.max((k.det_prefactor() / gy - 1.0).abs());
        let row_q = |t: f64| {
            let f = |s: f64| k.green_value(t, s).unwrap();
            q.integrate(0.0, t, f).unwrap().value + q.integrate(t, l, f).unwrap().value
        };
        let total_q = q.integrate(0.0, l, row_q).map_err(e2s)?.value;
        integ = integ.max((total_q / k.kernel_total_integral() - 1.0).abs());
        for i in 1..8 {
            let t = l * i as f64 / 8.0;
            let r = k.kernel_row_integral(t).map_err(e2s)?;
            integ = integ.max((row_q(t) / r - 1.0).abs());
        }
    }
    for &x in &[1e-6, 1e-2, 0.5, 20.0, 50.0] {
        let k = DirichletKernel::new(x, 1.0).map_err(e2s)?;
        det = det.max((k.det_prefactor() / k.det_prefactor_gelfand_yaglom() - 1.0).abs());
    }
    let msg = format!(
        "ODE residual {ode:.1e}, jump error {jump:.1e}, det vs Gelfand–Yaglom {det:.1e}, \
         integrals vs quadrature {integ:.1e}; boundary and symmetry exact"
    );
    ensure(ode < 1e-5 && jump < 1e-6 && det < 1e-10 && integ < 1e-8, msg)
}

const LAMBDAS: [f64; 8] = [0.008, 0.04, 0.4, 1.2, 2.0, 4.0, 8.0, 200.0];

fn table_quadratic() -> Outcome {
    let expect = [0.505, 0.518, 0.584, 0.662, 0.718, 0.818, 0.958, 2.450];
    let mut got = Vec::new();
    let mut worst = 0.0f64;
    for (l, e) in LAMBDAS.iter().zip(expect) {
        let v = ground_state_estimate(&anh(*l)).map_err(e2s)?;
        worst = worst.max((v - e).abs());
        got.push(format!("{v:.4}"));
    }
    ensure(
        worst <= 0.01,
        format!("[{}], max deviation {worst:.4} (≤ 0.01)", got.join(", ")),
    )
}

fn table_exact() -> Outcome {
    let expect = [0.501, 0.507, 0.559, 0.638, 0.696, 0.804, 0.952, 2.500];
    let mut got = Vec::new();
    let mut worst = 0.0f64;
    for (l, e) in LAMBDAS.iter().zip(expect) {
        let v = converged_spectrum(&anh(*l), None).map_err(e2s)?.ground();
        worst = worst.max((v - e).abs());
        got.push(format!("{v:.4}"));
    }
    ensure(
        worst <= 0.002,
        format!("[{}], max deviation {worst:.4} (≤ 0.002)", got.join(", ")),
    )
}

fn classical_limit() -> Outcome {
    let spec = PotentialSpec::new(1.0, 0.0, 0.4).map_err(e2s)?;
    let grid = log_grid(0.1, 1000.0, 25);
    let pts = thermo_curve(MethodTag::Quadratic, &spec, &grid).map_err(e2s)?;
    // onset: first grid temperature from which every later point is within 1%
    let mut onset = None;
    for (i, p) in pts.iter().enumerate() {
        if pts[i..].iter().all(|q| (q.specific_heat - 0.75).abs() < 0.0075) {
            onset = Some(p.temperature);
            break;
        }
    }
    let last = pts.last().expect("non-empty grid");
    match onset {
        Some(t) => Ok(format!(
            "C = {:.5} at T = {:.0}; |C − 0.75| < 0.0075 for all T ≥ {t:.3}",
            last.specific_heat, last.temperature
        )),
        None => Err(format!("C = {:.5} at T = {:.0}", last.specific_heat, last.temperature)),
    }
}

fn high_temperature() -> Outcome {
    let spec = anh(0.4);
    let fq = free_energy(MethodTag::Quadratic, &spec, 50.0).map_err(e2s)?;
    let fc = free_energy(MethodTag::Classical, &spec, 50.0).map_err(e2s)?;
    let rel = ((fq - fc) / fc).abs();
    let mut ok = rel < 0.01;
    let mut parts = vec![format!("T = 50: |ΔF|/|F_cl| = {rel:.2e}")];
    let spectrum = converged_spectrum(&spec, Some(1.0 / 3.0)).map_err(e2s)?;
    for t in [1.0, 2.0, 3.0] {
        let fe = exact_thermo(&spectrum, 1.0 / t).map_err(e2s)?.free_energy(1.0 / t);
        let fq = free_energy(MethodTag::Quadratic, &spec, t).map_err(e2s)?;
        let fi = free_energy(MethodTag::Improved, &spec, t).map_err(e2s)?;
        let closer = (fi - fe).abs() < (fq - fe).abs();
        ok &= closer;
        parts.push(format!(
            "T = {t}: |F_imp − F_ex| = {:.1e} vs |F_quad − F_ex| = {:.1e}",
            (fi - fe).abs(),
            (fq - fe).abs()
        ));
    }
    ensure(ok, parts.join("; "))
}

fn t_min_criterion() -> Outcome {
    let r = t_min(50.0).map_err(e2s)?;
    let ts = [0.1, 1.0, 10.0, 50.0]
        .iter()
        .map(|&g| t_min(g).map(|r| r.t_min))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e2s)?;
    let monotone = ts.windows(2).all(|w| w[1] > w[0]);
    ensure(
        (0.8..=1.5).contains(&r.t_min) && monotone,
        format!(
            "T_min(50) = {:.4} (Θ = {:.4}); T_min over g = 0.1, 1, 10, 50: {:.4}, {:.4}, {:.4}, {:.4}",
            r.t_min, r.theta, ts[0], ts[1], ts[2], ts[3]
        ),
    )
}

fn series_identities() -> Outcome {
    let n_grid = 40_001;
    let n = 10_000;
    let target = 2.0 * (1.0f64.cosh() - 1.0) / 1.0f64.sinh();
    let path = SampledPath::from_fn(1.0, n_grid, |t| classical_path(1.0, 1.0, 1.0, t)).map_err(e2s)?;
    let s = sine_coefficients(&path, n).map_err(e2s)?;
    let jump = s.derivative_jump(n).map_err(e2s)?;
    let jump_err = (jump - target).abs();

    // periodic input: the partial sums must fall toward zero like 1/N
    let periodic = MatsubaraSeries::new(
        1.0,
        vec![
            num_complex::Complex64::new(0.5, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(0.5, 0.0),
        ],
    )
    .map_err(e2s)?;
    let sp = sine_coefficients(&periodic.sample(n_grid).map_err(e2s)?, n).map_err(e2s)?;
    let j: Vec<f64> = [100, 1000, 5000, 10_000]
        .iter()
        .map(|&k| sp.derivative_jump(k).unwrap())
        .collect();
    let extrapolated = 2.0 * j[3] - j[2];
    let null_ok = j.windows(2).all(|w| w[1].abs() < w[0].abs()) && extrapolated.abs() < 1e-3;

    let spec = anh(0.4);
    let act = |k: usize| s.truncated(k).action(&spec);
    let sizes = [16usize, 32, 64, 128, 256, 512];
    let diffs: Vec<f64> = sizes.windows(2).map(|w| (act(w[1]) - act(w[0])).abs()).collect();
    let cauchy = diffs.windows(2).all(|w| w[1] < w[0]);

    ensure(
        jump_err < 1e-3 && null_ok && cauchy,
        format!(
            "jump({n}) = {jump:.6} vs {target:.6} (error {jump_err:.1e}); periodic input jump({n}) = {:.1e}, \
             1/N-extrapolated {extrapolated:.1e}; action increments {:.1e} → {:.1e}",
            j[3],
            diffs[0],
            diffs[diffs.len() - 1]
        ),
    )
}

fn property_suite() -> Outcome {
    let mut notes = Vec::new();
    // evenness and Σ_η ≥ 0 on a deterministic parameter lattice
    for &(m, w, l) in &[(1.0, 1.0, 0.4), (0.5, 2.0, 8.0), (2.0, 0.0, 1.0), (1.0, 0.3, 200.0)] {
        let spec = PotentialSpec::new(m, w, l).map_err(e2s)?;
        for beta in log_grid(0.01, 30.0, 12) {
            for i in 0..25 {
                let x = 0.2 * i as f64;
                let a = quadratic_weight(&spec, beta, x).map_err(e2s)?;
                let b = quadratic_weight(&spec, beta, -x).map_err(e2s)?;
                if a.log_weight != b.log_weight {
                    return Err(format!("weight not even at x₀ = {x}"));
                }
                if a.sigma_eta < 0.0 {
                    return Err(format!("Σ_η < 0 at x₀ = {x}"));
                }
            }
        }
    }
    notes.push("weights even, Σ_η ≥ 0".to_string());

    for l in [0.4, 8.0] {
        let pts = thermo_curve(MethodTag::Exact, &anh(l), &log_grid(0.05, 10.0, 30)).map_err(e2s)?;
        if let Some(p) = pts.iter().find(|p| p.specific_heat < 0.0) {
            return Err(format!("exact C < 0 at T = {}", p.temperature));
        }
    }
    notes.push("exact C ≥ 0".into());

    let mut reassembly = 0.0f64;
    for &(m, w, l, beta) in &[
        (1.0, 1.0, 0.4, 1.0),
        (2.0, 0.5, 3.0, 4.0),
        (0.5, 0.0, 0.4, 0.2),
        (1.0, 1.0, 8.0, 10.0),
    ] {
        let spec = PotentialSpec::new(m, w, l).map_err(e2s)?;
        let z = partition_quadratic(&spec, beta, &cfg()).map_err(e2s)?;
        let r = partition_from_effective_potential(&spec, beta, &cfg()).map_err(e2s)?;
        reassembly = reassembly.max((r / z - 1.0).abs());
    }
    notes.push(format!("V_eff reassembly {reassembly:.1e}"));

    let q = Integrator::new(cfg()).map_err(e2s)?;
    let mut i0 = 0.0f64;
    for &(w, l, a) in &[(1.0, 1.0, 1.0), (2.0, 3.0, -0.7), (0.3, 5.0, 2.0), (6.0, 2.0, 1.5)] {
        let k = DirichletKernel::new(w, l).map_err(e2s)?;
        for i in 0..=10 {
            let th = l * i as f64 / 10.0;
            let f = |s: f64| k.green_value(th, s).unwrap();
            let quad = -a * (q.integrate(0.0, th, f).map_err(e2s)?.value + q.integrate(th, l, f).map_err(e2s)?.value);
            i0 = i0.max((i0_profile(w, l, a, th).map_err(e2s)? - quad).abs());
        }
    }
    notes.push(format!("I₀ closed form vs quadrature {i0:.1e}"));

    let spec = anh(0.4);
    let mut veff = 0.0f64;
    for i in 0..=20 {
        let x = -2.0 + 0.2 * i as f64;
        let ve = effective_potential(&spec, 0.01, x).map_err(e2s)?;
        let v = spec.potential_value(x);
        veff = veff.max((ve - v).abs() / v.max(100.0 * 1e-3));
    }
    notes.push(format!("V_eff vs V at T = 100: {:.2}%", 100.0 * veff));

    ensure(reassembly < 1e-12 && i0 < 1e-8 && veff < 0.01, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "SHO cross-method identity",
            budget: Duration::from_millis(100),
            run: sho_identity,
        },
        Criterion {
            id: 2,
            name: "free-theory reduction",
            budget: Duration::from_secs(1),
            run: free_theory,
        },
        Criterion {
            id: 3,
            name: "Green-function certification",
            budget: Duration::from_secs(1),
            run: green_certification,
        },
        Criterion {
            id: 4,
            name: "ground states, quadratic column",
            budget: Duration::from_secs(120),
            run: table_quadratic,
        },
        Criterion {
            id: 5,
            name: "ground states, exact column",
            budget: Duration::from_secs(30),
            run: table_exact,
        },
        Criterion {
            id: 6,
            name: "classical limit C → 0.75",
            budget: Duration::from_secs(60),
            run: classical_limit,
        },
        Criterion {
            id: 7,
            name: "high-T agreement and improved ordering",
            budget: Duration::from_secs(120),
            run: high_temperature,
        },
        Criterion {
            id: 8,
            name: "T_min",
            budget: Duration::from_secs(5),
            run: t_min_criterion,
        },
        Criterion {
            id: 9,
            name: "modified-series identities",
            budget: Duration::from_secs(10),
            run: series_identities,
        },
        Criterion {
            id: 10,
            name: "property suite",
            budget: Duration::from_secs(60),
            run: property_suite,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let (status, detail) = match (&result, in_budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "[{status}] criterion {:>2} {}: {detail} ({:.3} s of {:.1} s)",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
