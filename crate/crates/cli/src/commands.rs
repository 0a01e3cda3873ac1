use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use zmstat::oracle::converged_spectrum;
use zmstat::thermo::{ground_state_estimate, t_min, thermo_curve_with};
use zmstat::{Error, PotentialSpec};

use crate::check::{run_checks, CheckOutcome, DetFn};
use crate::config::{Format, RunConfig};
use crate::output::{emit, Cell, Table};
use crate::CliError;

/// Couplings of the reference ground-state table.
pub const TABLE_LAMBDAS: [f64; 8] = [0.008, 0.04, 0.4, 1.2, 2.0, 4.0, 8.0, 200.0];

fn numeric(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(_)
        | Error::MasslessView
        | Error::MasslessPropagator
        | Error::InfraredDivergent
        | Error::Domain { .. }
        | Error::GridTooCoarse { .. } => CliError::Config(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

/// Rows in grid order, methods in configured order within each temperature.
pub fn thermo_table(cfg: &RunConfig) -> Result<Table, CliError> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let grid = cfg.grid();
    let curves = cfg
        .methods
        .iter()
        .map(|&m| thermo_curve_with(m, &spec, &grid, &cfg.quadrature).map_err(numeric))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec!["T", "method", "F", "U", "C", "err", "flags"]);
    for i in 0..grid.len() {
        for (m, curve) in cfg.methods.iter().zip(&curves) {
            let p = &curve[i];
            table.push(vec![
                Cell::Num(p.temperature),
                Cell::Text(m.to_string()),
                Cell::Num(p.free_energy),
                Cell::Num(p.internal_energy),
                Cell::Num(p.specific_heat),
                Cell::Num(p.error),
                Cell::Text(p.flags.label()),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_thermo(cfg: &RunConfig) -> Result<(), CliError> {
    let table = thermo_table(cfg)?;
    emit(&table.render(cfg.format, cfg)?, cfg.out.as_deref())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingRun {
    pub mass: f64,
    pub omega: f64,
    pub lambdas: Vec<f64>,
}

fn check_couplings(lambdas: &[f64]) -> Result<(), CliError> {
    if lambdas.is_empty() {
        return Err(CliError::Config("empty coupling list".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(CliError::Config(format!("couplings must be positive, got {l}")));
    }
    Ok(())
}

/// Columns `lambda, E0_exact, E0_quadratic, percent_error`.
pub fn gstate_table(run: &CouplingRun) -> Result<Table, CliError> {
    check_couplings(&run.lambdas)?;
    let rows = run
        .lambdas
        .par_iter()
        .map(|&l| {
            let spec = PotentialSpec::new(run.mass, run.omega, l).map_err(numeric)?;
            let exact = converged_spectrum(&spec, None).map_err(numeric)?.ground();
            let quad = ground_state_estimate(&spec).map_err(numeric)?;
            Ok(vec![
                Cell::Num(l),
                Cell::Num(exact),
                Cell::Num(quad),
                Cell::Num(100.0 * (quad - exact) / exact),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(vec!["lambda", "E0_exact", "E0_quadratic", "percent_error"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Columns `lambda, theta, T_min, flags` with `g = λ/(m²ω³)` and
/// `T_min = ω/Θ`. Rows without a crossing carry the `no_crossing` flag.
pub fn tmin_table(run: &CouplingRun) -> Result<Table, CliError> {
    check_couplings(&run.lambdas)?;
    if !(run.omega > 0.0) {
        return Err(CliError::Config("T_min needs omega > 0".into()));
    }
    let rows = run
        .lambdas
        .par_iter()
        .map(|&l| {
            let g = l / (run.mass * run.mass * run.omega.powi(3));
            match t_min(g) {
                Ok(r) => Ok((l, r.theta, run.omega * r.t_min, "")),
                Err(Error::NoCrossing { .. }) => Ok((l, f64::NAN, f64::NAN, "no_crossing")),
                Err(e) => Err(numeric(e)),
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut sorted: Vec<_> = rows.iter().filter(|r| r.2.is_finite()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[1].0 > w[0].0 && w[1].2 < w[0].2) {
        return Err(CliError::Numerical("T_min is not monotone in the coupling".into()));
    }
    let mut t = Table::new(vec!["lambda", "theta", "T_min", "flags"]);
    for (l, th, tm, flag) in rows {
        t.push(vec![
            Cell::Num(l),
            Cell::Num(th),
            Cell::Num(tm),
            Cell::Text(flag.into()),
        ]);
    }
    Ok(t)
}

pub fn cmd_table(
    table: Result<Table, CliError>,
    run: &CouplingRun,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    emit(&table?.render(format, run)?, out)
}

/// Prints one line per invariant; fails if any invariant fails.
pub fn cmd_check(det: &DetFn) -> Result<Vec<CheckOutcome>, CliError> {
    let out = run_checks(det);
    for c in &out {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed: Vec<&str> = out.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(out)
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}
