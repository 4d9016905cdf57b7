use std::path::Path;

use serde::Serialize;

use crate::io::CsvWriter;
use crate::Result;

use super::config::ExperimentConfig;
use super::error::{estimate_rate, l2_error};
use super::run::{solve_method, GroundTruth};

pub const ERRORS_HEADER: [&str; 6] = ["h", "dof", "time_global", "time_sub", "e_p", "e_u"];
pub const RATES_HEADER: [&str; 3] = ["eps_mult", "rate_p", "rate_u"];

/// One mesh of a convergence study. Times are wall-clock seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub h: f64,
    /// `eps / h_f`; absent for the mixed method.
    pub eps_mult: Option<f64>,
    pub dof: usize,
    pub time_global: f64,
    pub time_sub: f64,
    pub e_p: f64,
    pub e_u: f64,
}

impl ErrorRow {
    fn csv_values(&self) -> [f64; 6] {
        [self.h, self.dof as f64, self.time_global, self.time_sub, self.e_p, self.e_u]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub eps_mult: Option<f64>,
    pub rate_p: f64,
    pub rate_u: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceTable {
    /// Ladder order within each eps multiplier, multipliers in config order.
    pub rows: Vec<ErrorRow>,
    pub rates: Vec<RateRow>,
}

impl ConvergenceTable {
    pub fn rows_for(&self, eps_mult: Option<f64>) -> Vec<ErrorRow> {
        self.rows.iter().filter(|r| r.eps_mult == eps_mult).copied().collect()
    }

    pub fn rate_for(&self, eps_mult: Option<f64>) -> Option<RateRow> {
        self.rates.iter().find(|r| r.eps_mult == eps_mult).copied()
    }
}

/// File name of the error table for one eps multiplier. A study with a
/// single table (mixed method, or one multiplier) writes `errors.csv`.
pub fn errors_file_name(eps_mult: Option<f64>, single: bool) -> String {
    match eps_mult {
        Some(k) if !single => format!("errors_eps{k}.csv"),
        _ => "errors.csv".into(),
    }
}

/// Computes the ground truth, then [`run_convergence_with`].
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let truth = GroundTruth::compute(config)?;
    run_convergence_with(config, &truth)
}

/// One row per (eps multiplier, h) against `truth`, then the least-squares
/// rates per multiplier. With `config.output_dir` set, each row is written
/// as soon as it is computed, so a failing solve leaves the finished rows
/// on disk.
pub fn run_convergence_with(config: &ExperimentConfig, truth: &GroundTruth) -> Result<ConvergenceTable> {
    config.validate()?;
    let eps_list: Vec<Option<f64>> = if config.method.uses_eps() {
        config.eps_multipliers.iter().map(|&k| Some(k)).collect()
    } else {
        vec![None]
    };
    let single = eps_list.len() == 1;
    let dir = config.output_dir.as_deref();
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let mut table = ConvergenceTable::default();
    for &eps_mult in &eps_list {
        let mut csv = match dir {
            Some(d) => Some(CsvWriter::create(&d.join(errors_file_name(eps_mult, single)), &ERRORS_HEADER)?),
            None => None,
        };
        for &h in &config.ladder {
            let run = solve_method(config, h, eps_mult)?;
            let e_p = l2_error(&*run.solution.pressure(), truth.pressure())?;
            let e_u = l2_error(&*run.solution.velocity(), truth.velocity())?;
            let row = ErrorRow {
                h,
                eps_mult,
                dof: run.solution.global_dofs(),
                time_global: run.time_global,
                time_sub: run.time_sub,
                e_p,
                e_u,
            };
            log::info!("{} h = {h:e} eps_mult = {eps_mult:?}: e_p = {e_p:.3e}, e_u = {e_u:.3e}", config.method);
            if let Some(w) = csv.as_mut() {
                w.row(&row.csv_values())?;
            }
            table.rows.push(row);
        }
    }
    if config.ladder.len() >= 2 {
        let hs = &config.ladder;
        for &eps_mult in &eps_list {
            let rows = table.rows_for(eps_mult);
            let e_p: Vec<f64> = rows.iter().map(|r| r.e_p).collect();
            let e_u: Vec<f64> = rows.iter().map(|r| r.e_u).collect();
            let rate = |e: &[f64]| estimate_rate(e, hs).unwrap_or(f64::NAN);
            table.rates.push(RateRow { eps_mult, rate_p: rate(&e_p), rate_u: rate(&e_u) });
        }
        if let Some(d) = dir {
            write_rates(&d.join("rates.csv"), &table.rates)?;
        }
    }
    Ok(table)
}

fn write_rates(path: &Path, rates: &[RateRow]) -> Result<()> {
    let mut w = CsvWriter::create(path, &RATES_HEADER)?;
    for r in rates {
        w.row(&[r.eps_mult.unwrap_or(f64::NAN), r.rate_p, r.rate_u])?;
    }
    Ok(())
}
