use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use faultflow::harness::{
    run_convergence, run_spectrum, sample_centerline, solve_method, write_centerline, ExperimentConfig, Method,
    MethodRun, MethodSolution,
};
use faultflow::linalg::SolveReport;
use faultflow::Error;

const DEFAULT_T_FS: [f64; 4] = [2.0, 0.2, 0.02, 0.002];

#[derive(Parser)]
#[command(name = "faultflow", version, about = "Darcy flow with an immersed fault")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed RT0 x P0 solve on one mesh; writes p.vtk, u.vtk, report.json.
    SolveMixed(Common),
    /// Regularized CG solve plus subdomain correction (plain CG in 1D).
    SolveNew(Common),
    /// Convergence study against the fine reference; writes errors and rates CSV.
    Converge(Common),
    /// Largest eigenvalues of both operators for several t_f.
    Spectrum(Common),
    /// Pressure and normal velocity along the horizontal midline.
    Centerline {
        #[command(flatten)]
        common: Common,
        /// Number of uniform samples.
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON). Defaults to the 2D test.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; falls back to the config's, then to the current one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fault transmissibility.
    #[arg(long)]
    tf: Option<f64>,
    /// eps = k h_f for the CG methods.
    #[arg(long)]
    eps_mult: Option<f64>,
    /// eps_tau = k h_f (default: eps).
    #[arg(long)]
    eps_tau_mult: Option<f64>,
    /// Outer mesh size; for `converge` it replaces the ladder by this single size.
    #[arg(long)]
    h: Option<f64>,
}

impl Common {
    fn load(&self, method: Option<Method>) -> faultflow::Result<(ExperimentConfig, PathBuf)> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::paper_2d(2.0, Method::Mixed, vec![3.0]),
        };
        if let Some(m) = method {
            c.method = m;
        }
        if let Some(t) = self.tf {
            c.t_f = t;
        }
        if let Some(k) = self.eps_mult {
            c.eps_multipliers = vec![k];
        }
        if c.method.uses_eps() && c.eps_multipliers.is_empty() {
            c.eps_multipliers = vec![3.0];
        }
        if let Some(k) = self.eps_tau_mult {
            c.eps_tau_mult = Some(k);
        }
        if let Some(h) = self.h {
            c.ladder = vec![h];
            if !(c.ground_truth_h < 0.5 * h) {
                c.ground_truth_h = 0.25 * h;
            }
        }
        let out = self.out.clone().or_else(|| c.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
        c.output_dir = Some(out.clone());
        c.validate()?;
        std::fs::create_dir_all(&out)?;
        Ok((c, out))
    }
}

fn new_method(dim_hint: Option<&Path>) -> faultflow::Result<Method> {
    let dim = match dim_hint {
        Some(p) => ExperimentConfig::load(p)?.dim,
        None => 2,
    };
    Ok(if dim == 1 { Method::Cg } else { Method::CgCorrection })
}

fn reports(solution: &MethodSolution) -> serde_json::Value {
    let r = |r: &SolveReport| serde_json::to_value(r).unwrap_or_default();
    match solution {
        MethodSolution::Mixed(s) => json!({ "global": r(&s.report) }),
        MethodSolution::Cg(s) => json!({ "global": r(&s.report) }),
        MethodSolution::Composite(s) => json!({ "global": r(&s.global.report), "subdomain": r(&s.local.report) }),
    }
}

fn solve(common: &Common, method: Method) -> faultflow::Result<()> {
    let (c, out) = common.load(Some(method))?;
    let h = c.ladder[0];
    let eps_mult = c.method.uses_eps().then(|| c.eps_multipliers[0]);
    let MethodRun { solution, time_global, time_sub } = solve_method(&c, h, eps_mult)?;
    solution.write_vtk(&out)?;
    let m = solution.mesh();
    let h_f = c.h_f(h);
    let report = json!({
        "method": c.method.to_string(),
        "dim": c.dim,
        "h": h,
        "h_f": h_f,
        "t_f": c.t_f,
        "eps": eps_mult.map(|k| k * h_f),
        "eps_tau": eps_mult.map(|k| c.eps_tau_mult.unwrap_or(k) * h_f),
        "cells": m.n_cells(),
        "vertices": m.n_vertices(),
        "dof": solution.global_dofs(),
        "time_global": time_global,
        "time_sub": time_sub,
        "solver": reports(&solution),
    });
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    println!("{} h = {h} t_f = {}: dof {}, {:.2} s + {:.2} s", c.method, c.t_f, solution.global_dofs(), time_global, time_sub);
    Ok(())
}

fn converge(common: &Common) -> faultflow::Result<()> {
    let (c, out) = common.load(None)?;
    let table = run_convergence(&c)?;
    println!("{:>10} {:>8} {:>8} {:>12} {:>12}", "h", "eps/h_f", "dof", "e_p", "e_u");
    for r in &table.rows {
        let k = r.eps_mult.map_or("-".to_string(), |k| k.to_string());
        println!("{:>10.4e} {:>8} {:>8} {:>12.4e} {:>12.4e}", r.h, k, r.dof, r.e_p, r.e_u);
    }
    for r in &table.rates {
        println!("rates (eps/h_f = {:?}): p {:.3}, u {:.3}", r.eps_mult, r.rate_p, r.rate_u);
    }
    println!("written to {}", out.display());
    Ok(())
}

fn spectrum(common: &Common) -> faultflow::Result<()> {
    let (c, out) = common.load(None)?;
    let t_fs: Vec<f64> = match common.tf {
        Some(t) => vec![t],
        None => DEFAULT_T_FS.to_vec(),
    };
    for e in run_spectrum(&c, &t_fs)? {
        println!("t_f = {:e}: mixed max {:.4e} (n = {}), cg max {:.4e} (n = {})", e.t_f, e.mixed_max(), e.n_mixed, e.cg_max(), e.n_cg);
    }
    println!("written to {}", out.display());
    Ok(())
}

fn centerline(common: &Common, samples: usize) -> faultflow::Result<()> {
    let (c, out) = common.load(None)?;
    if c.dim != 2 {
        return Err(Error::Config("centerline sampling needs a 2D configuration".into()));
    }
    let eps_mult = c.method.uses_eps().then(|| c.eps_multipliers[0]);
    let run = solve_method(&c, c.ladder[0], eps_mult)?;
    let g = &c.geometry;
    let s = sample_centerline(&*run.solution.pressure(), &*run.solution.velocity(), g.lx, 0.5 * g.ly, g.fault_x, samples)?;
    let path = out.join("centerline.csv");
    write_centerline(&path, &s)?;
    println!("{} samples written to {}", s.len(), path.display());
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Geometry(_) | Error::MeshParameter(_) | Error::MissingBoundary(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SolveMixed(c) => solve(c, Method::Mixed),
        Command::SolveNew(c) => new_method(c.config.as_deref()).and_then(|m| solve(c, m)),
        Command::Converge(c) => converge(c),
        Command::Spectrum(c) => spectrum(c),
        Command::Centerline { common, samples } => centerline(common, *samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            log::debug!("{e:?}");
            ExitCode::from(exit_code(&e))
        }
    }
}
