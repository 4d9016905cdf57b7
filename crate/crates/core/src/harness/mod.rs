//! Experiment layer: errors against a reference solve, convergence and
//! spectrum studies, centerline sampling and their configuration.

mod centerline;
mod config;
mod convergence;
mod error;
mod run;
mod spectrum;

pub use centerline::{sample_centerline, write_centerline, CenterlineSample, CENTERLINE_HEADER, FAULT_OFFSET};
pub use config::{ExperimentConfig, Geometry, Method, SolverConfig, H_F_RATIO, L_S_FACTOR};
pub use convergence::{
    errors_file_name, run_convergence, run_convergence_with, ConvergenceTable, ErrorRow, RateRow, ERRORS_HEADER,
    RATES_HEADER,
};
pub use error::{estimate_rate, l2_error, l2_norm};
pub use run::{solve_method, AnalyticField, GroundTruth, MethodRun, MethodSolution};
pub use spectrum::{run_spectrum, SpectrumEntry, CG_EIGS, MIXED_EIGS, SPECTRUM_HEADER};
