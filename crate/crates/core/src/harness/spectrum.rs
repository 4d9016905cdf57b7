use serde::Serialize;

use crate::cgreg::{assemble_cg_system, delta_for};
use crate::fem::assemble_mixed_system;
use crate::io::CsvWriter;
use crate::linalg::{eigs_extreme_with, EigenMethod};
use crate::{Error, Result};

use super::config::ExperimentConfig;

/// Eigenvalues kept for the mixed saddle-point matrix.
pub const MIXED_EIGS: usize = 80;
/// Eigenvalues kept for the CG matrix (all of them on small meshes).
pub const CG_EIGS: usize = 1000;
pub const SPECTRUM_HEADER: [&str; 3] = ["t_f", "index", "lambda"];

/// Largest eigenvalues of both methods' matrices at one transmissibility,
/// in descending order.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub t_f: f64,
    pub n_mixed: usize,
    pub n_cg: usize,
    pub mixed: Vec<f64>,
    pub cg: Vec<f64>,
}

impl SpectrumEntry {
    pub fn mixed_max(&self) -> f64 {
        self.mixed[0]
    }

    pub fn cg_max(&self) -> f64 {
        self.cg[0]
    }
}

/// Spectra for every `t_f`, the mixed matrix on the mesh of size
/// `config.spectrum_h`, the CG matrix on the one of size `config.spectrum_cg_h`.
///
/// The mixed matrix is the saddle-point system with its constraint rows
/// negated, which is symmetric. The CG matrix carries identity rows at the
/// Dirichlet vertices and uses `eps = k h_f` with the first configured
/// multiplier (3 if none); being nonsymmetric, its symmetric part is used.
pub fn run_spectrum(config: &ExperimentConfig, t_fs: &[f64]) -> Result<Vec<SpectrumEntry>> {
    config.validate()?;
    if config.dim != 2 {
        return Err(Error::Config("the spectrum study runs on the 2D geometry".into()));
    }
    let eps_mult = config.eps_multipliers.first().copied().unwrap_or(3.0);
    let bc = config.geometry.boundary();
    let mut out = Vec::with_capacity(t_fs.len());
    for &t_f in t_fs {
        let mesh = config.geometry.mesh(config.dim, config.spectrum_h, t_f)?;
        let mixed = assemble_mixed_system(&mesh, t_f, None, &bc)?.symmetric_matrix();
        let mixed_eigs = eigs_extreme_with(&mixed, MIXED_EIGS, None)?;
        let cg_mesh = config.geometry.mesh(config.dim, config.spectrum_cg_h, t_f)?;
        let delta = delta_for(&cg_mesh, t_f, eps_mult * config.h_f(config.spectrum_cg_h))?;
        let (cg, _) = assemble_cg_system(&cg_mesh, &delta, &bc, None)?;
        let cg_eigs = eigs_extreme_with(&cg, CG_EIGS, Some(EigenMethod::Dense))?;
        log::info!(
            "t_f = {t_f:e}: mixed n = {} lambda_max = {:.4e}, cg n = {} lambda_max = {:.4e}",
            mixed.nrows(),
            mixed_eigs.values[0],
            cg.nrows(),
            cg_eigs.values[0]
        );
        out.push(SpectrumEntry {
            t_f,
            n_mixed: mixed.nrows(),
            n_cg: cg.nrows(),
            mixed: mixed_eigs.values,
            cg: cg_eigs.values,
        });
    }
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        let mut wm = CsvWriter::create(&dir.join("spectrum_mixed.csv"), &SPECTRUM_HEADER)?;
        let mut wc = CsvWriter::create(&dir.join("spectrum_cg.csv"), &SPECTRUM_HEADER)?;
        for e in &out {
            for (i, &l) in e.mixed.iter().enumerate() {
                wm.row(&[e.t_f, i as f64, l])?;
            }
            for (i, &l) in e.cg.iter().enumerate() {
                wc.row(&[e.t_f, i as f64, l])?;
            }
        }
    }
    Ok(out)
}
