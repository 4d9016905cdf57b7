//! Sparse storage, Krylov solver, incomplete factorization and eigenvalues.

mod cg;
mod csr;
mod eigen;
mod gmres;
mod ilu;

pub use cg::{pcg, pcg_from};
pub use csr::{dot, norm2, CsrMatrix, TripletBuilder};
pub use eigen::{eigs_extreme, eigs_extreme_with, EigenMethod, Spectrum, DENSE_LIMIT};
pub use gmres::{gmres, gmres_from, GmresSettings, Preconditioner, SolveReport, SolveStatus};
pub use ilu::Ilu0;

use crate::{Error, Result};

/// GMRES with an ILU(0) preconditioner; non-convergence becomes an error
/// carrying the report.
pub fn solve_ilu_gmres(a: &CsrMatrix, b: &[f64], settings: &GmresSettings) -> Result<(Vec<f64>, SolveReport)> {
    let ilu = Ilu0::new(a);
    let (x, report) = gmres(a, b, settings, Some(&ilu));
    log::debug!("gmres n = {}: {}", b.len(), report);
    if report.converged {
        Ok((x, report))
    } else {
        Err(Error::Solver(report))
    }
}
