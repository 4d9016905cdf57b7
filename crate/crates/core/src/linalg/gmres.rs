use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::csr::{dot, norm2, CsrMatrix};

/// Applies an approximate inverse: `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmresSettings {
    /// Absolute tolerance on the Euclidean residual `||b - A x||`.
    pub tol_abs: f64,
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Total inner iterations; `None` means `50 n`.
    pub max_iter: Option<usize>,
}

impl Default for GmresSettings {
    fn default() -> Self {
        Self { tol_abs: 1e-8, restart: 200, max_iter: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The Krylov space stopped growing before the tolerance was met.
    Breakdown,
}

/// Diagnostics of one linear solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub status: SolveStatus,
    pub wall_time: f64,
    /// True residual norm at the start and after every restart cycle.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} after {} iterations, residual {:.3e}, {:.3} s",
            self.status, self.iterations, self.residual, self.wall_time
        )
    }
}

/// Restarted GMRES with right preconditioning and a zero initial guess.
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    settings: &GmresSettings,
    precond: Option<&dyn Preconditioner>,
) -> (Vec<f64>, SolveReport) {
    gmres_from(a, b, vec![0.0; b.len()], settings, precond)
}

/// Restarted GMRES starting from `x0`.
///
/// Right preconditioning keeps the Arnoldi residual equal to the residual of
/// the unpreconditioned system, so the tolerance applies to `||b - A x||`.
/// The true residual is recomputed at the end of every cycle.
pub fn gmres_from(
    a: &CsrMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    settings: &GmresSettings,
    precond: Option<&dyn Preconditioner>,
) -> (Vec<f64>, SolveReport) {
    let start = Instant::now();
    let n = b.len();
    assert_eq!(a.nrows(), n, "matrix rows must match right-hand side");
    assert_eq!(a.ncols(), n, "GMRES needs a square matrix");
    assert_eq!(x.len(), n);
    let m = settings.restart.max(1).min(n.max(1));
    let max_iter = settings.max_iter.unwrap_or(50 * n.max(1));
    let tol = settings.tol_abs;

    let apply_m = |v: &[f64], z: &mut [f64]| match precond {
        Some(p) => p.apply(v, z),
        None => z.copy_from_slice(v),
    };

    let mut r = residual(a, b, &x);
    let mut beta = norm2(&r);
    let mut history = vec![beta];
    let mut iterations = 0;
    let mut status = if beta <= tol { SolveStatus::Converged } else { SolveStatus::MaxIterations };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut hess = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];

    while status != SolveStatus::Converged && iterations < max_iter {
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k = 0;
        let mut broke_down = false;
        for j in 0..m {
            apply_m(&basis[j], &mut z);
            a.matvec(&z, &mut w);
            let w_norm0 = norm2(&w);
            for i in 0..=j {
                let hij = dot(&w, &basis[i]);
                hess[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&basis[i]) {
                    *wk -= hij * vk;
                }
            }
            let h_next = norm2(&w);
            hess[j + 1][j] = h_next;
            for i in 0..j {
                let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = t;
            }
            let (hjj, hj1) = (hess[j][j], hess[j + 1][j]);
            let rho = hjj.hypot(hj1);
            iterations += 1;
            if rho == 0.0 {
                // A M^{-1} v_j vanished: nothing more to gain from this space
                broke_down = true;
                break;
            }
            cs[j] = hjj / rho;
            sn[j] = hj1 / rho;
            hess[j][j] = rho;
            hess[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k = j + 1;
            if h_next <= 1e-14 * w_norm0.max(f64::MIN_POSITIVE) {
                broke_down = true;
                break;
            }
            if g[j + 1].abs() <= tol || iterations >= max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        // back substitution for the k-dimensional least-squares problem
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for l in i + 1..k {
                s -= hess[i][l] * y[l];
            }
            y[i] = s / hess[i][i];
        }
        if k > 0 {
            let mut u = vec![0.0; n];
            for (yi, vi) in y.iter().zip(&basis) {
                for (uk, vk) in u.iter_mut().zip(vi) {
                    *uk += yi * vk;
                }
            }
            apply_m(&u, &mut z);
            for (xk, zk) in x.iter_mut().zip(&z) {
                *xk += zk;
            }
        }
        r = residual(a, b, &x);
        beta = norm2(&r);
        history.push(beta);
        if beta <= tol {
            status = SolveStatus::Converged;
        } else if broke_down {
            status = SolveStatus::Breakdown;
            break;
        }
    }

    let report = SolveReport {
        iterations,
        residual: beta,
        converged: status == SolveStatus::Converged,
        status,
        wall_time: start.elapsed().as_secs_f64(),
        history,
    };
    (x, report)
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}
