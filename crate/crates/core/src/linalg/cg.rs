use std::time::Instant;

use super::csr::{dot, norm2, CsrMatrix};
use super::gmres::{Preconditioner, SolveReport, SolveStatus};

/// Preconditioned conjugate gradients for symmetric positive definite `A`,
/// stopping on the absolute residual `||b - A x|| <= tol_abs`.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    tol_abs: f64,
    max_iter: usize,
    precond: Option<&dyn Preconditioner>,
) -> (Vec<f64>, SolveReport) {
    pcg_from(a, b, vec![0.0; b.len()], tol_abs, max_iter, precond)
}

/// [`pcg`] starting from `x`.
pub fn pcg_from(
    a: &CsrMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    tol_abs: f64,
    max_iter: usize,
    precond: Option<&dyn Preconditioner>,
) -> (Vec<f64>, SolveReport) {
    let start = Instant::now();
    let n = b.len();
    let ax0 = a.mul_vec(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax0).map(|(bi, ai)| bi - ai).collect();
    let mut z = vec![0.0; n];
    let apply = |r: &[f64], z: &mut [f64]| match precond {
        Some(p) => p.apply(r, z),
        None => z.copy_from_slice(r),
    };
    apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut res = norm2(&r);
    let mut history = vec![res];
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIterations;
    while iterations < max_iter {
        if res <= tol_abs {
            status = SolveStatus::Converged;
            break;
        }
        a.matvec(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            status = SolveStatus::Breakdown;
            break;
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        iterations += 1;
        // refresh the recursive residual now and then to limit drift
        if iterations % 500 == 0 {
            let ax = a.mul_vec(&x);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
        }
        res = norm2(&r);
        apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if status == SolveStatus::MaxIterations && res <= tol_abs {
        status = SolveStatus::Converged;
    }
    let ax = a.mul_vec(&x);
    let true_res = norm2(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>());
    history.push(true_res);
    let report = SolveReport {
        iterations,
        residual: true_res,
        converged: status == SolveStatus::Converged && true_res <= tol_abs,
        status,
        wall_time: start.elapsed().as_secs_f64(),
        history,
    };
    (x, report)
}
