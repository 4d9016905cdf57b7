use serde::{Deserialize, Serialize};

use super::csr::{dot, norm2, CsrMatrix};
use crate::{Error, Result};

/// Largest size handled by the dense path.
pub const DENSE_LIMIT: usize = 5000;
const AUTO_DENSE_BELOW: usize = 1500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

/// Largest eigenvalues, sorted in descending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// True when the input was nonsymmetric and `(A + A^T)/2` was used.
    pub symmetrized: bool,
    pub method: EigenMethod,
}

/// The `k` largest eigenvalues of `A`, or of its symmetric part when `A` is
/// not symmetric. Small matrices go to a dense solver, large symmetric ones
/// to Lanczos.
pub fn eigs_extreme(a: &CsrMatrix, k: usize) -> Result<Spectrum> {
    eigs_extreme_with(a, k, None)
}

pub fn eigs_extreme_with(a: &CsrMatrix, k: usize, method: Option<EigenMethod>) -> Result<Spectrum> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Eigen(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    let symmetric = a.is_symmetric(1e-13);
    let method = match method {
        Some(m) => m,
        None if n <= AUTO_DENSE_BELOW => EigenMethod::Dense,
        None if symmetric => EigenMethod::Lanczos,
        None => EigenMethod::Dense,
    };
    if method == EigenMethod::Dense && n > DENSE_LIMIT {
        return Err(Error::Eigen(format!(
            "n = {n} exceeds the dense limit {DENSE_LIMIT}; pass a symmetric matrix for Lanczos"
        )));
    }
    let sym;
    let s = if symmetric {
        a
    } else {
        sym = a.symmetric_part();
        &sym
    };
    let k = k.min(n);
    let values = match method {
        EigenMethod::Dense => {
            let mut ev: Vec<f64> = s.to_dense().symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|x, y| y.total_cmp(x));
            ev.truncate(k);
            ev
        }
        EigenMethod::Lanczos => lanczos_largest(s, k),
    };
    Ok(Spectrum { values, symmetrized: !symmetric, method })
}

/// Lanczos with full reorthogonalization and a deterministic start vector.
/// The Krylov space grows in blocks until the residual bounds of the `k`
/// largest Ritz values drop below `1e-10 ||A||_F` or the space is exhausted.
fn lanczos_largest(a: &CsrMatrix, k: usize) -> Vec<f64> {
    let n = a.nrows();
    let block = (2 * k + 40).max(100);
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).sin()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut target = block.min(n);
    loop {
        let mut exhausted = false;
        while alpha.len() < target {
            q.push(v.clone());
            let j = q.len() - 1;
            a.matvec(&q[j], &mut w);
            let aj = dot(&w, &q[j]);
            alpha.push(aj);
            let bj = if j > 0 { beta[j - 1] } else { 0.0 };
            for k in 0..n {
                w[k] -= aj * q[j][k];
                if j > 0 {
                    w[k] -= bj * q[j - 1][k];
                }
            }
            // reorthogonalize; repeat once if the pass removed a large part
            for _ in 0..2 {
                let before = norm2(&w);
                for qi in &q {
                    let c = dot(&w, qi);
                    for (wk, qk) in w.iter_mut().zip(qi) {
                        *wk -= c * qk;
                    }
                }
                if norm2(&w) > 0.7 * before {
                    break;
                }
            }
            let b = norm2(&w);
            beta.push(b);
            if b <= 1e-12 * scale {
                exhausted = true;
                break;
            }
            v = w.iter().map(|x| x / b).collect();
        }
        let dim = alpha.len();
        let mut ritz = tridiagonal_eigenvalues(&alpha, &beta[..dim - 1]);
        ritz.sort_by(|x, y| y.total_cmp(x));
        ritz.truncate(k);
        let b_last = beta[dim - 1];
        let converged = exhausted
            || ritz.iter().all(|&theta| {
                let s = tridiagonal_last_component(&alpha, &beta[..dim - 1], theta, scale);
                (b_last * s).abs() <= 1e-10 * scale
            });
        if converged || dim >= n {
            return ritz;
        }
        target = (target + block).min(n);
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e`, by implicit QL.
fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l || iter == 60 {
                break;
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Last component of the unit eigenvector for `theta` of the tridiagonal
/// matrix `(d, e)`, by two steps of inverse iteration.
fn tridiagonal_last_component(d: &[f64], e: &[f64], theta: f64, scale: f64) -> f64 {
    let n = d.len();
    if n == 1 {
        return 1.0;
    }
    let tiny = f64::EPSILON * scale;
    let mut x = vec![1.0; n];
    for _ in 0..2 {
        let mut diag: Vec<f64> = d.iter().map(|v| v - theta).collect();
        let mut sup = e.to_vec();
        let sub = e.to_vec();
        let mut sup2 = vec![0.0; n.saturating_sub(2)];
        // Gaussian elimination with partial pivoting on the band
        for i in 0..n - 1 {
            if diag[i].abs() >= sub[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let f = sub[i] / diag[i];
                diag[i + 1] -= f * sup[i];
                x[i + 1] -= f * x[i];
            } else {
                let f = diag[i] / sub[i];
                diag[i] = sub[i];
                let t = diag[i + 1];
                diag[i + 1] = sup[i] - f * t;
                if i + 2 < n {
                    sup2[i] = sup[i + 1];
                    sup[i + 1] *= -f;
                }
                sup[i] = t;
                x.swap(i, i + 1);
                x[i + 1] -= f * x[i];
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        x[n - 1] /= diag[n - 1];
        x[n - 2] = (x[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
        for i in (0..n - 2).rev() {
            x[i] = (x[i] - sup[i] * x[i + 1] - sup2[i] * x[i + 2]) / diag[i];
        }
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
    }
    x[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]);
        let s = eigs_extreme(&a, 2).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values[0] - 3.0).abs() < 1e-14 && (s.values[1] - 2.0).abs() < 1e-14);
        assert!(!s.symmetrized);
    }

    #[test]
    fn swap_matrix() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = eigs_extreme(&a, 2).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14 && (s.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonsymmetric_input_is_symmetrized() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        let s = eigs_extreme(&a, 1).unwrap();
        assert!(s.symmetrized);
        assert!((s.values[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_helpers_on_laplacian() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let mut ev = tridiagonal_eigenvalues(&d, &e);
        ev.sort_by(|x, y| x.total_cmp(y));
        let h = std::f64::consts::PI / (n + 1) as f64;
        for (j, v) in ev.iter().enumerate() {
            assert!((v - (2.0 - 2.0 * (h * (j + 1) as f64).cos())).abs() < 1e-13);
        }
        let norm = (2.0 / (n + 1) as f64).sqrt();
        for j in [1, 17, 50] {
            let s = tridiagonal_last_component(&d, &e, ev[j - 1], 4.0);
            let exact = norm * (h * (j * n) as f64).sin();
            assert!((s.abs() - exact.abs()).abs() < 1e-10, "{j}: {s} vs {exact}");
        }
    }

    #[test]
    fn lanczos_matches_dense_on_laplacian() {
        let n: usize = 400;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 }).collect())
            .collect();
        let a = CsrMatrix::from_dense(&rows);
        let d = eigs_extreme_with(&a, 5, Some(EigenMethod::Dense)).unwrap();
        let l = eigs_extreme_with(&a, 5, Some(EigenMethod::Lanczos)).unwrap();
        for (x, y) in d.values.iter().zip(&l.values) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}
