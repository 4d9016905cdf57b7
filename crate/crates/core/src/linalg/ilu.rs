use super::csr::{CsrMatrix, TripletBuilder};
use super::gmres::Preconditioner;

/// Incomplete LU factorization without fill, stored in the pattern of `A`
/// (unit lower part implicit).
#[derive(Clone, Debug)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
    shifted: usize,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "ILU(0) needs a square matrix");
        let n = a.nrows();
        let mut lu = with_full_diagonal(a);
        let row_ptr = lu.row_ptr().to_vec();
        let cols = lu.col_idx().to_vec();
        let diag: Vec<usize> = (0..n)
            .map(|i| row_ptr[i] + cols[row_ptr[i]..row_ptr[i + 1]].binary_search(&i).unwrap())
            .collect();

        let vals = lu.values_mut();
        let mut pos = vec![usize::MAX; n];
        let mut shifted = 0;
        for i in 0..n {
            let (s, e) = (row_ptr[i], row_ptr[i + 1]);
            for k in s..e {
                pos[cols[k]] = k;
            }
            for kk in s..diag[i] {
                let k = cols[kk];
                let lik = vals[kk] / vals[diag[k]];
                vals[kk] = lik;
                for kj in diag[k] + 1..row_ptr[k + 1] {
                    let p = pos[cols[kj]];
                    if p != usize::MAX {
                        vals[p] -= lik * vals[kj];
                    }
                }
            }
            let scale = vals[s..e].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if vals[diag[i]].abs() <= 1e-14 * scale || vals[diag[i]] == 0.0 {
                vals[diag[i]] = if scale > 0.0 { 1e-8 * scale } else { 1.0 };
                shifted += 1;
            }
            for k in s..e {
                pos[cols[k]] = usize::MAX;
            }
        }
        if shifted > 0 {
            log::warn!("ILU(0): shifted {shifted} zero pivot(s)");
        }
        Self { lu, diag, shifted }
    }

    /// Number of pivots replaced by a small shift.
    pub fn shifted_pivots(&self) -> usize {
        self.shifted
    }

    pub fn factors(&self) -> &CsrMatrix {
        &self.lu
    }

    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; r.len()];
        self.apply(r, &mut z);
        z
    }
}

impl Preconditioner for Ilu0 {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let (rp, ci, v) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.values());
        let n = r.len();
        for i in 0..n {
            let mut s = r[i];
            for k in rp[i]..self.diag[i] {
                s -= v[k] * z[ci[k]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..rp[i + 1] {
                s -= v[k] * z[ci[k]];
            }
            z[i] = s / v[self.diag[i]];
        }
    }
}

fn with_full_diagonal(a: &CsrMatrix) -> CsrMatrix {
    let n = a.nrows();
    if (0..n).all(|i| a.row(i).0.binary_search(&i).is_ok()) {
        return a.clone();
    }
    let mut t = TripletBuilder::with_capacity(n, n, a.nnz() + n);
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            t.push(i, j, v);
        }
        t.push(i, i, 0.0);
    }
    t.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_its_own_factor() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 0.0, 0.0], vec![0.0, 4.0, 0.0], vec![0.0, 0.0, 5.0]]);
        let m = Ilu0::new(&a);
        assert_eq!(m.factors(), &a);
        assert_eq!(m.solve(&[2.0, 2.0, 1.0]), vec![1.0, 0.5, 0.2]);
    }

    #[test]
    fn zero_pivot_is_shifted() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let m = Ilu0::new(&a);
        assert!(m.shifted_pivots() >= 1);
        assert!(m.solve(&[1.0, 1.0]).iter().all(|v| v.is_finite()));
    }
}
