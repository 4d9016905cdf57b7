use crate::fem::{PointField, QuadratureRule};
use crate::mesh::Location;
use crate::{Error, Result};

/// `||a - b||_{L2}` integrated with a degree-4 rule on the cells of `fine`'s
/// mesh; `coarse` is evaluated by point location. Vector fields use the
/// Euclidean norm of the difference.
pub fn l2_error(coarse: &dyn PointField, fine: &dyn PointField) -> Result<f64> {
    if coarse.is_vector() != fine.is_vector() {
        return Err(Error::Dimension("cannot compare a scalar field with a vector field".into()));
    }
    let m = fine.field_mesh();
    let rule = QuadratureRule::for_cell(m.dim(), 4);
    let mut sum = 0.0;
    for c in 0..m.n_cells() {
        let verts = m.cell_points(c);
        for (x, bary, w) in rule.mapped(&verts[..=m.dim()], m.cell_measure(c)) {
            let f = fine.value_at(&Location { cell: c, bary }, x);
            let g = coarse.evaluate_point(x)?;
            sum += w * ((f[0] - g[0]).powi(2) + (f[1] - g[1]).powi(2));
        }
    }
    Ok(sum.sqrt())
}

/// `||a||_{L2}` over the mesh of `a`.
pub fn l2_norm(a: &dyn PointField) -> f64 {
    let m = a.field_mesh();
    let rule = QuadratureRule::for_cell(m.dim(), 4);
    let mut sum = 0.0;
    for c in 0..m.n_cells() {
        let verts = m.cell_points(c);
        for (x, bary, w) in rule.mapped(&verts[..=m.dim()], m.cell_measure(c)) {
            let f = a.value_at(&Location { cell: c, bary }, x);
            sum += w * (f[0] * f[0] + f[1] * f[1]);
        }
    }
    sum.sqrt()
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn estimate_rate(errors: &[f64], hs: &[f64]) -> Result<f64> {
    if errors.len() != hs.len() || errors.len() < 2 {
        return Err(Error::Config(format!(
            "rate needs at least two (h, error) pairs of equal length, got {} and {}",
            errors.len(),
            hs.len()
        )));
    }
    if errors.iter().chain(hs).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Config("rate needs positive finite errors and mesh sizes".into()));
    }
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("rate needs at least two distinct mesh sizes".into()));
    }
    Ok(sxy / sxx)
}
