use serde::{Deserialize, Serialize};

use super::{FacetTag, FaultGeometry, Mesh, MeshSizes, SubdomainBox, INLET, OUTLET};
use crate::{Error, Point, Result};

/// Largest ratio allowed between neighbouring column widths or row heights.
pub const MAX_GROWTH: f64 = 1.3;
const TARGET_GROWTH: f64 = 1.2;

/// Rectangle `[0, lx] x [0, ly]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectDomain {
    pub lx: f64,
    pub ly: f64,
}

/// Uniform mesh of `(0, length)` with the vertex nearest to the fault moved
/// onto it.
pub fn generate_interval_mesh(length: f64, n_cells: usize, fault: FaultGeometry) -> Result<Mesh> {
    let x_f = fault.normal_coord;
    if !(length > 0.0) {
        return Err(Error::MeshParameter(format!("interval length must be positive, got {length}")));
    }
    if !(x_f > 0.0 && x_f < length) {
        return Err(Error::Geometry(format!("fault at {x_f} is not inside (0, {length})")));
    }
    if n_cells < 2 {
        return Err(Error::MeshParameter(format!("need at least 2 cells, got {n_cells}")));
    }
    if fault.dim() != 1 {
        return Err(Error::Dimension("interval mesh needs a point fault".into()));
    }
    let h = length / n_cells as f64;
    let mut vertices: Vec<Point> = (0..=n_cells).map(|i| [i as f64 * h, 0.0]).collect();
    vertices[n_cells][0] = length;
    let k = ((x_f / h).round() as usize).clamp(1, n_cells - 1);
    vertices[k][0] = x_f;

    let cells: Vec<usize> = (0..n_cells).flat_map(|i| [i, i + 1]).collect();
    let sizes = MeshSizes { h, h_s: h, h_f: h };
    Mesh::from_cells(
        1,
        vertices,
        cells,
        fault,
        sizes,
        None,
        |pts, boundary| {
            let x = pts[0][0];
            if boundary {
                if x < 0.5 * length {
                    FacetTag::Dirichlet(INLET)
                } else {
                    FacetTag::Dirichlet(OUTLET)
                }
            } else if x == x_f {
                FacetTag::Fault
            } else {
                FacetTag::Interior
            }
        },
        |_| false,
    )
}

/// Tensor-product graded triangulation of a rectangle around a vertical fault.
///
/// Spacing is about `h_f` inside the band `[x_f - l_s, x_f + l_s] x
/// [y_min - l_s, y_max + l_s]` and grows geometrically (ratio at most
/// [`MAX_GROWTH`]) to about `h` towards the outer boundary. Every quad is cut
/// along the diagonal pointing away from the fault midpoint.
pub fn generate_rect_mesh(
    domain: RectDomain,
    fault: FaultGeometry,
    h: f64,
    h_f: f64,
    l_s: f64,
) -> Result<Mesh> {
    let RectDomain { lx, ly } = domain;
    let (y_min, y_max) = fault
        .tangential
        .ok_or_else(|| Error::Dimension("rectangle mesh needs a segment fault".into()))?;
    let x_f = fault.normal_coord;
    if !(h_f > 0.0) || !(h_f < h) {
        return Err(Error::MeshParameter(format!("need 0 < h_f < h, got h_f = {h_f}, h = {h}")));
    }
    if !(l_s > 0.0) {
        return Err(Error::MeshParameter(format!("subdomain half-width must be positive, got {l_s}")));
    }
    if !(x_f > 0.0 && x_f < lx && y_min > 0.0 && y_max < ly) {
        return Err(Error::Geometry("fault is not strictly inside the domain".into()));
    }
    let sub = SubdomainBox { x: (x_f - l_s, x_f + l_s), y: (y_min - l_s, y_max + l_s), half_width: l_s };
    if !(sub.x.0 > 0.0 && sub.x.1 < lx && sub.y.0 > 0.0 && sub.y.1 < ly) {
        return Err(Error::Geometry(format!(
            "subdomain [{}, {}] x [{}, {}] exits the domain [0, {lx}] x [0, {ly}]",
            sub.x.0, sub.x.1, sub.y.0, sub.y.1
        )));
    }

    let xs = axis_coordinates(&[sub.x.0, x_f, sub.x.1], 0.0, lx, h, h_f)?;
    let ys = axis_coordinates(&[sub.y.0, y_min, y_max, sub.y.1], 0.0, ly, h, h_f)?;
    let (nx, ny) = (xs.len(), ys.len());

    let vertices: Vec<Point> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y])).collect();
    let vid = |i: usize, j: usize| j * nx + i;
    let mid = fault.midpoint();
    let mut cells = Vec::with_capacity((nx - 1) * (ny - 1) * 6);
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            let cx = 0.5 * (xs[i] + xs[i + 1]) - mid[0];
            let cy = 0.5 * (ys[j] + ys[j + 1]) - mid[1];
            if cx * cy >= 0.0 {
                // diagonal v00-v11 is radial in the first and third quadrants
                cells.extend_from_slice(&[v00, v10, v11, v00, v11, v01]);
            } else {
                cells.extend_from_slice(&[v00, v10, v01, v10, v11, v01]);
            }
        }
    }

    let sizes = MeshSizes { h, h_s: h_f, h_f };
    Mesh::from_cells(
        2,
        vertices,
        cells,
        fault,
        sizes,
        Some(sub),
        |pts, boundary| {
            let (a, b) = (pts[0], pts[1]);
            if boundary {
                if a[0] == 0.0 && b[0] == 0.0 {
                    FacetTag::Dirichlet(INLET)
                } else if a[0] == lx && b[0] == lx {
                    FacetTag::Dirichlet(OUTLET)
                } else {
                    FacetTag::Neumann
                }
            } else if a[0] == x_f
                && b[0] == x_f
                && a[1].min(b[1]) >= y_min
                && a[1].max(b[1]) <= y_max
            {
                FacetTag::Fault
            } else {
                FacetTag::Interior
            }
        },
        |c| sub.contains(c),
    )
}

/// Grid coordinates along one axis: uniform pieces of spacing at most `h_f`
/// between consecutive `band` breakpoints, graded pieces out to `lo` and `hi`.
fn axis_coordinates(band: &[f64], lo: f64, hi: f64, h: f64, h_f: f64) -> Result<Vec<f64>> {
    let mut uniform: Vec<Vec<f64>> = Vec::new();
    for w in band.windows(2) {
        let n = ((w[1] - w[0]) / h_f - 1e-9).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        uniform.push((0..n).map(|k| w[0] + k as f64 * step).collect());
    }
    let first_step = uniform[0].get(1).copied().unwrap_or(band[1]) - band[0];
    let last = uniform.last().unwrap();
    let last_step = band[band.len() - 1] - last[last.len() - 1];

    let left = graded_sizes(band[0] - lo, first_step, h)?;
    let right = graded_sizes(hi - band[band.len() - 1], last_step, h)?;

    let mut xs = Vec::new();
    let mut x = band[0];
    let mut left_pts = Vec::with_capacity(left.len() + 1);
    for s in &left {
        x -= s;
        left_pts.push(x);
    }
    left_pts.pop();
    left_pts.push(lo);
    left_pts.reverse();
    xs.extend(left_pts);
    for piece in uniform {
        xs.extend(piece);
    }
    xs.push(band[band.len() - 1]);
    let mut x = band[band.len() - 1];
    for s in &right[..right.len() - 1] {
        x += s;
        xs.push(x);
    }
    xs.push(hi);
    Ok(xs)
}

fn graded_total(n: usize, q: f64, s0: f64, h: f64) -> f64 {
    let mut s = s0;
    let mut total = 0.0;
    for _ in 0..n {
        s = (s * q).min(h.max(s0));
        total += s;
    }
    total
}

/// Cell sizes filling a gap of length `gap` next to a cell of size `s0`,
/// growing by a common ratio in `[1/MAX_GROWTH, MAX_GROWTH]` and capped at `h`.
fn graded_sizes(gap: f64, s0: f64, h: f64) -> Result<Vec<f64>> {
    let q_lo = 1.0 / MAX_GROWTH;
    let q_hi = MAX_GROWTH;
    let n_max = (gap / (s0 * q_lo)).ceil() as usize + 2;
    let target = (1..=n_max)
        .min_by(|&a, &b| {
            let da = (graded_total(a, TARGET_GROWTH, s0, h) - gap).abs();
            let db = (graded_total(b, TARGET_GROWTH, s0, h) - gap).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(1);
    let feasible = |n: usize| graded_total(n, q_lo, s0, h) <= gap && graded_total(n, q_hi, s0, h) >= gap;
    let n = (1..=n_max)
        .filter(|&n| feasible(n))
        .min_by_key(|&n| n.abs_diff(target))
        .ok_or_else(|| {
            Error::Geometry(format!("gap {gap} next to spacing {s0} is too small to grade"))
        })?;
    let (mut a, mut b) = (q_lo, q_hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if graded_total(n, m, s0, h) < gap {
            a = m;
        } else {
            b = m;
        }
    }
    let q = 0.5 * (a + b);
    let mut sizes = Vec::with_capacity(n);
    let mut s = s0;
    for _ in 0..n {
        s = (s * q).min(h.max(s0));
        sizes.push(s);
    }
    Ok(sizes)
}
