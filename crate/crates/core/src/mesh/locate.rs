use super::Mesh;
use crate::{Error, Point, Result};

const BARY_TOL: f64 = 1e-10;

/// Cell containing a point and the point's barycentric coordinates in it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub cell: usize,
    pub bary: [f64; 3],
}

/// Uniform background grid of bins, each listing the cells whose bounding
/// box overlaps it.
#[derive(Debug)]
pub struct PointLocator {
    lo: Point,
    hi: Point,
    inv: [f64; 2],
    n: [usize; 2],
    offsets: Vec<usize>,
    items: Vec<usize>,
    slack: f64,
}

impl PointLocator {
    pub fn new(mesh: &Mesh) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let n_cells = mesh.n_cells().max(1);
        let w = (hi[0] - lo[0]).max(f64::MIN_POSITIVE);
        let hgt = hi[1] - lo[1];
        let n = if mesh.dim() == 1 || hgt <= 0.0 {
            [n_cells, 1]
        } else {
            let nx = ((n_cells as f64 * w / hgt).sqrt().ceil() as usize).max(1);
            let ny = ((n_cells as f64 / nx as f64).ceil() as usize).max(1);
            [nx, ny]
        };
        let inv = [n[0] as f64 / w, if hgt > 0.0 { n[1] as f64 / hgt } else { 0.0 }];
        let diag = (w * w + hgt * hgt).sqrt();
        let mut loc = Self { lo, hi, inv, n, offsets: Vec::new(), items: Vec::new(), slack: BARY_TOL * diag };

        let ranges: Vec<[usize; 4]> = (0..mesh.n_cells())
            .map(|c| {
                let pts = mesh.cell_points(c);
                let mut a = [f64::INFINITY; 2];
                let mut b = [f64::NEG_INFINITY; 2];
                for p in &pts[..mesh.dim() + 1] {
                    for k in 0..2 {
                        a[k] = a[k].min(p[k]);
                        b[k] = b[k].max(p[k]);
                    }
                }
                let (i0, j0) = loc.bin(a);
                let (i1, j1) = loc.bin(b);
                [i0, i1, j0, j1]
            })
            .collect();
        let mut counts = vec![0usize; n[0] * n[1] + 1];
        for r in &ranges {
            for j in r[2]..=r[3] {
                for i in r[0]..=r[1] {
                    counts[j * n[0] + i + 1] += 1;
                }
            }
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0; counts[counts.len() - 1]];
        for (c, r) in ranges.iter().enumerate() {
            for j in r[2]..=r[3] {
                for i in r[0]..=r[1] {
                    let b = j * n[0] + i;
                    items[fill[b]] = c;
                    fill[b] += 1;
                }
            }
        }
        loc.offsets = counts;
        loc.items = items;
        loc
    }

    fn bin(&self, p: Point) -> (usize, usize) {
        let i = (((p[0] - self.lo[0]) * self.inv[0]).floor().max(0.0) as usize).min(self.n[0] - 1);
        let j = (((p[1] - self.lo[1]) * self.inv[1]).floor().max(0.0) as usize).min(self.n[1] - 1);
        (i, j)
    }

    /// Among the cells containing `p` (up to tolerance) returns the one where
    /// `p` lies deepest, i.e. with the largest minimum barycentric
    /// coordinate; ties go to the lowest cell index.
    pub fn locate(&self, mesh: &Mesh, p: Point) -> Result<Location> {
        let s = self.slack;
        if p[0] < self.lo[0] - s || p[0] > self.hi[0] + s || p[1] < self.lo[1] - s || p[1] > self.hi[1] + s {
            return Err(Error::PointOutside { x: p[0], y: p[1] });
        }
        let (i, j) = self.bin(p);
        if let Some(l) = self.search(mesh, p, i..=i, j..=j) {
            return Ok(l);
        }
        let i_range = i.saturating_sub(1)..=(i + 1).min(self.n[0] - 1);
        let j_range = j.saturating_sub(1)..=(j + 1).min(self.n[1] - 1);
        self.search(mesh, p, i_range, j_range).ok_or(Error::PointOutside { x: p[0], y: p[1] })
    }

    fn search(
        &self,
        mesh: &Mesh,
        p: Point,
        is: std::ops::RangeInclusive<usize>,
        js: std::ops::RangeInclusive<usize>,
    ) -> Option<Location> {
        let mut best: Option<(f64, Location)> = None;
        for j in js {
            for i in is.clone() {
                let b = j * self.n[0] + i;
                for &c in &self.items[self.offsets[b]..self.offsets[b + 1]] {
                    let bary = barycentric(mesh, c, p);
                    let m = bary[..mesh.dim() + 1].iter().cloned().fold(f64::INFINITY, f64::min);
                    if m < -BARY_TOL {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((bm, bl)) => m > *bm || (m == *bm && c < bl.cell),
                    };
                    if better {
                        best = Some((m, Location { cell: c, bary }));
                    }
                }
            }
        }
        best.map(|(_, l)| l)
    }
}

/// Barycentric coordinates of `p` with respect to cell `c` (third entry is
/// zero in 1D).
pub fn barycentric(mesh: &Mesh, c: usize, p: Point) -> [f64; 3] {
    let pts = mesh.cell_points(c);
    if mesh.dim() == 1 {
        let t = (p[0] - pts[0][0]) / (pts[1][0] - pts[0][0]);
        [1.0 - t, t, 0.0]
    } else {
        let [a, b, cc] = pts;
        let det = (b[0] - a[0]) * (cc[1] - a[1]) - (cc[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((p[0] - a[0]) * (cc[1] - a[1]) - (cc[0] - a[0]) * (p[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Locates `p` in `mesh` (the bin grid is built on first use).
pub fn locate_point(mesh: &Mesh, p: Point) -> Result<Location> {
    mesh.locator().locate(mesh, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rect_mesh, FaultGeometry, RectDomain};

    fn mesh() -> Mesh {
        let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap();
        generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.25, 0.1, 0.2).unwrap()
    }

    #[test]
    fn centroid_locates_own_cell() {
        let m = mesh();
        for c in (0..m.n_cells()).step_by(7) {
            let l = locate_point(&m, m.cell_centroid(c)).unwrap();
            assert_eq!(l.cell, c);
            for k in 0..3 {
                assert!((l.bary[k] - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shared_vertex_gives_unit_barycentric() {
        let m = mesh();
        let p = m.vertex(m.cell_vertices(10)[1]);
        let l = locate_point(&m, p).unwrap();
        assert!(l.bary.iter().any(|&b| (b - 1.0).abs() < 1e-12));
        assert!(m.cell_vertices(l.cell).iter().any(|&v| m.vertex(v) == p));
    }

    #[test]
    fn outside_point_is_rejected() {
        let m = mesh();
        assert!(matches!(locate_point(&m, [-1.0, -1.0]), Err(Error::PointOutside { .. })));
    }
}
