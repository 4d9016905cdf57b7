//! Fault-conforming simplicial meshes (intervals in 1D, triangles in 2D).

mod generate;
mod locate;
mod submesh;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use generate::{generate_interval_mesh, generate_rect_mesh, RectDomain};
pub use locate::{locate_point, Location, PointLocator};
pub use submesh::{extract_subdomain, SubFacetKind, SubMesh};

use crate::{Error, Point, Result};

/// Marker for the missing second neighbour of a boundary facet.
pub const NO_CELL: usize = usize::MAX;

/// Dirichlet boundary carrying the high pressure (x = 0).
pub const INLET: u8 = 1;
/// Dirichlet boundary carrying the low pressure (x = Lx, or x = L in 1D).
pub const OUTLET: u8 = 0;

/// Position and transmissibility of the single fault.
///
/// The fault normal is always the +x axis. In 2D the fault is the segment
/// `{normal_coord} x [tangential.0, tangential.1]`; in 1D it is the point
/// `x = normal_coord`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaultGeometry {
    pub normal_coord: f64,
    pub tangential: Option<(f64, f64)>,
    pub transmissibility: f64,
}

impl FaultGeometry {
    pub fn point(x: f64, transmissibility: f64) -> Result<Self> {
        let f = Self { normal_coord: x, tangential: None, transmissibility };
        f.validate()?;
        Ok(f)
    }

    pub fn segment(x: f64, y_min: f64, y_max: f64, transmissibility: f64) -> Result<Self> {
        let f = Self { normal_coord: x, tangential: Some((y_min, y_max)), transmissibility };
        f.validate()?;
        Ok(f)
    }

    pub fn with_transmissibility(self, transmissibility: f64) -> Result<Self> {
        let f = Self { transmissibility, ..self };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        if !(self.transmissibility > 0.0) || !self.transmissibility.is_finite() {
            return Err(Error::Geometry(format!(
                "transmissibility must be positive and finite, got {}",
                self.transmissibility
            )));
        }
        if let Some((lo, hi)) = self.tangential {
            if !(lo < hi) {
                return Err(Error::Geometry(format!("empty fault extent [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        if self.tangential.is_some() {
            2
        } else {
            1
        }
    }

    /// Measure of the fault: its length in 2D, one (counting measure) in 1D.
    pub fn measure(&self) -> f64 {
        self.tangential.map_or(1.0, |(lo, hi)| hi - lo)
    }

    /// Signed normal offset `x_n - y_n` of a point from the fault plane.
    pub fn normal_offset(&self, p: Point) -> f64 {
        p[0] - self.normal_coord
    }

    pub fn midpoint(&self) -> Point {
        match self.tangential {
            Some((lo, hi)) => [self.normal_coord, 0.5 * (lo + hi)],
            None => [self.normal_coord, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetTag {
    Interior,
    Fault,
    Dirichlet(u8),
    Neumann,
}

impl FacetTag {
    pub fn is_boundary(self) -> bool {
        matches!(self, FacetTag::Dirichlet(_) | FacetTag::Neumann)
    }
}

/// Characteristic mesh sizes: outer boundary, subdomain boundary, fault.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSizes {
    pub h: f64,
    pub h_s: f64,
    pub h_f: f64,
}

/// Axis-aligned box `[x0, x1] x [y0, y1]` of the correction subdomain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdomainBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub half_width: f64,
}

impl SubdomainBox {
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x.0 && p[0] <= self.x.1 && p[1] >= self.y.0 && p[1] <= self.y.1
    }
}

/// Simplicial mesh with facet adjacency and tags.
///
/// Cells and facets are stored flat: a cell has `dim + 1` vertices, a facet
/// `dim` vertices. Local facet `i` of a cell is the facet opposite its local
/// vertex `i`. Facet orientation: the reference normal of a facet points out
/// of its first (lowest-indexed) adjacent cell.
#[derive(Debug)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<usize>,
    cell_facets: Vec<usize>,
    facets: Vec<usize>,
    facet_cells: Vec<[usize; 2]>,
    facet_tags: Vec<FacetTag>,
    in_subdomain: Vec<bool>,
    sizes: MeshSizes,
    fault: FaultGeometry,
    subdomain: Option<SubdomainBox>,
    locator: OnceLock<PointLocator>,
}

impl Mesh {
    /// Builds topology for the given cells. `tag_facet` is called for every
    /// facet with its vertex coordinates and whether it lies on the boundary;
    /// `cell_in_subdomain` with each cell centroid.
    pub(crate) fn from_cells(
        dim: usize,
        vertices: Vec<Point>,
        mut cells: Vec<usize>,
        fault: FaultGeometry,
        sizes: MeshSizes,
        subdomain: Option<SubdomainBox>,
        mut tag_facet: impl FnMut(&[Point], bool) -> FacetTag,
        mut cell_in_subdomain: impl FnMut(Point) -> bool,
    ) -> Result<Self> {
        let nv = dim + 1;
        assert_eq!(cells.len() % nv, 0);
        let n_cells = cells.len() / nv;

        // Orient triangles counter-clockwise, intervals left to right.
        for c in 0..n_cells {
            let cv = &mut cells[c * nv..(c + 1) * nv];
            let m = signed_measure(dim, &vertices, cv);
            if m < 0.0 {
                cv.swap(0, 1);
            }
            let m = signed_measure(dim, &vertices, cv);
            if !(m > 0.0) {
                return Err(Error::DegenerateCell { cell: c, measure: m });
            }
        }

        let mut facet_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(n_cells * 2);
        let mut facets = Vec::new();
        let mut facet_cells: Vec<[usize; 2]> = Vec::new();
        let mut cell_facets = vec![0; n_cells * nv];
        for c in 0..n_cells {
            let cv = &cells[c * nv..(c + 1) * nv];
            for i in 0..nv {
                let mut key = [NO_CELL; 2];
                let mut k = 0;
                for (j, &v) in cv.iter().enumerate() {
                    if j != i {
                        key[k] = v;
                        k += 1;
                    }
                }
                let fv: Vec<usize> = key[..dim].to_vec();
                if dim == 2 && key[0] > key[1] {
                    key.swap(0, 1);
                }
                let f = *facet_index.entry(key).or_insert_with(|| {
                    facets.extend_from_slice(&fv);
                    facet_cells.push([c, NO_CELL]);
                    facet_cells.len() - 1
                });
                if facet_cells[f][0] != c {
                    if facet_cells[f][1] != NO_CELL {
                        return Err(Error::MeshParameter(format!(
                            "facet {f} shared by more than two cells"
                        )));
                    }
                    facet_cells[f][1] = c;
                }
                cell_facets[c * nv + i] = f;
            }
        }

        let facet_tags = (0..facet_cells.len())
            .map(|f| {
                let pts: Vec<Point> =
                    facets[f * dim..(f + 1) * dim].iter().map(|&v| vertices[v]).collect();
                tag_facet(&pts, facet_cells[f][1] == NO_CELL)
            })
            .collect();

        let mut mesh = Self {
            dim,
            vertices,
            cells,
            cell_facets,
            facets,
            facet_cells,
            facet_tags,
            in_subdomain: Vec::new(),
            sizes,
            fault,
            subdomain,
            locator: OnceLock::new(),
        };
        mesh.in_subdomain = (0..n_cells).map(|c| cell_in_subdomain(mesh.cell_centroid(c))).collect();
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn n_facets(&self) -> usize {
        self.facet_cells.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cells[c * nv..(c + 1) * nv]
    }

    pub fn cell_facets(&self, c: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cell_facets[c * nv..(c + 1) * nv]
    }

    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        &self.facets[f * self.dim..(f + 1) * self.dim]
    }

    /// Adjacent cells of a facet; the second is [`NO_CELL`] on the boundary.
    pub fn facet_cells(&self, f: usize) -> [usize; 2] {
        self.facet_cells[f]
    }

    pub fn facet_tag(&self, f: usize) -> FacetTag {
        self.facet_tags[f]
    }

    pub fn facet_tags(&self) -> &[FacetTag] {
        &self.facet_tags
    }

    pub fn in_subdomain(&self, c: usize) -> bool {
        self.in_subdomain[c]
    }

    pub fn subdomain_flags(&self) -> &[bool] {
        &self.in_subdomain
    }

    pub fn sizes(&self) -> MeshSizes {
        self.sizes
    }

    pub fn fault(&self) -> &FaultGeometry {
        &self.fault
    }

    pub fn subdomain_box(&self) -> Option<&SubdomainBox> {
        self.subdomain.as_ref()
    }

    /// Orientation of local facet `i` of cell `c` relative to the facet's
    /// reference normal: +1 if the reference normal points out of `c`.
    pub fn facet_sign(&self, c: usize, i: usize) -> f64 {
        let f = self.cell_facets(c)[i];
        if self.facet_cells[f][0] == c {
            1.0
        } else {
            -1.0
        }
    }

    pub fn cell_measure(&self, c: usize) -> f64 {
        signed_measure(self.dim, &self.vertices, self.cell_vertices(c))
    }

    pub fn cell_points(&self, c: usize) -> [Point; 3] {
        let cv = self.cell_vertices(c);
        let mut pts = [[0.0; 2]; 3];
        for (k, &v) in cv.iter().enumerate() {
            pts[k] = self.vertices[v];
        }
        pts
    }

    pub fn cell_centroid(&self, c: usize) -> Point {
        let cv = self.cell_vertices(c);
        let mut x = [0.0; 2];
        for &v in cv {
            x[0] += self.vertices[v][0];
            x[1] += self.vertices[v][1];
        }
        let n = cv.len() as f64;
        [x[0] / n, x[1] / n]
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        let pts = self.cell_points(c);
        let nv = self.dim + 1;
        let mut d: f64 = 0.0;
        for a in 0..nv {
            for b in a + 1..nv {
                d = d.max(dist(pts[a], pts[b]));
            }
        }
        d
    }

    pub fn facet_measure(&self, f: usize) -> f64 {
        if self.dim == 1 {
            1.0
        } else {
            let fv = self.facet_vertices(f);
            dist(self.vertices[fv[0]], self.vertices[fv[1]])
        }
    }

    pub fn facet_midpoint(&self, f: usize) -> Point {
        let fv = self.facet_vertices(f);
        if self.dim == 1 {
            self.vertices[fv[0]]
        } else {
            let (a, b) = (self.vertices[fv[0]], self.vertices[fv[1]]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }
    }

    /// Unit reference normal of a facet (outward from its first cell).
    pub fn facet_normal(&self, f: usize) -> Point {
        let c = self.facet_cells[f][0];
        let m = self.facet_midpoint(f);
        let g = self.cell_centroid(c);
        let out = [m[0] - g[0], m[1] - g[1]];
        let n = if self.dim == 1 {
            [1.0, 0.0]
        } else {
            let fv = self.facet_vertices(f);
            let (a, b) = (self.vertices[fv[0]], self.vertices[fv[1]]);
            let len = dist(a, b);
            [(b[1] - a[1]) / len, -(b[0] - a[0]) / len]
        };
        if n[0] * out[0] + n[1] * out[1] < 0.0 {
            [-n[0], -n[1]]
        } else {
            n
        }
    }

    /// Axis-aligned bounding box `(min, max)` of all vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_measure(c)).sum()
    }

    pub fn fault_facets(&self) -> Vec<usize> {
        (0..self.n_facets()).filter(|&f| self.facet_tags[f] == FacetTag::Fault).collect()
    }

    /// Vertices lying on a Dirichlet facet, with that facet's boundary id.
    pub fn dirichlet_vertices(&self) -> Vec<(usize, u8)> {
        let mut marked: Vec<Option<u8>> = vec![None; self.n_vertices()];
        for f in 0..self.n_facets() {
            if let FacetTag::Dirichlet(id) = self.facet_tags[f] {
                for &v in self.facet_vertices(f) {
                    marked[v] = Some(id);
                }
            }
        }
        marked.iter().enumerate().filter_map(|(v, id)| id.map(|id| (v, id))).collect()
    }

    pub(crate) fn locator(&self) -> &PointLocator {
        self.locator.get_or_init(|| PointLocator::new(self))
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn signed_measure(dim: usize, vertices: &[Point], cv: &[usize]) -> f64 {
    if dim == 1 {
        vertices[cv[1]][0] - vertices[cv[0]][0]
    } else {
        let (a, b, c) = (vertices[cv[0]], vertices[cv[1]], vertices[cv[2]]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_geometry_rejects_bad_input() {
        assert!(FaultGeometry::point(1.0, 0.0).is_err());
        assert!(FaultGeometry::point(1.0, -2.0).is_err());
        assert!(FaultGeometry::segment(1.0, 0.7, 0.3, 2.0).is_err());
        let f = FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap();
        assert_eq!(f.dim(), 2);
        assert!((f.measure() - 0.4).abs() < 1e-15);
        assert_eq!(f.normal_offset([1.25, 0.5]), 0.25);
    }
}
