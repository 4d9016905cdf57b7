use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::mesh::{locate_point, Location, Mesh};
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// Continuous piecewise-linear scalar, one dof per vertex.
    P1,
    /// Two P1 components, dofs interleaved `(2v, 2v + 1)`.
    P1Vector,
    /// Piecewise constant, one dof per cell.
    P0,
    /// Lowest-order Raviart-Thomas; the dof of a facet is the flux through
    /// it along the facet's reference normal.
    Rt0,
}

impl SpaceKind {
    pub fn is_vector(self) -> bool {
        matches!(self, SpaceKind::P1Vector | SpaceKind::Rt0)
    }
}

#[derive(Clone, Debug)]
pub struct FunctionSpace {
    pub kind: SpaceKind,
    pub mesh: Arc<Mesh>,
}

impl FunctionSpace {
    pub fn new(kind: SpaceKind, mesh: Arc<Mesh>) -> Self {
        Self { kind, mesh }
    }

    pub fn n_dofs(&self) -> usize {
        match self.kind {
            SpaceKind::P1 => self.mesh.n_vertices(),
            SpaceKind::P1Vector => 2 * self.mesh.n_vertices(),
            SpaceKind::P0 => self.mesh.n_cells(),
            SpaceKind::Rt0 => self.mesh.n_facets(),
        }
    }

    /// Global dofs of a cell with their orientation signs (all +1 except RT0).
    pub fn cell_dofs(&self, c: usize) -> Vec<(usize, f64)> {
        let m = &self.mesh;
        match self.kind {
            SpaceKind::P1 => m.cell_vertices(c).iter().map(|&v| (v, 1.0)).collect(),
            SpaceKind::P1Vector => {
                m.cell_vertices(c).iter().flat_map(|&v| [(2 * v, 1.0), (2 * v + 1, 1.0)]).collect()
            }
            SpaceKind::P0 => vec![(c, 1.0)],
            SpaceKind::Rt0 => (0..=m.dim()).map(|i| (m.cell_facets(c)[i], m.facet_sign(c, i))).collect(),
        }
    }
}

/// Coefficient vector tied to its space.
#[derive(Clone, Debug)]
pub struct FieldSolution {
    pub space: FunctionSpace,
    pub values: Vec<f64>,
}

impl FieldSolution {
    pub fn new(kind: SpaceKind, mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        let space = FunctionSpace::new(kind, mesh);
        if values.len() != space.n_dofs() {
            return Err(Error::Dimension(format!(
                "{:?} field needs {} values, got {}",
                kind,
                space.n_dofs(),
                values.len()
            )));
        }
        Ok(Self { space, values })
    }

    pub fn kind(&self) -> SpaceKind {
        self.space.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.space.mesh
    }

    /// Value in cell `c` at the point with barycentric coordinates `bary`.
    /// Scalars are returned in the first component.
    pub fn value_in_cell(&self, c: usize, bary: [f64; 3]) -> Point {
        let m = &*self.space.mesh;
        let d = m.dim();
        match self.space.kind {
            SpaceKind::P0 => [self.values[c], 0.0],
            SpaceKind::P1 => {
                let s = m.cell_vertices(c).iter().enumerate().map(|(k, &v)| bary[k] * self.values[v]).sum();
                [s, 0.0]
            }
            SpaceKind::P1Vector => {
                let mut u = [0.0; 2];
                for (k, &v) in m.cell_vertices(c).iter().enumerate() {
                    u[0] += bary[k] * self.values[2 * v];
                    u[1] += bary[k] * self.values[2 * v + 1];
                }
                u
            }
            SpaceKind::Rt0 => {
                let pts = m.cell_points(c);
                let mut x = [0.0; 2];
                for k in 0..=d {
                    x[0] += bary[k] * pts[k][0];
                    x[1] += bary[k] * pts[k][1];
                }
                rt0_value(m, c, x, |f| self.values[f])
            }
        }
    }

    pub fn evaluate_at(&self, loc: Location) -> Point {
        self.value_in_cell(loc.cell, loc.bary)
    }

    pub fn evaluate(&self, p: Point) -> Result<Point> {
        Ok(self.evaluate_at(locate_point(&self.space.mesh, p)?))
    }

    pub fn evaluate_scalar(&self, p: Point) -> Result<f64> {
        if self.kind().is_vector() {
            return Err(Error::Dimension(format!("{:?} field is not scalar", self.kind())));
        }
        Ok(self.evaluate(p)?[0])
    }

    pub fn evaluate_vector(&self, p: Point) -> Result<Point> {
        if !self.kind().is_vector() {
            return Err(Error::Dimension(format!("{:?} field is not a vector field", self.kind())));
        }
        self.evaluate(p)
    }
}

/// Anything that can be evaluated at a located point of some mesh.
pub trait PointField {
    /// Mesh used to locate evaluation points.
    fn field_mesh(&self) -> &Mesh;

    /// Value at physical point `x`, which lies in `loc.cell` of [`Self::field_mesh`].
    fn value_at(&self, loc: &Location, x: Point) -> Point;

    fn is_vector(&self) -> bool;

    fn evaluate_point(&self, x: Point) -> Result<Point> {
        let loc = locate_point(self.field_mesh(), x)?;
        Ok(self.value_at(&loc, x))
    }
}

impl<T: PointField + ?Sized> PointField for &T {
    fn field_mesh(&self) -> &Mesh {
        (**self).field_mesh()
    }

    fn value_at(&self, loc: &Location, x: Point) -> Point {
        (**self).value_at(loc, x)
    }

    fn is_vector(&self) -> bool {
        (**self).is_vector()
    }
}

impl PointField for FieldSolution {
    fn field_mesh(&self) -> &Mesh {
        &self.space.mesh
    }

    fn value_at(&self, loc: &Location, x: Point) -> Point {
        match self.space.kind {
            SpaceKind::Rt0 => rt0_value(&self.space.mesh, loc.cell, x, |f| self.values[f]),
            _ => self.value_in_cell(loc.cell, loc.bary),
        }
    }

    fn is_vector(&self) -> bool {
        self.kind().is_vector()
    }
}

/// RT0 field at physical point `x` of cell `c`, facet fluxes from `flux`.
/// Local basis: `phi_i = s_i (x - v_i) / (d |K|)`, unit outward flux through
/// the facet opposite `v_i`.
pub fn rt0_value(m: &Mesh, c: usize, x: Point, flux: impl Fn(usize) -> f64) -> Point {
    let d = m.dim();
    let pts = m.cell_points(c);
    let scale = 1.0 / (d as f64 * m.cell_measure(c));
    let mut u = [0.0; 2];
    for i in 0..=d {
        let f = m.cell_facets(c)[i];
        let a = m.facet_sign(c, i) * flux(f) * scale;
        u[0] += a * (x[0] - pts[i][0]);
        u[1] += a * (x[1] - pts[i][1]);
    }
    if d == 1 {
        u[1] = 0.0;
    }
    u
}
