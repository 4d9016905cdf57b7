use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::quadrature::QuadratureRule;
use super::space::{FieldSolution, SpaceKind};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::{FacetTag, Mesh, INLET, OUTLET};
use crate::regdelta::RegularizedDelta;
use crate::{Error, Point, Result};

/// Fault-term quadrature is raised to degree 6 on cells within this many
/// `eps` of the fault plane.
pub const BAND_WIDTHS: f64 = 8.0;

/// Pressure values per Dirichlet boundary id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPressures(pub BTreeMap<u8, f64>);

impl BoundaryPressures {
    pub fn inlet_outlet(p_inlet: f64, p_outlet: f64) -> Self {
        Self(BTreeMap::from([(INLET, p_inlet), (OUTLET, p_outlet)]))
    }

    pub fn get(&self, id: u8) -> Result<f64> {
        self.0.get(&id).copied().ok_or(Error::MissingBoundary(id))
    }
}

/// Gradients of the barycentric coordinates (P1 basis) of cell `c`.
pub fn p1_gradients(m: &Mesh, c: usize) -> [Point; 3] {
    let p = m.cell_points(c);
    if m.dim() == 1 {
        let l = p[1][0] - p[0][0];
        [[-1.0 / l, 0.0], [1.0 / l, 0.0], [0.0, 0.0]]
    } else {
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let mut g = [[0.0; 2]; 3];
        for i in 0..3 {
            let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            g[i] = [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
        }
        g
    }
}

/// Gradient of a P1 field on cell `c`.
pub fn p1_cell_gradient(m: &Mesh, c: usize, values: &[f64]) -> Point {
    let g = p1_gradients(m, c);
    let mut out = [0.0; 2];
    for (k, &v) in m.cell_vertices(c).iter().enumerate() {
        out[0] += g[k][0] * values[v];
        out[1] += g[k][1] * values[v];
    }
    out
}

pub fn assemble_p1_stiffness(m: &Mesh) -> CsrMatrix {
    let nv = m.dim() + 1;
    let mut t = TripletBuilder::with_capacity(m.n_vertices(), m.n_vertices(), m.n_cells() * nv * nv);
    for c in 0..m.n_cells() {
        let g = p1_gradients(m, c);
        let area = m.cell_measure(c);
        let cv = m.cell_vertices(c);
        for i in 0..nv {
            for j in 0..nv {
                t.push(cv[i], cv[j], area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
            }
        }
    }
    t.build()
}

/// Whether cell `c` reaches into the band `|x - x_f| <= 8 eps`.
pub fn cell_in_band(m: &Mesh, c: usize, delta: &RegularizedDelta) -> bool {
    let x_f = delta.fault().normal_coord;
    let w = BAND_WIDTHS * delta.eps();
    let pts = m.cell_points(c);
    let (lo, hi) = pts[..=m.dim()].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
    hi >= x_f - w && lo <= x_f + w
}

/// The fault part of the regularized bilinear form:
/// `(G dp/dn, w) - (dD/dtau dp/dtau, w) - (D dp/dtau, dw/dtau)`,
/// rows indexed by the test function. Only the first term exists in 1D.
pub fn assemble_cg_fault_terms(m: &Mesh, delta: &RegularizedDelta) -> CsrMatrix {
    if delta.eps() < m.sizes().h_f {
        log::warn!("eps = {} is below the fault mesh size {}", delta.eps(), m.sizes().h_f);
    }
    let d = m.dim();
    let nv = d + 1;
    let fine = QuadratureRule::for_cell(d, 6);
    let coarse = QuadratureRule::for_cell(d, 2);
    let mut t = TripletBuilder::with_capacity(m.n_vertices(), m.n_vertices(), m.n_cells() * nv * nv);
    for c in 0..m.n_cells() {
        let q = if cell_in_band(m, c, delta) { &fine } else { &coarse };
        let g = p1_gradients(m, c);
        let cv = m.cell_vertices(c);
        let pts = m.cell_points(c);
        let mut local = [[0.0; 3]; 3];
        for (x, bary, w) in q.mapped(&pts[..nv], m.cell_measure(c)) {
            let (gg, dd, ddt) = delta.coefficients(x);
            for i in 0..nv {
                for j in 0..nv {
                    local[i][j] +=
                        w * (gg * g[j][0] * bary[i] - ddt * g[j][1] * bary[i] - dd * g[j][1] * g[i][1]);
                }
            }
        }
        for i in 0..nv {
            for j in 0..nv {
                t.push(cv[i], cv[j], local[i][j]);
            }
        }
    }
    t.build()
}

/// `(f, w)` for P1 test functions.
pub fn assemble_p1_load(m: &Mesh, f: &dyn Fn(Point) -> f64) -> Vec<f64> {
    let nv = m.dim() + 1;
    let q = QuadratureRule::for_cell(m.dim(), 4);
    let mut b = vec![0.0; m.n_vertices()];
    for c in 0..m.n_cells() {
        let pts = m.cell_points(c);
        let cv = m.cell_vertices(c);
        for (x, bary, w) in q.mapped(&pts[..nv], m.cell_measure(c)) {
            let fx = f(x);
            for i in 0..nv {
                b[cv[i]] += w * fx * bary[i];
            }
        }
    }
    b
}

/// Lumped-mass L2 projection of `-grad p` onto the P1 vector space.
pub fn l2_project_gradient(p: &FieldSolution) -> Result<FieldSolution> {
    if p.kind() != SpaceKind::P1 {
        return Err(Error::Dimension(format!("gradient projection needs a P1 field, got {:?}", p.kind())));
    }
    let m = p.mesh();
    let nv = m.dim() + 1;
    let mut mass = vec![0.0; m.n_vertices()];
    let mut u = vec![0.0; 2 * m.n_vertices()];
    for c in 0..m.n_cells() {
        let g = p1_cell_gradient(m, c, &p.values);
        let w = m.cell_measure(c) / nv as f64;
        for &v in m.cell_vertices(c) {
            mass[v] += w;
            u[2 * v] -= w * g[0];
            u[2 * v + 1] -= w * g[1];
        }
    }
    for (v, &mv) in mass.iter().enumerate() {
        u[2 * v] /= mv;
        u[2 * v + 1] /= mv;
    }
    FieldSolution::new(SpaceKind::P1Vector, m.clone(), u)
}

/// Boundary condition on one boundary facet of a mixed problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FacetBc {
    /// Mean pressure on the facet, imposed weakly.
    Pressure(f64),
    /// Outward flux through the facet, imposed as an essential constraint.
    Flux(f64),
}

/// Assembled saddle-point system; unknowns are the facet fluxes followed by
/// the cell pressures.
#[derive(Clone, Debug)]
pub struct MixedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub n_flux: usize,
    pub n_cells: usize,
    /// Pinned flux dofs and their values.
    pub essential: Vec<(usize, f64)>,
    /// Condition on every boundary facet, `None` elsewhere.
    pub facet_bc: Vec<Option<FacetBc>>,
    /// Integral of the source over each cell. The constraint rows of `rhs`
    /// differ from it next to pinned nonzero fluxes.
    pub source: Vec<f64>,
}

impl MixedSystem {
    pub fn n_dofs(&self) -> usize {
        self.n_flux + self.n_cells
    }

    /// The same system with the constraint rows negated, which makes it
    /// symmetric (and indefinite).
    pub fn symmetric_matrix(&self) -> CsrMatrix {
        let mut s = self.matrix.clone();
        let start = s.row_ptr()[self.n_flux];
        for v in &mut s.values_mut()[start..] {
            *v = -*v;
        }
        s
    }
}

/// Integrals of `(x - v_i) . (x - v_j)` over cell `c`, scaled into the
/// outward-flux RT0 basis.
pub fn rt0_local_mass(m: &Mesh, c: usize) -> [[f64; 3]; 3] {
    let d = m.dim();
    let nv = d + 1;
    let p = m.cell_points(c);
    let area = m.cell_measure(c);
    let moment = area / ((d + 1) * (d + 2)) as f64;
    let scale = 1.0 / (d as f64 * area).powi(2);
    let mut out = [[0.0; 3]; 3];
    for i in 0..nv {
        for j in 0..nv {
            let mut s = 0.0;
            for k in 0..nv {
                for l in 0..nv {
                    let a = [p[k][0] - p[i][0], p[k][1] - p[i][1]];
                    let b = [p[l][0] - p[j][0], p[l][1] - p[j][1]];
                    let dot = if d == 1 { a[0] * b[0] } else { a[0] * b[0] + a[1] * b[1] };
                    s += if k == l { 2.0 } else { 1.0 } * dot;
                }
            }
            out[i][j] = scale * moment * s;
        }
    }
    out
}

/// Assembles `[[A, -B^T], [B, 0]]` with the fault flux mass `1/(t_f |e|)` on
/// fault facets, boundary data from `facet_bc` (called for every boundary
/// facet) and source `f`.
pub fn assemble_mixed_with(
    m: &Mesh,
    t_f: f64,
    f: Option<&dyn Fn(Point) -> f64>,
    mut facet_bc: impl FnMut(usize) -> Result<FacetBc>,
) -> Result<MixedSystem> {
    let d = m.dim();
    let nv = d + 1;
    let (n_u, n_p) = (m.n_facets(), m.n_cells());
    let mut t = TripletBuilder::with_capacity(n_u + n_p, n_u + n_p, n_p * (nv * nv + 2 * nv + 1));
    let mut rhs = vec![0.0; n_u + n_p];
    let q = QuadratureRule::for_cell(d, 2);
    for c in 0..n_p {
        let mass = rt0_local_mass(m, c);
        let facets = m.cell_facets(c);
        let signs: Vec<f64> = (0..nv).map(|i| m.facet_sign(c, i)).collect();
        for i in 0..nv {
            for j in 0..nv {
                t.push(facets[i], facets[j], signs[i] * signs[j] * mass[i][j]);
            }
            t.push(n_u + c, facets[i], signs[i]);
            t.push(facets[i], n_u + c, -signs[i]);
        }
        // explicit zero so the pressure block has a stored diagonal
        t.push(n_u + c, n_u + c, 0.0);
        if let Some(f) = f {
            let pts = m.cell_points(c);
            rhs[n_u + c] = q.mapped(&pts[..nv], m.cell_measure(c)).map(|(x, _, w)| w * f(x)).sum();
        }
    }
    let mut essential = Vec::new();
    let mut bcs = vec![None; n_u];
    for e in 0..n_u {
        match m.facet_tag(e) {
            FacetTag::Fault => t.push(e, e, 1.0 / (t_f * m.facet_measure(e))),
            FacetTag::Interior => {}
            FacetTag::Dirichlet(_) | FacetTag::Neumann => {
                let bc = facet_bc(e)?;
                match bc {
                    FacetBc::Pressure(p) => rhs[e] -= p,
                    FacetBc::Flux(q) => essential.push((e, q)),
                }
                bcs[e] = Some(bc);
            }
        }
    }
    let source = rhs[n_u..].to_vec();
    let mut matrix = t.build();
    matrix.apply_essential(&mut rhs, &essential);
    Ok(MixedSystem { matrix, rhs, n_flux: n_u, n_cells: n_p, essential, facet_bc: bcs, source })
}

/// Global mixed problem: Dirichlet facets take their pressure from `bc`,
/// Neumann facets are no-flow.
pub fn assemble_mixed_system(
    m: &Mesh,
    t_f: f64,
    f: Option<&dyn Fn(Point) -> f64>,
    bc: &BoundaryPressures,
) -> Result<MixedSystem> {
    assemble_mixed_with(m, t_f, f, |e| match m.facet_tag(e) {
        FacetTag::Dirichlet(id) => Ok(FacetBc::Pressure(bc.get(id)?)),
        _ => Ok(FacetBc::Flux(0.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_interval_mesh, FaultGeometry};

    #[test]
    fn interval_stiffness() {
        let m = generate_interval_mesh(1.0, 2, FaultGeometry::point(0.5, 1.0).unwrap()).unwrap();
        let k = assemble_p1_stiffness(&m).to_dense();
        let expect = [[2.0, -2.0, 0.0], [-2.0, 4.0, -2.0], [0.0, -2.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[(i, j)] - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rt0_mass_is_symmetric_positive() {
        let m = generate_interval_mesh(2.0, 4, FaultGeometry::point(1.0, 1.0).unwrap()).unwrap();
        let a = rt0_local_mass(&m, 1);
        // 1D: int (x - v_i)(x - v_j) / h^2 over [0, h]
        assert!((a[0][0] - 0.5 / 3.0).abs() < 1e-12);
        assert!((a[0][1] - a[1][0]).abs() < 1e-15);
    }

    fn unit_square() -> Mesh {
        use crate::mesh::MeshSizes;
        let fault = FaultGeometry::segment(0.5, 0.25, 0.75, 1.0).unwrap();
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let sizes = MeshSizes { h: 1.0, h_s: 1.0, h_f: 1.0 };
        Mesh::from_cells(
            2,
            vertices,
            vec![0, 1, 2, 0, 2, 3],
            fault,
            sizes,
            None,
            |_, boundary| if boundary { FacetTag::Neumann } else { FacetTag::Interior },
            |_| false,
        )
        .unwrap()
    }

    #[test]
    fn unit_square_stiffness_and_measures() {
        let m = unit_square();
        let k = assemble_p1_stiffness(&m);
        let x: Vec<f64> = m.vertices().iter().map(|p| p[0]).collect();
        let kx = k.mul_vec(&x);
        let energy: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
        assert!((energy - 1.0).abs() < 1e-12);
        assert!(k.mul_vec(&[1.0; 4]).iter().all(|v| v.abs() < 1e-12));
        assert_eq!((m.cell_measure(0), m.cell_measure(1)), (0.5, 0.5));
    }

    #[test]
    fn rt0_unit_flux_through_its_facet() {
        let m = unit_square();
        let q = QuadratureRule::interval(4);
        for f in 0..m.n_facets() {
            let c = m.facet_cells(f)[0];
            let fv = m.facet_vertices(f);
            let (a, b) = (m.vertex(fv[0]), m.vertex(fv[1]));
            let n = m.facet_normal(f);
            let len = m.facet_measure(f);
            let flux: f64 = q
                .mapped(&[a, b], len)
                .map(|(x, _, w)| {
                    let u = crate::fem::rt0_value(&m, c, x, |g| if g == f { 1.0 } else { 0.0 });
                    w * (u[0] * n[0] + u[1] * n[1])
                })
                .sum();
            assert!((flux - 1.0).abs() < 1e-12, "facet {f}: {flux}");
        }
    }
}
