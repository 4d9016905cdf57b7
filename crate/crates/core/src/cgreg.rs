//! Continuous P1 solver for the regularized pressure equation and the
//! velocity recovered from it.
//!
//! The bilinear form is the Laplacian plus the fault terms assembled by
//! [`assemble_cg_fault_terms`]; in 1D this is `-p'' + G p' = 0`. Dirichlet
//! values are imposed strongly.

use std::sync::Arc;

use serde::Serialize;

use crate::fem::{
    assemble_cg_fault_terms, assemble_p1_load, assemble_p1_stiffness, l2_project_gradient, p1_cell_gradient,
    BoundaryPressures, FieldSolution, QuadratureRule, SpaceKind,
};
use crate::linalg::{solve_ilu_gmres, CsrMatrix, GmresSettings, SolveReport};
use crate::mesh::{FacetTag, Mesh, INLET, OUTLET};
use crate::regdelta::RegularizedDelta;
use crate::{Error, Point, Result};

#[derive(Clone, Debug)]
pub struct CGSolution {
    /// Nodal pressure (P1).
    pub pressure: FieldSolution,
    /// Nodal velocity (P1 vector).
    pub velocity: FieldSolution,
    pub delta: RegularizedDelta,
    pub report: SolveReport,
}

impl CGSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        self.pressure.mesh()
    }

    pub fn eps(&self) -> f64 {
        self.delta.eps()
    }

    pub fn t_f(&self) -> f64 {
        self.delta.transmissibility()
    }

    /// One unknown per vertex.
    pub fn n_dofs(&self) -> usize {
        self.pressure.values.len()
    }
}

/// Regularized delta for `mesh`'s fault with transmissibility `t_f`.
pub fn delta_for(mesh: &Mesh, t_f: f64, eps: f64) -> Result<RegularizedDelta> {
    RegularizedDelta::with_eps(eps, mesh.fault().with_transmissibility(t_f)?)
}

/// Operator matrix before boundary conditions: stiffness plus fault terms.
pub fn cg_operator(mesh: &Mesh, delta: &RegularizedDelta) -> CsrMatrix {
    assemble_p1_stiffness(mesh).add(1.0, &assemble_cg_fault_terms(mesh, delta), 1.0)
}

/// Operator with Dirichlet rows replaced by identity rows, and its load vector.
pub fn assemble_cg_system(
    mesh: &Mesh,
    delta: &RegularizedDelta,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let mut a = cg_operator(mesh, delta);
    let mut rhs = match f {
        Some(f) => assemble_p1_load(mesh, f),
        None => vec![0.0; mesh.n_vertices()],
    };
    let fixed = mesh
        .dirichlet_vertices()
        .into_iter()
        .map(|(v, id)| Ok((v, bc.get(id)?)))
        .collect::<Result<Vec<_>>>()?;
    if fixed.is_empty() {
        return Err(Error::MissingBoundary(INLET));
    }
    a.apply_essential(&mut rhs, &fixed);
    Ok((a, rhs))
}

fn solve_pressure(
    mesh: &Arc<Mesh>,
    delta: &RegularizedDelta,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
) -> Result<(FieldSolution, SolveReport)> {
    let (a, rhs) = assemble_cg_system(mesh, delta, bc, f)?;
    let (p, report) = solve_ilu_gmres(&a, &rhs, settings)?;
    Ok((FieldSolution::new(SpaceKind::P1, mesh.clone(), p)?, report))
}

/// 1D regularized problem with `p(0) = p0`, `p(L) = p_l`; the velocity is
/// recovered with [`recover_velocity_1d`].
pub fn solve_cg_1d(
    mesh: Arc<Mesh>,
    t_f: f64,
    eps: f64,
    p0: f64,
    p_l: f64,
    settings: &GmresSettings,
) -> Result<CGSolution> {
    if mesh.dim() != 1 {
        return Err(Error::Dimension("solve_cg_1d needs an interval mesh".into()));
    }
    let delta = delta_for(&mesh, t_f, eps)?;
    let bc = BoundaryPressures::inlet_outlet(p0, p_l);
    let (pressure, report) = solve_pressure(&mesh, &delta, &bc, None, settings)?;
    let u = recover_velocity_1d(&pressure, &delta)?;
    let velocity = FieldSolution::new(SpaceKind::P1Vector, mesh, u.iter().flat_map(|&v| [v, 0.0]).collect())?;
    Ok(CGSolution { pressure, velocity, delta, report })
}

/// Nodal 1D velocity from `u = -p' / (1 + delta/t_f)`. The P1 gradient is
/// constant per cell, so the formula is applied per cell with the cell mean
/// of `delta`, and nodes average their two cells.
pub fn recover_velocity_1d(pressure: &FieldSolution, delta: &RegularizedDelta) -> Result<Vec<f64>> {
    let m = pressure.mesh();
    if m.dim() != 1 || pressure.kind() != SpaceKind::P1 {
        return Err(Error::Dimension("1D velocity recovery needs a P1 field on an interval mesh".into()));
    }
    let t_f = delta.transmissibility();
    let q = QuadratureRule::for_cell(1, 6);
    let mut sum = vec![0.0; m.n_vertices()];
    let mut count = vec![0usize; m.n_vertices()];
    for c in 0..m.n_cells() {
        let g = p1_cell_gradient(m, c, &pressure.values)[0];
        let u = -g / (1.0 + cell_mean_delta(m, c, delta, &q) / t_f);
        for &v in m.cell_vertices(c) {
            sum[v] += u;
            count[v] += 1;
        }
    }
    Ok(sum.iter().zip(&count).map(|(s, &n)| s / n as f64).collect())
}

fn cell_mean_delta(m: &Mesh, c: usize, delta: &RegularizedDelta, q: &QuadratureRule) -> f64 {
    let nv = m.dim() + 1;
    let pts = m.cell_points(c);
    let area = m.cell_measure(c);
    q.mapped(&pts[..nv], area).map(|(x, _, w)| w * delta.delta_eps(x)).sum::<f64>() / area
}

/// 2D regularized problem; the velocity is the projected `-grad p`.
pub fn solve_cg_2d(
    mesh: Arc<Mesh>,
    t_f: f64,
    eps: f64,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
) -> Result<CGSolution> {
    let delta = delta_for(&mesh, t_f, eps)?;
    solve_cg_2d_with(mesh, delta, bc, f, settings)
}

/// [`solve_cg_2d`] with a prepared delta, e.g. one with `eps_tau != eps`.
pub fn solve_cg_2d_with(
    mesh: Arc<Mesh>,
    delta: RegularizedDelta,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
) -> Result<CGSolution> {
    if mesh.dim() != 2 {
        return Err(Error::Dimension("solve_cg_2d needs a triangle mesh".into()));
    }
    let (pressure, report) = solve_pressure(&mesh, &delta, bc, f, settings)?;
    let velocity = l2_project_gradient(&pressure)?;
    Ok(CGSolution { pressure, velocity, delta, report })
}

/// Dispatches on the mesh dimension; 1D uses the inlet and outlet pressures of `bc`.
pub fn solve_cg(
    mesh: Arc<Mesh>,
    t_f: f64,
    eps: f64,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
) -> Result<CGSolution> {
    if mesh.dim() == 1 {
        solve_cg_1d(mesh, t_f, eps, bc.get(INLET)?, bc.get(OUTLET)?, settings)
    } else {
        solve_cg_2d(mesh, t_f, eps, bc, f, settings)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaultVelocitySample {
    pub position: Point,
    pub u_n: f64,
}

/// Normal velocity on the fault, `u_n = -t_f/(t_f + delta) dp/dn`, at every
/// fault facet midpoint. As in [`recover_velocity_1d`] the formula is applied
/// in each adjacent cell with the cell mean of `delta` and the two values are
/// averaged. Samples are sorted along the fault.
pub fn fault_normal_velocity(sol: &CGSolution) -> Vec<FaultVelocitySample> {
    let m = sol.mesh();
    let t_f = sol.t_f();
    let q = QuadratureRule::for_cell(m.dim(), 6);
    let cell_u = |c: usize| {
        let dpdn = p1_cell_gradient(m, c, &sol.pressure.values)[0];
        -t_f / (t_f + cell_mean_delta(m, c, &sol.delta, &q)) * dpdn
    };
    let mut out: Vec<FaultVelocitySample> = (0..m.n_facets())
        .filter(|&e| m.facet_tag(e) == FacetTag::Fault)
        .map(|e| {
            let [a, b] = m.facet_cells(e);
            FaultVelocitySample { position: m.facet_midpoint(e), u_n: 0.5 * (cell_u(a) + cell_u(b)) }
        })
        .collect();
    out.sort_by(|p, q| p.position[1].total_cmp(&q.position[1]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_interval_mesh, FaultGeometry};

    #[test]
    fn no_fault_limit_is_linear() {
        let m = Arc::new(generate_interval_mesh(10.0, 100, FaultGeometry::point(5.0, 1e12).unwrap()).unwrap());
        let s = solve_cg_1d(m.clone(), 1e12, 0.5, 1.0, 0.0, &GmresSettings::default()).unwrap();
        for v in 0..m.n_vertices() {
            let x = m.vertex(v)[0];
            assert!((s.pressure.values[v] - (1.0 - x / 10.0)).abs() < 1e-8);
            assert!((s.velocity.values[2 * v] - 0.1).abs() < 1e-6);
        }
    }
}
