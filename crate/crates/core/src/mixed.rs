//! Full-domain mixed RT0 x P0 solver, the baseline method and the source of
//! reference solutions.

use std::sync::Arc;

use std::time::Instant;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::fem::{
    assemble_mixed_system, rt0_local_mass, rt0_value, BoundaryPressures, FacetBc, FieldSolution, MixedSystem,
    SpaceKind,
};
use crate::linalg::{norm2, pcg_from, solve_ilu_gmres, GmresSettings, Ilu0, SolveReport, SolveStatus, TripletBuilder};
use crate::mesh::{FacetTag, Mesh};
use crate::{Error, Point, Result};

#[derive(Clone, Debug)]
pub struct MixedSolution {
    /// Cell pressures (P0).
    pub pressure: FieldSolution,
    /// Facet fluxes (RT0).
    pub velocity: FieldSolution,
    pub report: SolveReport,
    pub t_f: f64,
}

impl MixedSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        self.pressure.mesh()
    }

    /// Number of unknowns: one per cell plus one per facet.
    pub fn n_dofs(&self) -> usize {
        self.pressure.values.len() + self.velocity.values.len()
    }

    /// Net outward flux of cell `c`.
    pub fn cell_outflow(&self, c: usize) -> f64 {
        let m = self.mesh();
        (0..=m.dim()).map(|i| m.facet_sign(c, i) * self.velocity.values[m.cell_facets(c)[i]]).sum()
    }

    /// Velocity at `x` using the RT0 basis of cell `c`.
    pub fn velocity_in_cell(&self, c: usize, x: Point) -> Point {
        rt0_value(self.mesh(), c, x, |f| self.velocity.values[f])
    }
}

/// How the saddle-point system is solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedSolver {
    /// GMRES + ILU(0) on the saddle-point system up to [`SADDLE_LIMIT`]
    /// unknowns, hybridization above and on every 1D mesh (where ILU(0) of
    /// the saddle-point matrix is a poor preconditioner).
    #[default]
    Auto,
    Saddle,
    /// Static condensation onto facet pressure multipliers, solved with
    /// PCG + ILU(0); gives the same discrete solution.
    Hybrid,
}

/// Largest saddle-point system sent to GMRES under [`MixedSolver::Auto`].
pub const SADDLE_LIMIT: usize = 20_000;

/// Solves the global mixed problem with Dirichlet pressures `bc` and no-flow
/// Neumann facets.
pub fn solve_mixed(
    mesh: Arc<Mesh>,
    t_f: f64,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
) -> Result<MixedSolution> {
    solve_mixed_using(mesh, t_f, bc, f, settings, MixedSolver::Auto)
}

pub fn solve_mixed_using(
    mesh: Arc<Mesh>,
    t_f: f64,
    bc: &BoundaryPressures,
    f: Option<&dyn Fn(Point) -> f64>,
    settings: &GmresSettings,
    solver: MixedSolver,
) -> Result<MixedSolution> {
    let system = assemble_mixed_system(&mesh, t_f, f, bc)?;
    solve_mixed_system_using(mesh, t_f, &system, settings, solver)
}

/// Solves an already assembled saddle-point system on `mesh`.
pub fn solve_mixed_system(
    mesh: Arc<Mesh>,
    t_f: f64,
    system: &MixedSystem,
    settings: &GmresSettings,
) -> Result<MixedSolution> {
    solve_mixed_system_using(mesh, t_f, system, settings, MixedSolver::Auto)
}

pub fn solve_mixed_system_using(
    mesh: Arc<Mesh>,
    t_f: f64,
    system: &MixedSystem,
    settings: &GmresSettings,
    solver: MixedSolver,
) -> Result<MixedSolution> {
    let hybrid = match solver {
        MixedSolver::Auto => mesh.dim() == 1 || system.n_dofs() > SADDLE_LIMIT,
        MixedSolver::Saddle => false,
        MixedSolver::Hybrid => true,
    };
    let (x, report) = if hybrid {
        solve_hybrid(&mesh, t_f, system, settings.tol_abs)?
    } else {
        solve_ilu_gmres(&system.matrix, &system.rhs, settings)?
    };
    let (u, p) = x.split_at(system.n_flux);
    Ok(MixedSolution {
        pressure: FieldSolution::new(SpaceKind::P0, mesh.clone(), p.to_vec())?,
        velocity: FieldSolution::new(SpaceKind::Rt0, mesh, u.to_vec())?,
        report,
        t_f,
    })
}

/// Per-cell condensation data: with `w = M^{-1} 1` and `alpha = 1^T w`,
/// the outward fluxes are `u = -S lambda + w F / alpha` and the pressure is
/// `p = (F + w^T lambda) / alpha`, where `S = M^{-1} - w w^T / alpha` and
/// `lambda` are the pressures on the cell's facets.
struct Condensed {
    s: Matrix3<f64>,
    w: Vector3<f64>,
    alpha: f64,
}

fn condense(m: &Mesh, c: usize) -> Condensed {
    let nl = m.dim() + 1;
    let local = rt0_local_mass(m, c);
    let mut a = Matrix3::identity();
    for i in 0..nl {
        for j in 0..nl {
            a[(i, j)] = local[i][j];
        }
    }
    let inv = a.try_inverse().expect("RT0 mass matrix is positive definite");
    let mut ones = Vector3::zeros();
    for i in 0..nl {
        ones[i] = 1.0;
    }
    let w = inv * ones;
    let alpha = ones.dot(&w);
    Condensed { s: inv - w * w.transpose() / alpha, w, alpha }
}

fn recover(
    m: &Mesh,
    system: &MixedSystem,
    lambda: &[f64],
    multiplier: &dyn Fn(usize, usize) -> usize,
    known: &dyn Fn(usize) -> f64,
) -> Vec<f64> {
    let nl = m.dim() + 1;
    let (n_u, n_p) = (system.n_flux, system.n_cells);
    let mut x = vec![0.0; n_u + n_p];
    for c in 0..n_p {
        let k = condense(m, c);
        let facets = m.cell_facets(c);
        let mut lam = Vector3::zeros();
        for i in 0..nl {
            let r = multiplier(c, facets[i]);
            lam[i] = if r == KNOWN { known(facets[i]) } else { lambda[r] };
        }
        let f = system.source[c];
        x[n_u + c] = (f + k.w.dot(&lam)) / k.alpha;
        let u = -(k.s * lam) + k.w * (f / k.alpha);
        for i in 0..nl {
            if m.facet_cells(facets[i])[0] == c {
                x[facets[i]] = u[i];
            }
        }
    }
    x
}

const KNOWN: usize = usize::MAX;

/// Hybridized solve. Every facet without a pressure condition carries a
/// pressure multiplier; fault facets carry one per side, coupled by
/// `t_f |e| (lambda_left - lambda_right)`. The condensed system is SPD.
fn solve_hybrid(m: &Mesh, t_f: f64, system: &MixedSystem, tol: f64) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let nl = m.dim() + 1;
    let (n_u, n_p) = (system.n_flux, system.n_cells);
    let x_f = m.fault().normal_coord;
    let mut index = vec![[KNOWN; 2]; n_u];
    let mut n = 0;
    for (e, slot) in index.iter_mut().enumerate() {
        match (m.facet_tag(e), system.facet_bc[e]) {
            (_, Some(FacetBc::Pressure(_))) => {}
            (FacetTag::Fault, _) => {
                *slot = [n, n + 1];
                n += 2;
            }
            _ => {
                *slot = [n, n];
                n += 1;
            }
        }
    }
    let multiplier = |c: usize, e: usize| {
        if m.facet_tag(e) == FacetTag::Fault && m.cell_centroid(c)[0] > x_f {
            index[e][1]
        } else {
            index[e][0]
        }
    };
    let known = |e: usize| match system.facet_bc[e] {
        Some(FacetBc::Pressure(p)) => p,
        _ => 0.0,
    };
    let source = |c: usize| system.source[c];

    let mut t = TripletBuilder::with_capacity(n, n, n_p * nl * nl + 4 * n);
    let mut rhs = vec![0.0; n];
    for c in 0..n_p {
        let k = condense(m, c);
        let facets = m.cell_facets(c);
        for i in 0..nl {
            let ri = multiplier(c, facets[i]);
            if ri == KNOWN {
                continue;
            }
            rhs[ri] += k.w[i] * source(c) / k.alpha;
            for j in 0..nl {
                let cj = multiplier(c, facets[j]);
                if cj == KNOWN {
                    rhs[ri] -= k.s[(i, j)] * known(facets[j]);
                } else {
                    t.push(ri, cj, k.s[(i, j)]);
                }
            }
        }
    }
    for e in 0..n_u {
        if let Some(FacetBc::Flux(q)) = system.facet_bc[e] {
            rhs[index[e][0]] -= q;
        }
        if m.facet_tag(e) == FacetTag::Fault && index[e][0] != KNOWN {
            let c = t_f * m.facet_measure(e);
            let [l, r] = index[e];
            t.push(l, l, c);
            t.push(r, r, c);
            t.push(l, r, -c);
            t.push(r, l, -c);
        }
    }
    let a = t.build();
    let ilu = Ilu0::new(&a);

    // The saddle residual weights the continuity mismatch with the fault
    // mass 1/(t_f |e|), so the multiplier tolerance is tightened until the
    // recovered solution meets `tol`.
    let mut inner_tol = 1e-2 * tol;
    let mut lambda = vec![0.0; n];
    let mut iterations = 0;
    let (mut x, mut residual, mut inner);
    loop {
        (lambda, inner) = pcg_from(&a, &rhs, lambda, inner_tol, 50 * n.max(1), Some(&ilu));
        iterations += inner.iterations;
        log::debug!("hybrid multiplier solve, n = {n}: {inner}");
        x = recover(m, system, &lambda, &multiplier, &known);
        let ax = system.matrix.mul_vec(&x);
        residual = norm2(&system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>());
        if residual <= tol || inner_tol < 1e-6 * tol || inner.status != SolveStatus::Converged {
            break;
        }
        inner_tol *= 0.1 * tol / residual;
    }
    let converged = residual <= tol;
    let report = SolveReport {
        iterations,
        residual,
        converged,
        status: if converged { SolveStatus::Converged } else { inner.status },
        wall_time: start.elapsed().as_secs_f64(),
        history: inner.history,
    };
    if converged {
        Ok((x, report))
    } else {
        Err(Error::Solver(report))
    }
}

/// Interface quantities on one fault facet. The normal points in `+x` and
/// the jump is `p(left) - p(right)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaultFacetValues {
    pub facet: usize,
    pub midpoint: Point,
    pub normal_velocity: f64,
    pub jump: f64,
    /// `u.n - t_f [p]`.
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaultDiagnostics {
    pub facets: Vec<FaultFacetValues>,
    /// `L2(fault)` norm of the defect.
    pub defect_l2: f64,
    pub jump_l2: f64,
}

/// Checks the interface law facet by facet. One-sided pressure traces are
/// reconstructed from the cell value and the cell velocity,
/// `p_K - u(x*) . (m - c_K)` with `x*` halfway between the centroid `c_K`
/// and the facet midpoint `m`, which is exact for linear pressures.
pub fn fault_facet_diagnostics(sol: &MixedSolution) -> FaultDiagnostics {
    let m = sol.mesh();
    let x_f = m.fault().normal_coord;
    let mut facets = Vec::new();
    let (mut d2, mut j2) = (0.0, 0.0);
    for e in 0..m.n_facets() {
        if m.facet_tag(e) != FacetTag::Fault {
            continue;
        }
        let mid = m.facet_midpoint(e);
        let len = m.facet_measure(e);
        let n = m.facet_normal(e);
        let u_n = sol.velocity.values[e] * n[0].signum() / len;
        let trace = |c: usize| {
            let g = m.cell_centroid(c);
            let half = [0.5 * (g[0] + mid[0]), 0.5 * (g[1] + mid[1])];
            let u = sol.velocity_in_cell(c, half);
            sol.pressure.values[c] - (u[0] * (mid[0] - g[0]) + u[1] * (mid[1] - g[1]))
        };
        let [a, b] = m.facet_cells(e);
        let (left, right) = if m.cell_centroid(a)[0] < x_f { (a, b) } else { (b, a) };
        let jump = trace(left) - trace(right);
        let defect = u_n - sol.t_f * jump;
        d2 += len * defect * defect;
        j2 += len * jump * jump;
        facets.push(FaultFacetValues { facet: e, midpoint: mid, normal_velocity: u_n, jump, defect });
    }
    FaultDiagnostics { facets, defect_l2: d2.sqrt(), jump_l2: j2.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_interval_mesh, FaultGeometry};

    #[test]
    fn hybrid_matches_saddle() {
        use crate::mesh::{generate_rect_mesh, RectDomain};
        let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 0.02).unwrap();
        let m = Arc::new(generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.25, 0.1, 0.2).unwrap());
        let bc = BoundaryPressures::inlet_outlet(1.0, 0.0);
        let g = GmresSettings { tol_abs: 1e-11, ..Default::default() };
        let f = |x: Point| x[1];
        let a = solve_mixed_using(m.clone(), 0.02, &bc, Some(&f), &g, MixedSolver::Saddle).unwrap();
        let b = solve_mixed_using(m, 0.02, &bc, Some(&f), &g, MixedSolver::Hybrid).unwrap();
        for (x, y) in a.pressure.values.iter().zip(&b.pressure.values) {
            assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a.velocity.values.iter().zip(&b.velocity.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn hybrid_matches_saddle_with_boundary_fluxes() {
        use crate::fem::{assemble_mixed_with, FacetBc};
        use crate::mesh::{generate_rect_mesh, RectDomain};
        let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 0.5).unwrap();
        let m = Arc::new(generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.25, 0.1, 0.2).unwrap());
        let sys = assemble_mixed_with(&m, 0.5, None, |e| {
            Ok(match m.facet_tag(e) {
                FacetTag::Dirichlet(_) => FacetBc::Pressure(m.facet_midpoint(e)[1]),
                _ => FacetBc::Flux(0.3 * m.facet_measure(e) * m.facet_midpoint(e)[0]),
            })
        })
        .unwrap();
        let g = GmresSettings { tol_abs: 1e-11, ..Default::default() };
        let a = solve_mixed_system_using(m.clone(), 0.5, &sys, &g, MixedSolver::Saddle).unwrap();
        let b = solve_mixed_system_using(m, 0.5, &sys, &g, MixedSolver::Hybrid).unwrap();
        for (x, y) in a.pressure.values.iter().zip(&b.pressure.values) {
            assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a.velocity.values.iter().zip(&b.velocity.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_pressure_without_fault() {
        let m = Arc::new(generate_interval_mesh(2.0, 8, FaultGeometry::point(1.0, 1e12).unwrap()).unwrap());
        let s = solve_mixed(m, 1e12, &BoundaryPressures::inlet_outlet(1.0, 0.0), None, &GmresSettings::default())
            .unwrap();
        for c in 0..s.mesh().n_cells() {
            let u = s.velocity_in_cell(c, s.mesh().cell_centroid(c));
            assert!((u[0] - 0.5).abs() < 1e-8);
        }
        for (c, &p) in s.pressure.values.iter().enumerate() {
            let x = s.mesh().cell_centroid(c)[0];
            assert!((p - (1.0 - 0.5 * x)).abs() < 1e-8);
        }
    }
}
