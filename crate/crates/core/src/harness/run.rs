use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use crate::analytic1d::Analytic1DProblem;
use crate::cgreg::{solve_cg, solve_cg_2d_with, CGSolution};
use crate::correct::{correct, CompositeSolution};
use crate::fem::PointField;
use crate::io::{write_vtk, VtkField};
use crate::mesh::{extract_subdomain, Location, Mesh};
use crate::mixed::{solve_mixed_using, MixedSolution};
use crate::regdelta::RegularizedDelta;
use crate::{Point, Result};

use super::config::{ExperimentConfig, Method};

/// Output of one solve of any method.
#[derive(Clone, Debug)]
pub enum MethodSolution {
    Mixed(MixedSolution),
    Cg(CGSolution),
    Composite(CompositeSolution),
}

impl MethodSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        match self {
            MethodSolution::Mixed(s) => s.mesh(),
            MethodSolution::Cg(s) => s.mesh(),
            MethodSolution::Composite(s) => s.mesh(),
        }
    }

    pub fn pressure(&self) -> Box<dyn PointField + '_> {
        match self {
            MethodSolution::Mixed(s) => Box::new(&s.pressure),
            MethodSolution::Cg(s) => Box::new(&s.pressure),
            MethodSolution::Composite(s) => Box::new(s.pressure_field()),
        }
    }

    pub fn velocity(&self) -> Box<dyn PointField + '_> {
        match self {
            MethodSolution::Mixed(s) => Box::new(&s.velocity),
            MethodSolution::Cg(s) => Box::new(&s.velocity),
            MethodSolution::Composite(s) => Box::new(s.velocity_field()),
        }
    }

    /// Unknowns of the global solve: cells plus facets for the mixed method,
    /// vertices for the CG methods.
    pub fn global_dofs(&self) -> usize {
        match self {
            MethodSolution::Mixed(s) => s.n_dofs(),
            MethodSolution::Cg(s) => s.n_dofs(),
            MethodSolution::Composite(s) => s.global.n_dofs(),
        }
    }

    /// Writes `p.vtk` and `u.vtk` into `dir`. Nodal fields go to point data;
    /// cellwise fields (and the composite fields) are sampled at centroids.
    pub fn write_vtk(&self, dir: &Path) -> Result<()> {
        let m = self.mesh();
        let (p, u) = match self {
            MethodSolution::Cg(s) => (
                VtkField::point_scalars("p", s.pressure.values.clone()),
                VtkField::point_vectors("u", s.velocity.values.chunks(2).map(|c| [c[0], c[1]]).collect()),
            ),
            _ => {
                let (pf, uf) = (self.pressure(), self.velocity());
                let mut ps = Vec::with_capacity(m.n_cells());
                let mut us = Vec::with_capacity(m.n_cells());
                let b = 1.0 / (m.dim() + 1) as f64;
                for c in 0..m.n_cells() {
                    let loc = Location { cell: c, bary: if m.dim() == 1 { [b, b, 0.0] } else { [b; 3] } };
                    let x = m.cell_centroid(c);
                    ps.push(pf.value_at(&loc, x)[0]);
                    us.push(uf.value_at(&loc, x));
                }
                (VtkField::cell_scalars("p", ps), VtkField::cell_vectors("u", us))
            }
        };
        write_vtk(&dir.join("p.vtk"), m, "pressure", &[p])?;
        write_vtk(&dir.join("u.vtk"), m, "velocity", &[u])
    }
}

/// A solve with its timing split into the global and the subdomain stage.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub solution: MethodSolution,
    pub time_global: f64,
    pub time_sub: f64,
}

/// Solves `config`'s problem with its method on the mesh of size `h`;
/// `eps_mult` is required by the CG methods.
pub fn solve_method(config: &ExperimentConfig, h: f64, eps_mult: Option<f64>) -> Result<MethodRun> {
    let mesh = config.mesh(h)?;
    let settings = config.solver.gmres();
    let bc = config.geometry.boundary();
    let start = Instant::now();
    if config.method == Method::Mixed {
        let s = solve_mixed_using(mesh, config.t_f, &bc, None, &settings, config.solver.mixed_solver)?;
        return Ok(MethodRun { solution: MethodSolution::Mixed(s), time_global: start.elapsed().as_secs_f64(), time_sub: 0.0 });
    }
    let k = eps_mult.ok_or_else(|| crate::Error::Config(format!("method {} needs an eps multiplier", config.method)))?;
    let eps = k * config.h_f(h);
    let cg = match config.eps_tau_mult {
        Some(k_tau) if config.dim == 2 => {
            let fault = mesh.fault().with_transmissibility(config.t_f)?;
            let delta = RegularizedDelta::new(eps, k_tau * config.h_f(h), fault)?;
            solve_cg_2d_with(mesh.clone(), delta, &bc, None, &settings)?
        }
        _ => solve_cg(mesh.clone(), config.t_f, eps, &bc, None, &settings)?,
    };
    let time_global = start.elapsed().as_secs_f64();
    if config.method == Method::Cg {
        return Ok(MethodRun { solution: MethodSolution::Cg(cg), time_global, time_sub: 0.0 });
    }
    let start = Instant::now();
    let sub = Arc::new(extract_subdomain(&mesh)?);
    let composite = correct(cg, sub, &settings)?;
    Ok(MethodRun { solution: MethodSolution::Composite(composite), time_global, time_sub: start.elapsed().as_secs_f64() })
}

/// Exact 1D solution seen as a field on a mesh (used for integration only).
#[derive(Clone, Debug)]
pub struct AnalyticField {
    pub mesh: Arc<Mesh>,
    pub problem: Analytic1DProblem,
    pub velocity: bool,
}

impl PointField for AnalyticField {
    fn field_mesh(&self) -> &Mesh {
        &self.mesh
    }

    fn value_at(&self, _loc: &Location, x: Point) -> Point {
        if self.velocity {
            [self.problem.exact_velocity(), 0.0]
        } else {
            [self.problem.exact_pressure(x[0]), 0.0]
        }
    }

    fn is_vector(&self) -> bool {
        self.velocity
    }
}

/// Reference solution errors are measured against: the fine mixed solve in
/// 2D, the closed-form solution in 1D.
#[derive(Clone, Debug)]
pub enum GroundTruth {
    Mixed(MixedSolution),
    Analytic { pressure: AnalyticField, velocity: AnalyticField },
}

impl GroundTruth {
    pub fn compute(config: &ExperimentConfig) -> Result<Self> {
        let mesh = config.mesh(config.ground_truth_h)?;
        if config.dim == 1 {
            let g = &config.geometry;
            let problem = Analytic1DProblem::new(g.lx, g.fault_x, config.t_f, g.p_inlet, g.p_outlet)?;
            let field = |velocity| AnalyticField { mesh: mesh.clone(), problem, velocity };
            return Ok(GroundTruth::Analytic { pressure: field(false), velocity: field(true) });
        }
        let s = solve_mixed_using(
            mesh,
            config.t_f,
            &config.geometry.boundary(),
            None,
            &config.solver.gmres(),
            config.solver.mixed_solver,
        )?;
        Ok(GroundTruth::Mixed(s))
    }

    pub fn pressure(&self) -> &dyn PointField {
        match self {
            GroundTruth::Mixed(s) => &s.pressure,
            GroundTruth::Analytic { pressure, .. } => pressure,
        }
    }

    pub fn velocity(&self) -> &dyn PointField {
        match self {
            GroundTruth::Mixed(s) => &s.velocity,
            GroundTruth::Analytic { velocity, .. } => velocity,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        match self {
            GroundTruth::Mixed(s) => s.mesh(),
            GroundTruth::Analytic { pressure, .. } => &pressure.mesh,
        }
    }
}
