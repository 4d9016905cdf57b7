//! Mixed correction in the box around the fault and the stitched solution.
//!
//! The subdomain problem takes the CG velocity as flux data on the two
//! fault-parallel sides and the CG pressure as Dirichlet data on the rest of
//! the box boundary. Inside the box its mixed fields replace the CG fields.

use std::sync::Arc;

use crate::cgreg::CGSolution;
use crate::fem::{assemble_mixed_with, rt0_value, FacetBc, MixedSystem, PointField};
use crate::linalg::GmresSettings;
use crate::mesh::{locate_point, Location, Mesh, SubFacetKind, SubMesh};
use crate::mixed::{solve_mixed_system, MixedSolution};
use crate::{Error, Point, Result};

/// Subdomain saddle-point system. Flux facets carry
/// `|e| * mean(u_eps . nu)` (exact for the P1 velocity trace); the other
/// boundary facets carry the facet mean of `p_eps` weakly.
pub fn build_subdomain_problem(sub: &SubMesh, sol: &CGSolution, t_f: f64) -> Result<MixedSystem> {
    let parent = sol.mesh();
    if sub.vertex_parent.iter().any(|&v| v >= parent.n_vertices()) {
        return Err(Error::Dimension("CG solution does not live on the parent of this subdomain".into()));
    }
    let m = &*sub.mesh;
    let p = &sol.pressure.values;
    let u = &sol.velocity.values;
    assemble_mixed_with(m, t_f, None, |e| {
        let fv = m.facet_vertices(e);
        let (a, b) = (sub.vertex_parent[fv[0]], sub.vertex_parent[fv[1]]);
        Ok(match sub.facet_kind[e] {
            SubFacetKind::FluxPlus | SubFacetKind::FluxMinus => {
                let n = m.facet_normal(e);
                let un = 0.5 * ((u[2 * a] + u[2 * b]) * n[0] + (u[2 * a + 1] + u[2 * b + 1]) * n[1]);
                FacetBc::Flux(un * m.facet_measure(e))
            }
            _ => FacetBc::Pressure(0.5 * (p[a] + p[b])),
        })
    })
}

pub fn solve_correction(
    sub: &SubMesh,
    system: &MixedSystem,
    t_f: f64,
    settings: &GmresSettings,
) -> Result<MixedSolution> {
    solve_mixed_system(sub.mesh.clone(), t_f, system, settings)
}

/// CG fields outside the box, subdomain mixed fields inside.
#[derive(Clone, Debug)]
pub struct CompositeSolution {
    pub global: CGSolution,
    pub sub: Arc<SubMesh>,
    pub local: MixedSolution,
}

/// Builds the composite; `sub` must have been extracted from `sol`'s mesh.
pub fn stitch(sol: CGSolution, sub: Arc<SubMesh>, local: MixedSolution) -> CompositeSolution {
    CompositeSolution { global: sol, sub, local }
}

/// Builds, solves and stitches the correction in one call.
pub fn correct(sol: CGSolution, sub: Arc<SubMesh>, settings: &GmresSettings) -> Result<CompositeSolution> {
    let t_f = sol.t_f();
    let system = build_subdomain_problem(&sub, &sol, t_f)?;
    let local = solve_correction(&sub, &system, t_f, settings)?;
    Ok(stitch(sol, sub, local))
}

impl CompositeSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        self.global.mesh()
    }

    fn child(&self, parent_cell: usize) -> Option<usize> {
        if self.mesh().in_subdomain(parent_cell) {
            self.sub.child_of(parent_cell)
        } else {
            None
        }
    }

    pub fn pressure_in(&self, loc: &Location) -> f64 {
        match self.child(loc.cell) {
            Some(c) => self.local.pressure.values[c],
            None => self.global.pressure.value_in_cell(loc.cell, loc.bary)[0],
        }
    }

    pub fn velocity_in(&self, loc: &Location, x: Point) -> Point {
        match self.child(loc.cell) {
            Some(c) => rt0_value(&self.sub.mesh, c, x, |f| self.local.velocity.values[f]),
            None => self.global.velocity.value_in_cell(loc.cell, loc.bary),
        }
    }

    pub fn pressure_at(&self, x: Point) -> Result<f64> {
        Ok(self.pressure_in(&locate_point(self.mesh(), x)?))
    }

    pub fn velocity_at(&self, x: Point) -> Result<Point> {
        Ok(self.velocity_in(&locate_point(self.mesh(), x)?, x))
    }

    pub fn pressure_field(&self) -> CompositeField<'_> {
        CompositeField { sol: self, velocity: false }
    }

    pub fn velocity_field(&self) -> CompositeField<'_> {
        CompositeField { sol: self, velocity: true }
    }

    /// Global CG unknowns plus subdomain mixed unknowns.
    pub fn n_dofs(&self) -> usize {
        self.global.n_dofs() + self.local.n_dofs()
    }
}

/// Pressure or velocity view of a [`CompositeSolution`].
#[derive(Clone, Copy)]
pub struct CompositeField<'a> {
    sol: &'a CompositeSolution,
    velocity: bool,
}

impl PointField for CompositeField<'_> {
    fn field_mesh(&self) -> &Mesh {
        self.sol.mesh()
    }

    fn value_at(&self, loc: &Location, x: Point) -> Point {
        if self.velocity {
            self.sol.velocity_in(loc, x)
        } else {
            [self.sol.pressure_in(loc), 0.0]
        }
    }

    fn is_vector(&self) -> bool {
        self.velocity
    }
}
