//! Quadrature, function spaces and element assembly for P1, P0 and RT0.

mod assemble;
mod quadrature;
mod space;

pub use assemble::{
    assemble_cg_fault_terms, assemble_mixed_system, assemble_mixed_with, assemble_p1_load, assemble_p1_stiffness,
    cell_in_band, l2_project_gradient, p1_cell_gradient, p1_gradients, rt0_local_mass, BoundaryPressures, FacetBc,
    MixedSystem, BAND_WIDTHS,
};
pub use quadrature::QuadratureRule;
pub use space::{rt0_value, FieldSolution, FunctionSpace, PointField, SpaceKind};
