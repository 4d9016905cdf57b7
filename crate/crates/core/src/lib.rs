//! Single-phase Darcy flow in a domain cut by one immersed fault.
//!
//! Two discretizations are provided:
//!
//! * [`mixed`]: lowest-order Raviart–Thomas velocity with piecewise-constant
//!   pressure, the fault entering as a transmissibility-weighted flux mass term.
//! * [`cgreg`] + [`correct`]: a scalar pressure equation in which the fault is
//!   smeared by a regularized delta ([`regdelta`]), solved with continuous P1
//!   elements, followed by a small mixed solve in a box around the fault whose
//!   result replaces the global fields there.
//!
//! [`harness`] measures errors against a fine mixed reference and runs the
//! convergence and spectrum studies.

pub mod analytic1d;
pub mod cgreg;
pub mod correct;
pub mod error;
pub mod fem;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod mixed;
pub mod regdelta;

pub use error::{Error, Result};

/// Coordinates of a point. One-dimensional meshes keep the second entry at zero.
pub type Point = [f64; 2];
