//! File output: CSV tables and legacy VTK fields.

mod csv;
mod vtk;

pub use csv::{fmt_sci, CsvWriter};
pub use vtk::{write_vtk, VtkData, VtkField};
