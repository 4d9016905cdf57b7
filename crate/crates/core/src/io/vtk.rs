use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::fmt_sci;
use crate::mesh::Mesh;
use crate::{Error, Point, Result};

const VTK_LINE: u8 = 3;
const VTK_TRIANGLE: u8 = 5;

#[derive(Clone, Debug)]
pub enum VtkData {
    Scalars(Vec<f64>),
    Vectors(Vec<Point>),
}

impl VtkData {
    fn len(&self) -> usize {
        match self {
            VtkData::Scalars(v) => v.len(),
            VtkData::Vectors(v) => v.len(),
        }
    }
}

/// A named array attached to the points or to the cells of a mesh.
#[derive(Clone, Debug)]
pub struct VtkField {
    pub name: String,
    pub on_cells: bool,
    pub data: VtkData,
}

impl VtkField {
    pub fn point_scalars(name: &str, v: Vec<f64>) -> Self {
        Self { name: name.into(), on_cells: false, data: VtkData::Scalars(v) }
    }

    pub fn cell_scalars(name: &str, v: Vec<f64>) -> Self {
        Self { name: name.into(), on_cells: true, data: VtkData::Scalars(v) }
    }

    pub fn point_vectors(name: &str, v: Vec<Point>) -> Self {
        Self { name: name.into(), on_cells: false, data: VtkData::Vectors(v) }
    }

    pub fn cell_vectors(name: &str, v: Vec<Point>) -> Self {
        Self { name: name.into(), on_cells: true, data: VtkData::Vectors(v) }
    }
}

/// Legacy VTK 2.0 ASCII unstructured grid.
pub fn write_vtk(path: &Path, mesh: &Mesh, title: &str, fields: &[VtkField]) -> Result<()> {
    for f in fields {
        let n = if f.on_cells { mesh.n_cells() } else { mesh.n_vertices() };
        if f.data.len() != n {
            return Err(Error::Dimension(format!("VTK field {} has {} values, mesh needs {n}", f.name, f.data.len())));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_vertices())?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} 0", fmt_sci(p[0]), fmt_sci(p[1]))?;
    }
    let nv = mesh.dim() + 1;
    writeln!(w, "CELLS {} {}", mesh.n_cells(), mesh.n_cells() * (nv + 1))?;
    for c in 0..mesh.n_cells() {
        let ids: Vec<String> = mesh.cell_vertices(c).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{nv} {}", ids.join(" "))?;
    }
    writeln!(w, "CELL_TYPES {}", mesh.n_cells())?;
    let kind = if mesh.dim() == 1 { VTK_LINE } else { VTK_TRIANGLE };
    for _ in 0..mesh.n_cells() {
        writeln!(w, "{kind}")?;
    }
    for (on_cells, n) in [(false, mesh.n_vertices()), (true, mesh.n_cells())] {
        let group: Vec<&VtkField> = fields.iter().filter(|f| f.on_cells == on_cells).collect();
        if group.is_empty() {
            continue;
        }
        writeln!(w, "{} {n}", if on_cells { "CELL_DATA" } else { "POINT_DATA" })?;
        for f in group {
            match &f.data {
                VtkData::Scalars(v) => {
                    writeln!(w, "SCALARS {} double 1", f.name)?;
                    writeln!(w, "LOOKUP_TABLE default")?;
                    for x in v {
                        writeln!(w, "{}", fmt_sci(*x))?;
                    }
                }
                VtkData::Vectors(v) => {
                    writeln!(w, "VECTORS {} double", f.name)?;
                    for x in v {
                        writeln!(w, "{} {} 0", fmt_sci(x[0]), fmt_sci(x[1]))?;
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
