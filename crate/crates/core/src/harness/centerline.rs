use std::path::Path;

use serde::Serialize;

use crate::fem::PointField;
use crate::io::CsvWriter;
use crate::{Error, Result};

pub const CENTERLINE_HEADER: [&str; 3] = ["x", "p", "u_n"];
/// Offset of the two fault samples from the fault, relative to the length.
pub const FAULT_OFFSET: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CenterlineSample {
    pub x: f64,
    pub p: f64,
    /// Velocity component along the fault normal (+x).
    pub u_n: f64,
}

/// Pressure and normal velocity at `n` uniform points of `{(x, y): 0 <= x <= lx}`.
/// The fault abscissa `x_fault` is replaced by two samples at
/// `x_fault -/+ 1e-9 lx` so both one-sided values appear.
pub fn sample_centerline(
    pressure: &dyn PointField,
    velocity: &dyn PointField,
    lx: f64,
    y: f64,
    x_fault: f64,
    n: usize,
) -> Result<Vec<CenterlineSample>> {
    if n < 2 {
        return Err(Error::Config(format!("centerline needs at least 2 samples, got {n}")));
    }
    let d = FAULT_OFFSET * lx;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| lx * i as f64 / (n - 1) as f64)
        .filter(|x| (x - x_fault).abs() > d)
        .collect();
    xs.extend([x_fault - d, x_fault + d]);
    xs.sort_by(f64::total_cmp);
    xs.into_iter()
        .map(|x| {
            let p = pressure.evaluate_point([x, y])?[0];
            let u = velocity.evaluate_point([x, y])?;
            Ok(CenterlineSample { x, p, u_n: u[0] })
        })
        .collect()
}

pub fn write_centerline(path: &Path, samples: &[CenterlineSample]) -> Result<()> {
    let mut w = CsvWriter::create(path, &CENTERLINE_HEADER)?;
    for s in samples {
        w.row(&[s.x, s.p, s.u_n])?;
    }
    Ok(())
}
