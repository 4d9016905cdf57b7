//! Closed-form solutions of the 1D problem on `(0, L)` with a fault point.

use serde::{Deserialize, Serialize};

use crate::mesh::FaultGeometry;
use crate::regdelta::RegularizedDelta;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analytic1DProblem {
    pub length: f64,
    pub x_fault: f64,
    pub t_f: f64,
    pub p0: f64,
    pub p_l: f64,
}

impl Analytic1DProblem {
    pub fn new(length: f64, x_fault: f64, t_f: f64, p0: f64, p_l: f64) -> Result<Self> {
        if !(x_fault > 0.0 && x_fault < length) {
            return Err(Error::Geometry(format!("fault point {x_fault} is not inside (0, {length})")));
        }
        if !(t_f > 0.0) {
            return Err(Error::Geometry(format!("transmissibility must be positive, got {t_f}")));
        }
        Ok(Self { length, x_fault, t_f, p0, p_l })
    }

    /// `L = 10`, fault at 5, `t_f = 0.2`, pressures 1 and 0.
    pub fn reference() -> Self {
        Self { length: 10.0, x_fault: 5.0, t_f: 0.2, p0: 1.0, p_l: 0.0 }
    }

    pub fn fault(&self) -> FaultGeometry {
        FaultGeometry { normal_coord: self.x_fault, tangential: None, transmissibility: self.t_f }
    }

    /// Constant Darcy velocity `(p0 - pL) / (1/t_f + L)`.
    pub fn exact_velocity(&self) -> f64 {
        (self.p0 - self.p_l) / (1.0 / self.t_f + self.length)
    }

    /// Pressure jump `u / t_f` across the fault.
    pub fn jump(&self) -> f64 {
        self.exact_velocity() / self.t_f
    }

    /// Piecewise-linear exact pressure; returns the left limit at the fault.
    pub fn exact_pressure(&self, x: f64) -> f64 {
        let base = self.p0 - self.exact_velocity() * x;
        if x <= self.x_fault {
            base
        } else {
            base - self.jump()
        }
    }

    /// Exact solution of the regularized equation: the exact pressure with
    /// its jump spread out by `H_eps`. Both branches reduce to
    /// `p0 - u x - H_eps(x) u / t_f`, so the result is continuous.
    pub fn regularized_exact_pressure(&self, x: f64, eps: f64) -> Result<f64> {
        let d = RegularizedDelta::with_eps(eps, self.fault())?;
        let h = d.h_eps(x);
        let shift = if x <= self.x_fault { h } else { h - 1.0 };
        Ok(self.exact_pressure(x) - shift * self.jump())
    }
}
