use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fem::BoundaryPressures;
use crate::linalg::GmresSettings;
use crate::mesh::{generate_interval_mesh, generate_rect_mesh, FaultGeometry, Mesh, RectDomain};
use crate::mixed::MixedSolver;
use crate::{Error, Result};

/// Fault mesh size as a fraction of the outer mesh size.
pub const H_F_RATIO: f64 = 0.4;
/// Subdomain half-width in units of `h_f`, before clipping to the domain.
pub const L_S_FACTOR: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "cg")]
    Cg,
    #[serde(rename = "cg+correction")]
    CgCorrection,
}

impl Method {
    pub fn uses_eps(self) -> bool {
        !matches!(self, Method::Mixed)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mixed => "mixed",
            Method::Cg => "cg",
            Method::CgCorrection => "cg+correction",
        })
    }
}

/// Domain `[0, lx] x [0, ly]` (or `[0, lx]` in 1D) with the fault at
/// `x = fault_x`, spanning `fault_y` in 2D. The pressure is `p_inlet` at
/// `x = 0` and `p_outlet` at `x = lx`; the remaining boundary is no-flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub lx: f64,
    #[serde(default)]
    pub ly: f64,
    pub fault_x: f64,
    #[serde(default)]
    pub fault_y: Option<[f64; 2]>,
    #[serde(default = "one")]
    pub p_inlet: f64,
    #[serde(default)]
    pub p_outlet: f64,
}

fn one() -> f64 {
    1.0
}

impl Geometry {
    /// The 2D test: 2 x 1 box, fault `{1} x [0.3, 0.7]`, unit pressure drop.
    pub fn paper_2d() -> Self {
        Self { lx: 2.0, ly: 1.0, fault_x: 1.0, fault_y: Some([0.3, 0.7]), p_inlet: 1.0, p_outlet: 0.0 }
    }

    /// The 1D test: `(0, 10)` with the fault at 5.
    pub fn paper_1d() -> Self {
        Self { lx: 10.0, ly: 0.0, fault_x: 5.0, fault_y: None, p_inlet: 1.0, p_outlet: 0.0 }
    }

    pub fn fault(&self, dim: usize, t_f: f64) -> Result<FaultGeometry> {
        match (dim, self.fault_y) {
            (1, _) => FaultGeometry::point(self.fault_x, t_f),
            (2, Some([lo, hi])) => FaultGeometry::segment(self.fault_x, lo, hi, t_f),
            (2, None) => Err(Error::Config("2D geometry needs fault_y".into())),
            _ => Err(Error::Config(format!("dimension must be 1 or 2, got {dim}"))),
        }
    }

    pub fn boundary(&self) -> BoundaryPressures {
        BoundaryPressures::inlet_outlet(self.p_inlet, self.p_outlet)
    }

    /// Smallest distance from the fault to the outer boundary.
    pub fn fault_clearance(&self) -> f64 {
        let mut d = self.fault_x.min(self.lx - self.fault_x);
        if let Some([lo, hi]) = self.fault_y {
            d = d.min(lo).min(self.ly - hi);
        }
        d
    }

    /// Subdomain half-width for fault mesh size `h_f`: `20 h_f`, clipped to
    /// two thirds of the fault clearance so the box stays inside the domain
    /// with room for grading.
    pub fn subdomain_half_width(&self, h_f: f64) -> f64 {
        (L_S_FACTOR * h_f).min(2.0 / 3.0 * self.fault_clearance())
    }

    /// Mesh with outer size `h`. In 2D `h_f = 0.4 h`; in 1D the interval is
    /// uniform with `round(lx / h)` cells.
    pub fn mesh(&self, dim: usize, h: f64, t_f: f64) -> Result<Arc<Mesh>> {
        let fault = self.fault(dim, t_f)?;
        let mesh = if dim == 1 {
            let n = (self.lx / h).round().max(2.0) as usize;
            generate_interval_mesh(self.lx, n, fault)?
        } else {
            let h_f = H_F_RATIO * h;
            generate_rect_mesh(
                RectDomain { lx: self.lx, ly: self.ly },
                fault,
                h,
                h_f,
                self.subdomain_half_width(h_f),
            )?
        };
        Ok(Arc::new(mesh))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_restart")]
    pub restart: usize,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub mixed_solver: MixedSolver,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_restart() -> usize {
    200
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: default_tol(), restart: default_restart(), max_iter: None, mixed_solver: MixedSolver::Auto }
    }
}

impl SolverConfig {
    pub fn gmres(&self) -> GmresSettings {
        GmresSettings { tol_abs: self.tol, restart: self.restart, max_iter: self.max_iter }
    }
}

/// One experiment as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub geometry: Geometry,
    pub t_f: f64,
    pub method: Method,
    /// Outer mesh sizes, strictly decreasing.
    pub ladder: Vec<f64>,
    /// `eps = k h_f` for each `k`; ignored by the mixed method.
    #[serde(default)]
    pub eps_multipliers: Vec<f64>,
    /// Tangential smoothing `eps_tau = k h_f`; `eps` when absent.
    #[serde(default)]
    pub eps_tau_mult: Option<f64>,
    /// Outer mesh size of the reference mixed solve.
    pub ground_truth_h: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Mesh size for the mixed matrix of the spectrum study.
    #[serde(default = "default_spectrum_h")]
    pub spectrum_h: f64,
    /// Mesh size for the CG matrix of the spectrum study.
    #[serde(default = "default_spectrum_cg_h")]
    pub spectrum_cg_h: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_spectrum_h() -> f64 {
    0.1
}

fn default_spectrum_cg_h() -> f64 {
    0.05
}

impl ExperimentConfig {
    /// 2D test at the desk-scale ladder.
    pub fn paper_2d(t_f: f64, method: Method, eps_multipliers: Vec<f64>) -> Self {
        Self {
            dim: 2,
            geometry: Geometry::paper_2d(),
            t_f,
            method,
            ladder: vec![0.1, 0.05, 0.025],
            eps_multipliers,
            eps_tau_mult: None,
            ground_truth_h: 6.25e-3,
            solver: SolverConfig::default(),
            spectrum_h: default_spectrum_h(),
            spectrum_cg_h: default_spectrum_cg_h(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.dim != 1 && self.dim != 2 {
            return bad(format!("dim must be 1 or 2, got {}", self.dim));
        }
        self.geometry.fault(self.dim, self.t_f).map_err(|e| Error::Config(e.to_string()))?;
        if self.ladder.is_empty() {
            return bad("mesh ladder is empty".into());
        }
        if self.ladder.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return bad("mesh sizes must be positive".into());
        }
        if self.ladder.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("mesh ladder must be strictly decreasing, got {:?}", self.ladder));
        }
        let h_min = *self.ladder.last().unwrap();
        if !(self.ground_truth_h > 0.0 && self.ground_truth_h < 0.5 * h_min) {
            return bad(format!(
                "ground truth h = {} must be positive and below half the finest ladder h = {h_min}",
                self.ground_truth_h
            ));
        }
        if self.method.uses_eps() {
            if self.eps_multipliers.is_empty() {
                return bad(format!("method {} needs eps_multipliers", self.method));
            }
            if self.eps_multipliers.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
                return bad("eps multipliers must be positive".into());
            }
        }
        if self.eps_tau_mult.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
            return bad("eps_tau multiplier must be positive".into());
        }
        if self.method == Method::CgCorrection && self.dim == 1 {
            return bad("the subdomain correction is only defined in 2D".into());
        }
        if !(self.spectrum_h > 0.0 && self.spectrum_cg_h > 0.0) {
            return bad("spectrum mesh sizes must be positive".into());
        }
        if !(self.solver.tol > 0.0) || self.solver.restart == 0 {
            return bad("solver tol and restart must be positive".into());
        }
        Ok(())
    }

    pub fn mesh(&self, h: f64) -> Result<Arc<Mesh>> {
        self.geometry.mesh(self.dim, h, self.t_f)
    }

    /// Fault mesh size belonging to outer size `h`.
    pub fn h_f(&self, h: f64) -> f64 {
        if self.dim == 1 {
            self.geometry.lx / (self.geometry.lx / h).round().max(2.0)
        } else {
            H_F_RATIO * h
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_json() {
        let c = ExperimentConfig::paper_2d(2.0, Method::CgCorrection, vec![3.0]);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"cg+correction\""));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn rejects_bad_ladders() {
        let mut c = ExperimentConfig::paper_2d(2.0, Method::Mixed, vec![]);
        c.ladder = vec![0.05, 0.1];
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.ladder = vec![0.1, 0.05];
        c.ground_truth_h = 0.03;
        assert!(c.validate().is_err());
        c.ground_truth_h = 0.01;
        assert!(c.validate().is_ok());
        c.method = Method::Cg;
        assert!(c.validate().is_err());
    }

    #[test]
    fn half_width_is_clipped() {
        let g = Geometry::paper_2d();
        assert!((g.subdomain_half_width(0.04) - 0.2).abs() < 1e-15);
        assert!((g.subdomain_half_width(0.0025) - 0.05).abs() < 1e-15);
    }
}
