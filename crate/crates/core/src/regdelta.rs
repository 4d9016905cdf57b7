//! Regularized fault delta and the coefficient fields built from it.
//!
//! `delta_eps(x) = delta_n(x_n) * window(x_tau)` with a Gaussian of width
//! `eps` across the fault and a smooth erf window along it. The fields
//! `G = delta'/(t_f + delta)` and `D = delta' x_n/(t_f + delta)` are the
//! coefficients of the transport-like fault terms in the regularized
//! pressure equation.

use std::f64::consts::{PI, SQRT_2};

use crate::mesh::FaultGeometry;
use crate::{Error, Point, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizedDelta {
    eps: f64,
    eps_tau: f64,
    fault: FaultGeometry,
}

impl RegularizedDelta {
    pub fn new(eps: f64, eps_tau: f64, fault: FaultGeometry) -> Result<Self> {
        if !(eps > 0.0) || !(eps_tau > 0.0) {
            return Err(Error::Geometry(format!(
                "smoothing widths must be positive, got eps = {eps}, eps_tau = {eps_tau}"
            )));
        }
        Ok(Self { eps, eps_tau, fault })
    }

    /// Uses `eps_tau = eps`.
    pub fn with_eps(eps: f64, fault: FaultGeometry) -> Result<Self> {
        Self::new(eps, eps, fault)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_tau(&self) -> f64 {
        self.eps_tau
    }

    pub fn fault(&self) -> &FaultGeometry {
        &self.fault
    }

    pub fn transmissibility(&self) -> f64 {
        self.fault.transmissibility
    }

    /// Gaussian factor across the fault.
    pub fn delta_n(&self, x_n: f64) -> f64 {
        let z = (x_n - self.fault.normal_coord) / self.eps;
        FRAC_1_SQRT_2PI / self.eps * (-0.5 * z * z).exp()
    }

    pub fn ddelta_dn(&self, x_n: f64) -> f64 {
        let off = x_n - self.fault.normal_coord;
        -off / (self.eps * self.eps) * self.delta_n(x_n)
    }

    /// Tangential window; identically one for a point fault.
    pub fn window_tau(&self, x_tau: f64) -> f64 {
        match self.fault.tangential {
            None => 1.0,
            Some((lo, hi)) => {
                let s = (2.0 * PI).sqrt() * self.eps_tau;
                // erfc(-z) = 1 + erf(z) without cancellation in the tails
                0.25 * libm::erfc((lo - x_tau) / s) * libm::erfc((x_tau - hi) / s)
            }
        }
    }

    pub fn dwindow_dtau(&self, x_tau: f64) -> f64 {
        match self.fault.tangential {
            None => 0.0,
            Some((lo, hi)) => {
                let s = (2.0 * PI).sqrt() * self.eps_tau;
                let (a, b) = ((x_tau - lo) / s, (hi - x_tau) / s);
                let k = 2.0 / (PI.sqrt() * s);
                let (ca, cb) = (libm::erfc(-a), libm::erfc(-b));
                0.25 * k * ((-a * a).exp() * cb - ca * (-b * b).exp())
            }
        }
    }

    pub fn delta_eps(&self, p: Point) -> f64 {
        self.delta_n(p[0]) * self.window_tau(p[1])
    }

    /// Normal derivative of `delta_eps`; only the Gaussian factor depends on `x_n`.
    pub fn ddelta_eps_dn(&self, p: Point) -> f64 {
        self.ddelta_dn(p[0]) * self.window_tau(p[1])
    }

    /// `H(x) = int_0^x delta_n`, written with the standard normal CDF.
    pub fn h_eps(&self, x_n: f64) -> f64 {
        let y = self.fault.normal_coord;
        normal_cdf((x_n - y) / self.eps) - normal_cdf(-y / self.eps)
    }

    pub fn g_eps(&self, p: Point) -> f64 {
        self.ddelta_eps_dn(p) / (self.transmissibility() + self.delta_eps(p))
    }

    pub fn d_eps(&self, p: Point) -> f64 {
        self.fault.normal_offset(p) * self.g_eps(p)
    }

    /// Tangential derivative of `D`. With `delta = g(x_n) w(x_tau)`:
    /// `dD/dtau = x_n g'(x_n) w'(x_tau) t_f / (t_f + g w)^2`.
    pub fn dd_eps_dtau(&self, p: Point) -> f64 {
        let t = self.transmissibility();
        let w = self.window_tau(p[1]);
        let dw = self.dwindow_dtau(p[1]);
        let denom = t + self.delta_n(p[0]) * w;
        self.fault.normal_offset(p) * self.ddelta_dn(p[0]) * dw * t / (denom * denom)
    }

    /// All fault-term coefficients at one point: `(G, D, dD/dtau)`.
    pub fn coefficients(&self, p: Point) -> (f64, f64, f64) {
        let t = self.transmissibility();
        let g = self.delta_n(p[0]);
        let dg = self.ddelta_dn(p[0]);
        let w = self.window_tau(p[1]);
        let dw = self.dwindow_dtau(p[1]);
        let off = self.fault.normal_offset(p);
        let denom = t + g * w;
        let big_g = dg * w / denom;
        (big_g, off * big_g, off * dg * dw * t / (denom * denom))
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(eps: f64) -> RegularizedDelta {
        RegularizedDelta::with_eps(eps, FaultGeometry::point(5.0, 0.2).unwrap()).unwrap()
    }

    fn plane(eps: f64, t_f: f64) -> RegularizedDelta {
        RegularizedDelta::with_eps(eps, FaultGeometry::segment(1.0, 0.3, 0.7, t_f).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_values() {
        assert!((line(0.5).delta_n(5.0) - 0.797885).abs() < 1e-6);
        assert!((line(0.5).delta_n(5.5) - 0.483941).abs() < 1e-6);
        assert!((line(1.0).delta_n(5.0) - 0.398942).abs() < 1e-6);
        assert!((line(0.5).delta_n(4.3) - line(0.5).delta_n(5.7)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_derivative_values() {
        assert_eq!(line(0.5).ddelta_dn(5.0), 0.0);
        assert!((line(0.5).ddelta_dn(5.5) + 0.967882).abs() < 1e-6);
    }

    #[test]
    fn window_values() {
        let d = RegularizedDelta::with_eps(0.001, FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap()).unwrap();
        assert!((d.window_tau(0.3) - 0.5).abs() < 1e-12);
        assert!((d.window_tau(0.5) - 1.0).abs() < 1e-8);
        let s = d.eps_tau();
        assert!(d.window_tau(0.3 - 10.0 * s) < 1e-8);
        assert!(line(0.3).window_tau(123.0) == 1.0);
    }

    #[test]
    fn product_form() {
        let d = line(0.5);
        assert_eq!(d.delta_eps([5.3, 0.0]), d.delta_n(5.3));
        let p = plane(0.01, 2.0);
        assert!((p.delta_eps([1.0, 0.5]) - p.delta_n(1.0)).abs() < 1e-8);
    }

    #[test]
    fn h_eps_values() {
        let d = line(0.5);
        assert!((d.h_eps(5.0) - 0.5).abs() < 1e-8);
        assert!((d.h_eps(5.0 + 5.0 * 0.5) - 1.0).abs() < 1e-6);
        assert!(d.h_eps(0.0).abs() < 1e-15);
    }

    #[test]
    fn fault_plane_and_far_field() {
        let d = plane(0.05, 2.0);
        let (g, dd, _) = d.coefficients([1.0, 0.45]);
        assert_eq!(g, 0.0);
        assert_eq!(dd, 0.0);
        for &x in &[1.0 + 8.0 * 0.05, 1.0 - 8.0 * 0.05, 1.5, 0.2] {
            assert!(d.g_eps([x, 0.5]).abs() <= 1e-10 / 2.0);
        }
    }

    #[test]
    fn coefficient_bundle_matches_individual_calls() {
        let d = plane(0.03, 0.02);
        for &p in &[[0.97, 0.31], [1.02, 0.69], [1.05, 0.5], [0.9, 0.2]] {
            let (g, dd, ddt) = d.coefficients(p);
            assert!((g - d.g_eps(p)).abs() <= 1e-12 * g.abs().max(1.0));
            assert!((dd - d.d_eps(p)).abs() <= 1e-12 * dd.abs().max(1.0));
            assert!((ddt - d.dd_eps_dtau(p)).abs() <= 1e-12 * ddt.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_nonpositive_width() {
        let f = FaultGeometry::point(5.0, 0.2).unwrap();
        assert!(RegularizedDelta::with_eps(0.0, f).is_err());
        assert!(RegularizedDelta::new(0.1, -1.0, f).is_err());
    }
}
