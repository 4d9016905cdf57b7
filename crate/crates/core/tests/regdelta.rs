mod common;

use faultflow::mesh::FaultGeometry;
use faultflow::regdelta::RegularizedDelta;
use proptest::prelude::*;
use rand::Rng;

fn point_delta(eps: f64, x_f: f64, t_f: f64) -> RegularizedDelta {
    RegularizedDelta::with_eps(eps, FaultGeometry::point(x_f, t_f).unwrap()).unwrap()
}

fn segment_delta(eps: f64, t_f: f64) -> RegularizedDelta {
    RegularizedDelta::with_eps(eps, FaultGeometry::segment(1.0, 0.3, 0.7, t_f).unwrap()).unwrap()
}

#[test]
fn ddelta_dn_matches_central_differences() {
    let dx = 1e-5;
    for eps in [1.0, 0.5, 0.1] {
        let d = point_delta(eps, 5.0, 0.2);
        for i in 0..=80 {
            let x = 5.0 - 4.0 * eps + 8.0 * eps * i as f64 / 80.0;
            let fd = (d.delta_n(x + dx) - d.delta_n(x - dx)) / (2.0 * dx);
            assert!((fd - d.ddelta_dn(x)).abs() <= 1e-6, "eps {eps}, x {x}");
        }
    }
}

#[test]
fn h_eps_derivative_is_delta() {
    let dx = 1e-5;
    for eps in [1.0, 0.5, 0.1] {
        let d = point_delta(eps, 5.0, 0.2);
        for i in 0..=60 {
            let x = 5.0 - 6.0 * eps + 12.0 * eps * i as f64 / 60.0;
            let fd = (d.h_eps(x + dx) - d.h_eps(x - dx)) / (2.0 * dx);
            assert!((fd - d.delta_n(x)).abs() <= 1e-6, "eps {eps}, x {x}");
        }
    }
}

#[test]
fn dd_eps_dtau_matches_central_differences() {
    let mut rng = common::rng(7);
    let dy = 1e-6;
    for t_f in [2.0, 0.02] {
        let d = segment_delta(0.05, t_f);
        for _ in 0..100 {
            let p = [rng.gen_range(0.8..1.2), rng.gen_range(0.1..0.9)];
            let fd = (d.d_eps([p[0], p[1] + dy]) - d.d_eps([p[0], p[1] - dy])) / (2.0 * dy);
            let exact = d.dd_eps_dtau(p);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{p:?}: {fd} vs {exact}");
        }
    }
}

#[test]
fn window_derivative_matches_central_differences() {
    let d = segment_delta(0.05, 2.0);
    let dy = 1e-6;
    for i in 0..=100 {
        let y = i as f64 / 100.0;
        let fd = (d.window_tau(y + dy) - d.window_tau(y - dy)) / (2.0 * dy);
        assert!((fd - d.dwindow_dtau(y)).abs() <= 1e-6, "y {y}");
    }
}

#[test]
fn normal_integral_across_fault_is_one() {
    let d = segment_delta(0.01, 2.0);
    assert!((d.window_tau(0.5) - 1.0).abs() < 1e-8);
    let total = common::simpson_pieces(&|x| d.delta_eps([x, 0.5]), 0.0, 2.0, 400, 1e-12);
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn one_dimensional_delta_has_no_window() {
    let d = point_delta(0.5, 5.0, 0.2);
    for x in [4.0, 5.0, 5.3] {
        assert_eq!(d.delta_eps([x, 0.0]), d.delta_n(x));
        assert_eq!(d.window_tau(123.0), 1.0);
    }
}

#[test]
fn midline_delta_equals_normal_factor() {
    let d = segment_delta(0.01, 2.0);
    assert!((d.delta_eps([1.0, 0.5]) - d.delta_n(1.0)).abs() <= 1e-8 * d.delta_n(1.0));
}

proptest! {
    #[test]
    fn delta_is_positive_and_derivative_odd(eps in 0.01f64..1.0, s in 0.0f64..6.0, y in 0.0f64..1.0) {
        let d = segment_delta(eps, 0.2);
        let off = s * eps;
        prop_assert!(d.delta_eps([1.0 + off, y]) > 0.0 || off > 30.0 * eps);
        let a = d.ddelta_eps_dn([1.0 + off, y]);
        let b = d.ddelta_eps_dn([1.0 - off, y]);
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn g_times_denominator_is_delta_prime(eps in 0.01f64..1.0, t_f in 1e-3f64..1e3, x in 0.0f64..2.0, y in 0.0f64..1.0) {
        let d = segment_delta(eps, t_f);
        let p = [x, y];
        let lhs = d.g_eps(p) * (t_f + d.delta_eps(p));
        let rhs = d.ddelta_eps_dn(p);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn evaluations_are_repeatable(eps in 0.01f64..1.0, x in 0.0f64..2.0, y in 0.0f64..1.0) {
        let d = segment_delta(eps, 0.2);
        let e = segment_delta(eps, 0.2);
        let p = [x, y];
        prop_assert_eq!(d.coefficients(p), e.coefficients(p));
        prop_assert_eq!(d.delta_eps(p).to_bits(), e.delta_eps(p).to_bits());
    }

    #[test]
    fn normal_mass_on_interval(eps in 0.05f64..0.8, x_f in 0.0f64..1.0) {
        // fault at least 6 eps from both ends of (0, 10)
        let x_f = 6.0 * eps + x_f * (10.0 - 12.0 * eps);
        let d = point_delta(eps, x_f, 0.2);
        let total = common::simpson_pieces(&|x| d.delta_n(x), 0.0, 10.0, 1000, 1e-12);
        prop_assert!(total >= 1.0 - 1e-6 && total <= 1.0 + 1e-10, "{}", total);
    }
}
