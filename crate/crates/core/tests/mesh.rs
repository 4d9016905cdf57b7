use std::collections::BTreeSet;

use faultflow::mesh::{
    extract_subdomain, generate_interval_mesh, generate_rect_mesh, locate_point, FacetTag, FaultGeometry, Mesh,
    RectDomain, NO_CELL,
};
use faultflow::Error;
use proptest::prelude::*;

fn paper_mesh(h: f64) -> Mesh {
    let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap();
    generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, h, 0.4 * h, 0.2).unwrap()
}

fn sorted_unique(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = v.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn check_structure(m: &Mesh, area: f64, fault_len: f64) -> std::result::Result<(), TestCaseError> {
    let total: f64 = (0..m.n_cells()).map(|c| m.cell_measure(c)).sum();
    prop_assert!((total - area).abs() <= 1e-12 * area);
    let mut fault = 0.0;
    for f in 0..m.n_facets() {
        let [a, b] = m.facet_cells(f);
        prop_assert!(a != NO_CELL);
        if m.facet_tag(f).is_boundary() {
            prop_assert_eq!(b, NO_CELL);
        } else {
            prop_assert!(b != NO_CELL && b != a);
        }
        if m.facet_tag(f) == FacetTag::Fault {
            fault += m.facet_measure(f);
        }
    }
    prop_assert!((fault - fault_len).abs() <= 1e-12 * fault_len.max(1.0));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rect_mesh_invariants(
        lx in 1.5f64..3.0,
        ly in 1.0f64..2.0,
        fx in 0.35f64..0.65,
        lo in 0.2f64..0.4,
        len in 0.2f64..0.4,
        h in 0.08f64..0.3,
    ) {
        let (x_f, y0, y1) = (fx * lx, lo * ly, (lo + len) * ly);
        let fault = FaultGeometry::segment(x_f, y0, y1, 1.0).unwrap();
        let clearance = x_f.min(lx - x_f).min(y0).min(ly - y1);
        let h_f = 0.4 * h;
        let l_s = (20.0 * h_f).min(2.0 / 3.0 * clearance);
        let m = generate_rect_mesh(RectDomain { lx, ly }, fault, h, h_f, l_s).unwrap();
        check_structure(&m, lx * ly, y1 - y0)?;

        // tensor-product grid: neighbouring spacings grow by at most 1.3
        let xs = sorted_unique(m.vertices().iter().map(|p| p[0]));
        let ys = sorted_unique(m.vertices().iter().map(|p| p[1]));
        prop_assert_eq!(xs.len() * ys.len(), m.n_vertices());
        for axis in [&xs, &ys] {
            let w: Vec<f64> = axis.windows(2).map(|p| p[1] - p[0]).collect();
            for pair in w.windows(2) {
                let r = pair[1] / pair[0];
                prop_assert!(r <= 1.3 + 1e-9 && r >= 1.0 / 1.3 - 1e-9, "ratio {}", r);
            }
        }
        for f in m.fault_facets() {
            for &v in m.facet_vertices(f) {
                prop_assert_eq!(m.vertex(v)[0], x_f);
            }
        }
    }

    #[test]
    fn interval_mesh_invariants(n in 2usize..400, frac in 0.05f64..0.95) {
        let l = 10.0;
        let k = ((frac * n as f64).round() as usize).clamp(1, n - 1);
        let x_f = l * k as f64 / n as f64;
        let m = generate_interval_mesh(l, n, FaultGeometry::point(x_f, 0.2).unwrap()).unwrap();
        prop_assert_eq!(m.n_vertices(), n + 1);
        check_structure(&m, l, 1.0)?;
        prop_assert_eq!(m.fault_facets().len(), 1);
    }

    #[test]
    fn located_points_reproduce_coordinates(x in 0.0f64..2.0, y in 0.0f64..1.0) {
        let m = paper_mesh(0.2);
        let loc = locate_point(&m, [x, y]).unwrap();
        let pts = m.cell_points(loc.cell);
        let back = [0, 1].map(|k| (0..3).map(|i| loc.bary[i] * pts[i][k]).sum::<f64>());
        prop_assert!((back[0] - x).abs() < 1e-12 && (back[1] - y).abs() < 1e-12);
        prop_assert!(loc.bary.iter().all(|&b| b >= -1e-12));
    }
}

#[test]
fn interval_examples() {
    let m = generate_interval_mesh(10.0, 10, FaultGeometry::point(5.0, 0.2).unwrap()).unwrap();
    assert_eq!(m.n_vertices(), 11);
    let f = m.fault_facets();
    assert_eq!(f.len(), 1);
    assert_eq!(m.vertex(m.facet_vertices(f[0])[0]), [5.0, 0.0]);

    let m = generate_interval_mesh(1.0, 2, FaultGeometry::point(0.5, 0.2).unwrap()).unwrap();
    let xs = sorted_unique(m.vertices().iter().map(|p| p[0]));
    assert_eq!(xs, vec![0.0, 0.5, 1.0]);

    let m = generate_interval_mesh(10.0, 1000, FaultGeometry::point(5.0, 0.2).unwrap()).unwrap();
    assert_eq!(m.n_vertices(), 1001);
    let (lo, hi) = (0..m.n_cells()).map(|c| m.cell_measure(c)).fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    assert!((lo - 0.01).abs() < 1e-12 && (hi - 0.01).abs() < 1e-12);
}

#[test]
fn rect_examples() {
    let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap();
    let err = generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.1, 0.04, 0.8).unwrap_err();
    assert!(matches!(err, Error::Geometry(_)));

    let coarse = generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.25, 0.1, 0.2).unwrap();
    assert_eq!(coarse.fault_facets().len(), 4);

    let m = paper_mesh(0.1);
    for c in (0..m.n_cells()).filter(|&c| m.in_subdomain(c)) {
        assert!(m.cell_diameter(c) <= 2.0 * 0.04 * (1.0 + 1e-9));
    }
}

#[test]
fn subdomain_extraction() {
    let m = paper_mesh(0.1);
    let sub = extract_subdomain(&m).unwrap();
    let inside = (0..m.n_cells()).filter(|&c| m.in_subdomain(c)).count();
    assert_eq!(sub.mesh.n_cells(), inside);
    let parent_fault: BTreeSet<usize> = m.fault_facets().into_iter().collect();
    let child_fault: BTreeSet<usize> = sub.mesh.fault_facets().into_iter().map(|f| sub.facet_parent[f]).collect();
    assert_eq!(parent_fault, child_fault);

    let line = generate_interval_mesh(10.0, 10, FaultGeometry::point(5.0, 0.2).unwrap()).unwrap();
    assert!(extract_subdomain(&line).is_err());
}

#[test]
fn locate_examples() {
    let m = paper_mesh(0.2);
    for c in [0, m.n_cells() / 2, m.n_cells() - 1] {
        let loc = locate_point(&m, m.cell_centroid(c)).unwrap();
        assert_eq!(loc.cell, c);
        assert!(loc.bary.iter().all(|b| (b - 1.0 / 3.0).abs() < 1e-12));
    }
    let v = m.cell_vertices(m.n_cells() / 2)[1];
    let loc = locate_point(&m, m.vertex(v)).unwrap();
    assert!(m.cell_vertices(loc.cell).contains(&v));
    assert!(loc.bary.iter().any(|b| (b - 1.0).abs() < 1e-12));
    assert!(matches!(locate_point(&m, [-1.0, -1.0]), Err(Error::PointOutside { .. })));
}
