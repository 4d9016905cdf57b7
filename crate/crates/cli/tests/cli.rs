use std::path::Path;
use std::process::{Command, Output};

fn faultflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faultflow")).args(args).output().expect("binary runs")
}

fn small_config(dir: &Path, method: &str, extra: &str) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "dim": 2,
  "geometry": {{ "lx": 2.0, "ly": 1.0, "fault_x": 1.0, "fault_y": [0.3, 0.7] }},
  "t_f": 2.0,
  "method": "{method}",
  "ladder": [0.2, 0.1],
  "ground_truth_h": 0.04,
  "spectrum_h": 0.25,
  "spectrum_cg_h": 0.25{extra}
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn converge_writes_errors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "mixed", "");
    let out = dir.path().join("out");
    let o = faultflow(&["converge", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("errors.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("h,dof,time_global,time_sub,e_p,e_u"));
    assert_eq!(lines.count(), 2);
    let rates = std::fs::read_to_string(out.join("rates.csv")).unwrap();
    assert!(rates.starts_with("eps_mult,rate_p,rate_u\n"));
}

#[test]
fn converge_with_several_multipliers_writes_one_table_each() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "cg+correction", r#", "eps_multipliers": [3, 4]"#);
    let out = dir.path().join("out");
    let o = faultflow(&["converge", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("errors_eps3.csv").exists() && out.join("errors_eps4.csv").exists());
}

#[test]
fn missing_config_exits_with_2() {
    let o = faultflow(&["converge", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "geometry": {"lx": 2, "ly": 1, "fault_x": 1, "fault_y": [0.3, 0.7]},
        "t_f": 2, "method": "mixed", "ladder": [0.05, 0.1], "ground_truth_h": 0.01}"#)
        .unwrap();
    let o = faultflow(&["converge", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = faultflow(&["solve-mixed", "--tf", "-1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_new_writes_fields_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = faultflow(&["solve-new", "--h", "0.05", "--eps-mult", "3", "--tf", "2.0", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["p.vtk", "u.vtk", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["method"], "cg+correction");
    assert_eq!(report["solver"]["global"]["converged"], true);
    assert_eq!(report["solver"]["subdomain"]["converged"], true);
    assert_eq!(report["dof"], report["vertices"]);
    let p = std::fs::read_to_string(dir.path().join("p.vtk")).unwrap();
    assert!(p.starts_with("# vtk DataFile Version 2.0"));
}

#[test]
fn solve_mixed_reports_cells_plus_facets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = faultflow(&["solve-mixed", "--h", "0.1", "--tf", "0.02", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["method"], "mixed");
    assert!(report["dof"].as_u64().unwrap() > report["cells"].as_u64().unwrap());
}

#[test]
fn spectrum_and_centerline_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "mixed", "");
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let o = faultflow(&["spectrum", "--config", &cfg, "--tf", "0.2", "--out", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["spectrum_mixed.csv", "spectrum_cg.csv"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        assert!(text.starts_with("t_f,index,lambda\n"), "{f}");
    }
    let o = faultflow(&["centerline", "--config", &cfg, "--samples", "21", "--out", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("centerline.csv")).unwrap();
    assert!(text.starts_with("x,p,u_n\n"));
    // 21 samples, the fault point split in two
    assert_eq!(text.lines().count(), 1 + 22);
}
