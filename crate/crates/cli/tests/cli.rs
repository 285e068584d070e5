use std::process::{Command, Output};

use serde_json::Value;

fn s2r(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s2r"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = s2r(&all);
    serde_json::from_slice(&out.stdout).expect("valid JSON manifest")
}

#[test]
fn volume_reports_both_routes() {
    let v = json(&["volume", "--rho", "0.7853981634"]);
    assert_eq!(v["command"], "volume");
    let vol = v["results"]["volume"].as_f64().unwrap();
    assert!((vol - 1.94735865).abs() <= 1e-6);
    assert!(v["results"]["route_difference"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["tolerances"]["quadrature_rel"].as_f64().unwrap(), 1e-10);

    let out = s2r(&["volume", "--rho", "0"]);
    assert!(out.status.success());
    assert_eq!(
        json(&["volume", "--rho", "0"])["results"]["volume"]
            .as_f64()
            .unwrap(),
        0.0
    );
}

#[test]
fn volume_outside_embedding_range_exits_2() {
    let out = s2r(&["volume", "--rho", "3.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho < pi"));
}

#[test]
fn tolerance_flags_reach_the_manifest() {
    let v = json(&[
        "volume",
        "--rho",
        "1",
        "--tol-abs",
        "1e-9",
        "--tol-rel",
        "1e-7",
    ]);
    assert_eq!(v["tolerances"]["quadrature_abs"].as_f64().unwrap(), 1e-9);
    assert_eq!(v["tolerances"]["quadrature_rel"].as_f64().unwrap(), 1e-7);
    assert_eq!(
        s2r(&["volume", "--rho", "1", "--tol-rel", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn distance_takes_two_points() {
    let v = json(&[
        "distance", "--phi", "0", "--theta", "0", "--t", "0", "--phi", "0", "--theta", "0", "--t",
        "-1.5",
    ]);
    assert!((v["results"]["distance"].as_f64().unwrap() - 1.5).abs() <= 1e-15);
    assert!(v["results"]["difference"].as_f64().unwrap() <= 1e-9);
    let out = s2r(&["distance", "--phi", "0", "--theta", "0", "--t", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frobenius_flags_the_glide_class() {
    let v = json(&["frobenius", "--q", "2"]);
    let classes = v["results"]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 4);
    let flagged: Vec<&Value> = classes.iter().filter(|c| c["is_4q_i_2"] == true).collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(
        flagged[0]["representative"],
        serde_json::json!(["0", "0", "1/2"])
    );

    let text = String::from_utf8(s2r(&["frobenius", "--q", "4"]).stdout).unwrap();
    assert!(text.contains("6 classes"));
    assert!(text.contains("[4q.I.2]"));
    assert_eq!(s2r(&["frobenius", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn orbit_of_the_vertex_packing() {
    let v = json(&[
        "orbit",
        "--q",
        "2",
        "--phi",
        "0",
        "--theta",
        "1.5707963267948966",
        "--tau",
        "1.8137993642342178",
    ]);
    let pts = v["results"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
}

#[test]
fn reproduce_prints_table_and_notes() {
    let out = s2r(&["reproduce"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in [
        "simply-transitive-opt",
        "equator-midpoint",
        "edge-endpoint-A2",
        "vertex-A3",
        "vertex-A3-local",
    ] {
        assert!(text.contains(row), "missing row {row}");
    }
    assert!(text.contains("0.87499429"));
    // the attained vertex peak matches; the global vertex search does not
    assert_eq!(out.status.code(), Some(1));

    let v = json(&["reproduce"]);
    let rows = v["results"]["rows"].as_array().unwrap();
    let matched = |name: &str| rows.iter().find(|r| r["name"] == name).unwrap()["matches"] == true;
    assert!(matched("simply-transitive-opt"));
    assert!(matched("equator-midpoint"));
    assert!(matched("edge-endpoint-A2"));
    assert!(matched("vertex-A3-local"));
}

#[test]
fn plain_and_json_carry_the_same_numbers() {
    let text = String::from_utf8(s2r(&["volume", "--rho", "1.2"]).stdout).unwrap();
    let v = json(&["volume", "--rho", "1.2"]);
    let vol = v["results"]["volume"].as_f64().unwrap();
    assert!(text.contains(&vol.to_string()));
}

#[test]
fn export_writes_mesh_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.obj");
    let out = s2r(&[
        "export-sphere",
        "--phi",
        "0.3",
        "--theta",
        "-0.2",
        "--t",
        "0.4",
        "--rho",
        "0.6",
        "--resolution",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mesh = std::fs::read_to_string(&path).unwrap();
    let verts: Vec<[f64; 3]> = mesh
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let c: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    assert_eq!(verts.len(), 2 + 12 * 5);
    // the fibre coordinate of a model point is ln‖x‖; every vertex stays within rho of the centre's
    for v in &verts {
        let fiber = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().ln();
        assert!((fiber - 0.4).abs() <= 0.6 + 1e-12);
    }
    assert!(mesh.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn export_orbit_gives_five_spheres() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.obj");
    let out = s2r(&[
        "export-sphere",
        "--orbit",
        "--q",
        "2",
        "--tau",
        "1.8137993642342178",
        "--theta",
        "1.5707963267948966",
        "--resolution",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mesh = std::fs::read_to_string(&path).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("o ")).count(), 5);
}

#[test]
fn export_failures_map_to_exit_codes() {
    let out = s2r(&[
        "export-sphere",
        "--rho",
        "0.5",
        "--out",
        "/nonexistent-dir/x.obj",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = s2r(&[
        "export-sphere",
        "--rho",
        "3.5",
        "--out",
        "/tmp/never-written.obj",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = s2r(&[
        "export-sphere",
        "--rho",
        "0.5",
        "--word",
        "g1",
        "--out",
        "/tmp/never-written.obj",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
