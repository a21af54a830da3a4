use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rigiscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigiscope"))
        .args(args)
        .env_remove("RIGISCOPE_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const TRIANGLE: &str = r#"{"version":1,"dimension":2,"model":"euclidean","coordinates":"model",
  "vertices":[[0,0],[1,0],[0,1]],"edges":[[0,1],[1,2],[0,2]]}"#;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "triangle.json", TRIANGLE);
    let r = json(&rigiscope(&["analyze", s(&tri)]));
    assert_eq!(r["verdict"], "RIGID");
    assert_eq!(r["rank"], 3);
    assert_eq!(r["isostatic"]["isostatic"], true);
}

#[test]
fn analyze_several_files_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "a.json", TRIANGLE);
    let sq = dir.path().join("b.json");
    assert!(rigiscope(&["examples", "square-4-cycle", "--out", s(&sq)])
        .status
        .success());
    let r = json(&rigiscope(&["analyze", s(&tri), s(&sq)]));
    let verdicts: Vec<&str> = r
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["verdict"].as_str().unwrap())
        .collect();
    assert_eq!(verdicts, ["RIGID", "FLEXIBLE"]);
    assert_eq!(r[1]["internal_dim"], 1);
}

#[test]
fn verify_equivalence_on_octahedron() {
    let dir = tempfile::tempdir().unwrap();
    let octa = dir.path().join("octa.json");
    assert!(rigiscope(&[
        "examples",
        "octahedron",
        "--scale",
        "0.5",
        "--out",
        s(&octa)
    ])
    .status
    .success());
    let r = json(&rigiscope(&["verify-equivalence", s(&octa)]));
    assert_eq!(r["pass"], true);
    for f in r["factorization"].as_array().unwrap() {
        assert!(f["max_residual"].as_f64().unwrap() <= 1e-9);
        assert_eq!(f["rank_E"], 12);
        assert_eq!(f["rank_X"], 12);
    }
}

#[test]
fn vertex_on_the_absolute_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "on-absolute.json",
        r#"{"version":1,"dimension":2,"model":"proj_hyperbolic","coordinates":"model",
            "vertices":[[0.1,0.2],[0.6,0.8],[-0.3,0.1]],"edges":[[0,1],[1,2],[0,2]]}"#,
    );
    let out = rigiscope(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("vertex 1") && err.contains("absolute"),
        "{err}"
    );
}

#[test]
fn io_and_parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        rigiscope(&["analyze", "/definitely/not/here.json"])
            .status
            .code(),
        Some(2)
    );
    let bad = write(dir.path(), "bad.json", "{\"version\": 1, ");
    assert_eq!(rigiscope(&["analyze", s(&bad)]).status.code(), Some(2));
    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"version":1,"dimension":2,"model":"taxicab","coordinates":"model","vertices":[],"edges":[]}"#,
    );
    let out = rigiscope(&["analyze", s(&unknown)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("taxicab"));
    assert_eq!(
        rigiscope(&["examples", "dodecahedron"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_flags_and_env() {
    let dir = tempfile::tempdir().unwrap();
    // Vertex 0 sits 1e-7 inside the absolute: fine by default, on it with a looser tolerance.
    let near = write(
        dir.path(),
        "near.json",
        r#"{"version":1,"dimension":2,"model":"proj_hyperbolic","coordinates":"model",
            "vertices":[[0.99999995,0.0],[0.0,0.0],[0.0,0.5]],"edges":[[0,1],[1,2],[0,2]]}"#,
    );
    assert!(rigiscope(&["analyze", s(&near)]).status.success());
    assert_eq!(
        rigiscope(&["analyze", s(&near), "--tol", "1e-6"])
            .status
            .code(),
        Some(1)
    );
    let env = Command::new(env!("CARGO_BIN_EXE_rigiscope"))
        .args(["analyze", s(&near)])
        .env("RIGISCOPE_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(1));
    assert_eq!(
        rigiscope(&["analyze", s(&near), "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn matrix_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "triangle.json", TRIANGLE);
    let out = rigiscope(&["matrix", s(&tri), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("row,p1_x1,p1_x2,p2_x1,p2_x2,p3_x1,p3_x2")
    );
    assert_eq!(lines.next(), Some("\"{1,2}\",-1,0,1,0,0,0"));
    let r = json(&rigiscope(&["matrix", s(&tri)]));
    assert_eq!(r["matrix"].as_array().unwrap().len(), 3);
    assert_eq!(
        rigiscope(&["analyze", s(&tri), "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn motions_and_stresses() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("sq.json");
    assert!(rigiscope(&["examples", "square-4-cycle", "--out", s(&sq)])
        .status
        .success());
    let m = json(&rigiscope(&["motions", s(&sq)]));
    assert_eq!(
        (m["dimension"].as_u64(), m["internal_dimension"].as_u64()),
        (Some(4), Some(1))
    );
    assert_eq!(m["internal"].as_array().unwrap().len(), 1);

    let k4 = write(
        dir.path(),
        "k4.json",
        r#"{"version":1,"dimension":2,"model":"euclidean","coordinates":"model",
            "vertices":[[0,0],[1,0],[0.2,1],[1.1,0.9]],"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#,
    );
    let st = json(&rigiscope(&["stresses", s(&k4)]));
    assert_eq!(st["dimension"], 1);
    assert_eq!(st["stresses"][0].as_array().unwrap().len(), 6);
}

#[test]
fn transfer_and_cone() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "triangle.json", TRIANGLE);
    let sphere = dir.path().join("sphere.json");
    assert!(rigiscope(&[
        "transfer",
        s(&tri),
        "--to",
        "sphere_ambient",
        "--out",
        s(&sphere)
    ])
    .status
    .success());
    let r = json(&rigiscope(&["analyze", s(&sphere)]));
    assert_eq!(
        (r["model"].as_str(), r["verdict"].as_str()),
        (Some("sphere_ambient"), Some("RIGID"))
    );

    let cone = dir.path().join("cone.json");
    assert!(rigiscope(&["cone", s(&sphere), "--out", s(&cone)])
        .status
        .success());
    let c = json(&rigiscope(&["analyze", s(&cone)]));
    assert_eq!(
        (c["vertices"].as_u64(), c["edges"].as_u64()),
        (Some(4), Some(6))
    );
    assert_eq!(c["verdict"], "RIGID");
    assert_eq!(
        rigiscope(&["transfer", s(&tri), "--to", "taxicab"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn polar_round_trip_and_stiffness() {
    let dir = tempfile::tempdir().unwrap();
    let octa = dir.path().join("octa.json");
    assert!(rigiscope(&[
        "examples",
        "octahedron",
        "--to",
        "proj_exterior_hyperbolic",
        "--scale",
        "2.5",
        "--out",
        s(&octa)
    ])
    .status
    .success());
    let angles = dir.path().join("angles.json");
    assert!(rigiscope(&["polar", s(&octa), "--out", s(&angles)])
        .status
        .success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&angles).unwrap()).unwrap();
    assert_eq!(doc["hyperplanes"].as_array().unwrap().len(), 6);
    assert_eq!(doc["angle_edges"].as_array().unwrap().len(), 12);

    let st = json(&rigiscope(&["stiffness", s(&angles)]));
    assert_eq!(st["verdict"], "STIFF");
    let back = dir.path().join("back.json");
    assert!(rigiscope(&["polar", s(&angles), "--out", s(&back)])
        .status
        .success());
    let r = json(&rigiscope(&["analyze", s(&back)]));
    assert_eq!(
        (r["model"].as_str(), r["verdict"].as_str()),
        (Some("ambient_form"), Some("RIGID"))
    );
}

#[test]
fn ultraparallel_needs_formal() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "u.json",
        r#"{"hyperplanes":[[1,0,0],[2,0,1.7320508075688772]],"angle_edges":[[0,1]]}"#,
    );
    assert_eq!(rigiscope(&["stiffness", s(&f)]).status.code(), Some(1));
    let r = json(&rigiscope(&["stiffness", s(&f), "--formal"]));
    assert_eq!(r["formal_constraints"], 1);
}

#[test]
fn examples_catalog() {
    let r = json(&rigiscope(&["examples"]));
    let names: Vec<&str> = r["polytopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"icosahedron") && names.contains(&"bipyramid(5)"));
    assert_eq!(r["flexible"].as_array().unwrap().len(), 3);
    assert_eq!(
        rigiscope(&["examples", "octahedron", "--to", "proj_hyperbolic"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ico = dir.path().join("ico.json");
    assert!(rigiscope(&[
        "examples",
        "icosahedron",
        "--to",
        "proj_hyperbolic",
        "--scale",
        "0.5",
        "--out",
        s(&ico)
    ])
    .status
    .success());
    for cmd in ["analyze", "motions", "stresses", "verify-equivalence"] {
        let a = rigiscope(&[cmd, s(&ico)]);
        let b = rigiscope(&[cmd, s(&ico)]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}
