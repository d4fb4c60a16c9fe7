use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eqstress::stresses::StressMatrix;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqstress"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const K4_SQUARE: &str = r#"{"num_vertices": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],
  "dim": 2, "coordinates": [[0,0],[1,0],[0,1],[1,1]]}"#;

#[test]
fn analyze_square() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&run(&["analyze", &write(dir.path(), "k4.json", K4_SQUARE)]));
    assert_eq!(r["rigidity_rank"], 5);
    assert_eq!(r["maxwell_index"], 1);
    assert_eq!(r["stress_space_dim"], 1);
    assert_eq!(r["stresses"][0]["class"]["is_gstress"], true);
    assert_eq!(r["stresses"][0]["class"]["rank"], 1);
}

#[test]
fn analyze_triangle_is_isostatic() {
    let dir = tempfile::tempdir().unwrap();
    let tri = r#"{"num_vertices": 3, "edges": [[0,1],[1,2],[0,2]], "dim": 2,
                  "coordinates": [[0,0],[1,0],[0,1]]}"#;
    let r = json(&run(&["analyze", &write(dir.path(), "tri.json", tri)]));
    assert_eq!(r["stress_space_dim"], 0);
    assert_eq!(r["infinitesimally_rigid"], true);
    assert_eq!(r["stresses"].as_array().unwrap().len(), 0);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let short = r#"{"num_vertices": 3, "edges": [], "dim": 2, "coordinates": [[0,0],[1,0]]}"#;
    assert_eq!(run(&["analyze", &write(dir.path(), "short.json", short)]).status.code(), Some(2));
    assert_eq!(run(&["analyze", &write(dir.path(), "bad.json", "{")]).status.code(), Some(2));
    assert_eq!(run(&["ggr", "builtin:nonsense", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(run(&["probe-dim", "builtin:cycle5", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(run(&["certify-ur", "builtin:k33", "--dim", "2"]).status.code(), Some(2));
}

#[test]
fn construction_failure_exit_4() {
    let out = run(&["certify-ur", "builtin:k4", "--dim", "2", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn ggr_verdicts() {
    assert_eq!(json(&run(&["ggr", "builtin:k33", "--dim", "2"]))["verdict"], "no");
    assert_eq!(json(&run(&["ggr", "builtin:k4", "--dim", "2"]))["verdict"], "yes");
    let path = json(&run(&["ggr", "builtin:path4", "--dim", "1"]));
    assert_eq!(path["verdict"], "no");
    assert_eq!(path["trials"], 0);
}

#[test]
fn certify_ur_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ur");
    let r = json(&run(&["certify-ur", "builtin:k4", "--dim", "2", "--out", out_dir.to_str().unwrap()]));
    assert_eq!(r["kind"], "super_stable");
    assert_eq!(r["verdict"], "yes");
    assert_eq!(r["observed"]["perturbation_passes"], 20);
    let csv = fs::read_to_string(out_dir.join("stress.csv")).unwrap();
    let omega: StressMatrix<f64> = eqstress::io::read_stress_csv(csv.as_bytes()).unwrap();
    let f: eqstress::Framework64 = eqstress::io::load_framework(&out_dir.join("framework.json")).unwrap();
    let policy = Default::default();
    assert!(eqstress::certificates::super_stable(&f, &omega, &policy).unwrap());
    let on_disk: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(on_disk, r);
}

#[test]
fn rubber_band_is_deterministic() {
    let args = ["rubber-band", "builtin:w5", "--dim", "2", "--random", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["free_weights"].as_array().unwrap().len(), 7);
    assert_eq!(r["class"]["rank"], 3);

    let csv = run(&["rubber-band", "builtin:w5", "--dim", "2", "--random", "--seed", "7", "--format", "csv"]);
    let omega: StressMatrix<f64> = eqstress::io::read_stress_csv(&csv.stdout[..]).unwrap();
    omega.validate(&eqstress::Graph::wheel(5).unwrap(), &Default::default()).unwrap();
}

#[test]
fn rubber_band_weight_files() {
    let dir = tempfile::tempdir().unwrap();
    let plain = write(dir.path(), "w.json", "[1, 1, 1]");
    let r = json(&run(&["rubber-band", "builtin:k4", "--dim", "2", "--weights", &plain]));
    assert_eq!(r["class"]["rank"], 1);
    let with_clique = write(dir.path(), "wc.json", r#"{"clique": [1, 2, 3], "weights": [1, 1, 1]}"#);
    let r = json(&run(&["rubber-band", "builtin:k4", "--dim", "2", "--weights", &with_clique]));
    assert_eq!(r["clique"], serde_json::json!([1, 2, 3]));
    let singular = write(dir.path(), "s.json", "[1, 1, -2]");
    let out = run(&["rubber-band", "builtin:k4", "--dim", "2", "--weights", &singular]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gor_signature() {
    let r = json(&run(&["gor", "builtin:prism3", "--dim", "2", "--signature", "++-", "--seed", "3"]));
    assert_eq!(r["class"]["rank"], 3);
    assert_eq!(r["class"]["is_fstress"], true);
    assert_eq!(r["inertia"]["positive"], 2);
    assert_eq!(r["inertia"]["negative"], 1);
}

#[test]
fn corank_and_probe_reports() {
    let r = json(&run(&["corank", "builtin:k4", "--dim", "2", "--trials", "20"]));
    assert_eq!(r["observed"]["corank"], 1);
    assert_eq!(r["observed"]["stressed_corank"], 1);
    let r = json(&run(&["probe-dim", "builtin:w5", "--dim", "2", "--trials", "2"]));
    assert_eq!(r["target"], 7);
    assert_eq!(r["verdict"], "yes");
    let r = json(&run(&["probe-dim", "builtin:prism3", "--dim", "2", "--trials", "2", "--route", "lss"]));
    assert_eq!(r["observed"]["min_rank"], 6);
}

#[test]
fn statics_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let tri = r#"{"num_vertices": 3, "edges": [[0,1],[1,2],[0,2]], "dim": 2,
                  "coordinates": [[0,0],[1,0],[0,1]]}"#;
    let f = write(dir.path(), "tri.json", tri);
    let pull = write(dir.path(), "pull.json", r#"{"forces": [[-1, 0], [1, 0], [0, 0]]}"#);
    let r = json(&run(&["statics", &f, "--load", &pull]));
    assert_eq!(r["statically_rigid"], true);
    assert_eq!(r["equilibrium_load_space_dim"], 3);
    let w: Vec<f64> = serde_json::from_value(r["weights"].clone()).unwrap();
    assert!((w[0] - 1.0).abs() < 1e-12 && w[1].abs() < 1e-12 && w[2].abs() < 1e-12);

    let push = write(dir.path(), "push.json", r#"{"forces": [[1, 0], [0, 0], [0, 0]]}"#);
    assert_eq!(run(&["statics", &f, "--load", &push]).status.code(), Some(2));
}

#[test]
fn human_and_csv_formats() {
    let out = run(&["ggr", "builtin:k4", "--dim", "2", "--format", "human"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("verdict: yes"));
    let out = run(&["ggr", "builtin:k4", "--dim", "2", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("verdict,yes"));
}
