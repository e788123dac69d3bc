use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_w2line"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn dist_prints_the_distance() {
    let d: f64 = stdout(&["dist", &data("pair_a.json"), &data("pair_b.json")])
        .trim()
        .parse()
        .unwrap();
    assert!((d - 1.0).abs() < 1e-12);
    let d: f64 = stdout(&["dist", &data("dirac0.json"), &data("unit_uniform.json")])
        .trim()
        .parse()
        .unwrap();
    assert!((d - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
}

#[test]
fn extend_examples() {
    assert_eq!(
        stdout(&["extend", &data("pair_a.json"), &data("pair_b.json")]).trim(),
        "[-1, inf)"
    );
    assert_eq!(
        stdout(&["extend", &data("dirac0.json"), &data("pair_a.json")]).trim(),
        "[0, inf)"
    );
    assert_eq!(
        stdout(&["extend", &data("dirac0.json"), &data("dirac0.json")]).trim(),
        "(-inf, inf)"
    );
}

#[test]
fn geodesic_json_point_and_frames() {
    let g: serde_json::Value = serde_json::from_str(&stdout(&[
        "geodesic",
        &data("pair_a.json"),
        &data("pair_b.json"),
    ]))
    .unwrap();
    assert_eq!(g["extension"]["lo"], -1.0);
    assert_eq!(g["extension"]["hi"], "inf");
    assert_eq!(g["speed"], 1.0);

    let m = stdout(&[
        "geodesic",
        &data("pair_a.json"),
        &data("pair_b.json"),
        "--t",
        "-1",
    ]);
    assert_eq!(m.trim(), r#"{"atoms":[{"x":0.0,"w":1.0}],"uniform":[]}"#);
    let out = run(&[
        "geodesic",
        &data("pair_a.json"),
        &data("pair_b.json"),
        "--t",
        "-1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let csv = stdout(&[
        "geodesic",
        &data("pair_a.json"),
        &data("pair_b.json"),
        "--frames",
        "3",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,mass,position");
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines.contains(&"0.5,0.5,1.5"));
}

#[test]
fn flow_round_trip_and_snapshots() {
    let dir = std::env::temp_dir().join(format!("w2line-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let fwd = dir.join("fwd.json").to_string_lossy().into_owned();
    let back = dir.join("back.json").to_string_lossy().into_owned();
    assert_eq!(
        stdout(&[
            "flow",
            "--t",
            "1.5",
            "--in",
            &data("pair_a.json"),
            "--out",
            &fwd
        ]),
        ""
    );
    stdout(&["flow", "--t", "-1.5", "--in", &fwd, "--out", &back]);
    let d: f64 = stdout(&["dist", &back, &data("pair_a.json")])
        .trim()
        .parse()
        .unwrap();
    assert!(d < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();

    let csv = stdout(&[
        "flow",
        "--in",
        &data("pair_a.json"),
        "--snapshots",
        "0,-1,2",
    ]);
    assert_eq!(csv.lines().count(), 1 + 3 * 4);
    assert!(csv.starts_with("t,mass,position\n0,0,-1\n"));
}

#[test]
fn flow_needs_atoms_or_quantization() {
    assert_eq!(
        run(&["flow", "--t", "1", "--in", &data("unit_uniform.json")])
            .status
            .code(),
        Some(2)
    );
    let out = stdout(&[
        "flow",
        "--t",
        "1",
        "--in",
        &data("unit_uniform.json"),
        "--quantize",
        "6",
    ]);
    let m: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(m["atoms"].as_array().unwrap().len(), 6);
}

#[test]
fn isom_prints_and_applies() {
    assert_eq!(
        stdout(&["isom", "--eps", "-1", "--v", "2", "--eta", "-1", "--t", "0.5"]).trim(),
        "[-1,2.0,-1,0.5]"
    );
    let m = stdout(&[
        "isom",
        "--eps",
        "-1",
        "--v",
        "2",
        "--in",
        &data("pair_b.json"),
    ]);
    assert_eq!(
        m.trim(),
        r#"{"atoms":[{"x":0.0,"w":0.5},{"x":4.0,"w":0.5}],"uniform":[]}"#
    );
    assert_eq!(run(&["isom", "--eps", "3"]).status.code(), Some(2));
}

#[test]
fn ot_solvers_and_exit_codes() {
    let simplex = stdout(&["ot", &data("plane_x.json"), &data("plane_z.json")]);
    let assignment = stdout(&[
        "ot",
        &data("plane_x.json"),
        &data("plane_z.json"),
        "--solver",
        "assignment",
    ]);
    let cost = |s: &str| {
        serde_json::from_str::<serde_json::Value>(s).unwrap()["cost"]
            .as_f64()
            .unwrap()
    };
    assert!((cost(&simplex) - 2.0).abs() < 1e-12);
    assert!((cost(&assignment) - 2.0).abs() < 1e-12);

    assert_eq!(
        run(&[
            "ot",
            &data("plane_x.json"),
            &data("plane_z.json"),
            "--solver",
            "line"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "ot",
            &data("plane_x.json"),
            &data("plane_z.json"),
            "--solver",
            "nope"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["ot", &data("line70.json"), &data("line70b.json")])
            .status
            .code(),
        Some(4)
    );
    let line = stdout(&[
        "ot",
        &data("line70.json"),
        &data("line70b.json"),
        "--solver",
        "line",
    ]);
    assert!((cost(&line) - 0.25).abs() < 1e-9);
}

#[test]
fn curvature_is_seeded() {
    let a = stdout(&["curvature", "--triples", "25", "--seed", "9"]);
    assert_eq!(a, stdout(&["curvature", "--triples", "25", "--seed", "9"]));
    assert_ne!(a, stdout(&["curvature", "--triples", "25", "--seed", "10"]));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("index,t,defect"));
    for l in lines {
        let defect: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(defect.abs() < 1e-8);
    }
    assert_eq!(run(&["curvature", "--triples", "5"]).status.code(), Some(2));
    let w: serde_json::Value =
        serde_json::from_str(&stdout(&["curvature", "--branching"])).unwrap();
    assert!(w["defect"].as_f64().unwrap() > 0.0);
}

#[test]
fn embed_tuples() {
    let m: serde_json::Value =
        serde_json::from_str(&stdout(&["embed", "--tuple", "0,1,3"])).unwrap();
    let xs: Vec<f64> = m["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["x"].as_f64().unwrap())
        .collect();
    let r3 = 3f64.sqrt();
    assert_eq!(xs, vec![0.0, r3, 3.0 * r3]);
    assert!(stdout(&["embed", "--tuple", "-2,-1"]).contains("-2.8284271247461903"));
    assert_eq!(run(&["embed", "--tuple", "1,0"]).status.code(), Some(2));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(
        run(&["dist", &data("malformed.json"), &data("dirac0.json")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["dist", &data("missing.json"), &data("dirac0.json")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["dist", "--unknown"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn check_passes_and_is_deterministic() {
    let out = run(&["check", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(text.contains("e^+|p-q| form = -2.000000000000"));
    assert_eq!(
        text,
        String::from_utf8(run(&["check", "--seed", "42"]).stdout).unwrap()
    );
}
