use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pstchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("manifest is JSON")
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("{v} is not a number"))
}

#[test]
fn construct_gap_family_matches_four_by_four_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "c.json");
    let manifest = run_ok(&[
        "construct",
        "gap-family",
        "--n",
        "2",
        "--m",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(manifest["command"], "construct");
    assert_eq!(manifest["outputs"][0], s(&out));
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));

    let doc = read_json(&out);
    let b = 15f64.sqrt() / 2.0;
    let offdiag: Vec<f64> = doc["matrix"]["offdiag"]
        .as_array()
        .unwrap()
        .iter()
        .map(f)
        .collect();
    for (got, want) in offdiag.iter().zip([b, 1.0, b]) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
    assert_eq!(doc["spectrum"], serde_json::json!([-2.5, -1.5, 1.5, 2.5]));
    assert_eq!(
        doc["weights"],
        serde_json::json!([0.1875, 0.3125, 0.3125, 0.1875])
    );
    assert_eq!(doc["pst"]["has_pst"], true);
    assert!((f(&doc["pst"]["transfer_time"]) - std::f64::consts::PI).abs() < 1e-10);
    assert_eq!(doc["persymmetry"]["is_persymmetric"], true);
}

#[test]
fn construct_krawtchouk_and_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "k.json");
    run_ok(&["construct", "krawtchouk", "--N", "1", "--out", s(&out)]);
    let doc = read_json(&out);
    assert_eq!(doc["matrix"]["offdiag"], serde_json::json!([0.5]));
    assert_eq!(doc["pst"]["transfer_time"].to_string(), "3.14159265359");

    let out = p(dir.path(), "e.json");
    run_ok(&["construct", "example-4x4", "--out", s(&out)]);
    let doc = read_json(&out);
    assert_eq!(doc["spectrum"], serde_json::json!([-2.5, -1.5, 1.5, 2.5]));
    assert_eq!(doc["pst"]["gap_odd_integers"], serde_json::json!([0, 1, 0]));

    let out = p(dir.path(), "s.json");
    run_ok(&["construct", "surgery", "--N", "5", "--out", s(&out)]);
    let doc = read_json(&out);
    assert_eq!(
        doc["spectrum"],
        serde_json::json!([-3.5, -2.5, -1.5, 1.5, 2.5, 3.5])
    );
}

#[test]
fn construct_from_spectrum_without_pst() {
    let dir = tempfile::tempdir().unwrap();
    let spec = p(dir.path(), "spec.json");
    std::fs::write(&spec, "[0, 1, 2.5]").unwrap();
    let out = p(dir.path(), "c.json");
    run_ok(&[
        "construct",
        "from-spectrum",
        "--in",
        s(&spec),
        "--out",
        s(&out),
    ]);
    let doc = read_json(&out);
    assert_eq!(doc["pst"]["has_pst"], false);
    assert!(doc["pst"]["transfer_time"].is_null());

    let report = p(dir.path(), "a.json");
    run_ok(&["analyze", "--in", s(&spec), "--out", s(&report)]);
    let doc = read_json(&report);
    assert_eq!(doc["pst"]["has_pst"], false);
    assert!(doc["ese"].is_null());
}

#[test]
fn analyze_reproduces_embedded_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = p(dir.path(), "spec.json");
    std::fs::write(&spec, "[-3.1, -0.3, 0.9, 4.2, 5.1]").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["gap-family", "--n", "4", "--m", "3"],
        vec!["krawtchouk", "--N", "6"],
        vec!["surgery", "--N", "7"],
        vec!["example-4x4"],
        vec!["from-spectrum", "--in", s(&spec)],
    ];
    for case in cases {
        let chain = p(dir.path(), "chain.json");
        let report = p(dir.path(), "report.json");
        let mut args = vec!["construct"];
        args.extend(case.iter());
        args.extend(["--out", s(&chain)]);
        run_ok(&args);
        run_ok(&["analyze", "--in", s(&chain), "--out", s(&report)]);
        assert_eq!(
            read_json(&chain)["pst"],
            read_json(&report)["pst"],
            "{case:?}"
        );
    }
}

#[test]
fn analyze_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let chain = p(dir.path(), "chain.json");
    let report = p(dir.path(), "report.json");

    run_ok(&["construct", "example-4x4", "--out", s(&chain)]);
    run_ok(&["analyze", "--in", s(&chain), "--out", s(&report)]);
    let doc = read_json(&report);
    assert_eq!(doc["verdict"], "ESE present");
    let zeros = doc["ese"]["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((f(&zeros[0]["time"]) - 0.8410687).abs() < 1e-6);
    assert!((f(&zeros[0]["last_site_modulus"]) - 0.2721655).abs() < 1e-6);

    run_ok(&["construct", "krawtchouk", "--N", "5", "--out", s(&chain)]);
    run_ok(&["analyze", "--in", s(&chain), "--out", s(&report)]);
    let doc = read_json(&report);
    assert_eq!(doc["verdict"], "ESE absent");
    assert_eq!(doc["ese"]["zeros"], serde_json::json!([]));

    run_ok(&[
        "construct",
        "gap-family",
        "--n",
        "4",
        "--m",
        "3",
        "--out",
        s(&chain),
    ]);
    run_ok(&["analyze", "--in", s(&chain), "--out", s(&report)]);
    let doc = read_json(&report);
    let zeros = doc["ese"]["zeros"].as_array().unwrap();
    assert!(zeros.len() >= 3);
    assert!(zeros
        .iter()
        .all(|z| f(&z["time"]) > 0.0 && f(&z["time"]) < std::f64::consts::PI));
}

#[test]
fn analyze_non_persymmetric_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let input = p(dir.path(), "m.json");
    std::fs::write(
        &input,
        r#"{"matrix": {"diag": [0, 0, 0], "offdiag": [1, 2]}}"#,
    )
    .unwrap();
    let report = p(dir.path(), "r.json");
    run_ok(&["analyze", "--in", s(&input), "--out", s(&report)]);
    let doc = read_json(&report);
    assert_eq!(doc["persymmetric"], false);
    assert_eq!(doc["pst"]["has_pst"], false);
    assert!(doc["ese"].is_null());

    // x_N from the full eigendecomposition keeps the column normalized
    let csv = p(dir.path(), "e.csv");
    run_ok(&[
        "evolve",
        "--in",
        s(&input),
        "--t0",
        "0",
        "--t1",
        "3",
        "--steps",
        "31",
        "--out",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[3] * v[3] + v[6] * v[6] <= 1.0 + 1e-10);
    }
}

#[test]
fn evolve_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let chain = p(dir.path(), "chain.json");
    run_ok(&["construct", "example-4x4", "--out", s(&chain)]);
    let pi = std::f64::consts::PI.to_string();
    let csv = p(dir.path(), "e.csv");
    run_ok(&[
        "evolve",
        "--in",
        s(&chain),
        "--t0",
        "0",
        "--t1",
        &pi,
        "--steps",
        "315",
        "--out",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,re_x0,im_x0,abs_x0,re_xN,im_xN,abs_xN");
    assert_eq!(lines.len(), 316);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[3], 1.0);
    let last: Vec<f64> = lines[315].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[6] - 1.0).abs() < 1e-9);

    let json = p(dir.path(), "e.json");
    run_ok(&[
        "evolve",
        "--in",
        s(&chain),
        "--t0",
        "0",
        "--t1",
        "1",
        "--steps",
        "3",
        "--format",
        "json",
        "--out",
        s(&json),
    ]);
    let doc = read_json(&json);
    assert_eq!(doc["columns"].as_array().unwrap().len(), 7);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);

    // Krawtchouk N = 3 return amplitude is cos³(t/2)
    run_ok(&["construct", "krawtchouk", "--N", "3", "--out", s(&chain)]);
    run_ok(&[
        "evolve",
        "--in",
        s(&chain),
        "--t0",
        "0",
        "--t1",
        "6",
        "--steps",
        "61",
        "--out",
        s(&csv),
    ]);
    for line in std::fs::read_to_string(&csv).unwrap().lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let want = (v[0] / 2.0).cos().powi(3).abs();
        assert!(
            (v[3] - want).abs() < 1e-10,
            "t = {}: {} vs {want}",
            v[0],
            v[3]
        );
    }
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for round in 0..2 {
        let chain = p(dir.path(), &format!("c{round}.json"));
        let report = p(dir.path(), &format!("a{round}.json"));
        let csv = p(dir.path(), &format!("e{round}.csv"));
        let svg = p(dir.path(), &format!("p{round}.svg"));
        run_ok(&[
            "construct",
            "gap-family",
            "--n",
            "3",
            "--m",
            "2",
            "--out",
            s(&chain),
        ]);
        run_ok(&["analyze", "--in", s(&chain), "--out", s(&report)]);
        run_ok(&[
            "evolve",
            "--in",
            s(&chain),
            "--t0",
            "0",
            "--t1",
            "4",
            "--steps",
            "101",
            "--out",
            s(&csv),
        ]);
        run_ok(&["plot", "--in", s(&chain), "--out", s(&svg)]);
        snapshots.push([&chain, &report, &csv, &svg].map(|f| std::fs::read(f).unwrap()));
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn plot_markers() {
    let dir = tempfile::tempdir().unwrap();
    let chain = p(dir.path(), "chain.json");
    let svg = p(dir.path(), "p.svg");
    let pi = std::f64::consts::PI.to_string();

    run_ok(&["construct", "example-4x4", "--out", s(&chain)]);
    run_ok(&[
        "plot",
        "--in",
        s(&chain),
        "--t0",
        "0",
        "--t1",
        &pi,
        "--out",
        s(&svg),
    ]);
    let text = std::fs::read_to_string(&svg).unwrap();
    let xml = roxmltree::Document::parse(&text).expect("well-formed SVG");
    let ese: Vec<f64> = xml
        .descendants()
        .filter(|n| n.attribute("class") == Some("ese-marker"))
        .map(|n| n.attribute("data-t").unwrap().parse().unwrap())
        .collect();
    assert_eq!(ese.len(), 1);
    assert!((ese[0] - 0.841).abs() < 1e-3);
    assert_eq!(
        xml.descendants()
            .filter(|n| n.attribute("class") == Some("pst-marker"))
            .count(),
        1
    );
    let dashed = xml
        .descendants()
        .find(|n| n.attribute("class") == Some("curve-xN"))
        .unwrap();
    assert!(dashed.attribute("stroke-dasharray").is_some());
    let solid = xml
        .descendants()
        .find(|n| n.attribute("class") == Some("curve-x0"))
        .unwrap();
    assert!(solid.attribute("stroke-dasharray").is_none());

    run_ok(&["construct", "krawtchouk", "--N", "4", "--out", s(&chain)]);
    run_ok(&[
        "plot",
        "--in",
        s(&chain),
        "--t0",
        "0",
        "--t1",
        &pi,
        "--out",
        s(&svg),
    ]);
    let text = std::fs::read_to_string(&svg).unwrap();
    let xml = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(
        xml.descendants()
            .filter(|n| n.attribute("class") == Some("ese-marker"))
            .count(),
        0
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "out.json");

    // bad arguments
    for args in [
        vec!["construct", "krawtchouk", "--out", s(&out)],
        vec!["construct", "surgery", "--N", "4", "--out", s(&out)],
        vec![
            "construct",
            "gap-family",
            "--n",
            "1",
            "--m",
            "1",
            "--out",
            s(&out),
        ],
        vec!["construct", "nonsense", "--out", s(&out)],
        vec![
            "evolve",
            "--in",
            s(&out),
            "--t0",
            "1",
            "--t1",
            "0",
            "--steps",
            "10",
            "--out",
            s(&out),
        ],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
    let bad = p(dir.path(), "bad.json");
    std::fs::write(&bad, "[0, 1, 1]").unwrap();
    assert_eq!(
        run(&[
            "construct",
            "from-spectrum",
            "--in",
            s(&bad),
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        run(&["analyze", "--in", s(&bad), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );

    // numerical failure: PST undecidable within the search bound
    let hard = p(dir.path(), "hard.json");
    let x = 1.0 + 151.0 / 149.0;
    std::fs::write(&hard, format!("[0, 1, {x}, {}]", x + 163.0 / 157.0)).unwrap();
    assert_eq!(
        run(&[
            "construct",
            "from-spectrum",
            "--in",
            s(&hard),
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(3)
    );
    assert!(!out.exists());
}

#[test]
fn malformed_input_leaves_no_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let svg = p(dir.path(), "p.svg");
    let missing = p(dir.path(), "missing.json");
    let out = run(&[
        "plot",
        "--in",
        s(&missing),
        "--t0",
        "0",
        "--t1",
        "3",
        "--out",
        s(&svg),
    ]);
    assert!(!out.status.success());
    assert!(!svg.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    let chain = p(dir.path(), "c.json");
    run_ok(&["construct", "example-4x4", "--out", s(&chain)]);
    let nested = dir.path().join("no-such-dir").join("p.svg");
    let out = run(&["plot", "--in", s(&chain), "--out", s(&nested)]);
    assert!(!out.status.success());
    assert!(!nested.exists());
}
