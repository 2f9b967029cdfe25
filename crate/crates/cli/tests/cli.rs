use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okounkov")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn body_reports_volume_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let simplex = write(dir.path(), "simplex.json", r#"{"dim":2,"vertices":[["0","0"],["1","0"],["0","1"]]}"#);
    let o = run(&["body", "--in", &simplex, "--k", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("volume,1/2"), "{out}");
    assert!(out.contains("count_k10,66"), "{out}");

    let square = write(dir.path(), "square.json", r#"{"dim":2,"vertices":[["0","0"],["1","0"],["0","1"],["1","1"]]}"#);
    assert!(stdout(&run(&["body", "--in", &square])).contains("volume,1"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"dim":1,"vertices":[["0"],["1/0"]]}"#);
    let o = run(&["body", "--in", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/0"));
    assert_eq!(run(&["body", "--in", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "ehrhart", "--jobs", "0"]).status.code(), Some(2));
}

#[test]
fn series_gap_table() {
    let o = run(&["series", "--model", "quartic_hyperflex", "--k-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("k,d_k,D_k,diff\n"));
    assert!(out.lines().any(|l| l == "5,3,6,3"), "{out}");

    let toric = stdout(&run(&["series", "--model", "toric_simplex", "--k-max", "30"]));
    assert!(toric.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn series_validates_gap_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", r#"{"backend":"curve","gaps":[1,3]}"#);
    assert_eq!(run(&["series", "--in", &ok, "--k", "4"]).status.code(), Some(0));
    let bad = write(dir.path(), "bad.json", r#"{"backend":"curve","gaps":[2,3]}"#);
    assert_eq!(run(&["series", "--in", &bad]).status.code(), Some(1));
}

#[test]
fn thresholds_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = run(&["thresholds", "--model", "toric_segment", "--tau", "1/2", "--k-max", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let s_col = header.iter().position(|c| *c == "S_km").unwrap();
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    let s = last[s_col];
    let (p, q) = s.split_once('/').unwrap();
    let v = p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap();
    assert!((v - 0.75).abs() < 0.01, "{s}");
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(8) == Some("3/4")));

    let empty = write(dir.path(), "empty.json", "[]");
    assert_eq!(run(&["thresholds", "--valuations", &empty]).status.code(), Some(2));
    assert_eq!(run(&["thresholds", "--m", "5", "--k-max", "3"]).status.code(), Some(1));
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "weierstrass", "--k-max", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("weierstrass.json")).unwrap()).unwrap();
    for key in ["assertion", "grid", "witnesses", "fitted_constants", "exponent"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!(dir.path().join("weierstrass.csv").exists());
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "verify", "ehrhart", "--seed", "7", "--samples", "20", "--k-max", "12", "--jobs", jobs, "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["ehrhart.json", "ehrhart.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn failed_verification_exits_3() {
    // The literal max p1 bound has no lattice points to lean on at odd k for this body.
    let o = run(&["verify", "maxp1", "--model", "toric_hexagon", "--k-max", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("plus_count_positive_when_gap_positive"));
}
