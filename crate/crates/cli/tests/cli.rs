use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn imbal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imbal"))
        .args(args)
        .env_remove("IMBAL_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn value_of(csv: &str, index: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{index},")))
        .unwrap_or_else(|| panic!("{index} missing from\n{csv}"))
        .to_string()
}

#[test]
fn eval_two_class_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "8,2\n10,90\n");
    let o = imbal(&["eval", "--matrix", &m]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("index,value,status"));
    assert_eq!(value_of(&out, "precision"), "0.444444,ok");
    assert_eq!(value_of(&out, "auroc"), "0.85,ok");
    assert_eq!(value_of(&out, "gmean2"), "0.848528,ok");
    assert_eq!(value_of(&out, "m_precision"), "0.888889,ok");
    // Two-class indices plus every multi-class index that also applies at C = 2.
    assert_eq!(out.lines().count(), 1 + 15);
}

#[test]
fn eval_selected_indices_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "a,b,c\n8,1,1\n1,8,1\n2,2,6\n");
    let o = imbal(&["eval", "--matrix", &m, "--index", "acsa,aurpc_ova", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["index"], "acsa");
    let acsa = rows[0]["value"].as_f64().unwrap();
    assert!((acsa - 22.0 / 30.0).abs() < 1e-12);
    assert!((rows[1]["value"].as_f64().unwrap() - 0.734091).abs() < 1e-6);
}

#[test]
fn eval_reports_undefined_values() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "0,5\n0,7\n");
    let out = stdout(&imbal(&["eval", "--matrix", &m, "--index", "precision"]));
    assert_eq!(value_of(&out, "precision"), "UNDEFINED,no positive predictions");
}

#[test]
fn labels_round_trip_through_emitted_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("true,predicted\n");
    for (t, p, n) in [("pos", "pos", 8), ("pos", "neg", 2), ("neg", "pos", 10), ("neg", "neg", 90)] {
        for _ in 0..n {
            text.push_str(&format!("{t},{p}\n"));
        }
    }
    let labels = write(dir.path(), "pairs.csv", &text);
    let emitted = dir.path().join("emitted.csv");
    let emitted = emitted.to_str().unwrap();
    let from_labels = imbal(&["eval", "--labels", &labels, "--classes", "pos,neg", "--emit-matrix", emitted]);
    assert_eq!(from_labels.status.code(), Some(0));
    assert_eq!(fs::read_to_string(emitted).unwrap(), "pos,neg\n8,2\n10,90\n");
    let from_matrix = imbal(&["eval", "--matrix", emitted]);
    assert_eq!(stdout(&from_labels), stdout(&from_matrix));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty_row = write(dir.path(), "e.csv", "1,2\n0,0\n");
    let o = imbal(&["eval", "--matrix", &empty_row]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"), "{}", String::from_utf8_lossy(&o.stderr));

    let ragged = write(dir.path(), "r.csv", "1,2\n3\n");
    assert_eq!(imbal(&["eval", "--matrix", &ragged]).status.code(), Some(2));
    let negative = write(dir.path(), "n.csv", "1,-2\n3,4\n");
    assert_eq!(imbal(&["eval", "--matrix", &negative]).status.code(), Some(2));
    let missing = dir.path().join("nope.csv");
    assert_eq!(imbal(&["eval", "--matrix", missing.to_str().unwrap()]).status.code(), Some(2));
    let pairs = write(dir.path(), "p.csv", "a,b\nb,c\n");
    assert_eq!(imbal(&["eval", "--labels", &pairs, "--classes", "a,b"]).status.code(), Some(2));
    let three = write(dir.path(), "t.csv", "1,0,0\n0,1,0\n0,0,1\n");
    assert_eq!(imbal(&["eval", "--matrix", &three, "--index", "precision"]).status.code(), Some(2));

    assert_eq!(imbal(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(imbal(&["eval"]).status.code(), Some(1));
    assert_eq!(imbal(&["audit", "--index", "nonsense"]).status.code(), Some(1));
    assert_eq!(imbal(&["--help"]).status.code(), Some(0));
}

#[test]
fn bounds_output() {
    assert_eq!(stdout(&imbal(&["bounds", "auroc_ovo", "3"])), "0.25 1\n");
    assert_eq!(stdout(&imbal(&["bounds", "acsa", "7"])), "0 1\n");
    assert_eq!(
        stdout(&imbal(&["bounds", "auroc_ova", "3", "--profile", "2,3,4"])),
        "0.222222 1\n"
    );
    assert_eq!(imbal(&["bounds", "auroc_ova", "3"]).status.code(), Some(2));
}

#[test]
fn audit_precision_condition1_violated() {
    let o = imbal(&["audit", "--index", "precision", "--cond", "1", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c1 = &v[0]["condition1"];
    assert_eq!(c1["verdict"], "Violated");
    assert!(c1["witness"]["matrix"].is_object() || c1["witness"]["matrix"].is_array());
    assert!(v[0]["condition2"].is_null());
}

#[test]
fn audit_seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_imbal"))
            .args(["audit", "--index", "aurpc", "--cond", "1", "--trials", "30"])
            .env("IMBAL_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b) = (run("9"), run("9"));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v[0]["condition1"]["seed"], 9);
}

#[test]
fn audit_ovo_over_wider_class_range() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = imbal(&[
        "audit", "--index", "auroc_ovo,acsa", "--cond", "2", "--c", "2..6", "-o",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines = stdout(&o);
    assert!(lines.contains("c2=CDependentBounds"), "{lines}");
    assert!(lines.contains("c2=StableBounds"), "{lines}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v[0]["condition2"]["table"].as_object().unwrap().len(), 5);
}

#[test]
fn audit_check_on_a_small_collapse_family() {
    let o = imbal(&["audit", "--index", "gmean_c,acsa", "--cond", "3", "--collapse-c", "3", "--check-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"name":"tiny","kind":"rrt_stability","mode":"matrix",
            "datasets":[{"name":"d","matrix":[[8,2],[10,90]],"schedule":[{"rrt":1},{"rrt":5},{"rrt":10}]}]}"#,
    );
    let o = imbal(&["simulate", &spec, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let long = fs::read_to_string(dir.path().join("tiny_long.csv")).unwrap();
    let summary = fs::read_to_string(dir.path().join("tiny_summary.csv")).unwrap();
    assert!(long.lines().count() > 3);
    assert!(summary.contains("std_dev"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("m_precision") && l.ends_with("mean_std_dev=0")));
}

#[test]
fn simulate_rejects_malformed_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", r#"{"name":"bad","kind":"type1_sweep","thresholds":[],"rrt":[1]}"#);
    let o = imbal(&["simulate", &spec, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("thresholds"));
    assert!(!dir.path().join("bad_long.csv").exists());
}
