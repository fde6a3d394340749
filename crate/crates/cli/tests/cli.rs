use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_njalg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn nijenhuis_check_passes_and_fails() {
    let ok = run(&["check", "nijenhuis", &data("dual_numbers.json")]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("nijenhuis: PASS"));
    let ok = run(&["check", "nijenhuis", &data("upper_triangular.json")]);
    assert_eq!(code(&ok), 0);
    let bad = run(&["--json", "check", "nijenhuis", &data("perturbed.json")]);
    assert_eq!(code(&bad), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(v["passed"], false);
    let viol = &v["checks"][1]["violations"][0];
    assert_eq!(viol["indices"], serde_json::json!([0, 0]));
    assert_eq!(viol["defect"], serde_json::json!(["0", "1"]));
}

#[test]
fn embedded_module_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let read = |f: &str| -> serde_json::Value { serde_json::from_str(&std::fs::read_to_string(data(f)).unwrap()).unwrap() };
    let mut alg = read("dual_numbers.json");
    alg["module"] = read("dual_numbers_module.json");
    let p = dir.path().join("with_module.json");
    std::fs::write(&p, alg.to_string()).unwrap();
    let o = run(&["check", "nijenhuis", &p.display().to_string()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    // a left action that forgets the unit is not a bimodule
    alg["module"]["left"][0][3] = serde_json::json!("2");
    std::fs::write(&p, alg.to_string()).unwrap();
    assert_eq!(code(&run(&["check", "nijenhuis", &p.display().to_string()])), 1);
    // a bare module file is not an algebra file
    assert_eq!(code(&run(&["check", "nijenhuis", &data("dual_numbers_module.json")])), 2);
}

#[test]
fn cohomology_table_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let o = run(&[
        "cohomology",
        &data("dual_numbers.json"),
        "--max-degree",
        "3",
        "--module",
        &data("dual_numbers_module.json"),
        "--emit-matrices",
        &d,
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("euler and exactness checks: PASS"));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).take(4).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0], ["0", "2", "2", "0"]);
    assert_eq!(rows[3], ["3", "1", "2", "3"]);
    for tag in ["alg", "njo", "nja"] {
        let p = dir.path().join(format!("d_{tag}_0.json"));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert!(v["rows"].is_u64() && v["cols"].is_u64() && v["entries"].is_array());
    }
}

#[test]
fn cohomology_refuses_invalid_structures() {
    let o = run(&["cohomology", &data("perturbed.json"), "--max-degree", "2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn cobar_commands() {
    let o = run(&["cobar", "d2", "--max-arity", "5", "--presentation", "xy"]);
    assert_eq!(code(&o), 0);
    let o = run(&["cobar", "d2", "--max-arity", "4", "--mutate", "flip-nested"]);
    assert_eq!(code(&o), 1);
    let o = run(&["cobar", "show", "m3"]);
    assert_eq!(stdout(&o), "-1 * m2(m2(1,2),3)\n1 * m2(1,m2(2,3))\n");
    assert_eq!(code(&run(&["cobar", "show", "q3"])), 2);
}

#[test]
fn order_compare() {
    let o = run(&["order", "compare", "m2(m2(1,2),3)", "m2(1,m2(2,3))"]);
    assert_eq!(stdout(&o).trim(), "GT");
    let o = run(&["order", "compare", "m2(1,m2(2,3))", "m2(m2(1,2),3)"]);
    assert_eq!(stdout(&o).trim(), "LT");
    let o = run(&["order", "compare", "P1(1)", "P1(1)"]);
    assert_eq!(stdout(&o).trim(), "EQ");
    assert_eq!(code(&run(&["order", "compare", "m2(1,2)", "y1(1)"])), 2);
}

#[test]
fn homotopy_checks() {
    let o = run(&["check", "hnja", &data("two_term.json"), "--max-arity", "4"]);
    assert_eq!(code(&o), 0);
    let o = run(&["mc", "check", &data("two_term.json"), "--max-arity", "3"]);
    assert_eq!(code(&o), 0);
    let o = run(&["mc", "check", &data("perturbed.json"), "--max-arity", "3"]);
    assert_eq!(code(&o), 1);
    let o = run(&["check", "rb", &data("rb_A.json"), &data("rb_M.json"), &data("rb_B.json"), "--max-arity", "4"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn rb_lift_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["rb", "lift", &data("rb_A.json"), &data("rb_M.json"), &data("rb_B.json"), "--max-arity", "4"]);
    assert_eq!(code(&o), 0);
    let p = dir.path().join("lift.json");
    std::fs::write(&p, stdout(&o)).unwrap();
    let o = run(&["check", "hnja", &p.display().to_string(), "--max-arity", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn twisted_agrees_with_cone() {
    let o = run(&["twist", "cohomology", &data("dual_numbers.json"), "--max-degree", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("agreement: PASS"));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"basis\": ").unwrap();
    let o = run(&["check", "nijenhuis", &p.display().to_string()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(code(&run(&["check", "nijenhuis", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn emit_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--emit", &dir.path().display().to_string(), "check", "nijenhuis", &data("dual_numbers.json")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("check.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn acceptance_subset_is_deterministic() {
    let a = run(&["acceptance", "--only", "cobar-mp", "--only", "braces"]);
    let b = run(&["acceptance", "--only", "cobar-mp", "--only", "braces"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<serde_json::Value> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["passed"] == true));
    let m = run(&["acceptance", "--only", "1", "--mutate", "flip-nested"]);
    assert_eq!(code(&m), 1);
    assert!(stdout(&m).contains("\"passed\":false"));
}
