//! End-to-end checks of the command-line surface: exit codes, canonical
//! round-trips and byte-identical reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_finspace"))
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn check_exit_codes() {
    let xv = data("xv.json");
    let pc = data("pseudocircle.json");
    assert_eq!(run(&["check", &xv, "Xv", "schematic"]).status.code(), Some(0));
    assert_eq!(run(&["check", &pc, "pseudocircle", "schematic"]).status.code(), Some(1));
    assert_eq!(run(&["check", &xv, "nope", "schematic"]).status.code(), Some(2));
    assert_eq!(run(&["check", &xv, "collapse", "qciso"]).status.code(), Some(0));
    assert_eq!(run(&["check", &xv, "Xv", "affine"]).status.code(), Some(0));
    assert_eq!(run(&["check", &xv, "Xv", "finite"]).status.code(), Some(0));
    assert_eq!(run(&["check", &xv, "Xv", "finite", "--oracle"]).status.code(), Some(0));
    let x0 = data("x0_covers.json");
    assert_eq!(run(&["check", &x0, "A4", "etale-cover"]).status.code(), Some(0));
    assert_eq!(run(&["check", &x0, "A4", "qcoh"]).status.code(), Some(0));
}

#[test]
fn refutation_reports_a_witness() {
    let pc = data("pseudocircle.json");
    let out = run(&["check", &pc, "pseudocircle", "schematic", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["holds"], serde_json::json!(false));
    assert!(doc["detail"].as_str().unwrap().contains("witness"));
}

#[test]
fn construct_outputs_are_deterministic_and_reparse() {
    let xv = data("xv.json");
    let a = run(&["construct", &xv, "pw", "Xv"]);
    let b = run(&["construct", &xv, "pw", "Xv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "identical inputs give byte-identical reports");
    let text = String::from_utf8(a.stdout).unwrap();
    let ws = finspace::workspace::Workspace::parse(&text).unwrap();
    assert!(ws.spaces.contains_key("pw(Xv)"));
    assert_eq!(ws.spaces["pw(Xv)"].len(), 4);
    // round-trip: parse -> serialize -> parse is the identity on canon form
    assert_eq!(ws.serialize(), text);
}

#[test]
fn construct_points_and_stein() {
    let xv = data("xv.json");
    let out = run(&["construct", &xv, "points", "chain"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schematic_points"].as_array().unwrap().len(), 2);

    let out = run(&["construct", &xv, "stein", "collapse"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let ws = finspace::workspace::Workspace::parse(&text).unwrap();
    assert!(ws.spaces.contains_key("stein_mid"));
    assert!(ws.morphisms.contains_key("f_prime"));
    assert!(ws.morphisms.contains_key("rho"));
}

#[test]
fn construct_fiber_product_and_cylinder() {
    let xv = data("xv.json");
    let out = run(&["construct", &xv, "fiber-product", "collapse", "collapse"]);
    assert_eq!(out.status.code(), Some(0));
    let ws =
        finspace::workspace::Workspace::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(ws.spaces["fiber_product"].len(), 4);

    let out = run(&["construct", &xv, "cylinder", "collapse"]);
    assert_eq!(out.status.code(), Some(0));
    let ws =
        finspace::workspace::Workspace::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(ws.spaces["cyl(collapse)"].len(), 3);
}

#[test]
fn galois_cli_pass_and_guard() {
    let x0 = data("x0_covers.json");
    let out = run(&[
        "galois", &x0, "X0", "--generators", "A4", "--max-degree", "4", "--omega-degree", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(text.contains("axiom 5"));

    // a disconnected space is a precondition failure
    let xv = data("xv.json");
    let out = run(&["galois", &xv, "Xv", "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not connected"));
}

#[test]
fn galois_json_report_is_canonical() {
    let x0 = data("x0_covers.json");
    let args = [
        "galois", &x0, "X0", "--generators", "A4", "--max-degree", "4", "--omega-degree", "6",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["passed"], serde_json::json!(true));
    assert_eq!(doc["instance_counts"].as_array().unwrap().len(), 5);
}

#[test]
fn relspec_and_trivialize_via_cli() {
    let x0 = data("x0_covers.json");
    let out = run(&["construct", &x0, "relspec", "A4"]);
    assert_eq!(out.status.code(), Some(0));
    let ws =
        finspace::workspace::Workspace::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(ws.spaces.contains_key("relspec(A4)"));

    let out = run(&["construct", &x0, "trivialize", "A4x2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["certificate"]["degree"], serde_json::json!(3));
    assert_eq!(doc["certificate"]["verified"], serde_json::json!(true));
}

#[test]
fn stdin_accepted_with_dash() {
    use std::io::Write;
    let text = std::fs::read_to_string(data("xv.json")).unwrap();
    let mut child = Command::new(bin())
        .args(["check", "-", "Xv", "schematic"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(text.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn module_sheaves_parse_and_check() {
    let xv = data("xv.json");
    assert_eq!(run(&["check", &xv, "Ostruct", "qcoh"]).status.code(), Some(0));
    assert_eq!(run(&["check", &xv, "NotQcohM", "qcoh"]).status.code(), Some(1));
}
