//! End-to-end checks of the binary: exit codes, byte-stable output and the
//! guarantee that `verify` accepts whatever `solve` emits.

use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lagrep");

// SU(2) classes with θ₃ ≤ θ₁ + θ₂: reachable
const FEASIBLE: &str =
    r#"{"classes":[[0.4,-0.4],[1.1,-1.1],[1.2,-1.2]],"l":3,"mode":"unitary","n":2,"seed":7}"#;
// θ₃ > θ₁ + θ₂ violates the triangle bound but passes the determinant test
const UNREACHABLE: &str =
    r#"{"classes":[[0.4,-0.4],[1.1,-1.1],[2.0,-2.0]],"l":3,"mode":"unitary","n":2,"seed":7}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with(args: &[&str], stdin: &str, envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(stdin.as_bytes())
        .expect("stdin accepts input");
    let out = child.wait_with_output().expect("binary runs");
    Run {
        code: out.status.code().expect("no signal"),
        stdout: String::from_utf8(out.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is utf-8"),
    }
}

fn run(args: &[&str], stdin: &str) -> Run {
    run_with(args, stdin, &[])
}

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("output is JSON")
}

fn diagonal_unitary(angles: &[f64]) -> String {
    let n = angles.len();
    let zero = vec![vec![0.0; n]; n];
    let mut re = zero.clone();
    let mut im = zero;
    for (i, a) in angles.iter().enumerate() {
        re[i][i] = a.cos();
        im[i][i] = a.sin();
    }
    serde_json::json!({"n": n, "re": re, "im": im}).to_string()
}

#[test]
fn solve_output_is_accepted_by_verify() {
    let solved = run(&["solve"], FEASIBLE);
    assert_eq!(solved.code, 0, "stderr: {}", solved.stderr);
    let result = parse(&solved.stdout);
    assert_eq!(result["status"], "found");
    assert!(result["product_residual"].as_f64().unwrap() <= 1e-8);

    let rep = serde_json::to_string(&result["rep"]).unwrap();
    let verified = run(&["verify"], &rep);
    assert_eq!(verified.code, 0, "stderr: {}", verified.stderr);
    let report = parse(&verified.stdout);
    assert_eq!(report["closed"], true);
    // n = 2, l = 3: every closed tuple decomposes
    assert_eq!(report["lagrangian"], true);
    assert!(report["witnesses"]["lagrangians"].as_array().unwrap().len() == 3);
}

#[test]
fn lagrangian_solve_emits_witnesses_and_verifies() {
    let problem = FEASIBLE.replace("unitary", "lagrangian");
    let solved = run(&["solve"], &problem);
    assert_eq!(solved.code, 0, "stderr: {}", solved.stderr);
    let result = parse(&solved.stdout);
    assert_eq!(result["status"], "found");
    assert!(result["witness"]["lagrangians"].is_array());

    let rep = serde_json::to_string(&result["rep"]).unwrap();
    let report = parse(&run(&["verify"], &rep).stdout);
    assert_eq!(report["closed"], true);
    assert_eq!(report["sigma0_lagrangian"], true);
}

#[test]
fn unreachable_classes_exit_one() {
    let r = run(
        &["solve", "--set", "solver.restarts=4", "--set", "solver.max_iter=300"],
        UNREACHABLE,
    );
    assert_eq!(r.code, 1);
    let result = parse(&r.stdout);
    assert_eq!(result["status"], "not_found");
    assert!(result.get("rep").is_none());
}

#[test]
fn determinant_obstruction_exits_four() {
    let r = run(&["solve"], r#"{"classes":[[0.5,0.5]],"l":1,"mode":"unitary","n":2}"#);
    assert_eq!(r.code, 4);
    assert_eq!(
        r.stdout,
        "{\"iterations\":0,\"restarts_used\":0,\"status\":\"infeasible_determinant\"}\n"
    );
}

#[test]
fn malformed_inputs_exit_two() {
    assert_eq!(run(&["verify"], "not json").code, 2);
    assert_eq!(run(&["solve"], r#"{"classes":[[0.0]],"l":1}"#).code, 2); // missing mode
    assert_eq!(
        run(&["orbit"], r#"{"n":1,"re":[[1.0]],"im":[[0.0]],"extra":1}"#).code,
        2
    );
    // decompose demands a unitary input
    assert_eq!(run(&["decompose"], r#"{"n":1,"re":[[2.0]],"im":[[0.0]]}"#).code, 2);
    // config errors are input errors
    assert_eq!(run(&["solve", "--set", "solver.restarts=x"], FEASIBLE).code, 2);
    assert_eq!(run(&["solve", "--set", "no.such.key=1"], FEASIBLE).code, 2);
}

#[test]
fn reruns_are_byte_identical() {
    let a = run(&["solve"], FEASIBLE);
    let b = run(&["solve"], FEASIBLE);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.ends_with('\n'));

    let c = run(&["formcheck", "--seed", "5"], r#"{"l":1,"n":2,"samples":6}"#);
    let d = run(&["formcheck", "--seed", "5"], r#"{"l":1,"n":2,"samples":6}"#);
    assert_eq!(c.code, 0);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn output_flag_matches_stdout_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let to_stdout = run(&["solve"], FEASIBLE);
    let to_file = run(&["solve", "--output", path.to_str().unwrap()], FEASIBLE);
    assert_eq!(to_file.code, 0);
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn input_flag_reads_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prob.json");
    std::fs::write(&path, FEASIBLE).unwrap();
    let from_file = run(&["solve", "--input", path.to_str().unwrap()], "");
    assert_eq!(from_file.code, 0);
    assert_eq!(from_file.stdout, run(&["solve"], FEASIBLE).stdout);
    assert_eq!(run(&["solve", "-i", "/no/such/file"], "").code, 2);
}

#[test]
fn config_file_applies_and_set_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"solver.restarts": 2, "solver.max_iter": 200}"#).unwrap();
    let envs = [("LAGREP_CONFIG", cfg.to_str().unwrap())];

    let from_env = run_with(&["solve"], UNREACHABLE, &envs);
    assert_eq!(from_env.code, 1);
    assert_eq!(parse(&from_env.stdout)["restarts_used"], 2);

    let overridden = run_with(&["solve", "--set", "solver.restarts=3"], UNREACHABLE, &envs);
    assert_eq!(parse(&overridden.stdout)["restarts_used"], 3);

    // restarts in the problem itself beat both
    let pinned = UNREACHABLE.replace(r#""seed":7"#, r#""seed":7,"restarts":1,"max_iter":100"#);
    let from_problem = run_with(&["solve"], &pinned, &envs);
    assert_eq!(parse(&from_problem.stdout)["restarts_used"], 1);

    let missing = run_with(&["solve"], FEASIBLE, &[("LAGREP_CONFIG", "/no/such/file")]);
    assert_eq!(missing.code, 2);
}

#[test]
fn seed_flag_overrides_problem_seed() {
    let reseeded = FEASIBLE.replace(r#""seed":7"#, r#""seed":8"#);
    let via_flag = run(&["solve", "--seed", "8"], FEASIBLE);
    let via_json = run(&["solve"], &reseeded);
    assert_eq!(via_flag.stdout, via_json.stdout);
}

#[test]
fn formcheck_defaults_on_empty_input() {
    let r = run(&["formcheck"], "");
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&r.stdout);
    assert_eq!(report["pass"], true);
    assert_eq!(report["n"], 2);
    assert_eq!(report["l"], 3);
    assert_eq!(report["samples"], 50);
    assert_eq!(report["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn orbit_reports_both_angle_multisets() {
    let u = diagonal_unitary(&[2.0, 0.5]);
    let r = run(&["orbit"], &u);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&r.stdout);
    let angles_u: Vec<f64> = report["angles_u"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let angles_utu: Vec<f64> = report["angles_utu"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // uᵗu doubles the angles of a diagonal u
    assert!((angles_u[0] - 0.5).abs() < 1e-12 && (angles_u[1] - 2.0).abs() < 1e-12);
    assert!((angles_utu[0] - 1.0).abs() < 1e-12 && (angles_utu[1] - 4.0).abs() < 1e-12);
}

#[test]
fn decompose_splits_a_unitary() {
    let r = run(&["decompose"], &diagonal_unitary(&[2.0, 0.5]));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&r.stdout);
    assert_eq!(report["l1"]["kind"], "lagrangian");
    assert_eq!(report["l2"]["kind"], "lagrangian");
    assert!(report["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_reports_open_tuples_cleanly() {
    let rep = format!(r#"{{"l":1,"matrices":[{}]}}"#, diagonal_unitary(&[1.0]));
    let r = run(&["verify"], &rep);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&r.stdout);
    assert_eq!(report["closed"], false);
    assert_eq!(report["lagrangian"], false);
    assert_eq!(report["beta_fixed"], false);
    assert!(report.get("witnesses").is_none());
}

#[test]
fn selftest_passes() {
    let r = run(&["selftest"], "");
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&r.stdout);
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}
