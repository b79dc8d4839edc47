//! End-to-end runs of the binary on the shipped configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

fn run_with(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stefan-lab"));
    cmd.args(args).env_remove("STEFAN_LAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

/// Run `command` on a shipped config into a fresh directory.
fn run(command: &str, name: &str) -> (Output, TempDir) {
    let dir = TempDir::new().unwrap();
    let out = run_with(
        &[
            command,
            "--config",
            config(name).to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    (out, dir)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &TempDir) -> Value {
    let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn verdict(summary: &Value, name: &str) -> String {
    summary["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["verdict"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn default_constants_pass() {
    let (o, dir) = run("verify-constants", "default");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# stefan-lab "));
    assert_eq!(
        lines.next().unwrap(),
        "j,omega_j,tilde_omega_j,R_j,T_j,recursion_lhs,recursion_rhs,pass"
    );
    assert_eq!(lines.count(), 30);
    let s = summary(&dir);
    assert_eq!(s["pass"], true);
    assert!(s["config"]["resolved"]["theta"].as_f64().unwrap() > 0.0);
}

#[test]
fn critical_q_is_a_config_error_naming_q() {
    let (o, _dir) = run("verify-constants", "q_critical");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`q`"), "{}", stderr(&o));
}

#[test]
fn hand_set_sequence_breaking_doubling_fails() {
    let (o, dir) = run("verify-constants", "doubling_violation");
    assert_eq!(code(&o), 1);
    let s = summary(&dir);
    let check = &s["checks"][0];
    assert_eq!(check["name"], "recursion_and_doubling");
    assert_eq!(check["detail"]["doubling_failures"][0], 1);
}

#[test]
fn heat_oracle_reports_its_error() {
    let (o, dir) = run("solve", "heat_oracle");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("L-inf error"));
    let err = summary(&dir)["results"]["linf_error"].as_f64().unwrap();
    assert!(
        err > 0.0 && err <= 5.0 * (1.0 / 128f64.powi(2) + 1.0 / 2048.0),
        "{err}"
    );
}

#[test]
fn constant_datum_has_no_oscillation() {
    let (o, dir) = run("solve", "constant_datum");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(s["results"]["oscillation"].as_f64().unwrap(), 0.0);
    let header = std::fs::read_to_string(dir.path().join("newton_log.csv")).unwrap();
    assert_eq!(
        header.lines().nth(1).unwrap(),
        "t_step,iters,final_residual,mu_final"
    );
}

#[test]
fn unparseable_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model\np = ").unwrap();
    let o = run_with(&["solve", "--config", bad.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.toml"));
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(code(&run_with(&["solve"], &[])), 2);
    assert_eq!(code(&run_with(&["frobnicate"], &[])), 2);
}

#[test]
fn solver_failure_reports_the_step() {
    let (o, _dir) = run("solve", "solver_failure");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("time step"), "{}", stderr(&o));
}

#[test]
fn active_jump_checks_pass() {
    let (o, dir) = run("solve", "active_jump");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(verdict(&s, "weak_residual"), "PASS");
    assert_eq!(verdict(&s, "near_jump_energy"), "PASS");
}

#[test]
fn mask_domain_solves_in_2d() {
    let (o, dir) = run("solve", "mask_domain");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "t,node_index,x,y,w,u");
}

#[test]
fn acceptance_sweep_passes() {
    let (o, dir) = run("sweep", "acceptance_sweep");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(verdict(&s, "cauchy_trend"), "PASS");
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 4);
    let energy = std::fs::read_to_string(dir.path().join("energy_scan.csv")).unwrap();
    assert_eq!(
        energy.lines().nth(1).unwrap(),
        "eps,sigma,energy,fitted_slope"
    );
}

#[test]
fn gate_violation_names_the_smallest_width() {
    let (o, _dir) = run("sweep", "gate_violation");
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("smallest admissible eps is 0.0125"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn inactive_sweep_leaves_jump_diagnostics_undecided() {
    let (o, dir) = run("sweep", "inactive_sweep");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(verdict(&s, "near_jump_energy"), "UNDECIDED");
    assert_eq!(verdict(&s, "near_flux"), "UNDECIDED");
    assert_eq!(s["checks"][0]["detail"]["all_below_floor"], true);
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let (a, da) = run("sweep", "acceptance_sweep");
    let dir = TempDir::new().unwrap();
    let b = run_with(
        &[
            "sweep",
            "--config",
            config("acceptance_sweep").to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[("STEFAN_LAB_THREADS", "1")],
    );
    assert_eq!((code(&a), code(&b)), (0, 0));
    let (fa, fb) = (csv_files(da.path()), csv_files(dir.path()));
    assert_eq!(fa.len(), 3);
    assert_eq!(fa, fb);
}

#[test]
fn seed_enters_the_provenance_hash() {
    let first_line = |seed: &str| {
        let dir = TempDir::new().unwrap();
        let o = run_with(
            &[
                "verify-constants",
                "--config",
                config("default").to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
                "--seed",
                seed,
            ],
            &[],
        );
        assert_eq!(code(&o), 0);
        let text = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
        text.lines().next().unwrap().to_string()
    };
    assert_eq!(first_line("1"), first_line("1"));
    assert_ne!(first_line("1"), first_line("2"));
}

#[test]
fn bad_thread_cap_is_a_usage_error() {
    let o = run_with(
        &[
            "verify-constants",
            "--config",
            config("default").to_str().unwrap(),
            "--out",
            "/tmp/unused",
        ],
        &[("STEFAN_LAB_THREADS", "zero")],
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("STEFAN_LAB_THREADS"));
}
