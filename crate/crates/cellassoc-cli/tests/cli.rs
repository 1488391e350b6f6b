//! End-to-end tests of the `cellassoc` binary: exit codes, output schema,
//! reproducibility, and the documented CLI surface.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cellassoc"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("write spec");
    path.to_str().expect("utf8 path").to_string()
}

const HEADER: &str = "sweep_var,sweep_value,policy,engine,metric,value,ci95,n";

#[test]
fn run_reports_both_engines_and_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "single.toml",
        r#"
policies = ["nearest"]
metric = "coverage"
n_worlds = 500
seed = 3

[[technologies]]
"#,
    );
    let (code, stdout, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 3, "one analytic + one simulation row");
    // T = 1 symmetric coverage at 0 dB has the closed value 1/(1 + pi/4).
    assert_eq!(
        lines[1],
        "beta_db,0,nearest,analytic,coverage,0.560099154,,0"
    );
    assert!(lines[2].starts_with("beta_db,0,nearest,monte-carlo,coverage,"));
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields.len(), 8);
    assert_eq!(fields[7], "500");
}

#[test]
fn identical_specs_and_seeds_reproduce_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "repeat.toml",
        r#"
policies = ["nearest", "max-ratio", "random"]
metric = "rate"
n_worlds = 400
seed = 9

[sweep]
variable = "beta_db"
values = [-3.0, 3.0]

[[technologies]]
count = 2
"#,
    );
    let first = run(&["run", "--spec", &spec]);
    let second = run(&["run", "--spec", &spec]);
    assert_eq!(first.0, 0, "stderr: {}", first.2);
    assert_eq!(first.1, second.1, "stdout must be byte-identical");
}

#[test]
fn empty_sweep_grid_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "empty.toml",
        r#"
policies = ["nearest"]
metric = "coverage"

[sweep]
variable = "beta_db"
values = []

[[technologies]]
"#,
    );
    let (code, _, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 1);
    assert!(stderr.contains("sweep grid is empty"), "stderr: {stderr}");
}

#[test]
fn analytic_engine_rejects_combinations_without_an_expression() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "unsupported.toml",
        r#"
policies = ["opt-rate:k=2"]
metric = "coverage"
engine = "analytic"

[[technologies]]
count = 2
"#,
    );
    let (code, _, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 1);
    assert!(stderr.contains("opt-rate:k=2"), "stderr: {stderr}");

    // The same policy under engine=both simply yields no analytic row.
    let spec = write_spec(
        dir.path(),
        "both.toml",
        r#"
policies = ["opt-rate:k=2"]
metric = "coverage"
n_worlds = 150
seed = 1

[[technologies]]
count = 2
"#,
    );
    let (code, stdout, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert_eq!(stdout.lines().count(), 2, "header + one simulation row");
    assert!(stdout.contains("monte-carlo"));
    assert!(!stdout.contains("analytic"));
}

#[test]
fn noisy_networks_drop_the_optimal_coverage_expression_but_keep_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "noisy.toml",
        r#"
policies = ["nearest", "opt-cov:k=1"]
metric = "coverage"
engine = "analytic"

[[technologies]]
count = 2
noise = 0.1
"#,
    );
    let (code, _, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 1, "depth-1 optimal needs the interference-limited regime");
    assert!(stderr.contains("opt-cov:k=1"), "stderr: {stderr}");
}

#[test]
fn run_writes_csv_and_sidecar_when_an_output_path_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out").join("res.csv");
    let spec = write_spec(
        dir.path(),
        "tofile.toml",
        &format!(
            r#"
policies = ["nearest"]
metric = "coverage"
engine = "analytic"
output = "{}"

[[technologies]]
"#,
            csv.display()
        ),
    );
    let (code, stdout, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("res.csv"));
    let table = std::fs::read_to_string(&csv).expect("csv written");
    assert!(table.starts_with(HEADER));
    let sidecar = std::fs::read_to_string(dir.path().join("out").join("res.csv.json"))
        .expect("sidecar written");
    let parsed: serde_json::Value = serde_json::from_str(&sidecar).expect("valid json");
    assert_eq!(parsed["technologies"][0]["beta"], 1.0);
    assert_eq!(parsed["sampler"]["bs_count"], 64);
}

#[test]
fn malformed_spec_files_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "broken.toml", "policies = [\"nearest\"\n");
    let (code, _, _) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 1);

    let spec = write_spec(
        dir.path(),
        "unknown_field.toml",
        r#"
policies = ["nearest"]
metric = "coverage"
typo_field = 3

[[technologies]]
"#,
    );
    let (code, _, stderr) = run(&["run", "--spec", &spec]);
    assert_eq!(code, 1);
    assert!(stderr.contains("typo_field"), "stderr: {stderr}");

    let (code, _, _) = run(&["run", "--spec", "/nonexistent/path.toml"]);
    assert_eq!(code, 1);
}

#[test]
fn bad_arguments_exit_with_code_three() {
    assert_eq!(run(&["figure", "nope"]).0, 3);
    assert_eq!(run(&["analytic", "eq99"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["run"]).0, 3, "missing --spec");
    assert_eq!(run(&["analytic", "eq20"]).0, 3, "missing required t");
    assert_eq!(
        run(&["analytic", "eq19", "--params", "beta=1,beta_db=0"]).0,
        3,
        "conflicting threshold spellings"
    );
    assert_eq!(
        run(&["analytic", "lemma6", "--params", "x=1.5"]).0,
        3,
        "x outside (0,1]"
    );
    assert_eq!(
        run(&["analytic", "eq19", "--params", "t=2.5"]).0,
        3,
        "fractional technology count"
    );
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn analytic_formulas_print_nine_significant_digits() {
    let (code, stdout, _) = run(&["analytic", "eq19", "--params", "t=1"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "0.560099154");

    let (code, stdout, _) = run(&["analytic", "phi", "--params", "x=0.7,y=2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "0.296934427");

    let (code, stdout, _) = run(&["analytic", "eq20", "--params", "t=2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "3.13431947");

    let (code, stdout, _) = run(&["analytic", "eq15", "--params", "x=2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "0.75");

    // Per-technology thresholds: a repeated beta_db list.
    let (code, stdout, _) = run(&[
        "analytic",
        "eq19",
        "--params",
        "beta_db=0",
        "--params",
        "beta_db=5",
    ]);
    assert_eq!(code, 0);
    let value: f64 = stdout.trim().parse().unwrap();
    assert!(value > 0.0 && value < 1.0);

    // dB and linear spellings agree: 5 dB = 10^0.5.
    let (_, db_out, _) = run(&["analytic", "lemma6", "--params", "x=0.5,beta_db=5"]);
    let (_, lin_out, _) = run(&[
        "analytic",
        "lemma6",
        "--params",
        "x=0.5,beta=3.16227766016838",
    ]);
    assert_eq!(db_out, lin_out);
}

#[test]
fn figure_runs_are_reproducible_and_write_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let args_a = [
        "figure", "fig4",
        "--out", out_a.to_str().unwrap(),
        "--n-worlds", "200",
        "--seed", "5",
    ];
    let args_b = [
        "figure", "fig4",
        "--out", out_b.to_str().unwrap(),
        "--n-worlds", "200",
        "--seed", "5",
    ];
    let (code, stdout, stderr) = run(&args_a);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("fig4.csv"));
    assert_eq!(run(&args_b).0, 0);

    let csv_a = std::fs::read(out_a.join("fig4.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("fig4.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "same seed must give identical figures");
    assert!(out_a.join("fig4.csv.json").exists());

    let table = String::from_utf8(csv_a).unwrap();
    assert!(table.starts_with(HEADER));
    assert!(table.contains("T,1,nearest,analytic,coverage,0.560099154,,0"));
}

#[test]
fn validate_quick_passes_and_is_deterministic() {
    let first = run(&["validate", "--quick"]);
    assert_eq!(first.0, 0, "stdout: {}\nstderr: {}", first.1, first.2);
    assert!(first.1.contains("0 failed"), "stdout: {}", first.1);
    let second = run(&["validate", "--quick"]);
    assert_eq!(first.1, second.1, "report must be deterministic");
}

#[test]
fn validate_skips_statistics_below_the_sample_floor() {
    let (code, stdout, _) = run(&["validate", "--quick", "--n-worlds", "500"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("SKIP (insufficient samples)"), "stdout: {stdout}");
    assert!(stdout.contains("2 skipped"), "stdout: {stdout}");
}
