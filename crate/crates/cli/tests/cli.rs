use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hvstab(args: &[&str]) -> Output {
    hvstab_in(args, None)
}

fn hvstab_in(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hvstab"));
    cmd.args(args).env_remove("HVSTAB_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("HVSTAB_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn classify_examples() {
    for (st, status) in [
        ("4,3", "Stable"),
        ("5,2", "UnstableTracePositive"),
        ("7,0", "UnstableTraceViolated"),
    ] {
        let v = json_of(&hvstab(&["classify", "--stencil", st]));
        assert_eq!(v["command"], "classify");
        assert_eq!(v["results"]["status"], status, "{st}");
        assert!(v["artifact_version"].is_string());
    }
}

#[test]
fn invalid_stencil_exits_two() {
    let o = hvstab(&["classify", "--stencil", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_subcommand_and_flag_exit_two() {
    assert_eq!(hvstab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hvstab(&["table", "--bogus"]).status.code(), Some(2));
    assert_eq!(hvstab(&["classify", "--stencil", "4"]).status.code(), Some(2));
}

#[test]
fn table_csv_has_thirty_six_rows() {
    let o = hvstab(&["table", "--max-L", "8", "--format", "csv"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["L", "R", "status", "symbol"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 36);
    for row in &rows {
        let (l, r): (u32, u32) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let want = if l < r + 3 || (l, r) == (3, 0) {
            "S"
        } else if l == r + 3 {
            "hc"
        } else {
            "x"
        };
        assert_eq!(&row[3], want, "({l},{r})");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["coeffs", "--stencil", "5,2"][..],
        &["table", "--max-L", "5", "--format", "pretty"],
        &["barrier", "--max-R", "10", "--format", "csv"],
        &["hweno", "classify", "--l", "4", "--r", "1"],
    ] {
        let a = hvstab(args);
        let b = hvstab(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn coefficients_are_exact_strings() {
    let v = json_of(&hvstab(&["coeffs", "--stencil", "4,3"]));
    let beta = v["results"]["beta"].as_array().unwrap();
    assert_eq!(beta[1]["k"], -1);
    assert_eq!(beta[1]["value"], "4/3");
    assert_eq!(v["results"]["order"], 7);
    assert_eq!(v["results"]["verified_order"], 7);
    let o = hvstab(&["coeffs", "--stencil", "4,3", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("kind,k,value\n"));
    assert!(text.contains("alpha,-2,-53/216"));
}

#[test]
fn hweno_trace_at_pi() {
    let v = json_of(&hvstab(&["hweno", "trace", "--l", "3", "--r", "0", "--at", "pi"]));
    assert_eq!(v["results"]["value"], "-43/15");
    assert_eq!(v["results"]["exact"], true);
    let v = json_of(&hvstab(&["hweno", "classify", "--l", "3", "--r", "0"]));
    assert_eq!(v["results"]["verdict"], "Unstable");
    assert_eq!(
        hvstab(&["hweno", "trace", "--l", "3", "--r", "0", "--at", "east"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn rehpi_item_agrees_with_closed_form() {
    let v = json_of(&hvstab(&["rehpi", "--item", "6", "--t", "4"]));
    assert_eq!(v["results"]["agree"], true);
    assert_eq!(v["results"]["sign"], -1);
    let v = json_of(&hvstab(&["rehpi", "--stencil", "4,3"]));
    assert_eq!(v["results"]["sign"], 1);
    assert_eq!(hvstab(&["rehpi", "--item", "9", "--t", "0"]).status.code(), Some(2));
}

#[test]
fn identity_suites_pass() {
    for (suite, range) in [
        ("harmonic", "0..12"),
        ("cpi", "0..6"),
        ("zrec", "1..6"),
        ("derivative", "1..4"),
        ("asymptotic", "50..51"),
    ] {
        let v = json_of(&hvstab(&["identities", "--suite", suite, "--range", range]));
        assert_eq!(v["results"]["failed"], 0, "{suite}");
        assert!(v["results"]["passed"].as_u64().unwrap() > 0);
    }
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = hvstab_in(
        &[
            "simulate",
            "--scheme",
            "hv",
            "--stencil",
            "2,1",
            "--N",
            "16",
            "--tfinal",
            "0.1",
        ],
        Some(dir.path()),
    );
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"cfl\": 4.0000000000000002e-1"), "{text}");
}

#[test]
fn orderstar_writes_grid_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "orderstar",
        "--scheme",
        "hv",
        "--stencil",
        "4,3",
        "--window",
        "-2,2",
        "--res",
        "21,11",
        "--out",
        "star.csv",
    ];
    let v = json_of(&hvstab_in(&args, Some(dir.path())));
    let csv_path = dir.path().join("star.csv");
    assert_eq!(v["results"]["csv"], csv_path.display().to_string());
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x", "y", "sheet", "shaded"]);
    assert_eq!(rdr.records().count(), 2 * 21 * 11);
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("star.branch_points.json")).unwrap()).unwrap();
    for p in side["branch_points"].as_array().unwrap() {
        assert!(p["discriminant_abs"].as_f64().unwrap() < 1e-8);
    }
    let first = std::fs::read(&csv_path).unwrap();
    json_of(&hvstab_in(&args, Some(dir.path())));
    assert_eq!(first, std::fs::read(&csv_path).unwrap());
    let v = json_of(&hvstab_in(
        &["orderstar", "--scheme", "fdm", "--stencil", "3,2", "--res", "5,5"],
        Some(dir.path()),
    ));
    assert_eq!(v["results"]["sheets"].as_array().unwrap().len(), 1);
    assert!(dir.path().join("orderstar.csv").exists());
    assert_eq!(
        hvstab_in(
            &["orderstar", "--scheme", "fdm", "--stencil", "3,2", "--window", "2,-2"],
            Some(dir.path())
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn simulate_writes_history_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--scheme",
        "hweno",
        "--stencil",
        "2,1",
        "--N",
        "32",
        "--tfinal",
        "0.5",
        "--ic",
        "gaussian:0.1",
        "--out",
        "run.csv",
    ];
    let v = json_of(&hvstab_in(&args, Some(dir.path())));
    assert_eq!(v["results"]["status"], "completed");
    let mut rdr = csv::Reader::from_path(dir.path().join("run.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "l2_norm"]);
    let steps = v["results"]["steps"].as_u64().unwrap() as usize;
    assert_eq!(rdr.records().count(), steps + 1);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.summary.json")).unwrap()).unwrap();
    assert!(summary["results"]["growth_rate"].is_number());
    assert!(summary["results"]["final_error"].is_number());
}

#[test]
fn simulate_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--scheme",
        "hv",
        "--stencil",
        "8,0",
        "--cfl",
        "0.05",
        "--tfinal",
        "200",
        "--ic",
        "sine:20",
    ];
    let v = json_of(&hvstab_in(&args, Some(dir.path())));
    assert_eq!(v["results"]["status"], "diverged");
    assert!(v["results"]["growth_rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["simulate", "--scheme", "hv", "--stencil", "4,3", "--N", "8"][..],
        &["simulate", "--scheme", "hv", "--stencil", "4,3", "--cfl", "3"],
        &["simulate", "--scheme", "hv", "--stencil", "4,3", "--ic", "square:1"],
        &["simulate", "--scheme", "hv", "--stencil", "4,3", "--format", "csv"],
    ] {
        assert_eq!(hvstab_in(args, Some(dir.path())).status.code(), Some(2), "{args:?}");
    }
}
