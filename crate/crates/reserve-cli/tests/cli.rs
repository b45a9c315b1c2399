//! End-to-end checks of the `reserve` binary and its exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn reserve(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reserve"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generate_fit_price_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = reserve(
        &[
            "generate", "--scenario", "linear", "--n", "400", "--sigma", "0.1", "--seed", "7",
            "--out", "train.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(d.join("train.csv").exists());

    let out = reserve(
        &[
            "fit", "--data", "train.csv", "--out", "predictor.txt", "--k", "4",
            "--reserve-out", "rule.txt",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("squared loss"));

    let out = reserve(
        &[
            "price", "--data", "train.csv", "--predictor", "predictor.txt", "--reserve",
            "rule.txt",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let prices = stdout(&out);
    assert!(prices.starts_with("reserve\n"));
    assert_eq!(prices.lines().count(), 401);

    let out = reserve(
        &[
            "evaluate", "--data", "train.csv", "--predictor", "predictor.txt", "--reserve",
            "rule.txt",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = stdout(&out);
    assert!(report.contains("mean_bid"));
    assert!(report.contains("separation"));
}

#[test]
fn experiment_runs_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = reserve(
        &[
            "experiment", "--scenario", "linear", "--sigma", "1.0", "--n", "200", "--replicas",
            "2", "--k-grid", "2,4", "--seed", "3", "--out", "report.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("method,mean_revenue,std_dev"));
    let report = std::fs::read_to_string(d.join("report.csv")).unwrap();
    assert!(report.starts_with("replica,method,k,revenue_raw,revenue_normalized"));
    assert_eq!(report.lines().count(), 1 + 2 * 3);
}

#[test]
fn bounds_check_equal_revenue() {
    let dir = tempfile::tempdir().unwrap();
    let out = reserve(&["bounds-check", "--equal-revenue", "1.1"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for name in [
        "variance_lower_bound",
        "separation_bound_revenue",
        "separation_bound_mean",
        "approx_ratio",
    ] {
        let line = text
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("missing {name} in {text}"));
        assert!(line.contains("true"), "{line}");
    }
}

#[test]
fn bounds_check_bid_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bids.txt"), "0.4\n0.9\n").unwrap();
    let out = reserve(&["bounds-check", "--bids", "bids.txt"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("summary B=0.65 R=0.45"));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // Malformed CSV: missing bid column.
    std::fs::write(d.join("bad.csv"), "f0,price\n1.0,2.0\n").unwrap();
    let out = reserve(
        &["fit", "--data", "bad.csv", "--out", "p.txt"],
        d,
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("bid"));

    // Unknown scenario.
    let out = reserve(
        &[
            "generate", "--scenario", "cubic", "--n", "10", "--out", "x.csv",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // Bad equal-revenue parameter.
    let out = reserve(&["bounds-check", "--equal-revenue", "0.5"], d);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // Missing file is an I/O failure, exit 1, message carries the path.
    let out = reserve(&["fit", "--data", "absent.csv", "--out", "p.txt"], d);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("absent.csv"));
}

#[test]
fn price_round_trips_serialized_rule() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reserve(
        &[
            "generate", "--scenario", "bimodal", "--n", "300", "--sigma", "0.5", "--seed", "1",
            "--out", "data.csv",
        ],
        d,
    );
    let out = reserve(
        &[
            "fit", "--data", "data.csv", "--out", "p.txt", "--k", "6", "--reserve-out",
            "r.txt", "--quantize",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rule_text = std::fs::read_to_string(d.join("r.txt")).unwrap();
    assert!(rule_text.contains("reserve "));
    // A second parse-and-write must reproduce the file bit for bit.
    let rule = reserve_pricing::PiecewiseReserve::from_text(&rule_text).unwrap();
    assert_eq!(rule.to_text(), rule_text);
}
