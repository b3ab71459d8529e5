use std::process::{Command, Output};

use royroot_cli::{ErrorRecord, OutputRecord};

fn royroot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_royroot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn jsonl(args: &[&str]) -> Vec<OutputRecord> {
    let mut full = args.to_vec();
    full.extend(["--format", "jsonl"]);
    let out = royroot(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid record"))
        .collect()
}

fn csv_rows(args: &[&str]) -> Vec<csv::StringRecord> {
    let out = royroot(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["s", "m", "n", "alpha", "theta", "method", "value", "normalization_residual", "elapsed_seconds", "warnings"]
    );
    rdr.records().map(|r| r.unwrap()).collect()
}

fn single(args: &[&str]) -> f64 {
    let recs = jsonl(args);
    assert_eq!(recs.len(), 1);
    recs[0].value
}

#[test]
fn cdf_examples() {
    let v = single(&["cdf", "--s", "5", "--m", "-0.5", "--n", "1000", "--theta", "0.008501", "--method", "exact"]);
    assert!((v - 0.80).abs() < 1e-4, "{v}");
    assert_eq!(single(&["cdf", "--s", "1", "--m", "0", "--n", "0", "--theta", "0.25"]), 0.25);
    let a = single(&["cdf", "--p", "5", "--mdim", "206", "--ndim", "5", "--theta", "0.5"]);
    let b = single(&["cdf", "--s", "5", "--m", "-0.5", "--n", "100", "--theta", "0.5"]);
    assert_eq!(a, b);
}

#[test]
fn quantile_examples() {
    let exact = single(&["quantile", "--s", "200", "--m", "-0.5", "--n", "149.5", "--alpha", "0.99", "--method", "exact"]);
    assert!((exact - 0.827760).abs() < 1e-5, "{exact}");
    let approx = single(&["quantile", "--s", "200", "--m", "-0.5", "--n", "149.5", "--alpha", "0.99", "--method", "approx"]);
    assert!((approx - 0.827761).abs() < 1e-5, "{approx}");
    let median = single(&["quantile", "--alpha", "0.5", "--s", "1", "--m", "0", "--n", "0"]);
    assert!((median - 0.5).abs() < 1e-9);
}

#[test]
fn quantile_csv_round_trips_through_cdf() {
    for alpha in ["0.05", "0.5", "0.95"] {
        let rows = csv_rows(&["quantile", "--s", "4", "--m", "-0.5", "--n", "12", "--alpha", alpha]);
        let theta = &rows[0][6];
        let back = csv_rows(&["cdf", "--s", "4", "--m", "-0.5", "--n", "12", "--theta", theta]);
        let v: f64 = back[0][6].parse().unwrap();
        assert!((v - alpha.parse::<f64>().unwrap()).abs() < 1e-6, "{alpha}: {v}");
    }
}

#[test]
fn complex_flag_selects_ensemble() {
    // complex s = 1 is Beta(m+1, n+1): with m = 1, n = 0 the CDF is θ²
    let v = single(&["cdf", "--s", "1", "--m", "1", "--n", "0", "--theta", "0.3", "--complex"]);
    assert!((v - 0.09).abs() < 1e-12);
    let r = royroot(&["cdf", "--s", "2", "--m", "1", "--n", "0", "--theta", "0.3", "--complex", "--method", "approx"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn table_single_cell_matches_quantile() {
    let table = jsonl(&["table", "--s", "3", "--m", "0.5", "--n", "7", "--alpha", "0.9"]);
    let q = jsonl(&["quantile", "--s", "3", "--m", "0.5", "--n", "7", "--alpha", "0.9"]);
    assert_eq!(table.len(), 1);
    assert_eq!(table[0].value, q[0].value);
}

#[test]
fn table_challenging_cell_is_fast() {
    let recs = jsonl(&["table", "--s", "5,54", "--m", "-0.5", "--n", "22.5", "--alpha", "0.9,0.95"]);
    assert_eq!(recs.len(), 4);
    let cell = recs.iter().find(|r| r.s == 54 && r.alpha == Some(0.95)).unwrap();
    assert!(cell.elapsed_seconds < 1.0, "{}", cell.elapsed_seconds);
    assert!(cell.value > 0.0 && cell.value < 1.0);
}

#[test]
fn table_s_sweep_grid() {
    let recs = jsonl(&["table", "--s", "5,15,100", "--m", "-0.5", "--n", "100", "--alpha", "0.95", "--method", "both"]);
    assert_eq!(recs.len(), 6);
    let order: Vec<(usize, &str)> = recs.iter().map(|r| (r.s, r.method.as_str())).collect();
    assert_eq!(order, [(5, "exact"), (5, "approx"), (15, "exact"), (15, "approx"), (100, "exact"), (100, "approx")]);
}

#[test]
fn table_cell_errors_are_inline() {
    let out = royroot(&["table", "--s", "2", "--m", "-3,0", "--n", "1", "--alpha", "0.5", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    let recs: Vec<OutputRecord> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .map(|v| {
            // NaN values are written as null
            let mut v = v;
            if v["value"].is_null() {
                v["value"] = serde_json::json!(-1.0);
            }
            serde_json::from_value(v).unwrap()
        })
        .collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].value, -1.0);
    assert!(recs[0].warnings[0].starts_with("error:"));
    assert!(recs[1].value > 0.0);
}

#[test]
fn curve_columns() {
    let recs = jsonl(&["curve", "--s", "4", "--m", "-0.5", "--n", "20", "--grid", "11"]);
    assert_eq!(recs.len(), 22);
    for col in recs.chunks(11) {
        assert_eq!(col[0].theta, Some(0.0));
        assert_eq!(col[0].value, 0.0);
        assert_eq!(col[10].value, 1.0);
        assert!(col.windows(2).all(|w| w[0].value <= w[1].value));
    }
    assert_eq!(recs[0].method, "exact");
    assert_eq!(recs[11].method, "approx");
}

#[test]
fn mc_is_deterministic_and_accurate() {
    let args = ["mc", "--p", "5", "--mdim", "206", "--ndim", "5", "--replicates", "100000", "--seed", "11"];
    let a = jsonl(&args);
    let b = jsonl(&args);
    let key = |r: &OutputRecord| (r.theta.map(f64::to_bits), r.value.to_bits());
    assert!(a.iter().map(key).eq(b.iter().map(key)));
    let summary = a.iter().find(|r| r.method == "mc_max_deviation").unwrap();
    assert!(summary.value <= 0.01, "{}", summary.value);
    assert_eq!((summary.s, summary.m, summary.n), (5, -0.5, 100.0));
}

#[test]
fn mc_p1_matches_closed_form() {
    let recs = jsonl(&["mc", "--s", "1", "--m", "0.5", "--n", "2", "--replicates", "50000", "--seed", "2"]);
    let summary = recs.iter().find(|r| r.method == "mc_max_deviation").unwrap();
    assert!(summary.value < 0.01);
    // (s, m, n) with no integer MANOVA preimage
    let out = royroot(&["mc", "--s", "2", "--m", "0.25", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_reports_without_failing() {
    let recs = jsonl(&["bench", "--case", "s1,s54"]);
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r.warnings.iter().any(|w| w.starts_with("target <"))));
    assert!((recs[1].value - 0.95).abs() < 1e-8);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("royroot-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q.csv");
    let out = royroot(&["quantile", "--s", "2", "--m", "0", "--n", "0", "--alpha", "0.5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn invalid_input_gives_error_record() {
    let cases: [&[&str]; 5] = [
        &["cdf", "--s", "5", "--m", "-0.5", "--n", "100", "--p", "5", "--theta", "0.5"],
        &["cdf", "--s", "5", "--m", "-0.5", "--theta", "0.5"],
        &["cdf", "--s", "5", "--m", "-2", "--n", "100", "--theta", "0.5"],
        &["quantile", "--s", "5", "--m", "0", "--n", "1", "--alpha", "1.5"],
        &["cdf", "--s", "five"],
    ];
    for args in cases {
        let out = royroot(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: ErrorRecord = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
        assert_eq!(err.error, "invalid_arguments");
        assert_eq!(err.exit_code, 2);
    }
}
