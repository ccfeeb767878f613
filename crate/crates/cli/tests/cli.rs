use std::process::{Command, Output};

use volcur::generate::gaussian;
use volcur::io::write_matrix_file;
use volcur::volume_sampling::{build_distribution, total_variation, BoundReport, CSV_COLUMNS};
use volcur::IndexSet;

fn volcur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volcur")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn identity_demo_bounds() {
    let out = volcur(&["bounds", "--gen", "identity", "--m", "3", "--n", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = BoundReport::read_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.iter().map(|r| r.r).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert_eq!(
        rows.iter().map(|r| r.interpolation_factor).collect::<Vec<_>>(),
        vec![4.0, 3.0, 2.0]
    );
    assert_eq!(rows[0].b_err_expected, Some(0.0));
    assert_eq!(rows[0].total_expected, Some(2.0));
    assert_eq!(rows[0].thm4_rhs, 4.0);
    assert_eq!(rows[1].b_err_expected, Some(1.0));
}

#[test]
fn csv_round_trips_through_reader() {
    let out = volcur(&[
        "bounds",
        "--gen",
        "gaussian",
        "--m",
        "6",
        "--n",
        "4",
        "--gen-seed",
        "3",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with(&CSV_COLUMNS.join(",")));
    let rows = BoundReport::read_csv(&text).unwrap();
    assert_eq!(BoundReport::write_csv(&rows), text);
    for row in &rows {
        let scale = gaussian(6, 4, 3).frobenius_sq();
        assert!(row.d_err_expected.unwrap() <= row.thm3_rhs + 1e-10 * scale);
        assert!(row.total_expected.unwrap() <= row.thm4_rhs + 1e-10 * scale);
    }
}

#[test]
fn json_uses_report_field_names() {
    let out = volcur(&[
        "bounds", "--gen", "identity", "--m", "3", "--n", "3", "--k", "1", "--r", "2", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let obj = value[0].as_object().unwrap();
    for key in [
        "k",
        "r",
        "m",
        "n",
        "b_err_expected",
        "thm4_rhs",
        "interpolation_factor",
        "estimation_mode",
    ] {
        assert!(obj.contains_key(key), "{key}");
    }
    let reports: Vec<BoundReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports[0].interpolation_factor, 3.0);
}

#[test]
fn monte_carlo_output_is_deterministic() {
    let args = [
        "bounds",
        "--gen",
        "gaussian",
        "--m",
        "5",
        "--n",
        "4",
        "--k",
        "2",
        "--r",
        "3",
        "--mode",
        "mc",
        "--samples",
        "2000",
        "--seed",
        "9",
    ];
    let a = volcur(&args);
    let b = volcur(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let rows = BoundReport::read_csv(&stdout(&a)).unwrap();
    assert_eq!(rows[0].estimation_mode.name(), "monte_carlo");
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = ["bounds", "--gen", "identity", "--m", "3", "--n", "3", "--k", "1"];
    let direct = volcur(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let filed = volcur(&with_out);
    assert_eq!(filed.status.code(), Some(0));
    assert!(filed.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn degenerate_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rank1.csv");
    std::fs::write(&path, "1,2\n2,4\n3,6\n").unwrap();
    let out = volcur(&["bounds", "--input", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ragged.csv");
    std::fs::write(&path, "1,2\n3\n").unwrap();
    let out = volcur(&["cur", "--input", path.to_str().unwrap(), "--rows", "0", "--cols", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn wide_matrix_is_rejected_for_bounds() {
    let out = volcur(&["bounds", "--gen", "gaussian", "--m", "3", "--n", "5", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("transpose"));
}

#[test]
fn cur_on_identity() {
    let out = volcur(&[
        "cur", "--gen", "identity", "--m", "2", "--n", "2", "--rows", "0", "--cols", "0", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["total_err2"], 1.0);
    assert_eq!(v["b_err"], 0.0);
    assert_eq!(v["d_err"], 1.0);

    let full = volcur(&[
        "cur", "--gen", "gaussian", "--m", "3", "--n", "3", "--rows", "0,1,2", "--cols", "0,1,2", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&full)).unwrap();
    assert!(v["total_err2"].as_f64().unwrap() < 1e-20);
}

#[test]
fn cur_components_sum_to_total() {
    let out = volcur(&[
        "cur",
        "--gen",
        "gaussian",
        "--m",
        "6",
        "--n",
        "5",
        "--gen-seed",
        "4",
        "--rows",
        "0,2,5",
        "--cols",
        "1,3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let total = v["total_err2"].as_f64().unwrap();
    let sum = v["b_err"].as_f64().unwrap() + v["d_err"].as_f64().unwrap();
    assert!((total - sum).abs() <= 1e-9 * total);
    assert!(v["optimal_err2"].as_f64().unwrap() <= total * (1.0 + 1e-10));
}

#[test]
fn cur_rank_deficient_reports_sigma_min() {
    let out = volcur(&[
        "cur", "--gen", "identity", "--m", "2", "--n", "2", "--rows", "0", "--cols", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sigma_min"), "{}", stderr(&out));
}

#[test]
fn cur_rejects_bad_sets() {
    for (rows, cols) in [("0,0", "0"), ("5", "0"), ("x", "0"), ("0", "1,0")] {
        let out = volcur(&[
            "cur", "--gen", "identity", "--m", "3", "--n", "3", "--rows", rows, "--cols", cols,
        ]);
        assert_eq!(out.status.code(), Some(2), "{rows} / {cols}");
    }
}

#[test]
fn identity_samples_are_diagonal_and_repeatable() {
    let args = [
        "sample",
        "--gen",
        "identity",
        "--m",
        "3",
        "--n",
        "3",
        "--k",
        "1",
        "--r",
        "1",
        "--samples",
        "50",
        "--seed",
        "5",
    ];
    let a = volcur(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let mut parts = line.split(' ');
        let i = parts.next().unwrap().strip_prefix("I=").unwrap();
        let j = parts.next().unwrap().strip_prefix("J=").unwrap();
        assert_eq!(i, j, "{line}");
        assert_eq!(parts.next(), Some("err2=2"));
    }
    assert_eq!(volcur(&args).stdout, a.stdout);
}

#[test]
fn sample_frequencies_match_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let m = gaussian(5, 4, 2024);
    write_matrix_file(&path, &m).unwrap();
    let out = volcur(&[
        "sample",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "2",
        "--r",
        "3",
        "--samples",
        "100000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dist = build_distribution(&m, 3, 2).unwrap();
    let draws: Vec<usize> = stdout(&out)
        .lines()
        .map(|line| {
            let mut parts = line.split(' ');
            let i = IndexSet::parse(parts.next().unwrap().strip_prefix("I=").unwrap(), 5).unwrap();
            let j = IndexSet::parse(parts.next().unwrap().strip_prefix("J=").unwrap(), 4).unwrap();
            dist.index_of(&i, &j).unwrap()
        })
        .collect();
    assert_eq!(draws.len(), 100_000);
    assert!(total_variation(&dist.probabilities(), &draws) <= 0.02);
}

#[test]
fn sample_on_degenerate_input_exits_2() {
    let out = volcur(&[
        "sample",
        "--gen",
        "low-rank-plus-noise",
        "--m",
        "4",
        "--n",
        "3",
        "--rank",
        "1",
        "--k",
        "2",
        "--r",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn identities_default_run_passes() {
    let out = volcur(&["identities"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().skip(1).all(|l| l.contains("1000") && l.ends_with("pass")));
}

#[test]
fn identities_zero_trials_warns() {
    let out = volcur(&["identities", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn corrupted_identity_fails_with_seed() {
    let out = volcur(&["identities", "--trials", "10", "--seed", "100", "--corrupt", "add-row"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("add-row") && err.contains("instance seed 100"), "{err}");
    let csv = volcur(&["identities", "--trials", "10", "--format", "csv"]);
    assert!(stdout(&csv).starts_with("identity,checks,max_residual,tolerance,status\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(volcur(&[]).status.code(), Some(2));
    assert_eq!(volcur(&["bounds", "--k", "1"]).status.code(), Some(2));
    assert_eq!(
        volcur(&["bounds", "--gen", "gaussian", "--m", "3", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        volcur(&["bounds", "--gen", "identity", "--m", "3", "--n", "3", "--k", "2", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(volcur(&["--help"]).status.code(), Some(0));
}
