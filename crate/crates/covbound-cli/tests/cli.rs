//! End-to-end tests of the covbound binary: flag validation, output
//! contracts, exit codes, and determinism.

use std::io::Write;
use std::process::{Command, Output};

use covbound::bounds::TailBound;
use covbound::montecarlo::ExceedanceReport;

fn covbound(args: &[&str]) -> Output {
    covbound_env(args, &[])
}

fn covbound_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_covbound"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn covbound")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn identity_csv(d: usize) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for i in 0..d {
        let row: Vec<&str> = (0..d).map(|j| if i == j { "1.0" } else { "0.0" }).collect();
        writeln!(f, "{}", row.join(",")).unwrap();
    }
    f.flush().unwrap();
    f
}

#[test]
fn bound_unit_spectrum_example() {
    let out = covbound(&["bound", "--spectrum", "1", "--theta", "2", "--n", "100"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let eq15 = text.lines().find(|l| l.starts_with("eq15")).unwrap();
    assert!(eq15.contains("0.322842712"), "{eq15}");
    assert!(eq15.contains("0.135335283"), "{eq15}"); // e^{-2}
}

#[test]
fn bound_delta_derives_theta_per_equation() {
    let file = identity_csv(5);
    let out = covbound(&[
        "bound",
        "--matrix",
        file.path().to_str().unwrap(),
        "--delta",
        "0.05",
        "--n",
        "200",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<TailBound> = serde_json::from_str(&stdout_of(&out)).unwrap();
    let eq15 = rows
        .iter()
        .find(|b| b.equation == covbound::bounds::Equation::Eq15)
        .unwrap();
    // theta = ln(d/delta) = ln(100)
    assert!((eq15.theta - 100.0_f64.ln()).abs() < 1e-12);
    assert!((eq15.prob_budget - 0.05).abs() < 1e-12);
    let eq17 = rows
        .iter()
        .find(|b| b.equation == covbound::bounds::Equation::Eq17)
        .unwrap();
    assert!((eq17.theta - 200.0_f64.ln()).abs() < 1e-12);
}

#[test]
fn bound_theta_zero_is_vacuous_with_zero_deviation() {
    let out = covbound(&[
        "bound",
        "--spectrum",
        "2,1",
        "--theta",
        "0",
        "--n",
        "50",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<TailBound> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(!rows.is_empty());
    for b in rows {
        assert_eq!(b.deviation, 0.0);
        assert!(b.vacuous);
        assert!(b.prob_budget >= 1.0);
    }
}

#[test]
fn bound_json_roundtrips() {
    let out = covbound(&[
        "bound",
        "--spectrum",
        "4,2,1",
        "--theta",
        "1.5",
        "--n",
        "300",
        "--format",
        "json",
    ]);
    let rows: Vec<TailBound> = serde_json::from_str(&stdout_of(&out)).unwrap();
    let reprinted = serde_json::to_string_pretty(&rows).unwrap();
    let reparsed: Vec<TailBound> = serde_json::from_str(&reprinted).unwrap();
    assert_eq!(rows, reparsed);
}

#[test]
fn bound_respects_equation_and_ell_selection() {
    let out = covbound(&[
        "bound",
        "--spectrum",
        "4,2,1",
        "--theta",
        "1",
        "--n",
        "100",
        "--equations",
        "eq18,eq20",
        "--ell",
        "2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<TailBound> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|b| b.ell == 2));
}

#[test]
fn plan_inverts_the_bound_example() {
    let out = covbound(&[
        "plan",
        "--spectrum",
        "1",
        "--theta",
        "2",
        "--eps-rel",
        "0.322843",
        "--equations",
        "eq15",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').next_back().unwrap(), "100");
}

#[test]
fn plan_huge_eps_needs_one_sample() {
    let out = covbound(&[
        "plan",
        "--spectrum",
        "1",
        "--theta",
        "2",
        "--eps-rel",
        "50",
        "--equations",
        "eq15",
        "--format",
        "csv",
    ]);
    let text = stdout_of(&out);
    assert_eq!(
        text.lines().nth(1).unwrap().split(',').next_back().unwrap(),
        "1"
    );
}

#[test]
fn plan_doubling_eps_never_increases_n() {
    let mut last: Option<u64> = None;
    for eps in ["0.05", "0.1", "0.2", "0.4", "0.8"] {
        let out = covbound(&[
            "plan",
            "--spectrum",
            "3,1",
            "--theta",
            "1.5",
            "--eps-rel",
            eps,
            "--equations",
            "eq15",
            "--format",
            "csv",
        ]);
        let text = stdout_of(&out);
        let n: u64 = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .next_back()
            .unwrap()
            .parse()
            .unwrap();
        if let Some(prev) = last {
            assert!(n <= prev, "eps {eps}: n {n} > previous {prev}");
        }
        last = Some(n);
    }
}

#[test]
fn verify_small_run_is_consistent_and_deterministic() {
    let args = [
        "verify",
        "--spectrum",
        "1,1",
        "--n",
        "40",
        "--trials",
        "600",
        "--seed",
        "42",
    ];
    let a = covbound(&args);
    assert!(a.status.success(), "exit {:?}", a.status);
    let b = covbound(&args);
    assert_eq!(a.stdout, b.stdout, "same seed must be byte-identical");
    assert!(stdout_of(&a).contains("CONSISTENT"));
    assert!(!stdout_of(&a).contains("VIOLATED"));
}

#[test]
fn verify_is_thread_count_invariant() {
    let args = [
        "verify",
        "--spectrum",
        "2,1",
        "--n",
        "25",
        "--trials",
        "500",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    let one = covbound_env(&args, &[("COVBOUND_THREADS", "1")]);
    let two = covbound_env(&args, &[("COVBOUND_THREADS", "2")]);
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn verify_csv_has_the_contract_columns() {
    let out = covbound(&[
        "verify",
        "--spectrum",
        "1",
        "--n",
        "10",
        "--trials",
        "200",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    let text = stdout_of(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "equation,theta,rate,ci_low,ci_high,bound,verdict"
    );
}

#[test]
fn verify_json_roundtrips_and_single_trial_never_violates() {
    let out = covbound(&[
        "verify",
        "--spectrum",
        "1,1",
        "--n",
        "10",
        "--trials",
        "1",
        "--seed",
        "1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let reports: Vec<ExceedanceReport> = serde_json::from_str(&stdout_of(&out)).unwrap();
    let reprinted = serde_json::to_string_pretty(&reports).unwrap();
    let reparsed: Vec<ExceedanceReport> = serde_json::from_str(&reprinted).unwrap();
    assert_eq!(reports, reparsed);
    assert!(reports
        .iter()
        .all(|r| r.verdict != covbound::montecarlo::Verdict::Violated));
}

#[test]
fn verify_single_theta_flag() {
    let out = covbound(&[
        "verify",
        "--spectrum",
        "1",
        "--n",
        "10",
        "--trials",
        "100",
        "--seed",
        "5",
        "--theta",
        "2.5",
        "--format",
        "json",
    ]);
    let reports: Vec<ExceedanceReport> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(reports.iter().all(|r| r.theta == 2.5));
}

#[test]
fn oracle_battery_passes_and_prints_canonical_xcx() {
    let out = covbound(&["oracle", "--p", "2..5", "--dim", "2", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(
        text.contains(r#"[{"coeff":2,"chain":3,"loops":[]},{"coeff":1,"chain":1,"loops":[2]}]"#)
    );
    assert!(text.contains("all checks passed"));
}

#[test]
fn oracle_single_p_and_matrix_file() {
    let file = identity_csv(2);
    let out = covbound(&[
        "oracle",
        "--matrix",
        file.path().to_str().unwrap(),
        "--p",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(v["checks"].as_array().unwrap().len() > 5);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_2() {
    // theta and delta are mutually exclusive.
    let out = covbound(&[
        "bound",
        "--spectrum",
        "1",
        "--theta",
        "1",
        "--delta",
        "0.1",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // one of them is required.
    let out = covbound(&["bound", "--spectrum", "1", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    // an input source is required.
    let out = covbound(&["bound", "--theta", "1", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    // matrix and spectrum are mutually exclusive.
    let out = covbound(&[
        "bound",
        "--matrix",
        "x.csv",
        "--spectrum",
        "1",
        "--theta",
        "1",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    // Nonexistent file.
    let out = covbound(&[
        "bound",
        "--matrix",
        "/nonexistent/m.csv",
        "--theta",
        "1",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // Not PSD.
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "1.0,2.0\n2.0,1.0").unwrap();
    f.flush().unwrap();
    let out = covbound(&[
        "bound",
        "--matrix",
        f.path().to_str().unwrap(),
        "--theta",
        "1",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));

    // Negative eigenvalue in an inline spectrum.
    let out = covbound(&["bound", "--spectrum", "1,-1", "--theta", "1", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));

    // Out-of-range p for the oracle.
    let out = covbound(&["oracle", "--p", "2..9"]);
    assert_eq!(out.status.code(), Some(2));

    // ell out of range.
    let out = covbound(&[
        "bound",
        "--spectrum",
        "2,1",
        "--theta",
        "1",
        "--n",
        "10",
        "--ell",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = covbound(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["bound", "plan", "verify", "oracle"] {
        assert!(stdout_of(&out).contains(sub));
    }
}

#[test]
fn matrix_json_and_spectrum_json_inputs() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"d": 2, "entries": [[2.0, 1.0], [1.0, 2.0]]}}"#).unwrap();
    f.flush().unwrap();
    let out = covbound(&[
        "bound",
        "--matrix",
        f.path().to_str().unwrap(),
        "--theta",
        "1",
        "--n",
        "100",
        "--equations",
        "eq15",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<TailBound> = serde_json::from_str(&stdout_of(&out)).unwrap();
    // eigenvalues (3,1): r = 4/3.
    let expected = covbound::bounds::deviation_factor_eq15(1.0, 100, 4.0 / 3.0).unwrap();
    assert!((rows[0].deviation - expected).abs() < 1e-12);

    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"eigenvalues": [3.0, 1.0]}}"#).unwrap();
    f.flush().unwrap();
    let out2 = covbound(&[
        "bound",
        "--matrix",
        f.path().to_str().unwrap(),
        "--theta",
        "1",
        "--n",
        "100",
        "--equations",
        "eq15",
        "--format",
        "json",
    ]);
    let rows2: Vec<TailBound> = serde_json::from_str(&stdout_of(&out2)).unwrap();
    assert!((rows2[0].deviation - rows[0].deviation).abs() < 1e-12);
}
