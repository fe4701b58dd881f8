//! Exit codes and report statuses of the command line, one row per case.

use std::process::Command;

use knotpoints::cli::invoke;
use knotpoints::report::{RunReport, Status};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, Option<RunReport>) {
    let argv = std::iter::once("knotpoints").chain(args.iter().copied());
    match invoke(argv) {
        Ok(inv) => {
            assert_eq!(inv.report.exit_code(), inv.exit_code);
            (inv.exit_code, Some(inv.report))
        }
        Err((_, code)) => (code, None),
    }
}

#[test]
fn golden_exit_codes() {
    let (zero, zigzag, trunc) = (data("zero.json"), data("zigzag.json"), data("truncated.json"));
    let (iv, empty) = (data("interval.json"), data("empty.json"));
    let (c1, spec) = (data("bump_c1.json"), data("bump_spec.json"));
    let (s_ok, s_bad) = (data("scenario_pass.json"), data("scenario_fail.json"));
    let missing = data("missing.json");
    let cases: Vec<(Vec<&str>, i32, Option<Status>)> = vec![
        (vec!["nset", "--f", &zero, "--a", "1", "--variant", "plus_upper"], 0, Some(Status::Pass)),
        (vec!["nset", "--f", &zigzag, "--a", "2.5", "--out", "csv"], 0, Some(Status::Pass)),
        (vec!["nset", "--f", &c1, "--a", "1", "--tol", "1e-4"], 0, None),
        (vec!["nset", "--f", &zero, "--a", "1", "--variant", "sideways"], 2, Some(Status::Error)),
        (vec!["nset", "--f", &zero, "--a=-1"], 2, Some(Status::Error)),
        (vec!["nset", "--f", &trunc, "--a", "1"], 2, Some(Status::Error)),
        (vec!["nset", "--f", &missing, "--a", "1"], 2, Some(Status::Error)),
        (vec!["hausdorff", "--k", &iv, "--l", &empty], 0, Some(Status::Pass)),
        (vec!["comb", "check-s", "--scenario", &s_ok], 0, Some(Status::Pass)),
        (vec!["comb", "check-s", "--scenario", &s_bad], 1, Some(Status::Fail)),
        (vec!["comb", "check-y", "--scenario", &s_ok], 2, Some(Status::Error)),
        (vec!["bump", "make", "--spec", &spec], 0, Some(Status::Pass)),
        (vec!["bump", "mu", "--f", &c1, "--a", "1", "--b", "2", "--h", "0.01"], 0, Some(Status::Pass)),
        (vec!["jarnik-demo", "--flat", "--a", "1,2"], 0, Some(Status::Pass)),
        (vec!["jarnik-demo", "--grid", "10"], 2, Some(Status::Error)),
        (vec!["frobnicate"], 2, None),
    ];
    for (args, code, status) in cases {
        let (got, report) = run(&args);
        assert_eq!(got, code, "{args:?}");
        if let Some(s) = status {
            assert_eq!(report.unwrap_or_else(|| panic!("{args:?}: no report")).status, s, "{args:?}");
        }
    }
}

#[test]
fn csv_and_json_agree_on_the_set() {
    let f = data("zigzag.json");
    let json = invoke(["knotpoints", "nset", "--f", &f, "--a", "1", "--variant", "plus_upper"]).unwrap();
    let csv = invoke(["knotpoints", "nset", "--f", &f, "--a", "1", "--variant", "plus_upper", "--out", "csv"]).unwrap();
    assert_eq!(json.report.outputs, csv.report.outputs);
    assert_eq!(json.report.outputs["set"]["intervals"][0][0], "0.5");
    assert!(csv.stdout.lines().any(|l| l.starts_with("0.5")), "{}", csv.stdout);
}

#[test]
fn reports_are_reproducible() {
    let f = data("zigzag.json");
    let args = ["knotpoints", "nset", "--f", &f, "--a", "3"];
    assert_eq!(invoke(args).unwrap().report.to_json(), invoke(args).unwrap().report.to_json());
}

#[test]
fn game_run_then_verify() {
    let dir = std::env::temp_dir().join(format!("knotpoints-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let saved = dir.join("game.json");
    let saved = saved.to_str().unwrap();
    let (code, report) = run(&["game", "run", "--rounds", "1", "--seed", "2", "--report", saved]);
    assert_eq!(code, 0);
    assert_eq!(report.unwrap().status, Status::Pass);
    let (code, report) = run(&["game", "verify", "--state", saved]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert!(report.checks.iter().any(|c| c.name == "recorded verdicts reproduced" && c.verdict.is_pass()));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_knotpoints");
    let ok = Command::new(bin).args(["hausdorff", "--k", &data("interval.json"), "--l", &data("interval.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let report: RunReport = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report.outputs["distance"], "0");
    let bad = Command::new(bin).args(["comb", "check-s", "--scenario", &data("scenario_fail.json")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let input = Command::new(bin).args(["nset", "--f", &data("truncated.json"), "--a", "1"]).output().unwrap();
    assert_eq!(input.status.code(), Some(2));
}
