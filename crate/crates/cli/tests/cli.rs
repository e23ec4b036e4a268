use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradetrust"))
        .current_dir(dir)
        .env_remove("TRADETRUST_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const PERSONAL: [&str; 10] = [
    "--name", "Ada", "--address", "1 St", "--phone", "555", "--city", "Lund", "--country", "SE",
];

fn register(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["register"];
    args.extend(PERSONAL);
    args.extend(extra);
    run(dir, &args)
}

#[test]
fn register_rate_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let high = [
        "--national-id", "X-1", "--bank", "B-1", "--business-phone", "1", "--business-address", "2 St",
        "--reference-account", "r", "--id-document", "i", "--registration-document", "g", "--signed-declaration",
    ];
    let o = register(d, &high);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("account 0"));
    assert!(register(d, &[]).status.success());

    let o = run(d, &["--format", "json", "opinion", "--buyer", "1", "--seller", "0", "--scope", "cars", "--price", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["display_score"], 30);
    assert_eq!(v["advisories"], serde_json::json!(["new_seller"]));

    let o = run(d, &["rate", "--rater", "1", "--ratee", "0", "--scope", "cars", "--value", "-1", "--cost", "10"]);
    assert!(o.status.success(), "{o:?}");
    let o = run(d, &["--format", "json", "opinion", "--buyer", "1", "--seller", "0", "--scope", "cars", "--price", "10", "--mode", "atc"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["display_score"], 0);
    assert_eq!(v["direct"]["value"], -1);

    let o = run(d, &["replay", "events.jsonl"]);
    assert!(stdout(&o).starts_with("2 accounts, 1 latest ratings"));
}

#[test]
fn domain_errors_exit_one_and_usage_errors_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let medium = ["--national-id", "X-1", "--bank", "B-1", "--business-phone", "1", "--business-address", "2 St"];
    assert!(register(d, &medium).status.success());
    let before = std::fs::read(d.join("events.jsonl")).unwrap();
    let dup = ["--national-id", "x 1", "--bank", "B-2", "--business-phone", "1", "--business-address", "2 St"];
    let o = register(d, &dup);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate identity"));
    assert_eq!(std::fs::read(d.join("events.jsonl")).unwrap(), before);

    let o = run(d, &["rate", "--rater", "0", "--ratee", "0", "--scope", "cars", "--value", "1", "--cost", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(d, &["rate", "--rater", "0"]).status.code(), Some(2));
    assert_eq!(run(d, &["compare", "x.json", "--variants", "nope"]).status.code(), Some(2));
    assert_eq!(run(d, &["simulate", "missing.json"]).status.code(), Some(1));
}

#[test]
fn config_file_changes_initial_trust() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"policy": {"low": 0.05, "medium": 0.2, "high": 0.4}}"#).unwrap();
    let o = run(d, &["--config", "cfg.json", "--format", "json", "register", "--name", "A", "--address", "a",
        "--phone", "1", "--city", "c", "--country", "SE"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tier"], "low");
    assert_eq!(v["initial_trust"], 0.05);
    std::fs::write(d.join("bad.json"), r#"{"rater_floor": 2.0}"#).unwrap();
    assert_eq!(run(d, &["--config", "bad.json", "replay", "events.jsonl"]).status.code(), Some(1));
}

#[test]
fn simulate_writes_report_and_replayable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scenario = repo().join("scenarios/attacks.json");
    let s = scenario.to_str().unwrap();
    let o = run(d, &["simulate", s, "--seed", "2", "--out", "r.json", "--trace", "t.jsonl"]);
    assert!(o.status.success(), "{o:?}");
    let again = run(d, &["simulate", s, "--seed", "2", "--out", "r2.json"]);
    assert!(again.status.success());
    assert_eq!(std::fs::read(d.join("r.json")).unwrap(), std::fs::read(d.join("r2.json")).unwrap());

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("r.json")).unwrap()).unwrap();
    let o = run(d, &["--format", "json", "replay", "t.jsonl"]);
    let replayed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(replayed["deals"], report["metrics"]["deals"]);
    assert_eq!(
        replayed["rejections"].as_array().unwrap().len() as u64,
        report["metrics"]["blocked_duplicate_registrations"].as_u64().unwrap()
    );
}

#[test]
fn compare_runs_sequential_and_parallel_alike() {
    let dir = tempfile::tempdir().unwrap();
    let s = repo().join("scenarios/onboarding.json");
    let s = s.to_str().unwrap();
    let seq = run(dir.path(), &["--format", "json", "compare", s, "--seeds", "3", "--sequential"]);
    let par = run(dir.path(), &["--format", "json", "compare", s, "--seeds", "3"]);
    assert!(seq.status.success());
    assert_eq!(seq.stdout, par.stdout);
    let one = run(dir.path(), &["compare", s, "--variants", "integrated,ebay"]);
    assert!(stdout(&one).contains("EbayBaseline vs Integrated"));
}

#[test]
fn stats_reproduce_the_survey_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = repo().join("data/new_seller_support.csv");
    let data = data.to_str().unwrap();
    let o = run(dir.path(), &["stats", "summarize", data]);
    let text = stdout(&o);
    assert!(text.contains("0.455769231") && text.contains("0.845512821") && text.contains("0.486538462"));
    let o = run(dir.path(), &["stats", "kruskal", data, "--reported-rank-sums", "1729.5,1467.5,3936"]);
    let text = stdout(&o);
    assert!(text.contains("REJECT H0"));
    assert!(text.contains("total 7133 (expected 7260): INCONSISTENT"));
    let o = run(dir.path(), &["--format", "json", "stats", "freq", data]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0][1]["counts"], serde_json::json!([0, 0, 6, 21, 13]));
}
