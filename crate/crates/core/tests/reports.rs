//! Report files and the command-line contract.

use std::fs;
use std::process::Command;

use awplab::experiments::{emit_report, run, run_with_threads, ExperimentSpec, Kind, SeedRange};

fn small_oracle_spec() -> ExperimentSpec {
    ExperimentSpec::from_json(r#"{"kind":"oracle-compare","seeds":"0..30","params":{"n":7,"lambda":[0,1],"keep":2,"steps":3}}"#).unwrap()
}

#[test]
fn reports_are_byte_identical() {
    let spec = ExperimentSpec::default_for(Kind::Mogulskii);
    let result = run(&spec).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = emit_report(&result, a.path()).unwrap();
    emit_report(&run(&spec).unwrap(), b.path()).unwrap();
    for path in &first {
        let name = path.file_name().unwrap();
        assert_eq!(fs::read(path).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?} differs");
    }
    let svg = fs::read_to_string(a.path().join("rate-vs-delta.svg")).unwrap();
    assert!(svg.contains("pi^2/2") && svg.contains("stroke-dasharray"));
}

#[test]
fn empty_result_gives_header_only_csv() {
    let mut result = run(&small_oracle_spec()).unwrap();
    result.table.rows.clear();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&result, dir.path()).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("result.csv")).unwrap(), "seed,lambda,exact,exploration,verified\n");
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = small_oracle_spec();
    let one = run_with_threads(&spec, Some(1)).unwrap();
    let three = run_with_threads(&spec, Some(3)).unwrap();
    assert_eq!(one.table, three.table);
    assert_eq!(one.provenance, three.provenance);
}

#[test]
fn summary_carries_provenance() {
    let spec = small_oracle_spec();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&run(&spec).unwrap(), dir.path()).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["provenance"]["config_hash"], spec.hash());
    assert_eq!(summary["provenance"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(summary["seeds"], "0..30");
    assert_eq!(summary["passed"], true);
}

#[test]
fn cli_exit_codes_follow_predicates() {
    let bin = env!("CARGO_BIN_EXE_awplab");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("oracle.json");
    fs::write(&config, serde_json::to_string(&small_oracle_spec()).unwrap()).unwrap();

    let ok = Command::new(bin)
        .args(["oracle-compare", "--config", config.to_str().unwrap(), "--seeds", "5..15", "--threads", "2", "--out"])
        .arg(dir.path().join("ok"))
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("ok/result.csv").exists());

    // the corridor-rate monotonicity predicate does not hold, so the run reports failure
    let red = Command::new(bin).args(["mogulskii", "--out"]).arg(dir.path().join("red")).output().unwrap();
    assert_eq!(red.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&red.stdout).contains("FAIL scaled rate decreasing"));

    let drift = dir.path().join("drift.json");
    fs::write(&drift, r#"{"kind":"mogulskii","seeds":"0..1","params":{"delta":[5],"cells_per_unit":16,"tolerance":0.1,"require_decreasing":false,"typo":1}}"#).unwrap();
    let bad = Command::new(bin).args(["mogulskii", "--config", drift.to_str().unwrap()]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let wrong_kind = Command::new(bin).args(["theorem1", "--config", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(wrong_kind.status.code(), Some(2));
}

#[test]
fn seed_override_changes_hash_not_config() {
    let mut spec = small_oracle_spec();
    let before = spec.hash();
    spec.seeds = SeedRange::new(1, 31).unwrap();
    assert_ne!(spec.hash(), before);
    assert!(spec.validate().is_ok());
}
