//! End-to-end tests of the `evperp` binary: every subcommand against the
//! bundled fixtures, the override flags, manifest emission, byte-level
//! determinism across repeated invocations, and the exit-code contract
//! (0 success, 1 input error, 2 invariant violation).

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn evperp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evperp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid json")
}

fn read_json(path: &Path) -> Value {
    json(&fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
}

#[test]
fn threshold_lists_every_scenario_with_its_regime() {
    let out = evperp(&["threshold", &fixture("scenarios.evp")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = stdout(&out);
    assert!(table.contains("sports-match"));
    assert!(table.contains("4.285714"));
    assert!(table.contains("11.666667"));
    assert!(table.contains("30.000000"));
    assert!(table.contains("2040.000000"));
    assert!(table.contains("20100.000000"));
    assert!(table.contains("mixed"));
    assert!(table.contains("detection-dominated"));
    assert!(table.contains("cost-dominated"));
    // stdout-only invocations still emit a manifest, as a line on stderr
    assert!(stderr(&out).contains("\"command\":\"threshold\""));
}

#[test]
fn threshold_writes_csv_rows_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("thresholds.csv");
    let out = evperp(&[
        "threshold",
        &fixture("scenarios.evp"),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
    assert!(csv.starts_with("label,k_manip,capital,"));
    let manifest = read_json(&dir.path().join("thresholds.manifest.json"));
    assert_eq!(manifest["command"], "threshold");
    assert_eq!(manifest["artifact_version"], 1);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    assert!(outputs[0]["path"].as_str().unwrap().ends_with("thresholds.csv"));
    assert_eq!(outputs[0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn threshold_emits_valid_rows_even_when_one_fails() {
    let dir = tempfile::tempdir().unwrap();
    let deck = dir.path().join("deck.evp");
    fs::write(
        &deck,
        "[scenario good]\nk_manip = 1e5\ncapital = 5e4\npi_yes = 0.3\n\
         p_detected = 0.1\npenalty_factor = 10\n\n\
         [scenario certain]\nk_manip = 1\ncapital = 1\npi_yes = 1.0\n\
         p_detected = 0.1\npenalty_factor = 1\n",
    )
    .unwrap();
    let out = evperp(&["threshold", deck.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "a failed row is an input error");
    assert!(stdout(&out).contains("4.285714"), "valid row still emitted");
    let err = stderr(&out);
    assert!(err.contains("scenario `certain`"));
    assert!(err.contains("line 8"));
}

#[test]
fn threshold_rejects_an_empty_deck() {
    let dir = tempfile::tempdir().unwrap();
    let deck = dir.path().join("empty.evp");
    fs::write(&deck, "").unwrap();
    let out = evperp(&["threshold", deck.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no [scenario"));
}

#[test]
fn sweep_covers_the_full_axis_product() {
    let out = evperp(&["sweep", &fixture("scenarios.evp"), "--scenario", "sports-match"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let grid = stdout(&out);
    assert_eq!(
        grid.lines().next().unwrap(),
        "label,k,p_det,penalty,capital,pi_yes,l_star,regime"
    );
    assert_eq!(grid.lines().count(), 1 + 27, "3 x 3 x 3 axes");
    assert!(grid.contains("1.7857142857142858"), "cheapest corner");
}

#[test]
fn sweep_axis_flags_override_the_deck() {
    let out = evperp(&[
        "sweep",
        &fixture("scenarios.evp"),
        "--scenario",
        "sports-match",
        "--k-axis",
        "1e5",
        "--p-detected-axis",
        "0.1",
        "--penalty-axis",
        "5,10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 1 + 2);
}

#[test]
fn sweep_unknown_label_is_an_input_error() {
    let out = evperp(&["sweep", &fixture("scenarios.evp"), "--scenario", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nope"));
}

#[test]
fn simulate_reproduces_identical_artifacts_for_the_same_seed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = evperp(&[
            "simulate",
            &fixture("run_basic.evp"),
            "--seed",
            "7",
            "--reps",
            "3",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    // same (file name, content hash) pairs in the same order, even though
    // the repetitions fan out across worker threads
    let hashes = |dir: &Path| -> Vec<(String, String)> {
        read_json(&dir.join("manifest.json"))["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| {
                let path = PathBuf::from(o["path"].as_str().unwrap());
                (
                    path.file_name().unwrap().to_str().unwrap().to_string(),
                    o["sha256"].as_str().unwrap().to_string(),
                )
            })
            .collect()
    };
    let a = hashes(dir_a.path());
    assert_eq!(a, hashes(dir_b.path()));
    assert_eq!(a.len(), 3 + 1, "three runs plus summary.json");
    assert_eq!(a[0].0, "run-000007.json", "outputs ordered by seed");
    assert_eq!(a[1].0, "run-000008.json");
}

#[test]
fn simulate_halt_keeps_the_final_window_clear() {
    let out = evperp(&["simulate", &fixture("run_basic.evp"), "--reps", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = json(&stdout(&out));
    assert_eq!(summary["runs"], 5);
    assert_eq!(summary["halt_ticks"], 5);
    assert_eq!(summary["liquidations_final_window"], 0);
    assert_eq!(summary["runs_with_final_window_liquidations"], 0);
}

#[test]
fn simulate_overrides_swap_engine_and_halt() {
    let out = evperp(&[
        "simulate",
        &fixture("run_basic.evp"),
        "--engine",
        "e0",
        "--halt-ticks",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = json(&stdout(&out));
    assert_eq!(summary["engine"], "e0");
    assert_eq!(summary["halt_ticks"], 0);
    assert_eq!(summary["liquidations_preempted"], 0, "a flat floor cannot pre-empt");
}

#[test]
fn simulate_event_log_format_writes_csv_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = evperp(&[
        "simulate",
        &fixture("run_basic.evp"),
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let events = fs::read_to_string(dir.path().join("run-000000.events.csv")).unwrap();
    assert!(events.starts_with("tick,index,kind,id,amount"));
}

#[test]
fn attack_preemption_needs_the_dynamic_engine() {
    let path = fixture("attack_preemption.evp");
    let dynamic = evperp(&["attack", &path, "--seed", "3"]);
    assert_eq!(dynamic.status.code(), Some(0), "{}", stderr(&dynamic));
    let summary = json(&stdout(&dynamic));
    assert_eq!(summary["channel"], "pre-emption");
    assert_eq!(summary["channel_absent"], false);
    assert!(summary["preempted_positions"].as_u64().unwrap() > 0);

    let flat = evperp(&["attack", &path, "--seed", "3", "--engine", "e0"]);
    assert_eq!(flat.status.code(), Some(0), "{}", stderr(&flat));
    assert_eq!(json(&stdout(&flat))["channel_absent"], true);
}

#[test]
fn attack_halt_arb_differential_tracks_the_budget() {
    let funded = evperp(&[
        "attack",
        &fixture("attack_halt_arb.evp"),
        "--seed",
        "2",
        "--reps",
        "4",
    ]);
    assert_eq!(funded.status.code(), Some(0), "{}", stderr(&funded));
    let funded_summary = json(&stdout(&funded));
    assert!(funded_summary["differential_pnl_mean"].as_f64().unwrap() != 0.0);

    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.evp");
    let text = fs::read_to_string(fixture("attack_halt_arb.evp"))
        .unwrap()
        .replace("push_budget = 25", "push_budget = 0");
    fs::write(&zero, text).unwrap();
    let unfunded = evperp(&["attack", zero.to_str().unwrap(), "--seed", "2", "--reps", "4"]);
    assert_eq!(unfunded.status.code(), Some(0), "{}", stderr(&unfunded));
    let summary = json(&stdout(&unfunded));
    assert_eq!(summary["differential_pnl_mean"].as_f64().unwrap(), 0.0);
    assert_eq!(summary["net_pnl_total"].as_f64().unwrap(), 0.0);
}

#[test]
fn attack_without_a_halt_window_has_nothing_to_arbitrage() {
    let out = evperp(&["attack", &fixture("attack_halt_arb.evp"), "--halt-ticks", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&stdout(&out))["channel_absent"], true);
}

#[test]
fn attack_bad_debt_reports_the_pool_funded_share() {
    let dir = tempfile::tempdir().unwrap();
    let out = evperp(&[
        "attack",
        &fixture("attack_bad_debt.evp"),
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = json(&stdout(&out));
    assert_eq!(summary["pool_funded_share_mean"].as_f64().unwrap(), 0.6);
    assert_eq!(summary["net_pnl_mean"].as_f64().unwrap(), 5000.0);

    let outcome = read_json(&dir.path().join("attack-000007.json"));
    assert_eq!(outcome["attack"]["pool_funded_share"].as_f64().unwrap(), 0.6);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["seeds"], serde_json::json!([7]));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn matrix_prints_ten_channel_rows() {
    let out = evperp(&["matrix"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("channel,covers,leverage_effect"));
    assert_eq!(csv.lines().count(), 1 + 10);
    assert_eq!(csv.matches("framework-introduced").count(), 2);
}

#[test]
fn matrix_json_has_the_same_rows() {
    let out = evperp(&["matrix", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&stdout(&out)).as_array().unwrap().len(), 10);
}

#[test]
fn malformed_or_missing_input_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.evp");
    fs::write(&bad, "not a config\n").unwrap();
    let out = evperp(&["simulate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"));

    let missing = dir.path().join("absent.evp");
    let out = evperp(&["attack", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let no_subcommand = evperp(&[]);
    assert_eq!(no_subcommand.status.code(), Some(1));
}
