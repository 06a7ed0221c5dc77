//! End-to-end tests of the `mwgames` binary: every subcommand, every exit code, and the
//! reproducibility contract (identical invocations produce identical bytes).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigInt;
use serde_json::Value;

use mwgames_core::fixtures::{balance_game, balance_play_prefix};
use mwgames_core::format::game_from_str;
use mwgames_core::transforms::lossy;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("mwgames-cli-{}-{name}", std::process::id()))
}

fn mwgames(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwgames"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn solve_reports_the_drain_winner() {
    let out = mwgames(&["solve", fixture("drain.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["winner"], 2);
    assert_eq!(doc["certified"], true);
    assert_eq!(doc["method"], "fcb");
    assert_eq!(doc["format"], 1);
    assert_eq!(doc["manifest"]["command"], "solve");
    assert!(doc["manifest"]["input_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn solve_given_credit_certifies_inside_a_small_box() {
    let out = mwgames(&["solve", fixture("balance.json").to_str().unwrap(), "--credit", "2,1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["winner"], 1);
    assert_eq!(doc["certified"], true);
    let cap: u64 = doc["cap_used"].as_str().unwrap().parse().unwrap();
    assert!(cap <= 16, "winning box should stay small, got cap {cap}");
}

#[test]
fn solve_bounding_flips_the_balance_verdict() {
    let out = mwgames(&["solve", fixture("balance.json").to_str().unwrap(), "--bounding"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["winner"], 2);
    assert_eq!(doc["certified"], true);
}

#[test]
fn solve_dumps_a_strategy_table() {
    let path = scratch("strategy.txt");
    let out = mwgames(&[
        "solve",
        fixture("balance.json").to_str().unwrap(),
        "--mode",
        "fcb",
        "--dump-strategy",
        path.to_str().unwrap(),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["winner"], 1);
    assert_eq!(doc["witness_ref"], path.to_str().unwrap());
    let table = std::fs::read_to_string(&path).expect("table written");
    assert!(table.starts_with("winner: 1\n"));
    assert!(table.contains("=> edge"), "table lists Player-2 edge decisions");
    assert!(table.contains("=> colour"), "table lists colour choices");
    std::fs::remove_file(&path).ok();
}

#[test]
fn pareto_finds_the_balance_antichain() {
    let out = mwgames(&["pareto", fixture("balance.json").to_str().unwrap(), "--max-norm", "4"]);
    let doc = stdout_json(&out);
    let antichain: Vec<Vec<String>> =
        serde_json::from_value(doc["antichain"].clone()).expect("antichain decodes");
    assert_eq!(
        antichain,
        vec![
            vec!["0".to_string(), "3".to_string()],
            vec!["2".to_string(), "1".to_string()],
            vec!["4".to_string(), "0".to_string()],
        ]
    );
}

#[test]
fn bounds_prints_the_full_cap_decimal() {
    let out = mwgames(&["bounds", fixture("balance.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    let expected = BigInt::from(48).pow(128u32).to_string();
    assert_eq!(doc["b"], expected.as_str());
    assert_eq!(doc["b_digits"], expected.len() as u64);
    assert_eq!(doc["b_digits"], 216);
    assert_eq!(doc["certified"], true);
    assert_eq!(doc["levels"].as_array().unwrap().len(), 2);
    let level1 = &doc["levels"][0];
    assert_eq!(level1["soft"], BigInt::from(48).pow(32u32).to_string().as_str());
    assert_eq!(level1["slack"], BigInt::from(48).pow(16u32).to_string().as_str());
}

#[test]
fn transform_lossy_round_trips_through_the_file_format() {
    let out = mwgames(&["transform", fixture("balance.json").to_str().unwrap(), "--lossy"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).expect("UTF-8 game file");
    let produced = game_from_str(&text).expect("transform output parses as a game file");
    let expected = lossy(&balance_game()).unwrap();
    assert_eq!(produced, expected);
}

#[test]
fn transform_capped_chain_writes_a_valid_game() {
    let path = scratch("chain.json");
    let out = mwgames(&[
        "transform",
        fixture("balance.json").to_str().unwrap(),
        "--cap",
        "3",
        "--credit",
        "1,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["written"], path.to_str().unwrap());
    let text = std::fs::read_to_string(&path).expect("chain written");
    let g = game_from_str(&text).expect("chain parses");
    assert_eq!(g.vertex_count(), doc["vertices"].as_u64().unwrap() as usize);
    assert_eq!(g.edge_count(), doc["edges"].as_u64().unwrap() as usize);
    std::fs::remove_file(&path).ok();
}

#[test]
fn enumerate_lists_the_complete_small_universe() {
    let out = mwgames(&["enumerate", "--m", "1", "--dim", "2", "--plain"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16, "norm-1 planar universe has 16 colours");
    let mut sorted = lines.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), 16, "encodings are distinct");

    let doc = stdout_json(&mwgames(&["enumerate", "--m", "1", "--dim", "2"]));
    assert_eq!(doc["count"], 16);
    assert_eq!(doc["colours"].as_array().unwrap().len(), 16);
}

#[test]
fn simulate_replays_the_pinned_balance_prefix() {
    let path = scratch("trace.txt");
    let out = mwgames(&[
        "simulate",
        fixture("balance.json").to_str().unwrap(),
        "--steps",
        "6",
        "--seed",
        "0",
        "--p1",
        "threshold:0",
        "--p2",
        "counterless:vL=0,vR=1",
        "--trace",
        path.to_str().unwrap(),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["configurations"], 7);
    assert_eq!(doc["final_level"], serde_json::json!(["0", "1"]));

    let g = balance_game();
    let expected: Vec<String> =
        balance_play_prefix().iter().map(|c| c.display(&g)).collect();
    let trace = std::fs::read_to_string(&path).expect("trace written");
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines, expected.iter().map(String::as_str).collect::<Vec<_>>());
    std::fs::remove_file(&path).ok();
}

#[test]
fn simulate_automaton_checks_the_energy_identity() {
    let out = mwgames(&[
        "simulate",
        fixture("balance.json").to_str().unwrap(),
        "--steps",
        "25",
        "--seed",
        "7",
        "--p1",
        "automaton",
        "--p2",
        "random",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["identity_checks"], 25);
    assert_eq!(doc["bounds_certified"], true);
}

#[test]
fn crosscheck_runs_a_random_corpus_cleanly() {
    let out = mwgames(&["crosscheck", "--corpus", "random:5", "--seed", "0", "--depth", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("random:")).count(), 5);
    assert!(text.contains("5 instance(s), 0 contradiction(s)"));
    assert!(text.lines().any(|l| l.starts_with("manifest: {")));
}

#[test]
fn crosscheck_accepts_a_file_corpus() {
    let out = mwgames(&[
        "crosscheck",
        "--corpus",
        fixture("drain.json").to_str().unwrap(),
        "--depth",
        "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1 instance(s), 0 contradiction(s)"));
}

#[test]
fn export_dot_renders_the_graph() {
    let out = mwgames(&["export-dot", fixture("balance.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph game {"));
    assert!(text.contains("\"vL\" -> \"v0\""));
}

#[test]
fn validate_flags_a_sink_vertex_with_exit_two() {
    let path = scratch("sink.json");
    std::fs::write(
        &path,
        r#"{"format":1,"dimension":1,
            "vertices":[{"id":"a","owner":1},{"id":"b","owner":1}],
            "edges":[{"src":"a","dst":"b","weight":[1]}]}"#,
    )
    .unwrap();
    let out = mwgames(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).expect("document still printed");
    assert_eq!(doc["valid"], false);
    let violations = doc["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v.as_str().unwrap().contains("no outgoing edge")));
    std::fs::remove_file(&path).ok();
}

#[test]
fn validate_tables_index_vertices_and_edges() {
    let out = mwgames(&["validate", fixture("balance.json").to_str().unwrap(), "--tables"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["valid"], true);
    let vertices = doc["tables"]["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 3);
    assert_eq!(vertices[0]["id"], "v0");
    assert_eq!(vertices[0]["out_edges"][0]["position"], 0);
}

#[test]
fn replay_is_byte_identical() {
    let drain = fixture("drain.json");
    let solve = ["solve", drain.to_str().unwrap(), "--credit", "1,2", "--cap", "50"];
    assert_eq!(mwgames(&solve).stdout, mwgames(&solve).stdout);

    let balance = fixture("balance.json");
    let sim = [
        "simulate",
        balance.to_str().unwrap(),
        "--steps",
        "40",
        "--seed",
        "11",
        "--p1",
        "random",
        "--p2",
        "random",
    ];
    let first = mwgames(&sim);
    assert!(first.status.success());
    assert_eq!(first.stdout, mwgames(&sim).stdout);
}

#[test]
fn input_errors_exit_two() {
    let out = mwgames(&["solve", "/nonexistent/game.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let out = mwgames(&["solve", fixture("balance.json").to_str().unwrap(), "--mode", "bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mwgames(&[
        "simulate",
        fixture("balance.json").to_str().unwrap(),
        "--steps",
        "4",
        "--p1",
        "random",
        "--p2",
        "lift:extra",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budgets_exit_three() {
    let out = mwgames(&[
        "solve",
        fixture("balance.json").to_str().unwrap(),
        "--credit",
        "2,1",
        "--cap",
        "12",
        "--arena-budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
}
