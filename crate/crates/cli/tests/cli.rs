use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn aflab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aflab"))
        .args(args)
        .current_dir(dir)
        .env_remove("AFLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn cycle_terminates_within_two_diameters() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "cycle:5", "--source", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "ok");
    assert!(v["summary"]["sending_rounds"].as_u64().unwrap() <= 2 * 2 + 1);
    // vertices at distance 2 hear the message in round 2
    assert_eq!(v["summary"]["broadcast_round"], 2);
}

#[test]
fn bridge_drop_blocks_broadcast() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "path:3", "--source", "0", "--fault", "drop:1-2@2"]);
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["fault_verdict"]["broadcast_ok"], false);
    assert_eq!(v["fault_verdict"]["uninformed"], serde_json::json!([2]));
}

#[test]
fn failed_link_on_triangle_loops_with_certificate() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "cycle:3", "--source", "0", "--fault", "unidir:2-1"]);
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["fault_verdict"]["terminated"], false);
    assert_eq!(v["certificate"]["kind"], "mixed_cycle");
}

#[test]
fn byzantine_silence_cuts_off_a_leaf() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "path:3", "--source", "0", "--fault", "byz:1@4"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["fault_verdict"]["uninformed"], serde_json::json!([2]));
}

#[test]
fn byzantine_strategy_file() {
    let d = TempDir::new().unwrap();
    // the centre of P_3 plays honestly: forwards to 2 in round 2
    std::fs::write(d.path().join("s.json"), r#"{"2": {"1": [2]}}"#).unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "path:3", "--source", "0", "--fault", "byz:1@4:s.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_embed_config_and_rerun_byte_for_byte() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "paw", "--source", "3", "--out-dir", "out", "--name", "paw", "--dot"]);
    assert_eq!(code(&o), 0);
    let out = d.path().join("out");
    let trace = std::fs::read_to_string(out.join("paw.jsonl")).unwrap();
    let header: Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(header["tool"], "aflab");
    assert_eq!(header["config"]["graph"], "paw");
    assert!(header["config"]["round_cap"].is_u64());
    let csv = std::fs::read_to_string(out.join("paw.csv")).unwrap();
    assert!(csv.starts_with("# {"));
    assert_eq!(csv.lines().count(), 3);
    assert!(out.join("paw_round_1.dot").is_file());

    std::fs::rename(&out, d.path().join("first")).unwrap();
    let o = aflab(d.path(), &["simulate", "--config", "first/paw.jsonl"]);
    assert_eq!(code(&o), 0);
    for f in ["paw.jsonl", "paw.csv", "paw_round_1.dot"] {
        let a = std::fs::read(d.path().join("first").join(f)).unwrap();
        let b = std::fs::read(out.join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn flags_override_config_file() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("c.json"), r#"{"graph": "cycle:4", "source": 0, "name": "file"}"#).unwrap();
    let o = aflab(d.path(), &["simulate", "--config", "c.json", "--name", "flag"]);
    assert_eq!(code(&o), 0);
    assert!(d.path().join("aflab_out/flag.jsonl").is_file());
    assert!(!d.path().join("aflab_out/file.jsonl").exists());
}

#[test]
fn out_dir_from_environment() {
    let d = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aflab"))
        .args(["simulate", "--graph", "cycle:4", "--source", "0"])
        .current_dir(d.path())
        .env("AFLAB_OUT_DIR", "envdir")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(d.path().join("envdir/trace.jsonl").is_file());
}

#[test]
fn variants_run() {
    let d = TempDir::new().unwrap();
    for p in ["parrot", "one_bit", "neighbourhood2", "random"] {
        let o = aflab(d.path(), &["simulate", "--graph", "complete:4", "--source", "0", "--protocol", p, "--seed", "7"]);
        assert_eq!(code(&o), 0, "{p}");
        assert_eq!(stdout_json(&o)["protocol"], p);
    }
}

#[test]
fn parrot_from_a_leaf_of_an_odd_graph_loops() {
    let d = TempDir::new().unwrap();
    // paw: triangle 0 1 2 with pendant 3 on 2
    let o = aflab(d.path(), &["simulate", "--graph", "paw", "--source", "3", "--protocol", "parrot"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["certificate"]["kind"], "recurrence");
}

#[test]
fn faults_are_af_only() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "cycle:4", "--source", "0", "--protocol", "parrot", "--fault", "unidir:0-1"]);
    assert_eq!(code(&o), 65);
}

#[test]
fn malformed_inputs() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("bad.txt"), "0 1\n1 one\n").unwrap();
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "bad.txt", "--source", "0"])), 64);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "wheel:3", "--source", "0"])), 64);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "cycle:4", "--source", "9"])), 64);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "cycle:4"])), 64);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--bogus"])), 64);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "cycle:4", "--source", "0", "--fault", "melt:1"])), 65);
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "cycle:4", "--source", "0", "--fault", "unidir:0-2"])), 65);
    // a message that is not sent in the named round
    assert_eq!(code(&aflab(d.path(), &["simulate", "--graph", "cycle:4", "--source", "0", "--fault", "drop:1-0@1"])), 65);
    assert_eq!(code(&aflab(d.path(), &["--help"])), 0);
    assert_eq!(code(&aflab(d.path(), &["--version"])), 0);
}

#[test]
fn graph_file_input() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("g.json"), r#"{"vertices": [0, 1, 2, 3], "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}"#).unwrap();
    let o = aflab(d.path(), &["simulate", "--graph", "g.json", "--source", "0"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn empty_configuration_is_balanced() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["check-balance", "--graph", "cycle:3", "--configuration", ""]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["balanced"], true);
}

#[test]
fn single_message_on_triangle_is_imbalanced() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["check-balance", "--graph", "cycle:3", "--configuration", "0-1", "--oracle"]);
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["balanced"], false);
    assert_eq!(v["witness"]["kind"], "cycle");
    let mut cyc: Vec<u64> = v["witness"]["cycle"]["vertices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    cyc.sort();
    assert_eq!(cyc, vec![0, 1, 2]);
    assert_eq!(v["oracle_agreement"], true);
}

#[test]
fn round_two_snapshot_of_pentagon_is_balanced() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("s.json"), "[[1, 2], [4, 3]]").unwrap();
    let o = aflab(d.path(), &["check-balance", "--graph", "cycle:5", "--configuration", "s.json", "--oracle"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["balanced"], true);
    assert_eq!(v["oracle_agreement"], true);
}

#[test]
fn absent_edge_in_configuration() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["check-balance", "--graph", "cycle:4", "--configuration", "0-2"]);
    assert_eq!(code(&o), 65);
}

#[test]
fn generate_formats() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["generate", "cycle:4", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
    let o = aflab(d.path(), &["generate", "path:3"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 2);
    let o = aflab(d.path(), &["generate", "star:3", "--format", "dot"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("graph"));
}

#[test]
fn small_suite_reports_json() {
    let d = TempDir::new().unwrap();
    let o = aflab(d.path(), &["suite", "reverse"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
    assert_eq!(code(&aflab(d.path(), &["suite", "nonsense"])), 64);
}
