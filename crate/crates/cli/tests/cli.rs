// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lichk_core::engine::dimacs::parse_dimacs;
use lichk_core::engine::sat::{sat_solve, SatResult};
use lichk_core::engine::unroll::FrameMap;
use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn lichk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lichk")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verdicts_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        (vec!["--engine", "kind", "--bound", "8"], "producer_consumer_fixed.li", 0),
        (vec!["--bound", "20"], "producer_consumer_buggy.li", 1),
        (vec!["--bound", "50"], "router_v2.li", 2),
    ];
    for (extra, file, expected) in cases {
        let design = corpus(file);
        let mut args = vec!["check", "--model", "deadlock"];
        args.extend(extra);
        args.push(&design);
        let o = lichk(&args, d);
        assert_eq!(code(&o), expected, "{file}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn timeout_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let design = corpus("router_v2.li");
    let o = lichk(
        &["check", "--model", "deadlock", "--bound", "10000", "--timeout", "0.001", "--report", rep.to_str().unwrap(), &design],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert_eq!(report(&rep)["verdict"], "timeout");
}

#[test]
fn errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&lichk(&["check", "--model", "deadlock", "no_such_file.li"], d)), 4);
    assert_eq!(code(&lichk(&["check", "--model", "sideways", &corpus("router_v1.li")], d)), 4);
    assert_eq!(code(&lichk(&["check", "--model", "deadlock", "--nb-stall-cycles", "0", &corpus("router_v1.li")], d)), 4);
    assert_eq!(code(&lichk(&["check", "--model", "deadlock", "--timeout", "-1", &corpus("router_v1.li")], d)), 4);
    // No external ports to compare.
    let o = lichk(&["check", "--model", "invalid-input", &corpus("producer_consumer_buggy.li")], d);
    assert_eq!(code(&o), 4);
    std::fs::write(d.join("broken.li"), "process P { body { } ").unwrap();
    let o = lichk(&["parse", "broken.li"], d);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.li:"));
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let design = corpus("adder_nb_unguarded.li");
    let mut seen = Vec::new();
    for i in 0..2 {
        let rep = dir.path().join(format!("r{i}.json"));
        let o = lichk(
            &["check", "--model", "invalid-input", "--report", rep.to_str().unwrap(), "--trace", "t", &design],
            dir.path(),
        );
        assert_eq!(code(&o), 1);
        let mut v = report(&rep);
        assert!(v["wall_time_ms"].is_u64());
        v.as_object_mut().unwrap().remove("wall_time_ms");
        seen.push(v);
    }
    assert_eq!(seen[0], seen[1]);
    let v = &seen[0];
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"], "falsified");
    assert_eq!(v["check"], "invalid-input");
    assert_eq!(v["depth"], 1);
    assert_eq!(v["trace_path"], "t.tsv");
    assert_eq!(v["vcd_path"], "t.vcd");
    assert_eq!(v["config"]["engine"], "bmc");
    assert_eq!(v["config"]["nb_stall_cycles"], 8);
}

#[test]
fn trace_defaults_next_to_report_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("out");
    std::fs::create_dir(&sub).unwrap();
    let rep = sub.join("r.json");
    let design = corpus("producer_consumer_buggy.li");
    let o = lichk(&["check", "--model", "deadlock", "--report", rep.to_str().unwrap(), &design], dir.path());
    assert_eq!(code(&o), 1);
    let tsv = sub.join("producer_consumer_buggy.deadlock.tsv");
    let vcd = sub.join("producer_consumer_buggy.deadlock.vcd");
    assert!(tsv.exists() && vcd.exists());
    assert!(std::fs::read_to_string(&vcd).unwrap().contains("$timescale 1 ns $end"));
    let text = std::fs::read_to_string(&tsv).unwrap();
    assert!(text.starts_with("# lichk trace v1 model=deadlock"));

    let o = lichk(&["replay", "--trace", tsv.to_str().unwrap(), &design], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    // Same stimulus against the fixed design does not deadlock.
    let o = lichk(&["replay", "--trace", tsv.to_str().unwrap(), &corpus("producer_consumer_fixed.li")], dir.path());
    assert_eq!(code(&o), 1);

    // Dropping the final row leaves a prefix that never reaches the bad.
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(dir.path().join("short.tsv"), lines.join("\n") + "\n").unwrap();
    let o = lichk(&["replay", "--trace", "short.tsv", &design], dir.path());
    assert_ne!(code(&o), 0);
}

#[test]
fn trace_all_dumps_internal_buses() {
    let dir = tempfile::tempdir().unwrap();
    let design = corpus("producer_consumer_buggy.li");
    lichk(&["check", "--model", "deadlock", "--trace", "narrow", &design], dir.path());
    lichk(&["check", "--model", "deadlock", "--trace", "wide", "--trace-all", &design], dir.path());
    let cols = |f: &str| {
        std::fs::read_to_string(dir.path().join(f)).unwrap().lines().nth(1).unwrap().split('\t').count()
    };
    assert!(cols("wide.tsv") >= cols("narrow.tsv"));
}

#[test]
fn export_round_trips_and_matches_depth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let design = corpus("producer_consumer_buggy.li");
    // The buggy pair deadlocks first at depth 1 and stays deadlocked.
    for (bound, sat) in [("0", false), ("1", true)] {
        let o = lichk(
            &["export-dimacs", "--model", "deadlock", "--bound", bound, "--out", "q.cnf", "--varmap", "q.map", &design],
            d,
        );
        assert_eq!(code(&o), 0);
        let cnf = parse_dimacs(&std::fs::read_to_string(d.join("q.cnf")).unwrap()).unwrap();
        let map = FrameMap::parse(&std::fs::read_to_string(d.join("q.map")).unwrap()).unwrap();
        assert_eq!(map.frames.len(), bound.parse::<usize>().unwrap() + 1);
        assert!(map.frames.iter().flatten().all(|&v| v >= 1 && v as u32 <= cnf.num_vars));
        let r = sat_solve(&cnf);
        assert_eq!(matches!(r, SatResult::Sat(_)), sat, "bound {bound}");
    }
    let o = lichk(&["export-dimacs", "--model", "deadlock", &design], d);
    assert!(String::from_utf8_lossy(&o.stdout).contains("p cnf "));
}

#[test]
fn parse_prints_a_reparseable_design() {
    let dir = tempfile::tempdir().unwrap();
    let o = lichk(&["parse", &corpus("router_v1.li")], dir.path());
    assert_eq!(code(&o), 0);
    std::fs::write(dir.path().join("again.li"), &o.stdout).unwrap();
    let o2 = lichk(&["parse", "again.li"], dir.path());
    assert_eq!(o.stdout, o2.stdout);
}

#[test]
fn batch_reports_every_design_and_folds_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("batch.json");
    let fixed = corpus("producer_consumer_fixed.li");
    let buggy = corpus("producer_consumer_buggy.li");
    let o = lichk(
        &["check", "--model", "deadlock", "--engine", "kind", "--jobs", "2", "--report", rep.to_str().unwrap(), &fixed, &buggy],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    let v = report(&rep);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["verdict"], "proven");
    assert_eq!(arr[1]["verdict"], "falsified");

    let o = lichk(&["check", "--model", "deadlock", "--jobs", "2", &fixed, "missing.li"], dir.path());
    assert_eq!(code(&o), 4);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_lichk"))
        .args(["check", "--model", "deadlock", "--report", rep.to_str().unwrap(), &corpus("producer_consumer_buggy.li")])
        .current_dir(dir.path())
        .env("LICHK_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert_eq!(report(&rep)["config"]["seed"], 42);
    let o = Command::new(env!("CARGO_BIN_EXE_lichk"))
        .args(["check", "--model", "deadlock", &corpus("producer_consumer_buggy.li")])
        .current_dir(dir.path())
        .env("LICHK_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn combined_exit_prefers_errors_then_timeouts() {
    use lichk_cli::combined_exit;
    assert_eq!(combined_exit(&[0, 2, 1]), 1);
    assert_eq!(combined_exit(&[0, 3, 1]), 3);
    assert_eq!(combined_exit(&[4, 3]), 4);
    assert_eq!(combined_exit(&[0, 2]), 2);
    assert_eq!(combined_exit(&[0, 0]), 0);
}
