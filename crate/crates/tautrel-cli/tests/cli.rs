//! Command-line behavior: documented exit codes, wire formats, and
//! byte-identical output across worker counts and cache states.

use std::process::{Command, Output};

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tautrel"));
    cmd.args(args);
    cmd.env_remove("TAUTREL_CACHE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn graphs_counts_and_exit_codes() {
    let o = run(&["graphs", "--genus", "1", "--markings", "1"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 2);

    let o = run(&["graphs", "--genus", "0", "--markings", "3"], &[]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 1);

    let o = run(&["graphs", "--genus", "0", "--markings", "2"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pixton_term_counts_and_bad_requests() {
    let o = run(&["pixton", "--genus", "2", "--degree", "1"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);

    let o = run(
        &[
            "pixton", "--genus", "0", "--avec", "0,0,0", "--degree", "0",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 0);

    // degree bound violation
    let o = run(&["pixton", "--genus", "2", "--degree", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = run(
        &[
            "verify", "--genus", "2", "--degree", "1", "--method", "both",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));

    let o = run(
        &[
            "verify", "--genus", "2", "--degree", "1", "--perturb", "0",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["verify", "--genus", "1", "--avec", "1", "--degree", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn intersect_values() {
    let o = run(
        &["intersect", "tau", "--genus", "0", "--exponents", "0,0,0"],
        &[],
    );
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(&["intersect", "tau", "--genus", "1", "--exponents", "1"], &[]);
    assert_eq!(stdout(&o).trim(), "1/24");
    let o = run(
        &[
            "intersect", "kappa", "--genus", "1", "--psi", "0", "--kappa", "1",
        ],
        &[],
    );
    assert_eq!(stdout(&o).trim(), "1/24");
}

#[test]
fn criterion_10_determinism() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["graphs", "--genus", "2", "--markings", "0", "--max-codim", "2"],
        vec!["pixton", "--genus", "2", "--degree", "1"],
        vec!["verify", "--genus", "2", "--degree", "1", "--method", "both"],
        vec!["extract", "--genus", "1", "--avec", "1", "--degree", "1"],
        vec!["cohft-class", "--genus", "1", "--avec", "1"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("tau.cache");
    let cache_str = cache.to_str().unwrap();
    for cmd in &commands {
        let mut outputs = Vec::new();
        for workers in ["1", "4"] {
            let mut args = cmd.clone();
            args.push("--workers");
            args.push(workers);
            let o = run(&args, &[]);
            assert_eq!(o.status.code(), Some(0), "command {cmd:?}");
            outputs.push(o.stdout);
        }
        // cold cache write, then warm cache read
        for _ in 0..2 {
            let mut args = cmd.clone();
            args.push("--cache");
            args.push(cache_str);
            let o = run(&args, &[]);
            assert_eq!(o.status.code(), Some(0));
            outputs.push(o.stdout);
        }
        let first = &outputs[0];
        for other in &outputs[1..] {
            assert_eq!(first, other, "output differs for {cmd:?}");
        }
    }
    assert!(cache.exists(), "cache file written");
    println!("criterion 10: PASS (byte-identical output across workers and cache states)");
}
