use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// Runs the binary with its result cache pointed into `dir`.
fn bsize(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsize"))
        .args(args)
        .env("BSIZE_CACHE", dir.join("cache.txt"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = bsize(dir, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn compute_small_pairs() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        ok(dir.path(), &["compute", "--n", "6", "--k", "3"]),
        "b(6,3) = 3\n"
    );
    assert_eq!(
        ok(dir.path(), &["compute", "--n", "10", "--k", "2"]),
        "b(10,2) = 6\n"
    );
    assert_eq!(
        ok(dir.path(), &["compute", "--n", "10", "--k", "8"]),
        "b(10,8) = 6\n"
    );
}

#[test]
fn no_base_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let o = bsize(dir.path(), &["compute", "--n", "3", "--k", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no base"));
    assert_eq!(
        bsize(dir.path(), &["compute", "--n", "3", "--k", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bsize(dir.path(), &["compute", "--n", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bsize(dir.path(), &["verify", "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_record() {
    let dir = TempDir::new().unwrap();
    let text = ok(dir.path(), &["compute", "--n", "8", "--k", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 8);
    assert_eq!(v["k"], 3);
    let b = v["b"].as_u64().unwrap();
    let trace = v["trace"].as_array().unwrap();
    assert!(v["method"].is_string());
    let last = trace.last().unwrap().as_array().unwrap();
    assert_eq!(last[0].as_u64(), Some(b));
    assert_ne!(last[1].as_str(), Some("0"));
    assert!(trace[..trace.len() - 1].iter().all(|s| s[1] == "0"));
}

#[test]
fn trace_lists_every_l() {
    let dir = TempDir::new().unwrap();
    let text = ok(dir.path(), &["compute", "--n", "6", "--k", "3", "--trace"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["h_1 = 0", "h_2 = 0", lines[2], "b(6,3) = 3"]);
    assert!(lines[2].starts_with("h_3 = ") && lines[2] != "h_3 = 0");
}

#[test]
fn table_formats() {
    let dir = TempDir::new().unwrap();
    let csv = ok(dir.path(), &["table", "--kmax", "5", "--format", "csv"]);
    assert!(csv.starts_with("n,k,b\n"));
    assert!(csv.lines().any(|l| l == "6,3,3"));
    assert!(csv.lines().any(|l| l == "10,5,4"));

    let text = ok(dir.path(), &["table", "--kmax", "3"]);
    assert_eq!(text, "n\\k 3\n  6 3\n");
    let filled = ok(
        dir.path(),
        &[
            "table",
            "--kmax",
            "3",
            "--nmax",
            "9",
            "--fill-closed-form",
            "--format",
            "csv",
        ],
    );
    assert!(filled.lines().any(|l| l == "9,3,4"));
    let dashed = ok(dir.path(), &["table", "--kmax", "3", "--nmax", "9"]);
    assert!(dashed.lines().last().unwrap().ends_with('-'));
}

#[test]
fn emissions_are_stable() {
    let dir = TempDir::new().unwrap();
    let csv = ok(
        dir.path(),
        &["table", "--kmax", "6", "--format", "csv", "--no-cache"],
    );
    let cached = ok(dir.path(), &["table", "--kmax", "6", "--format", "csv"]);
    assert_eq!(csv, cached);
    assert_eq!(
        cached,
        ok(dir.path(), &["table", "--kmax", "6", "--format", "csv"])
    );
    let json = ok(dir.path(), &["table", "--kmax", "6", "--format", "json"]);
    let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    let from_json: String = std::iter::once("n,k,b\n".to_string())
        .chain(
            records
                .iter()
                .map(|r| format!("{},{},{}\n", r["n"], r["k"], r["b"])),
        )
        .collect();
    assert_eq!(from_json, csv);
}

#[test]
fn table_matches_published_values() {
    golden_compare(8);
}

#[test]
#[ignore = "hours of single-core work"]
fn table_matches_published_values_in_full() {
    golden_compare(14);
}

fn golden_compare(kmax: u32) {
    let dir = TempDir::new().unwrap();
    let golden: BTreeSet<String> = include_str!("../../core/tests/data/table1.csv")
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1).unwrap().parse::<u32>().unwrap() <= kmax)
        .map(str::to_string)
        .collect();
    let kmax = kmax.to_string();
    let ours = ok(
        dir.path(),
        &["table", "--kmax", &kmax, "--format", "csv", "--no-cache"],
    );
    let ours: BTreeSet<String> = ours.lines().skip(1).map(str::to_string).collect();
    assert_eq!(ours, golden);
}

#[test]
fn cache_is_used_and_bypassed() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache.txt");
    ok(dir.path(), &["compute", "--n", "12", "--k", "4"]);
    let text = fs::read_to_string(&cache).unwrap();
    assert!(text.lines().any(|l| l == "12,4,5"), "{text}");
    // a planted value is served back, proving the lookup
    fs::write(&cache, "12,8,99\n").unwrap();
    assert_eq!(
        ok(dir.path(), &["compute", "--n", "12", "--k", "4"]),
        "b(12,4) = 99\n"
    );
    assert_eq!(
        ok(
            dir.path(),
            &["compute", "--n", "12", "--k", "4", "--no-cache"]
        ),
        "b(12,4) = 5\n"
    );
    assert_eq!(fs::read_to_string(&cache).unwrap(), "12,8,99\n");
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    let all = ok(dir.path(), &["verify", "--nmax", "6"]);
    assert!(all.lines().all(|l| !l.starts_with("FAIL")), "{all}");
    assert!(all.lines().any(|l| l.starts_with("PASS")));
    let base = ok(dir.path(), &["verify", "--suite", "base", "--nmax", "8"]);
    assert!(base.starts_with("PASS base"), "{base}");
    let graphs = ok(dir.path(), &["verify", "--suite", "graphs", "--nmax", "5"]);
    assert!(graphs.starts_with("PASS graphs"), "{graphs}");
}

#[test]
fn h_and_weights() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        ok(dir.path(), &["h", "--n", "6", "--k", "3", "--l", "2"]),
        "h_2(6,3) = 0\n"
    );
    let w = ok(dir.path(), &["weights", "--n", "3", "--k", "1"]);
    assert_eq!(w, "m\tw_m\n0\t2\n1\t-3\n3\t1\n");
    assert_eq!(w, ok(dir.path(), &["weights", "--n", "3", "--k", "2"]));
}

#[test]
fn bench_reports_partitions() {
    let dir = TempDir::new().unwrap();
    let text = ok(dir.path(), &["bench", "--n", "40", "--k", "8"]);
    assert!(text.contains("partitions: 37338 "), "{text}");
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("b(40,8) = "), "{text}");
}

#[test]
fn threads_do_not_change_results() {
    let dir = TempDir::new().unwrap();
    let run = |t: &str| {
        ok(
            dir.path(),
            &[
                "compute",
                "--n",
                "30",
                "--k",
                "7",
                "--threads",
                t,
                "--no-cache",
                "--trace",
            ],
        )
    };
    let one = run("1");
    for t in ["2", "3", "8"] {
        assert_eq!(run(t), one);
    }
}

#[test]
fn checkpoint_resume_and_corruption() {
    let dir = TempDir::new().unwrap();
    let cp = dir.path().join("cp.json");
    let cp_s = cp.to_str().unwrap();
    let first = ok(
        dir.path(),
        &[
            "bench",
            "--n",
            "30",
            "--k",
            "6",
            "--checkpoint",
            cp_s,
            "--checkpoint-every",
            "0",
        ],
    );
    assert!(fs::metadata(&cp).unwrap().len() > 0);
    let resumed = ok(
        dir.path(),
        &["bench", "--n", "30", "--k", "6", "--resume", cp_s],
    );
    assert_eq!(first.lines().last(), resumed.lines().last());
    assert!(
        resumed.contains("partitions: 5604 (5604 resumed"),
        "{resumed}"
    );

    fs::write(
        &cp,
        "{\"format\":\"bsize-weight-table\",\"version\":1,\"n\":",
    )
    .unwrap();
    let o = bsize(
        dir.path(),
        &["bench", "--n", "30", "--k", "6", "--resume", cp_s],
    );
    assert_eq!(o.status.code(), Some(6));
    let o = bsize(
        dir.path(),
        &[
            "bench",
            "--n",
            "30",
            "--k",
            "6",
            "--resume",
            dir.path().join("missing").to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(6));
}
