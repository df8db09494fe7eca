use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sqsieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqsieve"))
        .args(args)
        .env_remove("SQSIEVE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqsieve-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn every_subcommand_succeeds_on_small_input() {
    let cases: &[&[&str]] = &[
        &["spacing", "--Q", "3", "--N", "50"],
        &["conjecture", "--q-min", "1", "--q-max", "4", "--k", "3"],
        &["sieve-ratio", "--Q", "2", "--N", "8"],
        &["bounds", "--Q", "4", "--N", "64"],
        &["weyl", "--alpha", "3/11", "--k", "3", "--N", "30"],
        &["poisson", "--N", "7"],
        &["gauss", "--Q", "5"],
        &["transfer", "--Q", "4", "--N", "12", "--seed", "9"],
    ];
    for args in cases {
        let out = sqsieve(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let doc = json_of(&out);
        assert_eq!(doc["status"], "ok");
        assert_eq!(doc["tool"], "sqsieve");
        assert!(doc["wall_time_s"].is_number());
        assert!(doc["config"]["opts"].is_object());
    }
}

#[test]
fn spacing_window_two_is_isolated() {
    let doc = json_of(&sqsieve(&["spacing", "--Q", "2", "--k", "2", "--N", "1000"]));
    assert_eq!(doc["result"]["M"], 0);
    assert_eq!(doc["result"]["points"], 14);
}

#[test]
fn usage_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["table1", "--q-max", "0"],
        &["spacing", "--Q", "2"],
        &["spacing", "--Q", "0", "--N", "5"],
        &["sieve-ratio", "--Q", "40", "--N", "100000"],
        &["weyl", "--N", "5"],
        &["weyl", "--alpha", "1/0", "--N", "5"],
        &["gauss", "--Q", "2000"],
        &["frobnicate"],
        &["spacing", "--Q", "x", "--N", "5"],
        &["poisson", "--N", "3", "--format", "xml"],
    ];
    for args in cases {
        let out = sqsieve(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(sqsieve(&["--help"]).status.code(), Some(0));
    assert_eq!(sqsieve(&["--version"]).status.code(), Some(0));
}

#[test]
fn table_mismatch_exits_two_with_output() {
    // the reference row Q=2 is 0 while the strict two-sided count is 1
    let out = sqsieve(&["table1", "--q-min", "1", "--q-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Q,M\n1,0\n2,1\n"));
    assert!(text.lines().any(|l| l.starts_with("# status FAILED")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("assertion failed"));
}

#[test]
fn table_agreeing_range_exits_zero() {
    let out = sqsieve(&["table1", "--q-min", "1", "--q-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# sqsieve "));
    assert!(text.ends_with("Q,M\n1,0\n"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["sieve-ratio", "--Q", "2", "--N", "16", "--seed", "5"];
    let mut a = json_of(&sqsieve(&args));
    let mut b = json_of(&sqsieve(&args));
    a["wall_time_s"] = Value::Null;
    b["wall_time_s"] = Value::Null;
    assert_eq!(a, b);
    let t1 = sqsieve(&["transfer", "--Q", "3", "--N", "10", "--seed", "1", "--format", "csv"]);
    let t2 = sqsieve(&["transfer", "--Q", "3", "--N", "10", "--seed", "1", "--format", "csv"]);
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("# wall_time_s"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&t1), strip(&t2));
}

#[test]
fn cache_directory_is_populated_and_reused() {
    let dir = scratch("cache");
    let d = dir.to_str().unwrap();
    let first = sqsieve(&["conjecture", "--q-min", "2", "--q-max", "3", "--cache-dir", d]);
    assert_eq!(first.status.code(), Some(0));
    assert!(dir.join("s_q2_k2.bin").exists());
    assert!(dir.join("s_q3_k2.bin").exists());
    let second = sqsieve(&["conjecture", "--q-min", "2", "--q-max", "3", "--cache-dir", d]);
    assert_eq!(json_of(&first)["result"], json_of(&second)["result"]);

    // a corrupted entry is rebuilt rather than trusted
    std::fs::write(dir.join("s_q2_k2.bin"), b"garbage").unwrap();
    let third = sqsieve(&["conjecture", "--q-min", "2", "--q-max", "3", "--cache-dir", d]);
    assert_eq!(json_of(&first)["result"], json_of(&third)["result"]);

    let via_env = Command::new(env!("CARGO_BIN_EXE_sqsieve"))
        .args(["spacing", "--Q", "4", "--N", "64"])
        .env("SQSIEVE_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(0));
    assert!(dir.join("s_q4_k2.bin").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn out_flag_writes_file() {
    let dir = scratch("out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bounds.csv");
    let out = sqsieve(&["bounds", "--Q", "2", "--N", "16", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("bound,value,assertable"));
    assert!(text.contains("classical,3.200000000000e1,false"));
    let _ = std::fs::remove_dir_all(&dir);
}
