use std::path::Path;
use std::process::{Command, Output};

use prodone::Certificate;

fn prodone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodone"))
        .args(args)
        .env("PRODONE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&prodone(&[])), 2);
    assert_eq!(code(&prodone(&["nonsense"])), 2);
    assert_eq!(code(&prodone(&["group", "--group", "3,8,2"])), 2);
    assert_eq!(
        code(&prodone(&["seq", "check", "--group", "3,7,2", "--seq", "(9,9)"])),
        2
    );
    assert_eq!(code(&prodone(&["--help"])), 0);
    assert_eq!(code(&prodone(&["--version"])), 0);
}

#[test]
fn group_census_json() {
    let out = prodone(&["group", "--group", "3,7,2"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 21);
    assert_eq!(v["commutator_order"], 7);
    assert_eq!(v["center_order"], 1);
    assert_eq!(v["element_orders"]["3"], 14);
}

#[test]
fn seq_check_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("atom.json");
    let atom = ["seq", "check", "--group", "3,7,2", "--seq", "(0,1)^12,(1,0),(2,5)"];
    let out = prodone(&[&atom[..], &["--expect", "atom", "--out", path_str(&file)]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(Certificate::read(&file).unwrap().kind.as_str(), "atom");
    assert_eq!(code(&prodone(&[&atom[..], &["--expect", "non-atom"]].concat())), 1);

    let split = prodone(&[
        "seq",
        "check",
        "--group",
        "3,7,2",
        "--seq",
        "(1,0),(2,0),(0,1),(0,6)",
        "--expect",
        "non-atom",
    ]);
    assert_eq!(code(&split), 0);
    let cert = Certificate::parse(std::str::from_utf8(&split.stdout).unwrap()).unwrap();
    // The lexicographically least product-one half comes first.
    assert_eq!(
        cert.payload["witness"],
        serde_json::json!(["(0,1),(0,6)", "(1,0),(2,0)"])
    );
}

#[test]
fn check_cert_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("d.json");
    let out = prodone(&[
        "davenport",
        "--group",
        "3,7,2",
        "--which",
        "small",
        "--out",
        path_str(&good),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&prodone(&["check-cert", path_str(&good)])), 0);

    let text = std::fs::read_to_string(&good).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replacen("\"value\": 8", "\"value\": 9", 1)).unwrap();
    assert_eq!(code(&prodone(&["check-cert", path_str(&bad)])), 1);

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&prodone(&["check-cert", path_str(&junk)])), 2);
    assert_eq!(
        code(&prodone(&["check-cert", path_str(&dir.path().join("missing.json"))])),
        2
    );
}

#[test]
fn interrupted_search_resumes_to_the_same_digest() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let base = ["search", "--group", "3,7,2", "--length", "9", "--k", "2"];
    let whole = prodone(&base);
    assert_eq!(code(&whole), 0);
    let reference = Certificate::parse(std::str::from_utf8(&whole.stdout).unwrap()).unwrap();

    let cut = prodone(
        &[
            &base[..],
            &[
                "--shards",
                "3",
                "--checkpoint-dir",
                path_str(&ck),
                "--stop-after",
                "500",
            ],
        ]
        .concat(),
    );
    assert_eq!(code(&cut), 2);
    assert!(cut.stdout.is_empty());
    let done = prodone(&[&base[..], &["--shards", "3", "--checkpoint-dir", path_str(&ck)]].concat());
    assert_eq!(code(&done), 0);
    let resumed = Certificate::parse(std::str::from_utf8(&done.stdout).unwrap()).unwrap();
    assert_eq!(resumed.payload["findings_digest"], reference.payload["findings_digest"]);
    assert_eq!(resumed.payload["counters"], reference.payload["counters"]);
}

#[test]
fn single_checkpoint_file_needs_one_shard() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.json");
    let args = [
        "search",
        "--group",
        "3,7,2",
        "--length",
        "8",
        "--k",
        "2",
        "--checkpoint",
        path_str(&file),
    ];
    assert_eq!(code(&prodone(&[&args[..], &["--shards", "2"]].concat())), 2);
    assert_eq!(code(&prodone(&[&args[..], &["--stop-after", "100"]].concat())), 2);
    assert_eq!(code(&prodone(&["check-cert", path_str(&file)])), 0);
    assert_eq!(code(&prodone(&args)), 0);
}

#[test]
fn elasticity_and_lemma_commands() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    assert_eq!(
        code(&prodone(&[
            "elasticity",
            "--group",
            "3,7,2",
            "--k",
            "3",
            "--out",
            path_str(&e)
        ])),
        0
    );
    let cert = Certificate::read(&e).unwrap();
    assert_eq!(cert.payload["lengths"], serde_json::json!([3, 16]));
    assert_eq!(code(&prodone(&["check-cert", path_str(&e)])), 0);

    let lemmas = dir.path().join("lemmas");
    let out = prodone(&[
        "lemmas",
        "--group",
        "3,7,2",
        "--lemma",
        "all",
        "--trials",
        "50",
        "--seed",
        "4",
        "--n",
        "5",
        "--out-dir",
        path_str(&lemmas),
    ]);
    assert_eq!(code(&out), 0);
    let files: Vec<_> = std::fs::read_dir(&lemmas).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 8);
    for f in files {
        assert_eq!(code(&prodone(&["check-cert", path_str(&f)])), 0, "{}", f.display());
    }
    assert_eq!(
        code(&prodone(&["lemmas", "--group", "3,7,2", "--lemma", "no-such-lemma"])),
        2
    );
}
