#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use pathmine::fixtures::{self, synthetic_context};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pathmine"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pathmine")
}

pub fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn pathmine");
    // feed stdin from another thread so a full stdout pipe cannot deadlock
    let mut pipe = child.stdin.take().unwrap();
    let input = stdin.to_vec();
    let feeder = std::thread::spawn(move || pipe.write_all(&input));
    let out = child.wait_with_output().unwrap();
    feeder.join().unwrap().unwrap();
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Writes the lady example dump and builds its index in `dir`.
pub fn lady_index(dir: &Path) -> PathBuf {
    let dump = dir.join("lady.tsv");
    std::fs::write(&dump, fixtures::triples_to_dump("en", fixtures::LADY_TRIPLES)).unwrap();
    let index = dir.join("lady.idx");
    let out = run(&["build-index", "--input", path_str(&dump), "--output", path_str(&index)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    index
}

pub fn request_line(id: &str, context: &str, query: &str) -> String {
    serde_json::json!({ "id": id, "context": context, "query": query }).to_string()
}

/// `n` requests over the synthetic vocabulary, with a malformed line mixed
/// in every 25 requests.
pub fn synthetic_requests(concepts: usize, n: usize, tokens: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        if i % 25 == 24 {
            out.push_str("{\"id\": \"broken\", \"context\": \n");
            continue;
        }
        let context = synthetic_context(i as u64, concepts, tokens);
        let query = format!("how is w{} tied to w{}?", i % 7, (i * 13) % 50);
        out.push_str(&request_line(&format!("r{i}"), &context, &query));
        out.push('\n');
    }
    out
}
