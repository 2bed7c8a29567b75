mod common;

use std::fs;

use pathmine::fixtures::{self, write_synthetic_dump, SyntheticSpec};
use pathmine::{load_index, Direction, Extractor, ExtractorConfig, Grounder, PathStats};
use pathmine_cli::ExtractionResult;

use common::{lady_index, path_str, request_line, run, run_with_stdin, synthetic_requests};

fn results(stdout: &[u8]) -> Vec<ExtractionResult> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("result line is JSON"))
        .collect()
}

#[test]
fn build_index_is_reproducible_and_queryable() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("sample.tsv");
    let spec = SyntheticSpec {
        seed: 3,
        concepts: 400,
        edges: 1_000,
        foreign_every: 0,
    };
    write_synthetic_dump(spec, fs::File::create(&dump).unwrap()).unwrap();
    let (a, b) = (dir.path().join("a.idx"), dir.path().join("b.idx"));
    for out in [&a, &b] {
        let r = run(&["build-index", "--input", path_str(&dump), "--output", path_str(out)]);
        assert!(r.status.success());
        let log = String::from_utf8_lossy(&r.stderr);
        assert!(log.contains("lines=1000"), "{log}");
    }
    let bytes = fs::read(&a).unwrap();
    assert!(bytes == fs::read(&b).unwrap(), "rebuilt index differs");
    let g = load_index(bytes.as_slice()).unwrap().graph;
    let w0 = g.find_concept("w0").unwrap();
    assert!(!g.neighbors(w0, Direction::Both).unwrap().is_empty());
}

#[test]
fn empty_dump_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("empty.tsv");
    fs::write(&dump, "").unwrap();
    let r = run(&[
        "build-index",
        "--input",
        path_str(&dump),
        "--output",
        path_str(&dir.path().join("x.idx")),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("no edges"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["extract"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"max_children_per_node": 1}"#).unwrap();
    let r = run(&[
        "explain",
        "--graph",
        path_str(&index),
        "--config",
        path_str(&config),
        "--context",
        "x",
        "--query",
        "y",
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn corrupt_index_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let mut bytes = fs::read(&index).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    fs::write(&index, bytes).unwrap();
    let r = run_with_stdin(&["extract", "--graph", path_str(&index)], b"");
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("checksum"));
}

#[test]
fn extract_reports_bad_lines_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let input = [
        request_line("lady", fixtures::LADY_CONTEXT, fixtures::LADY_QUERY),
        "{\"id\": \"half\", \"context\": ".into(),
        String::new(),
        request_line("none", fixtures::LADY_CONTEXT, "Why?"),
        request_line("empty", "", "lady"),
    ]
    .join("\n");
    let r = run_with_stdin(&["extract", "--graph", path_str(&index)], input.as_bytes());
    assert!(r.status.success());
    let out = results(&r.stdout);
    let ids: Vec<Option<&str>> = out.iter().map(|r| r.id.as_deref()).collect();
    assert_eq!(ids, [Some("lady"), None, Some("none"), Some("empty")]);
    assert!(out[0].error.is_none());
    assert!(out[1].error.as_deref().unwrap().starts_with("malformed request"));
    assert!(out[2].error.is_none() && out[2].paths.is_empty());
    assert_eq!(out[3].error.as_deref(), Some("context is empty"));

    let lady_their = "lady AtLocation church RelatedTo house RelatedTo child RelatedTo their";
    let joined: Vec<String> = out[0].paths.iter().map(|p| p.join(" ")).collect();
    assert!(joined.iter().any(|p| p == lady_their));
    for prefix in ["lady AtLocation church", "lady AtLocation church RelatedTo house"] {
        assert!(joined.iter().any(|p| p == prefix), "missing truncation {prefix}");
    }
}

#[test]
fn emitted_paths_are_valid_graph_walks() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("d.tsv");
    let spec = SyntheticSpec {
        seed: 21,
        concepts: 2_000,
        edges: 15_000,
        foreign_every: 0,
    };
    write_synthetic_dump(spec, fs::File::create(&dump).unwrap()).unwrap();
    let index = dir.path().join("d.idx");
    assert!(
        run(&["build-index", "--input", path_str(&dump), "--output", path_str(&index)])
            .status
            .success()
    );
    let g = load_index(fs::read(&index).unwrap().as_slice()).unwrap().graph;

    let requests = synthetic_requests(2_000, 40, 200);
    let r = run_with_stdin(
        &["extract", "--graph", path_str(&index), "--workers", "3"],
        requests.as_bytes(),
    );
    let mut checked = 0;
    for res in results(&r.stdout) {
        for tokens in &res.paths {
            assert!(tokens.len() >= 3 && tokens.len() % 2 == 1, "{tokens:?}");
            for hop in tokens[..].windows(3).step_by(2) {
                // multiword concepts are rendered with spaces
                let a = g.find_concept(&hop[0].replace(' ', "_")).unwrap();
                let b = g.find_concept(&hop[2].replace(' ', "_")).unwrap();
                let rel = g.find_relation(&hop[1]).unwrap();
                assert!(g.edges_between(a, b).contains(&rel), "{hop:?} is not an edge");
            }
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} paths checked");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let config = dir.path().join("c.json");
    fs::write(&config, r#"{"lang": "fr", "max_total_paths": 2}"#).unwrap();
    let input = request_line("x", fixtures::LADY_CONTEXT, fixtures::LADY_QUERY);
    let go = |extra: &[&str]| {
        let mut args = vec!["extract", "--graph", path_str(&index), "--config", path_str(&config)];
        args.extend_from_slice(extra);
        run_with_stdin(&args, input.as_bytes())
    };
    // the index is English, so the config alone is rejected
    assert_eq!(go(&[]).status.code(), Some(2));
    let r = go(&["--lang", "en"]);
    assert!(r.status.success());
    assert_eq!(results(&r.stdout)[0].stats.unwrap().full_paths, 2);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let input = request_line("x", fixtures::LADY_CONTEXT, fixtures::LADY_QUERY);
    let plain = run_with_stdin(&["extract", "--graph", path_str(&index)], input.as_bytes());
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("elapsed_us"));
    let timed = run_with_stdin(&["extract", "--graph", path_str(&index), "--timings"], input.as_bytes());
    assert!(results(&timed.stdout)[0].stats.unwrap().elapsed_us.is_some());
}

/// Pulls `(concept, c)` pairs out of explain output.
fn explained_scores(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| l.trim_start().starts_with('L'))
        .map(|l| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let c = fields.iter().find_map(|f| f.strip_prefix("c=")).unwrap();
            (fields[1].to_owned(), c.to_owned())
        })
        .collect()
}

#[test]
fn explain_shows_dropped_book_and_matches_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let r = run(&[
        "explain",
        "--graph",
        path_str(&index),
        "--context",
        fixtures::LADY_CONTEXT,
        "--query",
        fixtures::LADY_QUERY,
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let book = text.lines().find(|l| l.contains(" book ")).unwrap();
    assert!(book.ends_with("dropped") && book.contains("c=0.326"), "{book}");
    assert!(text.contains("lady AtLocation church RelatedTo house RelatedTo child RelatedTo their"));

    // same scores as the library path, in the same depth-first order
    let g = fixtures::lady_graph();
    let ex = Extractor::new(
        &g,
        PathStats::compute(&g).unwrap(),
        Grounder::default(),
        ExtractorConfig::default(),
    )
    .unwrap();
    let out = ex.extract(fixtures::LADY_CONTEXT, fixtures::LADY_QUERY, 0).unwrap();
    let st = &out.trees[0].scored;
    let shown = explained_scores(&text);
    // the dropped children (book, person) are leaves, so every node is shown
    assert_eq!(shown.len(), st.tree.len());
    for (concept, c) in &shown {
        let matches = st
            .tree
            .node_ids()
            .filter(|&n| g.surface(st.tree.node(n).concept) == concept)
            .any(|n| format!("{:.6}", st.c_score(n)) == *c);
        assert!(matches, "{concept} c={c} not among extraction scores");
    }
}

#[test]
fn explain_root_only_and_no_concepts() {
    let dir = tempfile::tempdir().unwrap();
    let index = lady_index(dir.path());
    let idx = path_str(&index);
    let r = run(&[
        "explain",
        "--graph",
        idx,
        "--context",
        "the library was quiet",
        "--query",
        "lady",
    ]);
    assert!(String::from_utf8_lossy(&r.stdout).contains("no paths: lady has no grounded neighbor"));
    let r = run(&["explain", "--graph", idx, "--context", "lady", "--query", "why?"]);
    assert!(String::from_utf8_lossy(&r.stdout).contains("no paths: the query mentions no graph concept"));

    let req = dir.path().join("req.jsonl");
    fs::write(
        &req,
        format!(
            "\n{}\n",
            request_line("a", fixtures::LADY_CONTEXT, fixtures::LADY_QUERY)
        ),
    )
    .unwrap();
    let r = run(&["explain", "--graph", idx, "--input", path_str(&req)]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("selected paths (13)"));
}
