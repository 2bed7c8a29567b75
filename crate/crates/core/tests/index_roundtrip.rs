use pathmine::fixtures::{write_synthetic_dump, SyntheticSpec};
use pathmine::{ingest_csv, load_index, save_index, Direction, PathStats};

fn sample() -> Vec<u8> {
    let mut dump = Vec::new();
    let spec = SyntheticSpec {
        seed: 11,
        concepts: 3_000,
        edges: 10_000,
        foreign_every: 9,
    };
    write_synthetic_dump(spec, &mut dump).unwrap();
    dump
}

#[test]
fn ten_thousand_edge_sample_resaves_identically() {
    let (g, report) = ingest_csv(sample().as_slice(), "en").unwrap();
    assert_eq!(report.lines, 10_000);
    assert!(report.other_language > 1_000);
    assert_eq!(report.malformed, 0);
    let stats = PathStats::compute(&g).unwrap();

    let mut first = Vec::new();
    save_index(&g, Some(&stats), &mut first).unwrap();
    let loaded = load_index(first.as_slice()).unwrap();
    assert_eq!(loaded.graph, g);
    assert_eq!(loaded.stats, Some(stats));

    let mut second = Vec::new();
    save_index(&loaded.graph, loaded.stats.as_ref(), &mut second).unwrap();
    assert!(first == second, "re-saved index differs");

    for c in g.concepts().take(500) {
        assert_eq!(
            g.neighbors(c.id, Direction::Both).unwrap(),
            loaded.graph.neighbors(c.id, Direction::Both).unwrap()
        );
    }
}

#[test]
fn ingestion_is_deterministic() {
    let dump = sample();
    let (a, _) = ingest_csv(dump.as_slice(), "en").unwrap();
    let (b, _) = ingest_csv(dump.as_slice(), "en").unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    save_index(&a, None, &mut x).unwrap();
    save_index(&b, None, &mut y).unwrap();
    assert!(x == y);
}
