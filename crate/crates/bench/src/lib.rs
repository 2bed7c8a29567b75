//! Inputs for the pipeline benchmarks.

use pathmine::fixtures::{synthetic_context, write_synthetic_dump, SyntheticSpec};
use pathmine::{ingest_csv, KnowledgeGraph};

/// Ingests a generated graph with `edges` assertions over `concepts` nodes.
pub fn synthetic_graph(concepts: usize, edges: usize, seed: u64) -> KnowledgeGraph {
    let mut dump = Vec::new();
    write_synthetic_dump(
        SyntheticSpec {
            seed,
            concepts,
            edges,
            foreign_every: 0,
        },
        &mut dump,
    )
    .expect("write to memory");
    ingest_csv(dump.as_slice(), "en").expect("synthetic dump ingests").0
}

/// A question that grounds to the highest-degree synthetic concepts.
pub fn synthetic_query() -> &'static str {
    "what does w0 have to do with w1 and w2?"
}

pub fn context(concepts: usize, tokens: usize, seed: u64) -> String {
    synthetic_context(seed, concepts, tokens)
}
