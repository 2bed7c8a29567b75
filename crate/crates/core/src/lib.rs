//! Grounded multi-hop commonsense path mining.
//!
//! Given a context passage and a question, the engine grounds both into
//! concepts of a ConceptNet-style graph, grows one candidate reasoning tree
//! per question concept, scores the nodes (term frequency for context hops,
//! normalized PMI for the outside-knowledge hop), keeps the best two children
//! per node and emits the selected paths plus their prefixes as
//! concept/relation token sequences.
//!
//! ```
//! use pathmine::fixtures;
//! use pathmine::{Extractor, ExtractorConfig, Grounder, PathStats};
//!
//! let graph = fixtures::lady_graph();
//! let stats = PathStats::compute(&graph).unwrap();
//! let extractor = Extractor::new(&graph, stats, Grounder::default(), ExtractorConfig::default()).unwrap();
//! let out = extractor.extract(fixtures::LADY_CONTEXT, fixtures::LADY_QUERY, 0).unwrap();
//! assert!(out.paths().any(|p| p.join(" ") == "lady AtLocation church RelatedTo house RelatedTo child RelatedTo their"));
//! ```

pub mod batch;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod grounding;
pub mod pipeline;
pub mod scoring;
pub mod selector;
pub mod tree;

pub use error::{Error, IndexError, Result};
pub use graph::{
    ingest_csv, load_index, save_index, walk_count, Concept, ConceptId, Direction, Edge, GraphBuilder, IndexFile,
    IngestReport, KnowledgeGraph, Relation, RelationId,
};
pub use grounding::{
    extract_concepts, term_frequency, tokenize, ConceptMentionSet, GroundedPair, Grounder, Stopwords, TokenizedText,
};
pub use pipeline::{Extraction, Extractor, ExtractorConfig, TreeReport};
pub use scoring::{
    cumulative_score, npmi, raw_score, score_tree, sibling_softmax, PathProbabilities, PathStats, ScoredTree,
};
pub use selector::{
    expand_subpaths, realize_tokens, render_tokens, select_and_realize, select_paths, PathSelection, SelectedPath,
};
pub use tree::{build_tree, BuildConfig, NodeId, PathTree, TreeBuilder, TreeNode};
