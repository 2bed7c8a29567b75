//! End-to-end extraction for one context/query pair.

use crate::error::Result;
use crate::graph::{ConceptId, KnowledgeGraph};
use crate::grounding::{GroundedPair, Grounder};
use crate::scoring::{score_tree, PathStats, ScoredTree};
use crate::selector::{select_and_realize, tree_rng, PathSelection, MAX_FULL_PATHS};
use crate::tree::{BuildConfig, TreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtractorConfig {
    pub build: BuildConfig,
    /// Cap on full paths across all trees of one pair.
    pub max_total_paths: Option<usize>,
}

/// One query concept's scored tree and what was selected from it.
#[derive(Debug, Clone)]
pub struct TreeReport {
    pub root: ConceptId,
    pub scored: ScoredTree,
    pub selection: PathSelection,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub pair: GroundedPair,
    pub trees: Vec<TreeReport>,
}

impl Extraction {
    /// Realized paths of all trees, in query order.
    pub fn paths(&self) -> impl Iterator<Item = &Vec<String>> {
        self.trees.iter().flat_map(|t| t.selection.realized.iter())
    }

    pub fn full_path_count(&self) -> usize {
        self.trees.iter().map(|t| t.selection.full_paths.len()).sum()
    }

    pub fn truncation_count(&self) -> usize {
        self.trees.iter().map(|t| t.selection.truncations.len()).sum()
    }
}

/// Shared, read-only extraction state. Safe to use from many threads.
#[derive(Debug, Clone)]
pub struct Extractor<'g> {
    graph: &'g KnowledgeGraph,
    stats: PathStats,
    grounder: Grounder,
    config: ExtractorConfig,
}

impl<'g> Extractor<'g> {
    pub fn new(
        graph: &'g KnowledgeGraph,
        stats: PathStats,
        grounder: Grounder,
        config: ExtractorConfig,
    ) -> Result<Self> {
        config.build.validate()?;
        stats.validate()?;
        Ok(Extractor {
            graph,
            stats,
            grounder,
            config,
        })
    }

    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.graph
    }

    pub fn stats(&self) -> &PathStats {
        &self.stats
    }

    pub fn config(&self) -> &ExtractorConfig {
        &self.config
    }

    pub fn ground(&self, context: &str, query: &str) -> GroundedPair {
        self.grounder.ground(context, query, self.graph)
    }

    /// Runs grounding, tree building, scoring and selection. `pair_index`
    /// seeds the relation choice so results do not depend on scheduling.
    pub fn extract(&self, context: &str, query: &str, pair_index: u64) -> Result<Extraction> {
        let pair = self.ground(context, query);
        let mut builder = TreeBuilder::new(self.graph, &pair, self.config.build)?;
        let mut budget = self.config.max_total_paths.unwrap_or(usize::MAX);
        let mut trees = Vec::with_capacity(pair.query_concepts.len());
        for (tree_index, &root) in pair.query_concepts.iter().enumerate() {
            let tree = builder.build(root)?;
            let scored = score_tree(tree, &pair, self.graph, &self.stats)?;
            let mut rng = tree_rng(self.config.build.rng_seed, pair_index, tree_index as u64);
            let selection = select_and_realize(&scored, self.graph, &mut rng, budget.min(MAX_FULL_PATHS))?;
            budget -= selection.full_paths.len();
            trees.push(TreeReport {
                root,
                scored,
                selection,
            });
        }
        Ok(Extraction { pair, trees })
    }
}
