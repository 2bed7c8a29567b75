//! Candidate reasoning trees.
//!
//! A tree is rooted at a query concept (level 1) and grows four hops:
//!
//! * level 2: neighbors of the root that occur in the context,
//! * level 3: neighbors of a level-2 concept that occur in the context,
//! * level 4: any neighbor of a level-3 concept (outside knowledge),
//! * level 5: neighbors of a level-4 concept that occur in the context.
//!
//! A node without a qualifying neighbor stays in the tree as a leaf. No
//! root-to-leaf path visits the same concept twice. When more than
//! `max_children_per_node` candidates qualify, levels 2, 3 and 5 keep the
//! most frequent context concepts and level 4 keeps the highest-degree
//! neighbors; ties go to the lower concept id.
//!
//! Nodes are stored in breadth-first order and the children of a node
//! occupy a contiguous id range.

use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::{ConceptId, KnowledgeGraph, RelationId};
use crate::grounding::{GroundedPair, DEFAULT_MAX_NGRAM};

pub const MAX_LEVEL: usize = 5;
pub const OUTSIDE_KNOWLEDGE_LEVEL: u8 = 4;
pub const DEFAULT_MAX_CHILDREN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub concept: ConceptId,
    /// Relation of the hop from the parent; the lowest relation id when
    /// several connect the two concepts. `None` for the root.
    pub incoming_relation: Option<RelationId>,
    pub level: u8,
    pub parent: Option<NodeId>,
    first_child: u32,
    child_count: u32,
}

impl TreeNode {
    pub fn children(&self) -> impl ExactSizeIterator<Item = NodeId> + DoubleEndedIterator + Clone {
        (self.first_child..self.first_child + self.child_count).map(NodeId)
    }

    pub fn child_range(&self) -> Range<usize> {
        self.first_child as usize..(self.first_child + self.child_count) as usize
    }

    pub fn child_count(&self) -> usize {
        self.child_count as usize
    }

    pub fn is_leaf(&self) -> bool {
        self.child_count == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    pub max_children_per_node: usize,
    pub max_ngram: usize,
    pub rng_seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_children_per_node: DEFAULT_MAX_CHILDREN,
            max_ngram: DEFAULT_MAX_NGRAM,
            rng_seed: 0,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_children_per_node < 2 {
            return Err(Error::Config("max_children_per_node must be at least 2".into()));
        }
        if self.max_ngram == 0 {
            return Err(Error::Config("max_ngram must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTree {
    nodes: Vec<TreeNode>,
    config: BuildConfig,
}

impl PathTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Node ids from the root down to `id`, inclusive.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut at = id;
        while let Some(p) = self.node(at).parent {
            path.push(p);
            at = p;
        }
        path.reverse();
        path
    }

    pub fn path_concepts(&self, id: NodeId) -> Vec<ConceptId> {
        self.path_to(id).into_iter().map(|n| self.node(n).concept).collect()
    }

    /// All nodes of `level`, in breadth-first order.
    pub fn enumerate_levels(&self, level: usize) -> Result<Vec<NodeId>> {
        if !(1..=MAX_LEVEL).contains(&level) {
            return Err(Error::TreeLevel(level));
        }
        Ok(self
            .node_ids()
            .filter(|&n| self.node(n).level as usize == level)
            .collect())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level as usize).max().unwrap_or(0)
    }
}

/// Builds the trees for one grounded pair, caching per-concept candidate
/// lists across trees.
pub struct TreeBuilder<'a> {
    graph: &'a KnowledgeGraph,
    pair: &'a GroundedPair,
    config: BuildConfig,
    grounded: HashMap<ConceptId, Vec<(ConceptId, RelationId)>>,
    outside: HashMap<ConceptId, Vec<(ConceptId, RelationId)>>,
}

impl<'a> TreeBuilder<'a> {
    pub fn new(graph: &'a KnowledgeGraph, pair: &'a GroundedPair, config: BuildConfig) -> Result<Self> {
        config.validate()?;
        Ok(TreeBuilder {
            graph,
            pair,
            config,
            grounded: HashMap::new(),
            outside: HashMap::new(),
        })
    }

    pub fn build(&mut self, root: ConceptId) -> Result<PathTree> {
        if !self.graph.contains(root) {
            return Err(Error::InvalidConcept(root));
        }
        let mut nodes = vec![TreeNode {
            concept: root,
            incoming_relation: None,
            level: 1,
            parent: None,
            first_child: 0,
            child_count: 0,
        }];
        let cap = self.config.max_children_per_node;
        let mut ancestors = Vec::with_capacity(MAX_LEVEL);
        let mut i = 0;
        while i < nodes.len() {
            let level = nodes[i].level;
            if level as usize >= MAX_LEVEL {
                i += 1;
                continue;
            }
            ancestors.clear();
            let mut at = Some(NodeId(i as u32));
            while let Some(n) = at {
                ancestors.push(nodes[n.index()].concept);
                at = nodes[n.index()].parent;
            }
            let concept = nodes[i].concept;
            let candidates = if level + 1 == OUTSIDE_KNOWLEDGE_LEVEL {
                self.outside_candidates(concept)
            } else {
                self.grounded_candidates(concept)
            };
            let first = nodes.len() as u32;
            let mut count = 0;
            for &(child, relation) in candidates {
                if count == cap {
                    break;
                }
                if ancestors.contains(&child) {
                    continue;
                }
                count += 1;
                nodes.push(TreeNode {
                    concept: child,
                    incoming_relation: Some(relation),
                    level: level + 1,
                    parent: Some(NodeId(i as u32)),
                    first_child: 0,
                    child_count: 0,
                });
            }
            nodes[i].first_child = first;
            nodes[i].child_count = count as u32;
            i += 1;
        }
        Ok(PathTree {
            nodes,
            config: self.config,
        })
    }

    /// Neighbors of `c` mentioned in the context, most frequent first.
    fn grounded_candidates(&mut self, c: ConceptId) -> &[(ConceptId, RelationId)] {
        let (graph, pair) = (self.graph, self.pair);
        self.grounded.entry(c).or_insert_with(|| {
            let context = &pair.context_mentions;
            let row = graph.adjacency(c);
            let mut out: Vec<(ConceptId, RelationId)> = if row.len() <= context.len() {
                let mut v: Vec<_> = row
                    .iter()
                    .filter(|a| context.contains(a.concept))
                    .map(|a| (a.concept, a.relation))
                    .collect();
                // keep the first (lowest) relation per concept
                v.dedup_by_key(|(concept, _)| *concept);
                v
            } else {
                context
                    .mentions
                    .keys()
                    .filter_map(|&other| graph.edges_between(c, other).first().map(|&r| (other, r)))
                    .collect()
            };
            out.sort_by_key(|&(concept, _)| (std::cmp::Reverse(context.count(concept)), concept));
            out
        })
    }

    /// Highest-degree neighbors of `c`. Only as many as a node can keep after
    /// dropping its ancestors are retained.
    fn outside_candidates(&mut self, c: ConceptId) -> &[(ConceptId, RelationId)] {
        let graph = self.graph;
        let keep = self.config.max_children_per_node.saturating_add(MAX_LEVEL);
        self.outside.entry(c).or_insert_with(|| {
            let mut v: Vec<(u64, ConceptId, RelationId)> = Vec::new();
            let mut last = None;
            for a in graph.adjacency(c) {
                if last != Some(a.concept) {
                    v.push((graph.degree(a.concept), a.concept, a.relation));
                    last = Some(a.concept);
                }
            }
            let rank = |&(deg, concept, _): &(u64, ConceptId, RelationId)| (std::cmp::Reverse(deg), concept);
            if v.len() > keep {
                v.select_nth_unstable_by_key(keep, rank);
                v.truncate(keep);
            }
            v.sort_unstable_by_key(rank);
            v.into_iter().map(|(_, concept, r)| (concept, r)).collect()
        })
    }
}

/// Builds the tree rooted at `c1`.
pub fn build_tree(c1: ConceptId, gp: &GroundedPair, g: &KnowledgeGraph, cfg: &BuildConfig) -> Result<PathTree> {
    TreeBuilder::new(g, gp, *cfg)?.build(c1)
}
