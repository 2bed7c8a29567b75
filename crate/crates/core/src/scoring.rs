//! Node scoring for reasoning trees.
//!
//! Context-grounded nodes (levels 2, 3, 5) are scored by term frequency.
//! Outside-knowledge nodes (level 4) are scored by normalized PMI between the
//! concept and the partial path leading to it, with
//!
//! ```text
//! P(c4, c1..c3) = walks through c1,c2,c3,c4 / walks visiting 4 concepts
//! P(c4)         = concepts adjacent to c4   / concepts in the graph
//! P(c1..c3)     = walks through c1,c2,c3    / walks visiting 3 concepts
//! ```
//!
//! where walks count parallel edges separately. Raw scores are softmaxed
//! among siblings, then accumulated bottom-up: a leaf keeps its sibling score
//! and an inner node adds the mean cumulative score of its two best children.

use crate::error::{Error, Result};
use crate::graph::{walk_counts, ConceptId, KnowledgeGraph};
use crate::grounding::{term_frequency, GroundedPair};
use crate::tree::{NodeId, PathTree, OUTSIDE_KNOWLEDGE_LEVEL};

/// Score given to an outside-knowledge node whose probabilities vanish.
pub const NPMI_SENTINEL: f64 = f64::MIN;

/// Graph-wide walk totals used as probability denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    pub walks_len3: u128,
    pub walks_len4: u128,
    pub node_count: u64,
}

impl PathStats {
    pub fn compute(g: &KnowledgeGraph) -> Result<Self> {
        let walks = walk_counts(g, 4)?;
        let stats = PathStats {
            walks_len3: walks[2],
            walks_len4: walks[3],
            node_count: g.node_count() as u64,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if self.walks_len3 == 0 || self.walks_len4 == 0 || self.node_count == 0 {
            return Err(Error::DegenerateStats);
        }
        Ok(())
    }
}

/// The three probabilities entering the PMI of an outside-knowledge hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProbabilities {
    /// P(c4, c1..c3)
    pub joint: f64,
    /// P(c4)
    pub target: f64,
    /// P(c1..c3)
    pub prefix: f64,
}

impl PathProbabilities {
    pub fn compute(path: [ConceptId; 4], g: &KnowledgeGraph, stats: &PathStats) -> Self {
        let [c1, c2, c3, c4] = path;
        let prefix_walks = u128::from(g.multiplicity(c1, c2)) * u128::from(g.multiplicity(c2, c3));
        let joint_walks = prefix_walks * u128::from(g.multiplicity(c3, c4));
        let reach = if g.contains(c4) { g.neighbor_count(c4) } else { 0 };
        PathProbabilities {
            joint: joint_walks as f64 / stats.walks_len4 as f64,
            target: reach as f64 / stats.node_count as f64,
            prefix: prefix_walks as f64 / stats.walks_len3 as f64,
        }
    }

    /// PMI divided by `-ln P(c4, c1..c3)`, clamped to `[-1, 1]`.
    ///
    /// `P(c4, c1..c3) = 1` yields `1`. A zero probability yields
    /// [`NPMI_SENTINEL`].
    pub fn npmi(&self) -> f64 {
        if self.joint <= 0.0 || self.target <= 0.0 || self.prefix <= 0.0 {
            return NPMI_SENTINEL;
        }
        if self.joint >= 1.0 {
            return 1.0;
        }
        self.unclamped_npmi().clamp(-1.0, 1.0)
    }

    /// The ratio before clamping. The three estimates come from different
    /// walk populations, so it exceeds 1 exactly when
    /// `joint² > target · prefix`.
    pub fn unclamped_npmi(&self) -> f64 {
        let pmi = self.joint.ln() - self.target.ln() - self.prefix.ln();
        pmi / -self.joint.ln()
    }
}

pub fn npmi(c1: ConceptId, c2: ConceptId, c3: ConceptId, c4: ConceptId, g: &KnowledgeGraph, stats: &PathStats) -> f64 {
    PathProbabilities::compute([c1, c2, c3, c4], g, stats).npmi()
}

/// A tree with per-node scores, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTree {
    pub tree: PathTree,
    pub raw: Vec<f64>,
    pub n_score: Vec<f64>,
    pub c_score: Vec<f64>,
}

impl ScoredTree {
    pub fn raw(&self, n: NodeId) -> f64 {
        self.raw[n.index()]
    }

    pub fn n_score(&self, n: NodeId) -> f64 {
        self.n_score[n.index()]
    }

    pub fn c_score(&self, n: NodeId) -> f64 {
        self.c_score[n.index()]
    }
}

/// Raw score of a node. The root scores 0.
pub fn raw_score(
    tree: &PathTree,
    node: NodeId,
    gp: &GroundedPair,
    g: &KnowledgeGraph,
    stats: &PathStats,
) -> Result<f64> {
    let n = tree.node(node);
    match n.level {
        1 => Ok(0.0),
        OUTSIDE_KNOWLEDGE_LEVEL => {
            let path = tree.path_concepts(node);
            Ok(npmi(path[0], path[1], path[2], path[3], g, stats))
        }
        _ => term_frequency(n.concept, &gp.context_mentions),
    }
}

/// Attaches raw scores; sibling and cumulative scores start at zero.
pub fn score_raw(tree: PathTree, gp: &GroundedPair, g: &KnowledgeGraph, stats: &PathStats) -> Result<ScoredTree> {
    let raw = tree
        .node_ids()
        .map(|n| raw_score(&tree, n, gp, g, stats))
        .collect::<Result<Vec<_>>>()?;
    let len = raw.len();
    Ok(ScoredTree {
        tree,
        raw,
        n_score: vec![0.0; len],
        c_score: vec![0.0; len],
    })
}

/// Softmax of raw scores within each sibling group. The root gets 1.
pub fn sibling_softmax(mut st: ScoredTree) -> ScoredTree {
    st.n_score[0] = 1.0;
    for node in st.tree.nodes() {
        let group = node.child_range();
        if group.is_empty() {
            continue;
        }
        let raw = &st.raw[group.clone()];
        let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let out = &mut st.n_score[group];
        let mut sum = 0.0;
        for (o, &r) in out.iter_mut().zip(raw) {
            *o = (r - max).exp();
            sum += *o;
        }
        for o in out.iter_mut() {
            *o /= sum;
        }
    }
    st
}

/// Bottom-up cumulative scores: `c = n` at leaves, otherwise `n` plus the
/// mean of the two highest child `c` scores (the only child's when there is
/// just one).
pub fn cumulative_score(mut st: ScoredTree) -> ScoredTree {
    // children always have larger ids than their parent
    for i in (0..st.tree.len()).rev() {
        let node = &st.tree.nodes()[i];
        let f = top_two_mean(&st.c_score[node.child_range()]);
        st.c_score[i] = st.n_score[i] + f.unwrap_or(0.0);
    }
    st
}

fn top_two_mean(scores: &[f64]) -> Option<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &s in scores {
        if s > best {
            second = best;
            best = s;
        } else if s > second {
            second = s;
        }
    }
    match scores.len() {
        0 => None,
        1 => Some(best),
        _ => Some((best + second) / 2.0),
    }
}

/// Raw, sibling and cumulative scoring in one pass.
pub fn score_tree(tree: PathTree, gp: &GroundedPair, g: &KnowledgeGraph, stats: &PathStats) -> Result<ScoredTree> {
    Ok(cumulative_score(sibling_softmax(score_raw(tree, gp, g, stats)?)))
}
