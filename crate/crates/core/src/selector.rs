//! Path selection and realization.
//!
//! Starting at the root, each kept node keeps its two children with the
//! highest cumulative score, so a five-level tree yields at most 16
//! root-to-leaf paths. Every proper prefix of a selected path (at least one
//! hop) is emitted as well.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ConceptId, KnowledgeGraph, RelationId};
use crate::scoring::ScoredTree;
use crate::tree::NodeId;

pub const KEPT_CHILDREN: usize = 2;
pub const MAX_FULL_PATHS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectedPath {
    pub concepts: Vec<ConceptId>,
    pub relations: Vec<RelationId>,
    pub is_truncation: bool,
}

impl SelectedPath {
    pub fn hops(&self) -> usize {
        self.relations.len()
    }

    fn key(&self) -> (&[ConceptId], &[RelationId]) {
        (&self.concepts, &self.relations)
    }

    /// Whether `self` is a strict prefix of `other`.
    pub fn is_prefix_of(&self, other: &SelectedPath) -> bool {
        self.concepts.len() < other.concepts.len()
            && other.concepts.starts_with(&self.concepts)
            && other.relations.starts_with(&self.relations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathSelection {
    pub full_paths: Vec<SelectedPath>,
    pub truncations: Vec<SelectedPath>,
    /// Full paths followed by truncations, as alternating concept/relation tokens.
    pub realized: Vec<Vec<String>>,
}

/// The at most two children of `node` with the highest cumulative score,
/// best first; equal scores go to the lower concept id.
pub fn kept_children(st: &ScoredTree, node: NodeId) -> Vec<NodeId> {
    let mut children: Vec<NodeId> = st.tree.node(node).children().collect();
    children.sort_by(|&a, &b| {
        st.c_score(b)
            .total_cmp(&st.c_score(a))
            .then_with(|| st.tree.node(a).concept.cmp(&st.tree.node(b).concept))
    });
    children.truncate(KEPT_CHILDREN);
    children
}

/// Root-to-leaf paths of the kept subtree, in breadth-first order of leaves.
pub fn select_paths(st: &ScoredTree) -> Vec<SelectedPath> {
    let mut out = Vec::new();
    let mut frontier = vec![NodeId::ROOT];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for node in frontier {
            let kept = kept_children(st, node);
            if kept.is_empty() {
                if node != NodeId::ROOT {
                    out.push(tree_path(st, node));
                }
            } else {
                next.extend(kept);
            }
        }
        frontier = next;
    }
    debug_assert!(out.len() <= MAX_FULL_PATHS);
    out
}

fn tree_path(st: &ScoredTree, leaf: NodeId) -> SelectedPath {
    let ids = st.tree.path_to(leaf);
    SelectedPath {
        concepts: ids.iter().map(|&n| st.tree.node(n).concept).collect(),
        relations: ids[1..]
            .iter()
            .map(|&n| st.tree.node(n).incoming_relation.expect("non-root node has a relation"))
            .collect(),
        is_truncation: false,
    }
}

/// Proper prefixes (two concepts or more) of every path, each emitted once
/// and never repeating one of the input paths.
pub fn expand_subpaths(paths: &[SelectedPath]) -> Vec<SelectedPath> {
    let full: HashSet<_> = paths.iter().map(SelectedPath::key).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in paths {
        for len in 2..p.concepts.len() {
            let prefix = SelectedPath {
                concepts: p.concepts[..len].to_vec(),
                relations: p.relations[..len - 1].to_vec(),
                is_truncation: true,
            };
            if full.contains(&prefix.key()) || seen.contains(&prefix) {
                continue;
            }
            seen.insert(prefix.clone());
            out.push(prefix);
        }
    }
    out
}

/// Re-picks each hop's relation uniformly among those joining the two
/// concepts. The generator is only consulted for hops with a choice.
pub fn choose_relations<R: Rng + ?Sized>(p: &SelectedPath, g: &KnowledgeGraph, rng: &mut R) -> Result<SelectedPath> {
    let mut relations = Vec::with_capacity(p.relations.len());
    for pair in p.concepts.windows(2) {
        let options = g.edges_between(pair[0], pair[1]);
        let pick = match options.len() {
            0 => return Err(missing_edge(g, pair[0], pair[1])),
            1 => options[0],
            n => options[rng.random_range(0..n)],
        };
        relations.push(pick);
    }
    Ok(SelectedPath {
        concepts: p.concepts.clone(),
        relations,
        is_truncation: p.is_truncation,
    })
}

fn missing_edge(g: &KnowledgeGraph, a: ConceptId, b: ConceptId) -> Error {
    let name = |c: ConceptId| {
        g.concept(c)
            .map(|c| c.surface.to_owned())
            .unwrap_or_else(|_| c.to_string())
    };
    Error::MissingEdge {
        from: name(a),
        to: name(b),
    }
}

/// Alternating concept and relation tokens. Multiword concepts become one
/// token with their words separated by spaces; relations keep their name.
pub fn render_tokens(p: &SelectedPath, g: &KnowledgeGraph) -> Result<Vec<String>> {
    if p.concepts.is_empty() || p.relations.len() + 1 != p.concepts.len() {
        return Err(Error::Config("path must alternate concepts and relations".into()));
    }
    let mut out = Vec::with_capacity(p.concepts.len() * 2 - 1);
    for (i, &c) in p.concepts.iter().enumerate() {
        if i > 0 {
            let (prev, r) = (p.concepts[i - 1], p.relations[i - 1]);
            if !g.edges_between(prev, c).contains(&r) {
                return Err(missing_edge(g, prev, c));
            }
            out.push(g.relation_name(r).to_owned());
        }
        out.push(g.concept(c)?.surface.replace('_', " "));
    }
    Ok(out)
}

pub fn realize_tokens<R: Rng + ?Sized>(p: &SelectedPath, g: &KnowledgeGraph, rng: &mut R) -> Result<Vec<String>> {
    render_tokens(&choose_relations(p, g, rng)?, g)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one tree of one request, independent of scheduling.
pub fn tree_rng(seed: u64, pair_index: u64, tree_index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ pair_index) ^ tree_index);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Selects, picks relations for, expands and renders the paths of one tree,
/// keeping at most `max_full_paths` full paths. Truncations reuse the
/// relations picked for their full path.
pub fn select_and_realize<R: Rng + ?Sized>(
    st: &ScoredTree,
    g: &KnowledgeGraph,
    rng: &mut R,
    max_full_paths: usize,
) -> Result<PathSelection> {
    let full_paths = select_paths(st)
        .iter()
        .take(max_full_paths)
        .map(|p| choose_relations(p, g, rng))
        .collect::<Result<Vec<_>>>()?;
    let truncations = expand_subpaths(&full_paths);
    let realized = full_paths
        .iter()
        .chain(&truncations)
        .map(|p| render_tokens(p, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(PathSelection {
        full_paths,
        truncations,
        realized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{lady_graph, LADY_CONTEXT, LADY_QUERY};
    use crate::grounding::{GroundedPair, Grounder};
    use crate::scoring::{score_tree, PathStats};
    use crate::tree::{build_tree, tests::random_case, BuildConfig};
    use proptest::prelude::*;

    fn c(g: &KnowledgeGraph, s: &str) -> ConceptId {
        g.find_concept(s).unwrap()
    }

    fn r(g: &KnowledgeGraph, s: &str) -> RelationId {
        g.find_relation(s).unwrap()
    }

    fn scored(g: &KnowledgeGraph, gp: &GroundedPair, root: ConceptId) -> ScoredTree {
        let t = build_tree(root, gp, g, &BuildConfig::default()).unwrap();
        score_tree(t, gp, g, &PathStats::compute(g).unwrap()).unwrap()
    }

    fn path(g: &KnowledgeGraph, tokens: &[&str]) -> SelectedPath {
        SelectedPath {
            concepts: tokens.iter().step_by(2).map(|s| c(g, s)).collect(),
            relations: tokens.iter().skip(1).step_by(2).map(|s| r(g, s)).collect(),
            is_truncation: false,
        }
    }

    #[test]
    fn mother_keeps_daughter_and_married() {
        let g = lady_graph();
        let gp = Grounder::default().ground(
            "mother mother daughter daughter daughter married married book",
            "lady",
            &g,
        );
        let st = scored(&g, &gp, c(&g, "lady"));
        let mother = st
            .tree
            .root()
            .children()
            .find(|&n| st.tree.node(n).concept == c(&g, "mother"))
            .unwrap();
        let kept: Vec<&str> = kept_children(&st, mother)
            .into_iter()
            .map(|n| g.surface(st.tree.node(n).concept))
            .collect();
        assert_eq!(kept.len(), 2);
        assert!(kept.contains(&"daughter") && kept.contains(&"married"));
        let selected = select_paths(&st);
        assert!(selected.iter().all(|p| !p.concepts.contains(&c(&g, "book"))));
    }

    #[test]
    fn root_only_tree_selects_nothing() {
        let g = lady_graph();
        let gp = Grounder::default().ground("library", "lady", &g);
        let st = scored(&g, &gp, c(&g, "lady"));
        assert!(select_paths(&st).is_empty());
    }

    #[test]
    fn full_binary_tree_gives_sixteen_paths() {
        // each level-k concept has exactly two fresh neighbors of level k+1
        let mut triples = Vec::new();
        let mut names = vec!["r".to_owned()];
        let mut context = Vec::new();
        for _level in 0..4 {
            let mut next = Vec::new();
            for parent in &names {
                for side in ["a", "b"] {
                    let child = format!("{parent}{side}");
                    triples.push((parent.clone(), child.clone()));
                    next.push(child);
                }
            }
            context.extend(next.iter().cloned());
            names = next;
        }
        let g = KnowledgeGraph::from_triples("en", triples.iter().map(|(a, b)| (a.as_str(), "IsA", b.as_str())));
        let gp = Grounder::default().ground(&context.join(" "), "r", &g);
        let st = scored(&g, &gp, c(&g, "r"));
        let paths = select_paths(&st);
        assert_eq!(paths.len(), 16);
        assert!(paths.iter().all(|p| p.concepts.len() == 5));
    }

    #[test]
    fn lady_truncation() {
        let g = lady_graph();
        let full = path(
            &g,
            &[
                "lady",
                "AtLocation",
                "church",
                "RelatedTo",
                "house",
                "RelatedTo",
                "child",
                "RelatedTo",
                "their",
            ],
        );
        let subs = expand_subpaths(std::slice::from_ref(&full));
        let expected = path(
            &g,
            &[
                "lady",
                "AtLocation",
                "church",
                "RelatedTo",
                "house",
                "RelatedTo",
                "child",
            ],
        );
        assert!(subs.iter().any(|s| s.key() == expected.key() && s.is_truncation));
        assert_eq!(subs.len(), 3);
        assert_eq!(
            render_tokens(&full, &g).unwrap().join(" "),
            "lady AtLocation church RelatedTo house RelatedTo child RelatedTo their"
        );
    }

    #[test]
    fn two_concept_path_has_no_truncations() {
        let g = lady_graph();
        assert!(expand_subpaths(&[path(&g, &["lady", "AtLocation", "church"])]).is_empty());
    }

    #[test]
    fn shared_prefixes_emitted_once() {
        let g = lady_graph();
        let a = path(
            &g,
            &[
                "lady",
                "RelatedTo",
                "mother",
                "RelatedTo",
                "daughter",
                "RelatedTo",
                "child",
            ],
        );
        let b = path(&g, &["lady", "RelatedTo", "mother", "RelatedTo", "married"]);
        let subs = expand_subpaths(&[a.clone(), b.clone()]);
        // lady-mother is shared, lady-mother-daughter comes from a only
        assert_eq!(subs.len(), 2);
        let mut keys: Vec<_> = subs.iter().map(SelectedPath::key).collect();
        keys.dedup();
        assert_eq!(keys.len(), 2);
        assert!(subs.iter().all(|s| s.is_prefix_of(&a)));
    }

    #[test]
    fn single_relation_hops_ignore_seed() {
        let g = lady_graph();
        let p = path(&g, &["lady", "AtLocation", "church", "RelatedTo", "house"]);
        let a = realize_tokens(&p, &g, &mut tree_rng(1, 0, 0)).unwrap();
        let b = realize_tokens(&p, &g, &mut tree_rng(99, 7, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_relations_drawn_uniformly() {
        let g = KnowledgeGraph::from_triples("en", [("up", "RelatedTo", "down"), ("up", "Antonym", "down")]);
        let p = path(&g, &["up", "Antonym", "down"]);
        let mut rng = tree_rng(42, 0, 0);
        let draws = 10_000;
        let related = (0..draws)
            .filter(|_| realize_tokens(&p, &g, &mut rng).unwrap()[1] == "RelatedTo")
            .count();
        let share = related as f64 / draws as f64;
        assert!((share - 0.5).abs() <= 0.02, "share {share}");
    }

    #[test]
    fn corrupt_path_is_rejected() {
        let g = lady_graph();
        let bad = SelectedPath {
            concepts: vec![c(&g, "lady"), c(&g, "their")],
            relations: vec![r(&g, "RelatedTo")],
            is_truncation: false,
        };
        assert!(matches!(render_tokens(&bad, &g), Err(Error::MissingEdge { .. })));
        assert!(matches!(
            realize_tokens(&bad, &g, &mut tree_rng(0, 0, 0)),
            Err(Error::MissingEdge { .. })
        ));
    }

    #[test]
    fn multiword_concepts_stay_one_token() {
        let g = KnowledgeGraph::from_triples("en", [("ice_cream", "RelatedTo", "cone")]);
        let p = path(&g, &["ice_cream", "RelatedTo", "cone"]);
        assert_eq!(render_tokens(&p, &g).unwrap(), ["ice cream", "RelatedTo", "cone"]);
    }

    #[test]
    fn lady_end_to_end_selection() {
        let g = lady_graph();
        let gp = Grounder::default().ground(LADY_CONTEXT, LADY_QUERY, &g);
        let st = scored(&g, &gp, gp.query_concepts[0]);
        let sel = select_and_realize(&st, &g, &mut tree_rng(0, 0, 0), MAX_FULL_PATHS).unwrap();
        let lines: Vec<String> = sel.realized.iter().map(|t| t.join(" ")).collect();
        assert!(lines.contains(&"lady AtLocation church RelatedTo house RelatedTo child RelatedTo their".to_owned()));
        assert!(lines.contains(&"lady AtLocation church RelatedTo house RelatedTo child".to_owned()));
    }

    proptest! {
        #[test]
        fn selection_invariants(seed in any::<u64>(), rng_seed in any::<u64>()) {
            let (g, gp) = random_case(seed);
            let Ok(stats) = PathStats::compute(&g) else { return Ok(()) };
            for &q in &gp.query_concepts {
                let t = build_tree(q, &gp, &g, &BuildConfig::default()).unwrap();
                let st = score_tree(t, &gp, &g, &stats).unwrap();
                for id in st.tree.node_ids() {
                    let kept = kept_children(&st, id);
                    prop_assert!(kept.len() <= KEPT_CHILDREN);
                    // kept children carry the maximal cumulative scores
                    let mut all: Vec<f64> = st.tree.node(id).children().map(|n| st.c_score(n)).collect();
                    all.sort_by(|a, b| b.total_cmp(a));
                    let got: Vec<f64> = kept.iter().map(|&n| st.c_score(n)).collect();
                    prop_assert_eq!(&got[..], &all[..kept.len()]);
                }
                let sel = select_and_realize(&st, &g, &mut tree_rng(rng_seed, 0, 0), MAX_FULL_PATHS).unwrap();
                prop_assert!(sel.full_paths.len() <= MAX_FULL_PATHS);
                let mut expected = HashSet::new();
                for p in &sel.full_paths {
                    for len in 2..p.concepts.len() {
                        expected.insert((p.concepts[..len].to_vec(), p.relations[..len - 1].to_vec()));
                    }
                }
                let got: HashSet<_> = sel.truncations.iter().map(|t| (t.concepts.clone(), t.relations.clone())).collect();
                prop_assert_eq!(got.len(), sel.truncations.len());
                prop_assert_eq!(got, expected);
                for tokens in &sel.realized {
                    prop_assert!(tokens.len() % 2 == 1 && tokens.len() >= 3);
                }
                for p in sel.full_paths.iter().chain(&sel.truncations) {
                    let mut cs = p.concepts.clone();
                    cs.sort();
                    cs.dedup();
                    prop_assert_eq!(cs.len(), p.concepts.len());
                    prop_assert!(render_tokens(p, &g).is_ok());
                }
                let again = select_and_realize(&st, &g, &mut tree_rng(rng_seed, 0, 0), MAX_FULL_PATHS).unwrap();
                prop_assert_eq!(again, sel);
            }
        }
    }
}
