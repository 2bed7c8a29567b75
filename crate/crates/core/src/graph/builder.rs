use std::collections::{HashMap, HashSet};

use super::{ConceptId, Edge, KnowledgeGraph, Relation, RelationId};

/// Relations whose direction carries no meaning. `a -r-> b` and `b -r-> a`
/// are the same assertion for these and are stored once.
pub const SYMMETRIC_RELATIONS: &[&str] = &[
    "Antonym",
    "DistinctFrom",
    "EtymologicallyRelatedTo",
    "LocatedNear",
    "RelatedTo",
    "SimilarTo",
    "Synonym",
];

pub fn is_symmetric_relation(name: &str) -> bool {
    SYMMETRIC_RELATIONS.contains(&name)
}

/// Lowercases a concept surface and joins whitespace-separated words with `_`.
pub fn normalize_surface(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for (i, word) in raw.split_whitespace().enumerate() {
        if i > 0 {
            out.push('_');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Accumulates assertions and interns them into a [`KnowledgeGraph`].
#[derive(Debug)]
pub struct GraphBuilder {
    language: String,
    concept_ids: HashMap<String, u32>,
    surfaces: Vec<String>,
    relation_ids: HashMap<String, u32>,
    relation_names: Vec<String>,
    edges: Vec<(u32, u32, u32, f32)>,
    seen: HashSet<(u32, u32, u32)>,
}

impl GraphBuilder {
    pub fn new(language: impl Into<String>) -> Self {
        GraphBuilder {
            language: language.into(),
            concept_ids: HashMap::new(),
            surfaces: Vec::new(),
            relation_ids: HashMap::new(),
            relation_names: Vec::new(),
            edges: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Registers a concept without any edge. Returns `false` for an empty surface.
    pub fn add_concept(&mut self, surface: &str) -> bool {
        let surface = normalize_surface(surface);
        if surface.is_empty() {
            return false;
        }
        self.intern_concept(surface);
        true
    }

    /// Adds an assertion. Returns `false` when it duplicates one already
    /// present (for symmetric relations, in either orientation) or when a
    /// surface or the relation name is empty.
    pub fn add_edge(&mut self, start: &str, relation: &str, end: &str, weight: f32) -> bool {
        let start = normalize_surface(start);
        let end = normalize_surface(end);
        if start.is_empty() || end.is_empty() || relation.is_empty() {
            return false;
        }
        let s = self.intern_concept(start);
        let e = self.intern_concept(end);
        let r = match self.relation_ids.get(relation) {
            Some(&r) => r,
            None => {
                let r = self.relation_names.len() as u32;
                self.relation_names.push(relation.to_owned());
                self.relation_ids.insert(relation.to_owned(), r);
                r
            }
        };
        let key = if is_symmetric_relation(relation) {
            (s.min(e), r, s.max(e))
        } else {
            (s, r, e)
        };
        if !self.seen.insert(key) {
            return false;
        }
        self.edges.push((s, r, e, weight));
        true
    }

    fn intern_concept(&mut self, surface: String) -> u32 {
        if let Some(&id) = self.concept_ids.get(&surface) {
            return id;
        }
        let id = self.surfaces.len() as u32;
        self.concept_ids.insert(surface.clone(), id);
        self.surfaces.push(surface);
        id
    }

    pub fn build(self) -> KnowledgeGraph {
        let GraphBuilder {
            language,
            mut surfaces,
            relation_names,
            edges,
            ..
        } = self;

        let concept_map = sorted_remap(&surfaces);
        let relation_map = sorted_remap(&relation_names);

        let mut ordered: Vec<(u32, String)> = surfaces
            .drain(..)
            .enumerate()
            .map(|(old, s)| (concept_map[old], s))
            .collect();
        ordered.sort_unstable_by_key(|(id, _)| *id);
        let surfaces: Vec<String> = ordered.into_iter().map(|(_, s)| s).collect();

        let mut relations: Vec<Relation> = relation_names
            .into_iter()
            .enumerate()
            .map(|(old, name)| Relation {
                id: RelationId(relation_map[old]),
                symmetric: is_symmetric_relation(&name),
                name,
            })
            .collect();
        relations.sort_unstable_by_key(|r| r.id);

        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|(s, r, e, weight)| Edge {
                start: ConceptId(concept_map[s as usize]),
                relation: RelationId(relation_map[r as usize]),
                end: ConceptId(concept_map[e as usize]),
                weight,
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.start, e.relation, e.end));

        KnowledgeGraph::from_tables(language, surfaces, relations, edges)
    }
}

/// Maps each insertion index to its rank in lexicographic order.
fn sorted_remap(names: &[String]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_unstable_by(|&a, &b| names[a].cmp(&names[b]));
    let mut map = vec![0u32; names.len()];
    for (rank, old) in order.into_iter().enumerate() {
        map[old] = rank as u32;
    }
    map
}

impl KnowledgeGraph {
    /// Builds a graph straight from `(start, relation, end)` triples with unit weight.
    pub fn from_triples<'a, I>(language: &str, triples: I) -> KnowledgeGraph
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let mut builder = GraphBuilder::new(language);
        for (s, r, e) in triples {
            builder.add_edge(s, r, e, 1.0);
        }
        builder.build()
    }
}
