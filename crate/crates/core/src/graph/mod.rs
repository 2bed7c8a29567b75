//! Immutable, indexed concept graph.
//!
//! Concepts and relations are interned into dense ids. Concept ids follow the
//! lexicographic order of their surfaces and relation ids the order of their
//! names, so a graph built from the same set of assertions always gets the
//! same ids regardless of input order.
//!
//! Besides the forward (`start -> (relation, end)`) and reverse
//! (`end -> (relation, start)`) indices, the graph keeps an undirected
//! adjacency list with per-(neighbor, relation) edge multiplicities. All hop
//! queries used by path mining go through it.

mod builder;
mod index;
mod ingest;
mod walks;

use std::fmt;
use std::ops::Range;

pub use builder::{is_symmetric_relation, normalize_surface, GraphBuilder, SYMMETRIC_RELATIONS};
pub use index::{load_index, save_index, IndexFile, FORMAT_VERSION, MAGIC};
pub use ingest::{ingest_csv, parse_concept_uri, parse_relation_uri, IngestReport};

use crate::error::{Error, Result};

/// Dense handle of a concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub u32);

impl ConceptId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Dense handle of a relation type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationId(pub u32);

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Borrowed view of a concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Concept<'a> {
    pub id: ConceptId,
    pub surface: &'a str,
    pub language: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub id: RelationId,
    pub name: String,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub start: ConceptId,
    pub relation: RelationId,
    pub end: ConceptId,
    /// Assertion weight from the source dump. Not used for scoring.
    pub weight: f32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// One entry of the undirected adjacency list: `multiplicity` edges labelled
/// `relation` connect the owner to `concept`, in either orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AdjEntry {
    pub concept: ConceptId,
    pub relation: RelationId,
    pub multiplicity: u32,
}

/// Compressed sparse rows of edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct EdgeIndex {
    pub offsets: Vec<u64>,
    pub edges: Vec<u32>,
}

impl EdgeIndex {
    fn row(&self, row: usize) -> &[u32] {
        let start = self.offsets[row] as usize;
        let end = self.offsets[row + 1] as usize;
        &self.edges[start..end]
    }
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    language: String,
    surfaces: Vec<String>,
    relations: Vec<Relation>,
    edges: Vec<Edge>,
    fwd: EdgeIndex,
    rev: EdgeIndex,
    adj_offsets: Vec<usize>,
    adj: Vec<AdjEntry>,
}

impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.surfaces == other.surfaces
            && self.relations == other.relations
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.start == b.start
                    && a.relation == b.relation
                    && a.end == b.end
                    && a.weight.to_bits() == b.weight.to_bits()
            })
            && self.fwd == other.fwd
            && self.rev == other.rev
    }
}

impl KnowledgeGraph {
    /// Assembles a graph from already interned tables. Surfaces must be sorted
    /// and unique, relations sorted by name, edges sorted by
    /// `(start, relation, end)` without duplicate triples.
    pub(crate) fn from_tables(
        language: String,
        surfaces: Vec<String>,
        relations: Vec<Relation>,
        edges: Vec<Edge>,
    ) -> Self {
        let n = surfaces.len();

        let mut fwd_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut rev_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            fwd_rows[e.start.index()].push(i as u32);
            rev_rows[e.end.index()].push(i as u32);
        }
        for row in &mut fwd_rows {
            row.sort_by_key(|&i| {
                let e = &edges[i as usize];
                (e.relation, e.end)
            });
        }
        for row in &mut rev_rows {
            row.sort_by_key(|&i| {
                let e = &edges[i as usize];
                (e.relation, e.start)
            });
        }
        let fwd = flatten(fwd_rows);
        let rev = flatten(rev_rows);

        let mut adj_rows: Vec<Vec<(ConceptId, RelationId)>> = vec![Vec::new(); n];
        for e in &edges {
            adj_rows[e.start.index()].push((e.end, e.relation));
            if e.start != e.end {
                adj_rows[e.end.index()].push((e.start, e.relation));
            }
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(edges.len() * 2);
        adj_offsets.push(0);
        for mut row in adj_rows {
            row.sort_unstable();
            let row_start = adj.len();
            for (concept, relation) in row {
                if adj.len() > row_start {
                    let last: &mut AdjEntry = adj.last_mut().unwrap();
                    if last.concept == concept && last.relation == relation {
                        last.multiplicity += 1;
                        continue;
                    }
                }
                adj.push(AdjEntry {
                    concept,
                    relation,
                    multiplicity: 1,
                });
            }
            adj_offsets.push(adj.len());
        }

        KnowledgeGraph {
            language,
            surfaces,
            relations,
            edges,
            fwd,
            rev,
            adj_offsets,
            adj,
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    /// Number of concepts, used as the size of the graph in probability estimates.
    pub fn node_count(&self) -> usize {
        self.surfaces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn concepts(&self) -> impl ExactSizeIterator<Item = Concept<'_>> + '_ {
        self.surfaces.iter().enumerate().map(|(i, s)| Concept {
            id: ConceptId(i as u32),
            surface: s,
            language: &self.language,
        })
    }

    pub fn concept(&self, id: ConceptId) -> Result<Concept<'_>> {
        self.check(id)?;
        Ok(Concept {
            id,
            surface: &self.surfaces[id.index()],
            language: &self.language,
        })
    }

    /// Surface of a concept. Panics on an invalid id.
    pub fn surface(&self, id: ConceptId) -> &str {
        &self.surfaces[id.index()]
    }

    pub fn relation(&self, id: RelationId) -> &Relation {
        &self.relations[id.index()]
    }

    pub fn relation_name(&self, id: RelationId) -> &str {
        &self.relations[id.index()].name
    }

    pub fn find_concept(&self, surface: &str) -> Option<ConceptId> {
        self.surfaces
            .binary_search_by(|s| s.as_str().cmp(surface))
            .ok()
            .map(|i| ConceptId(i as u32))
    }

    pub fn find_relation(&self, name: &str) -> Option<RelationId> {
        self.relations
            .binary_search_by(|r| r.name.as_str().cmp(name))
            .ok()
            .map(|i| RelationId(i as u32))
    }

    pub fn contains(&self, id: ConceptId) -> bool {
        id.index() < self.surfaces.len()
    }

    fn check(&self, id: ConceptId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::InvalidConcept(id))
        }
    }

    /// Edges leaving `c`, ordered by `(relation, end)`.
    pub fn out_edges(&self, c: ConceptId) -> Result<impl Iterator<Item = &Edge> + '_> {
        self.check(c)?;
        Ok(self.fwd.row(c.index()).iter().map(|&i| &self.edges[i as usize]))
    }

    /// Edges entering `c`, ordered by `(relation, start)`.
    pub fn in_edges(&self, c: ConceptId) -> Result<impl Iterator<Item = &Edge> + '_> {
        self.check(c)?;
        Ok(self.rev.row(c.index()).iter().map(|&i| &self.edges[i as usize]))
    }

    /// Neighbors of `c` as `(relation, concept)` pairs, deduplicated and
    /// sorted by concept id then relation id.
    pub fn neighbors(&self, c: ConceptId, direction: Direction) -> Result<Vec<(RelationId, ConceptId)>> {
        self.check(c)?;
        let mut out: Vec<(RelationId, ConceptId)> = match direction {
            Direction::Both => return Ok(self.adjacency(c).iter().map(|a| (a.relation, a.concept)).collect()),
            Direction::Out => self.out_edges(c)?.map(|e| (e.relation, e.end)).collect(),
            Direction::In => self.in_edges(c)?.map(|e| (e.relation, e.start)).collect(),
        };
        out.sort_unstable_by_key(|&(r, c)| (c, r));
        out.dedup();
        Ok(out)
    }

    /// Distinct neighbor concepts of `c` under bidirectional traversal, ascending.
    pub fn neighbor_concepts(&self, c: ConceptId) -> impl Iterator<Item = ConceptId> + '_ {
        let row = self.adjacency(c);
        row.iter()
            .enumerate()
            .filter(move |&(i, a)| i == 0 || row[i - 1].concept != a.concept)
            .map(|(_, a)| a.concept)
    }

    /// Number of distinct concepts adjacent to `c` in either direction.
    pub fn neighbor_count(&self, c: ConceptId) -> usize {
        self.neighbor_concepts(c).count()
    }

    /// Number of edges incident to `c`, a self-loop counted once.
    pub fn degree(&self, c: ConceptId) -> u64 {
        self.adjacency(c).iter().map(|a| u64::from(a.multiplicity)).sum()
    }

    /// Relations usable for a hop between `a` and `b` in either direction,
    /// sorted by relation id.
    pub fn edges_between(&self, a: ConceptId, b: ConceptId) -> Vec<RelationId> {
        if !self.contains(a) || !self.contains(b) {
            return Vec::new();
        }
        self.adjacency_to(a, b).iter().map(|e| e.relation).collect()
    }

    /// Number of edges joining `a` and `b` (either orientation), counting
    /// parallel edges with different relations separately.
    pub fn multiplicity(&self, a: ConceptId, b: ConceptId) -> u64 {
        if !self.contains(a) || !self.contains(b) {
            return 0;
        }
        self.adjacency_to(a, b).iter().map(|e| u64::from(e.multiplicity)).sum()
    }

    pub(crate) fn adjacency(&self, c: ConceptId) -> &[AdjEntry] {
        &self.adj[self.adj_offsets[c.index()]..self.adj_offsets[c.index() + 1]]
    }

    fn adjacency_to(&self, a: ConceptId, b: ConceptId) -> &[AdjEntry] {
        let row = self.adjacency(a);
        let range = equal_range(row, b);
        &row[range]
    }

    pub(crate) fn fwd_index(&self) -> &EdgeIndex {
        &self.fwd
    }

    pub(crate) fn rev_index(&self) -> &EdgeIndex {
        &self.rev
    }

    pub(crate) fn surfaces(&self) -> &[String] {
        &self.surfaces
    }
}

fn equal_range(row: &[AdjEntry], c: ConceptId) -> Range<usize> {
    let lo = row.partition_point(|a| a.concept < c);
    let hi = lo + row[lo..].partition_point(|a| a.concept == c);
    lo..hi
}

fn flatten(rows: Vec<Vec<u32>>) -> EdgeIndex {
    let mut offsets = Vec::with_capacity(rows.len() + 1);
    let mut edges = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    offsets.push(0);
    for row in rows {
        edges.extend(row);
        offsets.push(edges.len() as u64);
    }
    EdgeIndex { offsets, edges }
}

pub use walks::{walk_count, walk_counts, MAX_WALK_LENGTH};
