//! Binary index file.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "PMKG"  u32 version
//! section*           tag[4] u64 payload_len payload
//!   LANG             utf-8 language tag
//!   CNPT             u32 n, n × (u32 len, utf-8 surface)
//!   RELN             u32 n, n × (u32 len, utf-8 name, u8 symmetric)
//!   EDGE             u64 m, m × (u32 start, u32 relation, u32 end, f32 weight)
//!   FIDX, RIDX       u64 rows+1, (rows+1) × u64 offset, u64 m, m × u32 edge id
//!   STAT (optional)  u128 walks_len3, u128 walks_len4, u64 node_count
//!   "END\0"          empty
//! u64 FNV-1a checksum of every preceding byte
//! ```

use std::io::{Read, Write};

use super::{ConceptId, Edge, EdgeIndex, KnowledgeGraph, Relation, RelationId};
use crate::error::{IndexError, Result};
use crate::scoring::PathStats;

pub const MAGIC: &[u8; 4] = b"PMKG";
pub const FORMAT_VERSION: u32 = 1;

const TAG_LANG: &[u8; 4] = b"LANG";
const TAG_CONCEPTS: &[u8; 4] = b"CNPT";
const TAG_RELATIONS: &[u8; 4] = b"RELN";
const TAG_EDGES: &[u8; 4] = b"EDGE";
const TAG_FWD: &[u8; 4] = b"FIDX";
const TAG_REV: &[u8; 4] = b"RIDX";
const TAG_STATS: &[u8; 4] = b"STAT";
const TAG_END: &[u8; 4] = b"END\0";

/// Contents of an index file.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFile {
    pub graph: KnowledgeGraph,
    pub stats: Option<PathStats>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u128(&mut self, v: u128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f32(&mut self, v: f32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn section(&mut self, tag: &[u8; 4], body: impl FnOnce(&mut Encoder)) {
        self.buf.extend_from_slice(tag);
        let len_at = self.buf.len();
        self.u64(0);
        let start = self.buf.len();
        body(self);
        let len = (self.buf.len() - start) as u64;
        self.buf[len_at..len_at + 8].copy_from_slice(&len.to_le_bytes());
    }

    fn edge_index(&mut self, index: &EdgeIndex) {
        self.u64(index.offsets.len() as u64);
        for &o in &index.offsets {
            self.u64(o);
        }
        self.u64(index.edges.len() as u64);
        for &e in &index.edges {
            self.u32(e);
        }
    }
}

/// Serializes `g` (and optionally its path statistics). The output depends
/// only on the graph contents, so equal graphs produce identical bytes.
pub fn save_index<W: Write>(g: &KnowledgeGraph, stats: Option<&PathStats>, mut sink: W) -> Result<()> {
    let mut enc = Encoder { buf: Vec::new() };
    enc.buf.extend_from_slice(MAGIC);
    enc.u32(FORMAT_VERSION);
    enc.section(TAG_LANG, |e| e.buf.extend_from_slice(g.language().as_bytes()));
    enc.section(TAG_CONCEPTS, |e| {
        e.u32(g.node_count() as u32);
        for s in g.surfaces() {
            e.str(s);
        }
    });
    enc.section(TAG_RELATIONS, |e| {
        e.u32(g.relation_count() as u32);
        for r in g.relations() {
            e.str(&r.name);
            e.u8(u8::from(r.symmetric));
        }
    });
    enc.section(TAG_EDGES, |e| {
        e.u64(g.edge_count() as u64);
        for edge in g.edges() {
            e.u32(edge.start.0);
            e.u32(edge.relation.0);
            e.u32(edge.end.0);
            e.f32(edge.weight);
        }
    });
    enc.section(TAG_FWD, |e| e.edge_index(g.fwd_index()));
    enc.section(TAG_REV, |e| e.edge_index(g.rev_index()));
    if let Some(stats) = stats {
        enc.section(TAG_STATS, |e| {
            e.u128(stats.walks_len3);
            e.u128(stats.walks_len4);
            e.u64(stats.node_count);
        });
    }
    enc.section(TAG_END, |_| {});
    let checksum = fnv1a(&enc.buf);
    enc.u64(checksum);
    sink.write_all(&enc.buf)?;
    sink.flush()?;
    Ok(())
}

struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        let end = self.pos.checked_add(n).ok_or(IndexError::Truncated)?;
        let out = self.buf.get(self.pos..end).ok_or(IndexError::Truncated)?;
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, IndexError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u128(&mut self) -> Result<u128, IndexError> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }
    fn f32(&mut self) -> Result<f32, IndexError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn utf8(&mut self, n: usize) -> Result<String, IndexError> {
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| corrupt("invalid utf-8"))
    }
    fn str(&mut self) -> Result<String, IndexError> {
        let n = self.u32()? as usize;
        self.utf8(n)
    }
    fn count(&mut self, remaining_min: usize) -> Result<usize, IndexError> {
        let n = self.u64()? as usize;
        // Reject counts that cannot fit in what is left before allocating.
        if n.saturating_mul(remaining_min) > self.buf.len() - self.pos {
            return Err(IndexError::Truncated);
        }
        Ok(n)
    }

    fn section(&mut self, expected: &[u8; 4]) -> Result<Decoder<'a>, IndexError> {
        let tag = self.take(4)?;
        if tag != expected {
            return Err(corrupt(&format!(
                "expected section {:?}, found {:?}",
                String::from_utf8_lossy(expected),
                String::from_utf8_lossy(tag)
            )));
        }
        let len = self.u64()? as usize;
        Ok(Decoder {
            buf: self.take(len)?,
            pos: 0,
        })
    }

    fn peek_tag(&self) -> Option<&'a [u8]> {
        self.buf.get(self.pos..self.pos + 4)
    }

    fn finish(self) -> Result<(), IndexError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(corrupt("trailing bytes in section"))
        }
    }

    fn edge_index(&mut self) -> Result<EdgeIndex, IndexError> {
        let rows = self.count(8)?;
        let offsets = (0..rows).map(|_| self.u64()).collect::<Result<Vec<_>, _>>()?;
        let m = self.count(4)?;
        let edges = (0..m).map(|_| self.u32()).collect::<Result<Vec<_>, _>>()?;
        Ok(EdgeIndex { offsets, edges })
    }
}

fn corrupt(msg: &str) -> IndexError {
    IndexError::Corrupt(msg.to_owned())
}

pub fn load_index<R: Read>(mut source: R) -> Result<IndexFile> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    Ok(decode(&buf)?)
}

fn decode(buf: &[u8]) -> Result<IndexFile, IndexError> {
    if buf.len() < 4 {
        return Err(IndexError::Truncated);
    }
    if &buf[..4] != MAGIC {
        return Err(IndexError::BadMagic);
    }
    if buf.len() < 8 {
        return Err(IndexError::Truncated);
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(IndexError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    if buf.len() < 16 {
        return Err(IndexError::Truncated);
    }
    let (body, trailer) = buf.split_at(buf.len() - 8);
    let stored = u64::from_le_bytes(trailer.try_into().unwrap());
    let computed = fnv1a(body);
    if stored != computed {
        return Err(IndexError::Checksum { stored, computed });
    }

    let mut d = Decoder { buf: body, pos: 8 };

    let mut s = d.section(TAG_LANG)?;
    let language = s.utf8(s.buf.len())?;
    s.finish()?;

    let mut s = d.section(TAG_CONCEPTS)?;
    let n = s.u32()? as usize;
    let surfaces = (0..n).map(|_| s.str()).collect::<Result<Vec<_>, _>>()?;
    s.finish()?;
    if surfaces.iter().any(String::is_empty) || surfaces.windows(2).any(|w| w[0] >= w[1]) {
        return Err(corrupt("concept table not sorted and unique"));
    }

    let mut s = d.section(TAG_RELATIONS)?;
    let nr = s.u32()? as usize;
    let mut relations = Vec::with_capacity(nr.min(1 << 16));
    for i in 0..nr {
        let name = s.str()?;
        let symmetric = match s.u8()? {
            0 => false,
            1 => true,
            _ => return Err(corrupt("bad symmetric flag")),
        };
        relations.push(Relation {
            id: RelationId(i as u32),
            name,
            symmetric,
        });
    }
    s.finish()?;
    if relations.windows(2).any(|w| w[0].name >= w[1].name) {
        return Err(corrupt("relation table not sorted and unique"));
    }

    let mut s = d.section(TAG_EDGES)?;
    let m = s.count(16)?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let edge = Edge {
            start: ConceptId(s.u32()?),
            relation: RelationId(s.u32()?),
            end: ConceptId(s.u32()?),
            weight: s.f32()?,
        };
        if edge.start.index() >= n || edge.end.index() >= n || edge.relation.index() >= nr {
            return Err(corrupt("edge references unknown id"));
        }
        edges.push(edge);
    }
    s.finish()?;
    if edges
        .windows(2)
        .any(|w| (w[0].start, w[0].relation, w[0].end) >= (w[1].start, w[1].relation, w[1].end))
    {
        return Err(corrupt("edge table not sorted and unique"));
    }

    let mut s = d.section(TAG_FWD)?;
    let fwd = s.edge_index()?;
    s.finish()?;
    let mut s = d.section(TAG_REV)?;
    let rev = s.edge_index()?;
    s.finish()?;

    let stats = if d.peek_tag() == Some(TAG_STATS.as_slice()) {
        let mut s = d.section(TAG_STATS)?;
        let stats = PathStats {
            walks_len3: s.u128()?,
            walks_len4: s.u128()?,
            node_count: s.u64()?,
        };
        s.finish()?;
        Some(stats)
    } else {
        None
    };

    d.section(TAG_END)?.finish()?;
    d.finish()?;

    let graph = KnowledgeGraph::from_tables(language, surfaces, relations, edges);
    if graph.fwd != fwd || graph.rev != rev {
        return Err(corrupt("stored indices disagree with edge table"));
    }
    Ok(IndexFile { graph, stats })
}
