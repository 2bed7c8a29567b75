//! Walk counting by repeated sparse adjacency products.
//!
//! Walks follow edges in either orientation and count parallel edges
//! separately. A walk of length `k` visits `k` concepts, i.e. crosses `k - 1`
//! edges, so `walk_count(g, k) = 1ᵀ Aᵏ⁻¹ 1` for the symmetric multiplicity
//! matrix `A`.

use super::KnowledgeGraph;
use crate::error::{Error, Result};

pub const MAX_WALK_LENGTH: usize = 4;

/// `y = A x` without materializing `A`. A self-loop contributes once.
pub(crate) fn adjacency_product(g: &KnowledgeGraph, x: &[u128]) -> Vec<u128> {
    let mut y = vec![0u128; x.len()];
    for e in g.edges() {
        let (s, t) = (e.start.index(), e.end.index());
        y[s] += x[t];
        if s != t {
            y[t] += x[s];
        }
    }
    y
}

/// Walk totals for every length `1..=max_len`; entry `i` holds length `i + 1`.
pub fn walk_counts(g: &KnowledgeGraph, max_len: usize) -> Result<Vec<u128>> {
    if !(1..=MAX_WALK_LENGTH).contains(&max_len) {
        return Err(Error::WalkLength(max_len));
    }
    let mut x = vec![1u128; g.node_count()];
    let mut totals = Vec::with_capacity(max_len);
    totals.push(x.iter().sum());
    for _ in 1..max_len {
        x = adjacency_product(g, &x);
        totals.push(x.iter().sum());
    }
    Ok(totals)
}

/// Number of walks visiting `k` concepts, `1 <= k <= 4`.
pub fn walk_count(g: &KnowledgeGraph, k: usize) -> Result<u128> {
    Ok(*walk_counts(g, k)?.last().unwrap())
}
