//! Sparse finite partitions of the vertex set.
//!
//! A partition is `r`-sparse when any two vertices sharing a part are at
//! undirected distance greater than `2r`; equivalently every radius-`r` ball
//! meets each part at most once. Vertices of a part share one tape stream.

use serde::{Deserialize, Serialize};

use crate::graph::{ball, power_graph, Digraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePartition {
    num_parts: usize,
    part_of: Vec<usize>,
    sparsity_r: usize,
}

impl SparsePartition {
    /// Every vertex in its own part. This is the classic resampling mode in
    /// which no tape stream is shared.
    pub fn singletons(n: usize) -> Self {
        Self {
            num_parts: n,
            part_of: (0..n).collect(),
            sparsity_r: usize::MAX,
        }
    }

    /// Partition from an explicit part map; part indices are compacted in
    /// order of first appearance. `sparsity_r` is recorded, not checked.
    pub fn from_parts(part_of: &[usize], sparsity_r: usize) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let part_of: Vec<usize> = part_of
            .iter()
            .map(|p| {
                let next = relabel.len();
                *relabel.entry(*p).or_insert(next)
            })
            .collect();
        Self {
            num_parts: relabel.len(),
            part_of,
            sparsity_r,
        }
    }

    pub fn num_parts(&self) -> usize {
        self.num_parts
    }

    pub fn num_vertices(&self) -> usize {
        self.part_of.len()
    }

    /// `S_π(x)`.
    pub fn part_of(&self, x: usize) -> usize {
        self.part_of[x]
    }

    pub fn parts(&self) -> &[usize] {
        &self.part_of
    }

    pub fn sparsity_r(&self) -> usize {
        self.sparsity_r
    }

    /// Members of each part, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_parts];
        for (x, &p) in self.part_of.iter().enumerate() {
            out[p].push(x);
        }
        out
    }
}

/// Greedy `r`-sparse partition: colour `power_graph(g, 2r)` scanning vertices
/// in ascending index, each taking the least colour unused by its already
/// coloured neighbours.
pub fn sparse_partition(g: &Digraph, r: usize) -> SparsePartition {
    let n = g.num_vertices();
    let power = power_graph(g, 2 * r);
    let mut colour = vec![usize::MAX; n];
    let mut used = Vec::new();
    for x in 0..n {
        used.clear();
        used.extend(
            power
                .var(x)
                .iter()
                .map(|&y| colour[y])
                .filter(|&c| c != usize::MAX),
        );
        used.sort_unstable();
        used.dedup();
        let least = used
            .iter()
            .enumerate()
            .find(|&(i, &c)| i != c)
            .map_or(used.len(), |(i, _)| i);
        colour[x] = least;
    }
    SparsePartition::from_parts(&colour, r)
}

/// True iff every radius-`r` ball meets each part at most once.
pub fn is_r_sparse(g: &Digraph, pi: &SparsePartition, r: usize) -> bool {
    (0..g.num_vertices()).all(|x| is_pi_unique(pi, &ball(g, x, r)))
}

/// True iff `S_π` is injective on `u`.
pub fn is_pi_unique(pi: &SparsePartition, u: &[usize]) -> bool {
    let mut seen = vec![false; pi.num_parts()];
    u.iter()
        .all(|&x| !std::mem::replace(&mut seen[pi.part_of(x)], true))
}
