//! Digraphs with self-loops and the graph queries the solvers need.
//!
//! A vertex `x` is read both as a clause and as a variable: its out-neighbours
//! `Var(x)` are the variables the clause at `x` constrains, its in-neighbours
//! `Cl(x)` are the clauses in which `x` occurs. Distances ignore direction.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite digraph on the vertices `0..n`, self-loops allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
        }
    }

    /// Builds a digraph from an edge list. Duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (x, y) in edges {
            if x >= n || y >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({x},{y}) references a vertex outside 0..{n}"
                )));
            }
            out_adj[x].push(y);
            in_adj[y].push(x);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { n, out_adj, in_adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// `Var(x)`, sorted ascending.
    pub fn var(&self, x: usize) -> &[usize] {
        &self.out_adj[x]
    }

    /// `Cl(x)`, sorted ascending.
    pub fn cl(&self, x: usize) -> &[usize] {
        &self.in_adj[x]
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.out_adj[x].binary_search(&y).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
    }

    /// `N(x) = Var(x) ∪ Cl(x)`, sorted. Contains `x` iff `x` has a self-loop.
    pub fn neighbourhood(&self, x: usize) -> Vec<usize> {
        merge_sorted(&self.out_adj[x], &self.in_adj[x])
    }

    /// `deg(x) = |Var(x) ∪ Cl(x)|`; a self-loop contributes one.
    pub fn degree(&self, x: usize) -> usize {
        let (a, b) = (&self.out_adj[x], &self.in_adj[x]);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
            count += 1;
        }
        count + (a.len() - i) + (b.len() - j)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.out_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(x, y)| self.has_edge(y, x))
    }

    /// Undirected neighbours of `x`, excluding `x` itself.
    fn undirected_neighbours(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_adj[x]
            .iter()
            .chain(self.in_adj[x].iter())
            .copied()
            .filter(move |&y| y != x)
    }

    /// BFS from `x` up to `radius`, optionally stopping once `cap` vertices
    /// have been reached. Returns `(vertex, distance)` in BFS order.
    fn bfs(&self, x: usize, radius: usize, cap: Option<usize>) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.n];
        let mut order = vec![(x, 0)];
        let mut queue = VecDeque::from([(x, 0)]);
        seen[x] = true;
        while let Some((v, dist)) = queue.pop_front() {
            if dist == radius {
                continue;
            }
            for w in self.undirected_neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push((w, dist + 1));
                    if cap.is_some_and(|c| order.len() >= c) {
                        return order;
                    }
                    queue.push_back((w, dist + 1));
                }
            }
        }
        order
    }

    /// Undirected distance, `None` when unreachable.
    pub fn distance(&self, x: usize, y: usize) -> Option<usize> {
        self.bfs(x, usize::MAX, None)
            .into_iter()
            .find(|&(v, _)| v == y)
            .map(|(_, d)| d)
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Total order on vertices used for every "minimal element" tie-break.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexOrder {
    rank: Vec<usize>,
}

impl VertexOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            rank: (0..n).collect(),
        }
    }

    /// `rank[v]` is the position of `v`; must be a permutation of `0..n`.
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; rank.len()];
        for &r in &rank {
            if r >= rank.len() || std::mem::replace(&mut seen[r], true) {
                return Err(Error::Parameter("vertex order is not a permutation".into()));
            }
        }
        Ok(Self { rank })
    }

    /// Order in which `sequence` lists the vertices first.
    pub fn from_sequence(sequence: &[usize]) -> Result<Self> {
        let mut rank = vec![usize::MAX; sequence.len()];
        for (pos, &v) in sequence.iter().enumerate() {
            if v >= rank.len() || rank[v] != usize::MAX {
                return Err(Error::Parameter("vertex sequence is not a permutation".into()));
            }
            rank[v] = pos;
        }
        Ok(Self { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// Sorts `vertices` ascending by rank.
    pub fn sort(&self, vertices: &mut [usize]) {
        vertices.sort_unstable_by_key(|&v| self.rank[v]);
    }
}

/// The dependency graph `Rel(G)`: `x ~ y` iff `Var(x) ∩ Var(y) ≠ ∅`.
///
/// Built by pairing up the clauses of every variable, so the cost is
/// `Σ_v |Cl(v)|²` rather than quadratic in `n`.
pub fn build_rel(g: &Digraph) -> Digraph {
    let n = g.num_vertices();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let clauses = g.cl(v);
        for &x in clauses {
            adj[x].extend_from_slice(clauses);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    // Symmetric by construction, so in-lists equal out-lists.
    Digraph {
        n,
        in_adj: adj.clone(),
        out_adj: adj,
    }
}

/// Vertices within undirected distance `r` of `x`, sorted ascending.
pub fn ball(g: &Digraph, x: usize, r: usize) -> Vec<usize> {
    let mut out: Vec<usize> = g.bfs(x, r, None).into_iter().map(|(v, _)| v).collect();
    out.sort_unstable();
    out
}

/// Symmetric loopless graph joining vertices at distance `1..=r`.
pub fn power_graph(g: &Digraph, r: usize) -> Digraph {
    let n = g.num_vertices();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut ys: Vec<usize> = g
                .bfs(x, r, None)
                .into_iter()
                .map(|(v, _)| v)
                .filter(|&v| v != x)
                .collect();
            ys.sort_unstable();
            ys
        })
        .collect();
    Digraph {
        n,
        in_adj: adj.clone(),
        out_adj: adj,
    }
}

/// Greedy maximal independent subset of `candidates` in a symmetric graph.
///
/// Candidates are scanned in ascending `order` rank; a candidate joins unless
/// an already chosen vertex is a neighbour. Self-loops never disqualify.
/// The result is sorted ascending by vertex index.
pub fn greedy_mis(g_sym: &Digraph, candidates: &[usize], order: &VertexOrder) -> Vec<usize> {
    let mut scan = candidates.to_vec();
    scan.sort_unstable();
    scan.dedup();
    order.sort(&mut scan);
    let mut chosen = scan_mis(g_sym, &scan);
    chosen.sort_unstable();
    chosen
}

/// Greedy independent set taking `scan` in the given list order. Returns the
/// chosen vertices in scan order.
pub fn scan_mis(g_sym: &Digraph, scan: &[usize]) -> Vec<usize> {
    let mut in_set = vec![false; g_sym.num_vertices()];
    let mut chosen = Vec::new();
    for &c in scan {
        if in_set[c] {
            continue;
        }
        let blocked = g_sym.var(c).iter().any(|&y| y != c && in_set[y]);
        if !blocked {
            in_set[c] = true;
            chosen.push(c);
        }
    }
    chosen
}

/// Membership test for `subexp(R, ε, d)`: `maxdeg ≤ d` and every ball of
/// radius `3R` has at most `(1+ε)^R` vertices (compared in log space with a
/// `1e-9` slack toward acceptance).
pub fn check_subexp(g: &Digraph, big_r: usize, eps: f64, d: usize) -> bool {
    if g.max_degree() > d {
        return false;
    }
    let log_bound = big_r as f64 * eps.ln_1p() + 1e-9;
    // Any ball with more than `limit` vertices fails, so BFS can stop there.
    let limit = (log_bound.exp().floor() as usize).saturating_add(1);
    (0..g.num_vertices()).all(|x| {
        let size = g.bfs(x, 3 * big_r, Some(limit)).len();
        (size as f64).ln() <= log_bound
    })
}
