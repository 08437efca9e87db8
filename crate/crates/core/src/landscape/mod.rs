//! Witness landscapes.
//!
//! A landscape is an independent forest in `V(G)×ℕ` whose edges are edges of
//! `Canvas(G)`, i.e. join `(y,i)` to `(x,i+1)` with `Var(x) ∩ Var(y) ≠ ∅`.
//! Every node `(x,i)` carries the violating tuple `Viol(x,i)`; a finalised
//! landscape also carries a colouring `Fin`. From these the tape symbols a run
//! consumed can be read back (`used_of`).

mod counting;
mod ground;
mod restrict;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexOrder;
use crate::mta::RunTrace;
use crate::rule::{Assignment, Colouring, ColouringProblem};
use crate::tape::SymbolSeq;

pub use counting::{
    count_delta_trees, count_delta_trees_with_budget, enumerate_delta_trees,
    enumerate_grounded_forests, enumerate_grounded_forests_with_budget, forest_count_bound,
    fuss_catalan, q_poly, q_poly_at, rho, DeltaTree, TreeBudget, ForestBudget,
};
pub use ground::{ground, ground_with_cap, Grounding, DEFAULT_STEP_CAP};
pub use restrict::{restrict_landscape, restrict_problem, Restriction};

/// A node `(vertex, level)` of `V(G)×ℕ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub vertex: usize,
    pub level: usize,
}

impl Node {
    pub fn new(vertex: usize, level: usize) -> Self {
        Self { vertex, level }
    }
}

/// Nodes with parent pointers; `parent[i]` indexes into `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GForest {
    nodes: Vec<Node>,
    parent: Vec<Option<usize>>,
}

impl GForest {
    pub fn new(nodes: Vec<Node>, parent: Vec<Option<usize>>) -> Result<Self> {
        if nodes.len() != parent.len() {
            return Err(Error::InvalidLandscape(
                "parent list does not match node list".into(),
            ));
        }
        if let Some(p) = parent.iter().flatten().find(|&&p| p >= nodes.len()) {
            return Err(Error::InvalidLandscape(format!("parent index {p} out of range")));
        }
        Ok(Self { nodes, parent })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `1 + max level`, `0` when empty.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|v| v.level + 1).max().unwrap_or(0)
    }

    pub fn index_of(&self, node: Node) -> Option<usize> {
        self.nodes.iter().position(|&v| v == node)
    }

    /// Root index of every node's tree.
    pub fn roots(&self) -> Vec<usize> {
        let mut root = vec![usize::MAX; self.nodes.len()];
        for start in 0..self.nodes.len() {
            let mut path = Vec::new();
            let mut cur = start;
            while root[cur] == usize::MAX {
                path.push(cur);
                match self.parent[cur] {
                    Some(p) => cur = p,
                    None => {
                        root[cur] = cur;
                        break;
                    }
                }
            }
            let r = root[cur];
            for v in path {
                root[v] = r;
            }
        }
        root
    }

    /// All trees rooted at level 0.
    pub fn is_grounded(&self) -> bool {
        self.parent
            .iter()
            .zip(&self.nodes)
            .all(|(p, v)| p.is_some() || v.level == 0)
    }

    /// Number of trees whose root sits above level 0.
    pub fn airborne_trees(&self) -> usize {
        self.parent
            .iter()
            .zip(&self.nodes)
            .filter(|(p, v)| p.is_none() && v.level > 0)
            .count()
    }

    /// Checks the G-forest conditions against `p`: distinct nodes, every
    /// edge a `Canvas(G)` edge, each level independent in `Rel(G)`, and every
    /// node a clause with variables.
    pub fn validate(&self, p: &ColouringProblem) -> Result<()> {
        let rel = p.rel();
        let n = p.num_vertices();
        let mut at: HashMap<Node, usize> = HashMap::with_capacity(self.nodes.len());
        for (i, &v) in self.nodes.iter().enumerate() {
            if v.vertex >= n {
                return Err(Error::InvalidLandscape(format!("vertex {} out of range", v.vertex)));
            }
            if p.graph().var(v.vertex).is_empty() {
                return Err(Error::InvalidLandscape(format!(
                    "node ({}, {}) has no variables",
                    v.vertex, v.level
                )));
            }
            if at.insert(v, i).is_some() {
                return Err(Error::InvalidLandscape(format!(
                    "node ({}, {}) listed twice",
                    v.vertex, v.level
                )));
            }
        }
        for (i, parent) in self.parent.iter().enumerate() {
            let Some(q) = *parent else { continue };
            let (x, y) = (self.nodes[i], self.nodes[q]);
            if y.level + 1 != x.level || !rel.has_edge(y.vertex, x.vertex) {
                return Err(Error::InvalidLandscape(format!(
                    "edge ({}, {}) -> ({}, {}) is not a canvas edge",
                    y.vertex, y.level, x.vertex, x.level
                )));
            }
        }
        for &v in &self.nodes {
            for &u in rel.var(v.vertex) {
                if u != v.vertex && at.contains_key(&Node::new(u, v.level)) {
                    return Err(Error::InvalidLandscape(format!(
                        "level {} is not independent: {} and {}",
                        v.level, v.vertex, u
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sorts nodes by `(level, vertex)` and remaps parents.
    pub fn canonicalise(&mut self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.nodes.len()).collect();
        perm.sort_by_key(|&i| (self.nodes[i].level, self.nodes[i].vertex));
        let mut new_index = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_index[old] = new;
        }
        self.nodes = perm.iter().map(|&i| self.nodes[i]).collect();
        self.parent = perm
            .iter()
            .map(|&i| self.parent[i].map(|p| new_index[p]))
            .collect();
        perm
    }
}

/// `(F, Viol)`; `viol[i]` belongs to `forest.nodes()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Landscape {
    pub forest: GForest,
    pub viol: Vec<Assignment>,
}

impl Landscape {
    pub fn new(forest: GForest, viol: Vec<Assignment>) -> Result<Self> {
        if forest.len() != viol.len() {
            return Err(Error::InvalidLandscape(
                "viol list does not match node list".into(),
            ));
        }
        Ok(Self { forest, viol })
    }

    /// Forest conditions plus `Viol(x,i) ∈ R^c(x)`.
    pub fn validate(&self, p: &ColouringProblem) -> Result<()> {
        self.validate_shape(p)?;
        for (v, tuple) in self.forest.nodes.iter().zip(&self.viol) {
            if p.rule().forbidden(v.vertex).binary_search(tuple).is_err() {
                return Err(Error::InvalidLandscape(format!(
                    "viol at ({}, {}) is not a forbidden tuple",
                    v.vertex, v.level
                )));
            }
        }
        Ok(())
    }

    /// Forest conditions and tuple lengths, without rule membership.
    pub fn validate_shape(&self, p: &ColouringProblem) -> Result<()> {
        self.forest.validate(p)?;
        for (v, tuple) in self.forest.nodes.iter().zip(&self.viol) {
            let arity = p.graph().var(v.vertex).len();
            if tuple.len() != arity || tuple.iter().any(|&c| c >= p.b()) {
                return Err(Error::InvalidLandscape(format!(
                    "viol at ({}, {}) is not a tuple over {arity} variables",
                    v.vertex, v.level
                )));
            }
        }
        Ok(())
    }

    fn canonicalise(&mut self) {
        let perm = self.forest.canonicalise();
        self.viol = perm.iter().map(|&i| std::mem::take(&mut self.viol[i])).collect();
    }
}

/// `(F, Viol, Fin)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalisedLandscape {
    pub landscape: Landscape,
    pub fin: Colouring,
}

impl FinalisedLandscape {
    pub fn forest(&self) -> &GForest {
        &self.landscape.forest
    }

    pub fn len(&self) -> usize {
        self.landscape.forest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landscape.forest.is_empty()
    }

    pub fn is_grounded(&self) -> bool {
        self.landscape.forest.is_grounded()
    }

    pub fn validate(&self, p: &ColouringProblem) -> Result<()> {
        self.landscape.validate(p)?;
        p.check_colouring(&self.fin)
    }

    /// Nodes sorted by `(level, vertex)`; used for comparisons and export.
    pub fn canonicalise(&mut self) {
        self.landscape.canonicalise();
    }
}

/// `L^k` of a run: nodes `IB(MT^i)×{i}` for `i < k`, the parent of `(x,i+1)`
/// the order-minimal `y ∈ N_Rel(x) ∩ IB(MT^i)`, `Viol(x,i) = res_x(MT^i)` and
/// `Fin = MT^k`.
pub fn build_landscape(
    p: &ColouringProblem,
    trace: &RunTrace,
    k: usize,
    order: &VertexOrder,
) -> Result<FinalisedLandscape> {
    let fin = trace.colouring_at(k)?;
    let rel = p.rel();
    let mut nodes = Vec::new();
    let mut parent = Vec::new();
    let mut viol = Vec::new();
    // index of (x, i-1) for x in IB(MT^{i-1})
    let mut previous: HashMap<usize, usize> = HashMap::new();
    for i in 0..k.min(trace.last_index()) {
        let round = trace.round(i).expect("index below last_index");
        let mut current = HashMap::with_capacity(round.ib.len());
        for (&x, tuple) in round.ib.iter().zip(&round.viol) {
            let par = if i == 0 {
                None
            } else {
                let y = rel
                    .var(x)
                    .iter()
                    .copied()
                    .filter(|y| previous.contains_key(y))
                    .min_by_key(|&y| order.rank(y));
                let Some(y) = y else {
                    panic!("node ({x}, {i}) has no Rel-neighbour in the previous independent set");
                };
                Some(previous[&y])
            };
            current.insert(x, nodes.len());
            nodes.push(Node::new(x, i));
            parent.push(par);
            viol.push(tuple.clone());
        }
        previous = current;
    }
    let mut landscape = Landscape::new(GForest::new(nodes, parent)?, viol)?;
    landscape.canonicalise();
    Ok(FinalisedLandscape { landscape, fin })
}

/// `Used_L(x)`: the `x`-entries of the `Viol` tuples of nodes whose clause
/// contains `x`, by increasing level, then `Fin(x)`.
pub fn used_of(p: &ColouringProblem, l: &FinalisedLandscape) -> Vec<SymbolSeq> {
    let g = p.graph();
    let mut entries: Vec<Vec<(usize, u32)>> = vec![Vec::new(); p.num_vertices()];
    for (v, tuple) in l.landscape.forest.nodes.iter().zip(&l.landscape.viol) {
        for (&x, &c) in g.var(v.vertex).iter().zip(tuple) {
            entries[x].push((v.level, c));
        }
    }
    entries
        .into_iter()
        .enumerate()
        .map(|(x, mut e)| {
            e.sort_by_key(|&(level, _)| level);
            debug_assert!(
                e.windows(2).all(|w| w[0].0 < w[1].0),
                "independent forest has one node per level containing a variable"
            );
            let mut seq: Vec<u32> = e.into_iter().map(|(_, c)| c).collect();
            seq.push(l.fin[x]);
            SymbolSeq(seq)
        })
        .collect()
}

/// `|V(G)| + Σ_{(x,i)} |Var(x)|`.
pub fn varcount(p: &ColouringProblem, f: &GForest) -> usize {
    p.num_vertices()
        + f.nodes
            .iter()
            .map(|v| p.graph().var(v.vertex).len())
            .sum::<usize>()
}

/// Smallest `r ∈ {3,…,3R}` with `Σ_{N(y,r)} h ≤ (1+ε)·Σ_{N(y,r−3)} h`.
pub fn stable_radius(
    g: &crate::graph::Digraph,
    h: &[u32],
    y: usize,
    big_r: usize,
    eps: f64,
) -> Result<usize> {
    let sum = |r: usize| -> f64 {
        crate::graph::ball(g, y, r)
            .iter()
            .map(|&x| f64::from(h[x]))
            .sum()
    };
    (3..=3 * big_r)
        .find(|&r| sum(r) <= (1.0 + eps) * sum(r - 3) * (1.0 + 1e-12))
        .ok_or(Error::NoStableRadius { max: 3 * big_r })
}
