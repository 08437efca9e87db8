//! Exhaustive counting oracles for the tree and forest bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_rel, Digraph};

/// A Δ-labelled rooted tree: for each label, an optional child subtree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaTree(pub Vec<Option<Box<DeltaTree>>>);

impl DeltaTree {
    pub fn size(&self) -> usize {
        1 + self.0.iter().flatten().map(|c| c.size()).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeBudget {
    pub max_delta: usize,
    pub max_size: usize,
}

impl Default for TreeBudget {
    fn default() -> Self {
        Self {
            max_delta: 4,
            max_size: 6,
        }
    }
}

/// Every Δ-labelled tree with `i ≥ 1` vertices, one per isomorphism class.
pub fn enumerate_delta_trees(delta: usize, i: usize, budget: TreeBudget) -> Result<Vec<DeltaTree>> {
    if delta == 0 {
        return Err(Error::Parameter("Δ must be at least 1".into()));
    }
    if delta > budget.max_delta || i > budget.max_size {
        return Err(Error::BudgetExceeded(format!(
            "trees with Δ={delta}, i={i} exceed Δ≤{}, i≤{}",
            budget.max_delta, budget.max_size
        )));
    }
    // by_size[s] = all trees with s vertices
    let mut by_size: Vec<Vec<DeltaTree>> = vec![Vec::new(); i + 1];
    for s in 1..=i {
        let mut out = Vec::new();
        let mut slots = Vec::with_capacity(delta);
        fill(delta, s - 1, &by_size, &mut slots, &mut out);
        by_size[s] = out;
    }
    Ok(std::mem::take(&mut by_size[i]))
}

fn fill(
    delta: usize,
    remaining: usize,
    by_size: &[Vec<DeltaTree>],
    slots: &mut Vec<Option<Box<DeltaTree>>>,
    out: &mut Vec<DeltaTree>,
) {
    if slots.len() == delta {
        if remaining == 0 {
            out.push(DeltaTree(slots.clone()));
        }
        return;
    }
    slots.push(None);
    fill(delta, remaining, by_size, slots, out);
    slots.pop();
    for s in 1..=remaining {
        for t in &by_size[s] {
            slots.push(Some(Box::new(t.clone())));
            fill(delta, remaining - s, by_size, slots, out);
            slots.pop();
        }
    }
}

/// `P_i`: Δ-labelled trees with `i` vertices under the default budget.
/// `P_0 = 1` counts the empty tree.
pub fn count_delta_trees(delta: usize, i: usize) -> Result<u64> {
    count_delta_trees_with_budget(delta, i, TreeBudget::default())
}

pub fn count_delta_trees_with_budget(delta: usize, i: usize, budget: TreeBudget) -> Result<u64> {
    if i == 0 {
        return Ok(1);
    }
    enumerate_delta_trees(delta, i, budget).map(|v| v.len() as u64)
}

/// `C(Δi, i) / ((Δ−1)i + 1)`.
pub fn fuss_catalan(delta: usize, i: usize) -> u128 {
    let (n, k) = ((delta * i) as u128, i as u128);
    let mut c: u128 = 1;
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c / ((delta as u128 - 1) * k + 1)
}

/// The first `len` coefficients of `Q_i`, where `Q_0 = 1 + X` and
/// `Q_{i+1} = 1 + X·Q_i^Δ`.
pub fn q_poly(delta: usize, i: usize, len: usize) -> Result<Vec<u128>> {
    if delta == 0 {
        return Err(Error::Parameter("Δ must be at least 1".into()));
    }
    let overflow = || Error::BudgetExceeded(format!("Q_{i} coefficients overflow u128"));
    let mut q = vec![0u128; len];
    for c in q.iter_mut().take(2) {
        *c = 1;
    }
    for _ in 0..i {
        let mut power = vec![0u128; len];
        if len > 0 {
            power[0] = 1;
        }
        for _ in 0..delta {
            let mut next = vec![0u128; len];
            for (a, &pa) in power.iter().enumerate().filter(|(_, &c)| c != 0) {
                for (b, &qb) in q.iter().enumerate().take(len - a) {
                    let term = pa.checked_mul(qb).ok_or_else(overflow)?;
                    next[a + b] = next[a + b].checked_add(term).ok_or_else(overflow)?;
                }
            }
            power = next;
        }
        let mut next = vec![0u128; len];
        if len > 0 {
            next[0] = 1;
            next[1..].copy_from_slice(&power[..len - 1]);
        }
        q = next;
    }
    Ok(q)
}

/// `Q_i(x)` by the real recursion.
pub fn q_poly_at(delta: usize, i: usize, x: f64) -> f64 {
    let mut q = 1.0 + x;
    for _ in 0..i {
        q = 1.0 + x * q.powi(delta as i32);
    }
    q
}

/// `ρ = (Δ−1)^{Δ−1} / Δ^Δ`, for `Δ ≥ 2`.
pub fn rho(delta: usize) -> Result<f64> {
    if delta < 2 {
        return Err(Error::Parameter("ρ needs Δ ≥ 2".into()));
    }
    let d = delta as f64;
    Ok(((d - 1.0).ln() * (d - 1.0) - d.ln() * d).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestBudget {
    pub max_vertices: usize,
    pub max_nodes: usize,
}

impl Default for ForestBudget {
    fn default() -> Self {
        Self {
            max_vertices: 5,
            max_nodes: 4,
        }
    }
}

/// Number of grounded independent G-forests with `m` nodes.
///
/// Levels of a grounded forest are contiguous from 0, each level an
/// independent set of `Rel(G)`, and each node above level 0 picks its parent
/// among the `Rel`-neighbours (itself included) one level down. The search
/// runs over all level sequences; parent choices multiply.
pub fn enumerate_grounded_forests(g: &Digraph, m: usize) -> Result<u128> {
    enumerate_grounded_forests_with_budget(g, m, ForestBudget::default())
}

pub fn enumerate_grounded_forests_with_budget(
    g: &Digraph,
    m: usize,
    budget: ForestBudget,
) -> Result<u128> {
    let n = g.num_vertices();
    if n > budget.max_vertices || m > budget.max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "forests with n={n}, m={m} exceed n≤{}, m≤{}",
            budget.max_vertices, budget.max_nodes
        )));
    }
    let rel = build_rel(g);
    let nbr: Vec<u32> = (0..n)
        .map(|x| rel.var(x).iter().fold(0u32, |acc, &y| acc | 1 << y))
        .collect();
    let independent: Vec<u32> = (1u32..1 << n)
        .filter(|&s| {
            (0..n)
                .filter(|&x| s >> x & 1 == 1)
                .all(|x| nbr[x] & s & !(1 << x) == 0)
        })
        .collect();
    Ok(levels(None, m, &independent, &nbr))
}

fn levels(prev: Option<u32>, remaining: usize, independent: &[u32], nbr: &[u32]) -> u128 {
    if remaining == 0 {
        return 1;
    }
    let mut total = 0u128;
    for &s in independent {
        let size = s.count_ones() as usize;
        if size > remaining {
            continue;
        }
        let weight = match prev {
            None => 1u128,
            Some(p) => (0..nbr.len())
                .filter(|&x| s >> x & 1 == 1)
                .map(|x| u128::from((nbr[x] & p).count_ones()))
                .product(),
        };
        if weight > 0 {
            total += weight * levels(Some(s), remaining - size, independent, nbr);
        }
    }
    total
}

/// `(m+1)^{n−1} (eΔ)^m`.
pub fn forest_count_bound(n: usize, m: usize, delta: usize) -> f64 {
    let e_delta = std::f64::consts::E * delta as f64;
    ((m + 1) as f64).powi(n as i32 - 1) * e_delta.powi(m as i32)
}
