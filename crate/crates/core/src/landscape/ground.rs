//! Rewriting a finalised landscape into an equivalent grounded one.
//!
//! Each iteration takes the smallest airborne tree `τ` (ties by root rank,
//! then root level). If no node `(x,i) ∈ τ` meets a node `(y,i−1) ∉ τ` with
//! `Var(x) ∩ Var(y) ≠ ∅`, the whole of `τ` moves down one level. Otherwise
//! the least blocking pair by `(i, rank x, rank y)` decides: `(x,i)` is
//! re-attached below `(y,i−1)`. When `x` is not the root this shrinks `τ`;
//! when it is, `τ` stops being airborne. The measure
//! `(airborne trees, smallest airborne size, root levels)` decreases
//! lexicographically, so the loop ends.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{FinalisedLandscape, Node};
use crate::error::{Error, Result};
use crate::graph::VertexOrder;
use crate::rule::ColouringProblem;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

/// A grounded landscape together with the work done to reach it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grounding {
    pub landscape: FinalisedLandscape,
    pub pushes: u64,
    /// Non-root nodes moved to another parent.
    pub reparents: u64,
    /// Airborne roots attached below another tree.
    pub joins: u64,
}

impl Grounding {
    pub fn steps(&self) -> u64 {
        self.pushes + self.reparents + self.joins
    }
}

/// [`ground_with_cap`] with the identity order and the default cap.
pub fn ground(p: &ColouringProblem, l: &FinalisedLandscape) -> Result<FinalisedLandscape> {
    let order = VertexOrder::identity(p.num_vertices());
    ground_with_cap(p, l, &order, DEFAULT_STEP_CAP).map(|g| g.landscape)
}

pub fn ground_with_cap(
    p: &ColouringProblem,
    l: &FinalisedLandscape,
    order: &VertexOrder,
    cap: u64,
) -> Result<Grounding> {
    l.landscape.validate_shape(p)?;
    let rel = p.rel();
    let mut out = l.clone();
    let (mut pushes, mut reparents, mut joins) = (0u64, 0u64, 0u64);
    loop {
        let forest = &mut out.landscape.forest;
        let roots = forest.roots();
        let mut size: HashMap<usize, usize> = HashMap::new();
        for &r in &roots {
            *size.entry(r).or_default() += 1;
        }
        let tau = size
            .iter()
            .filter(|(&r, _)| forest.nodes[r].level > 0)
            .map(|(&r, &s)| (s, order.rank(forest.nodes[r].vertex), forest.nodes[r].level, r))
            .min();
        let Some((_, _, _, tau_root)) = tau else { break };
        if pushes + reparents + joins >= cap {
            return Err(Error::GroundingStepCap(cap));
        }

        let index: HashMap<Node, usize> = forest
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let members: Vec<usize> = (0..roots.len()).filter(|&i| roots[i] == tau_root).collect();
        let (index, roots, nodes) = (&index, &roots, &forest.nodes);
        let blocking = members
            .iter()
            .flat_map(|&t| {
                let x = nodes[t];
                rel.var(x.vertex).iter().filter_map(move |&y| {
                    index
                        .get(&Node::new(y, x.level - 1))
                        .filter(|&&j| roots[j] != tau_root)
                        .map(|&j| ((x.level, order.rank(x.vertex), order.rank(y)), t, j))
                })
            })
            .min();
        match blocking {
            None => {
                for &t in &members {
                    forest.nodes[t].level -= 1;
                }
                pushes += 1;
            }
            Some((_, t, j)) => {
                if forest.parent[t].is_some() {
                    reparents += 1;
                } else {
                    joins += 1;
                }
                forest.parent[t] = Some(j);
            }
        }
    }
    out.canonicalise();
    Ok(Grounding {
        landscape: out,
        pushes,
        reparents,
        joins,
    })
}
