//! Restriction of a problem and of a landscape to a π-unique set `U`.
//!
//! The restricted problem lives on the parts of π: `G'` is the image of
//! `G|U` under `S_π`, and a part inherits the rule of its representative
//! `T_U(α)` when all of that clause's variables lie in `U`; otherwise it is
//! unconstrained.

use super::{FinalisedLandscape, GForest, Landscape, Node};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::partition::{is_pi_unique, SparsePartition};
use crate::rule::{Assignment, Colouring, ColouringProblem, LocalRule};

/// `Res_U` of a problem, with the data needed to restrict landscapes.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub problem: ColouringProblem,
    /// Singleton partition of the part set.
    pub partition: SparsePartition,
    /// `T_U(α)`, the member of `U` in part `α`.
    pub representative: Vec<Option<usize>>,
    in_u: Vec<bool>,
    /// For each part, positions in `Var(T_U(α))` of the variables listed by
    /// `Var'(α)`.
    positions: Vec<Vec<usize>>,
    /// Whether `Var(T_U(α)) ⊆ U`.
    closed: Vec<bool>,
}

pub fn restrict_problem(p: &ColouringProblem, pi: &SparsePartition, u: &[usize]) -> Result<Restriction> {
    if !is_pi_unique(pi, u) {
        return Err(Error::NotPiUnique);
    }
    let g = p.graph();
    let parts = pi.num_parts();
    let mut in_u = vec![false; p.num_vertices()];
    let mut representative = vec![None; parts];
    for &x in u {
        in_u[x] = true;
        representative[pi.part_of(x)] = Some(x);
    }
    let mut edges = Vec::new();
    for &x in u {
        for &y in g.var(x) {
            if in_u[y] {
                edges.push((pi.part_of(x), pi.part_of(y)));
            }
        }
    }
    let graph = Digraph::from_edges(parts, edges)?;

    let mut positions = vec![Vec::new(); parts];
    let mut closed = vec![false; parts];
    let mut forbidden = vec![Vec::new(); parts];
    for (alpha, rep) in representative.iter().enumerate() {
        let Some(x) = *rep else { continue };
        let var = g.var(x);
        positions[alpha] = graph
            .var(alpha)
            .iter()
            .map(|&beta| {
                let v = representative[beta].expect("edge targets lie in U");
                var.binary_search(&v).expect("edge comes from Var(x)")
            })
            .collect();
        closed[alpha] = var.iter().all(|&v| in_u[v]);
        if closed[alpha] {
            forbidden[alpha] = p
                .rule()
                .forbidden(x)
                .iter()
                .map(|t| permute(t, &positions[alpha]))
                .collect();
        }
    }
    let (rule, _) = LocalRule::from_forbidden(forbidden);
    let problem = ColouringProblem::new(graph, p.b(), rule)?;
    Ok(Restriction {
        problem,
        partition: SparsePartition::singletons(parts),
        representative,
        in_u,
        positions,
        closed,
    })
}

fn permute(tuple: &[u32], positions: &[usize]) -> Assignment {
    positions.iter().map(|&i| tuple[i]).collect()
}

impl Restriction {
    /// `Res_U(L)` over [`Restriction::problem`].
    ///
    /// Nodes `(x,i)` with `x ∈ U` are relabelled to `(S_π(x), i)`. Nodes whose
    /// part has no variables in `G'` are dropped: they are not vertices of
    /// any `Rel(G')` edge and record no variable. Edges are kept when both
    /// ends survive and still form a `Canvas(G')` edge. `Viol` is relabelled
    /// where `Var(x) ⊆ U` and zero elsewhere; `Fin` is zero outside the image
    /// of `U`.
    pub fn landscape(&self, pi: &SparsePartition, l: &FinalisedLandscape) -> Result<FinalisedLandscape> {
        let g2 = self.problem.graph();
        let forest = &l.landscape.forest;
        let mut new_index = vec![None; forest.len()];
        let mut nodes = Vec::new();
        let mut viol = Vec::new();
        for (i, (v, tuple)) in forest.nodes().iter().zip(&l.landscape.viol).enumerate() {
            if v.vertex >= self.in_u.len() {
                return Err(Error::InvalidLandscape(format!("vertex {} out of range", v.vertex)));
            }
            if !self.in_u[v.vertex] {
                continue;
            }
            let alpha = pi.part_of(v.vertex);
            if g2.var(alpha).is_empty() {
                continue;
            }
            new_index[i] = Some(nodes.len());
            nodes.push(Node::new(alpha, v.level));
            viol.push(if self.closed[alpha] {
                permute(tuple, &self.positions[alpha])
            } else {
                vec![0; self.positions[alpha].len()]
            });
        }
        let rel2 = self.problem.rel();
        let mut parent = vec![None; nodes.len()];
        for (i, par) in forest.parents().iter().enumerate() {
            let (Some(child), Some(q)) = (new_index[i], *par) else { continue };
            let Some(pnew) = new_index[q] else { continue };
            if rel2.has_edge(nodes[pnew].vertex, nodes[child].vertex) {
                parent[child] = Some(pnew);
            }
        }
        let fin = Colouring(
            self.representative
                .iter()
                .map(|rep| rep.map_or(0, |x| l.fin[x]))
                .collect(),
        );
        let mut out = FinalisedLandscape {
            landscape: Landscape::new(GForest::new(nodes, parent)?, viol)?,
            fin,
        };
        out.canonicalise();
        Ok(out)
    }
}

/// `Res_U(L)`; see [`Restriction::landscape`].
pub fn restrict_landscape(
    p: &ColouringProblem,
    pi: &SparsePartition,
    l: &FinalisedLandscape,
    u: &[usize],
) -> Result<(Restriction, FinalisedLandscape)> {
    let r = restrict_problem(p, pi, u)?;
    let l2 = r.landscape(pi, l)?;
    Ok((r, l2))
}
