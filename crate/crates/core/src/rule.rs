//! Local rules, bad sets and the local-lemma condition checks.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_rel, Digraph};

pub type Colour = u32;

/// An assignment to `Var(x)`, listed in ascending variable order.
pub type Assignment = Vec<Colour>;

/// Upper limit on `b^{|Var(x)|}` when a rule is given by its allowed tuples
/// and has to be complemented explicitly.
const MAX_COMPLEMENT_SPACE: u64 = 1 << 20;

/// Per-vertex forbidden assignments `R^c(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalRule {
    forbidden: Vec<Vec<Assignment>>,
}

impl LocalRule {
    /// Rule from forbidden tuples. Lists are sorted and deduplicated; the
    /// number of removed duplicates is returned alongside.
    pub fn from_forbidden(mut forbidden: Vec<Vec<Assignment>>) -> (Self, usize) {
        let mut dropped = 0;
        for list in &mut forbidden {
            list.sort();
            let before = list.len();
            list.dedup();
            dropped += before - list.len();
        }
        (Self { forbidden }, dropped)
    }

    /// Rule given by allowed tuples `R(x)`, normalised to the complement.
    pub fn from_allowed(g: &Digraph, b: Colour, allowed: Vec<Vec<Assignment>>) -> Result<Self> {
        if allowed.len() != g.num_vertices() {
            return Err(Error::MalformedProblem(format!(
                "allowed lists for {} vertices, graph has {}",
                allowed.len(),
                g.num_vertices()
            )));
        }
        let mut forbidden = Vec::with_capacity(allowed.len());
        for (x, mut ok) in allowed.into_iter().enumerate() {
            let arity = g.var(x).len();
            let space = checked_space(b, arity).filter(|&s| s <= MAX_COMPLEMENT_SPACE);
            let Some(space) = space else {
                return Err(Error::InvalidRule {
                    vertex: x,
                    reason: format!("cannot complement a rule over {b}^{arity} tuples"),
                });
            };
            ok.sort();
            ok.dedup();
            let mut bad = Vec::new();
            for code in 0..space {
                let tuple = decode(code, b, arity);
                if ok.binary_search(&tuple).is_err() {
                    bad.push(tuple);
                }
            }
            forbidden.push(bad);
        }
        Ok(Self { forbidden })
    }

    pub fn all_allowed(n: usize) -> Self {
        Self {
            forbidden: vec![Vec::new(); n],
        }
    }

    pub fn forbidden(&self, x: usize) -> &[Assignment] {
        &self.forbidden[x]
    }

    pub fn len(&self) -> usize {
        self.forbidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty()
    }
}

/// A colouring `f ∈ b^{V(G)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colouring(pub Vec<Colour>);

impl Colouring {
    pub fn constant(n: usize, colour: Colour) -> Self {
        Self(vec![colour; n])
    }
}

impl Deref for Colouring {
    type Target = [Colour];
    fn deref(&self) -> &[Colour] {
        &self.0
    }
}

impl DerefMut for Colouring {
    fn deref_mut(&mut self) -> &mut [Colour] {
        &mut self.0
    }
}

/// A colouring problem `(G, R)` over `b` colours.
///
/// Construction validates the rule against the graph and caches `Rel(G)`
/// together with a radix encoding of every forbidden tuple.
#[derive(Debug, Clone)]
pub struct ColouringProblem {
    graph: Digraph,
    b: Colour,
    rule: LocalRule,
    rel: Digraph,
    codes: Vec<Vec<u64>>,
}

impl PartialEq for ColouringProblem {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.b == other.b && self.rule == other.rule
    }
}

impl ColouringProblem {
    pub fn new(graph: Digraph, b: Colour, rule: LocalRule) -> Result<Self> {
        if b < 2 {
            return Err(Error::TooFewColours(b));
        }
        let n = graph.num_vertices();
        if rule.len() != n {
            return Err(Error::MalformedProblem(format!(
                "rule covers {} vertices, graph has {n}",
                rule.len()
            )));
        }
        let mut codes = Vec::with_capacity(n);
        for x in 0..n {
            let arity = graph.var(x).len();
            let list = rule.forbidden(x);
            if arity == 0 && !list.is_empty() {
                return Err(Error::InvalidRule {
                    vertex: x,
                    reason: "a clause without variables cannot forbid anything".into(),
                });
            }
            if list.is_empty() {
                codes.push(Vec::new());
                continue;
            }
            if checked_space(b, arity).is_none() {
                return Err(Error::InvalidRule {
                    vertex: x,
                    reason: format!("{b}^{arity} assignments do not fit in 64 bits"),
                });
            }
            let mut encoded = Vec::with_capacity(list.len());
            for tuple in list {
                if tuple.len() != arity {
                    return Err(Error::InvalidRule {
                        vertex: x,
                        reason: format!("tuple of length {} for {arity} variables", tuple.len()),
                    });
                }
                if let Some(&c) = tuple.iter().find(|&&c| c >= b) {
                    return Err(Error::InvalidRule {
                        vertex: x,
                        reason: format!("colour {c} out of range for b={b}"),
                    });
                }
                encoded.push(encode(tuple, b));
            }
            encoded.sort_unstable();
            let before = encoded.len();
            encoded.dedup();
            if encoded.len() != before {
                return Err(Error::InvalidRule {
                    vertex: x,
                    reason: "duplicate forbidden tuple".into(),
                });
            }
            codes.push(encoded);
        }
        let rel = build_rel(&graph);
        Ok(Self {
            graph,
            b,
            rule,
            rel,
            codes,
        })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn b(&self) -> Colour {
        self.b
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    /// The cached dependency graph `Rel(G)`.
    pub fn rel(&self) -> &Digraph {
        &self.rel
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// `Δ = maxdeg(Rel(G))`, self-loops counted once.
    pub fn rel_max_degree(&self) -> usize {
        self.rel.max_degree()
    }

    pub fn check_colouring(&self, f: &Colouring) -> Result<()> {
        if f.len() != self.num_vertices() {
            return Err(Error::ColouringLength {
                expected: self.num_vertices(),
                got: f.len(),
            });
        }
        if let Some((vertex, &colour)) = f.iter().enumerate().find(|(_, &c)| c >= self.b) {
            return Err(Error::ColourOutOfRange {
                vertex,
                colour,
                b: self.b,
            });
        }
        Ok(())
    }

    /// `res_x(f)`: the colouring restricted to `Var(x)`.
    pub fn restriction(&self, f: &[Colour], x: usize) -> Assignment {
        self.graph.var(x).iter().map(|&v| f[v]).collect()
    }

    pub fn is_violated(&self, f: &[Colour], x: usize) -> bool {
        let codes = &self.codes[x];
        if codes.is_empty() {
            return false;
        }
        let b = u64::from(self.b);
        let code = self
            .graph
            .var(x)
            .iter()
            .fold(0u64, |acc, &v| acc * b + u64::from(f[v]));
        codes.binary_search(&code).is_ok()
    }

    /// `B_R(f)`, ascending.
    pub fn bad_set(&self, f: &[Colour]) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&x| self.is_violated(f, x))
            .collect()
    }

    pub fn satisfies(&self, f: &[Colour]) -> bool {
        (0..self.num_vertices()).all(|x| !self.is_violated(f, x))
    }

    /// `β = max_x |R^c(x)| / b^{|Var(x)|}`.
    pub fn lll_margin(&self) -> f64 {
        (0..self.num_vertices())
            .map(|x| {
                let k = self.rule.forbidden(x).len();
                if k == 0 {
                    0.0
                } else {
                    k as f64 / f64::from(self.b).powi(self.graph.var(x).len() as i32)
                }
            })
            .fold(0.0, f64::max)
    }

    /// The local-lemma hypothesis `β ≤ 1/((eΔ)^{1+δ} b^{εd})`.
    pub fn check_condition(&self, delta: f64, eps: f64, d: usize) -> Result<bool> {
        if !(delta > 0.0 && eps > 0.0) {
            return Err(Error::Parameter("delta and eps must be positive".into()));
        }
        let margin = self.lll_margin();
        let big_delta = self.rel_max_degree();
        if big_delta == 0 {
            if margin > 0.0 {
                return Err(Error::MalformedProblem(
                    "Rel(G) has maximum degree 0 but some clause forbids tuples".into(),
                ));
            }
            return Ok(true);
        }
        if margin == 0.0 {
            return Ok(true);
        }
        Ok(margin <= condition_threshold(self.b, big_delta, delta, eps, d) * (1.0 + 1e-12))
    }
}

/// `1/((eΔ)^{1+δ} b^{εd})`.
pub fn condition_threshold(b: Colour, big_delta: usize, delta: f64, eps: f64, d: usize) -> f64 {
    let log = (1.0 + delta) * (1.0 + (big_delta as f64).ln()) + eps * d as f64 * f64::from(b).ln();
    (-log).exp()
}

fn checked_space(b: Colour, arity: usize) -> Option<u64> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| u64::from(b).checked_pow(a))
}

fn encode(tuple: &[Colour], b: Colour) -> u64 {
    tuple
        .iter()
        .fold(0u64, |acc, &c| acc * u64::from(b) + u64::from(c))
}

fn decode(mut code: u64, b: Colour, arity: usize) -> Assignment {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = (code % u64::from(b)) as Colour;
        code /= u64::from(b);
    }
    out
}
