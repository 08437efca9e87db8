//! The parallel resampling loop over a shared tape.
//!
//! Round `j` takes the bad set of `MT^j`, picks a maximal independent subset
//! `IB(MT^j)` in `Rel(G)`, and gives every variable of those clauses the next
//! unread symbol of its part: `MT^{j+1}(x) = rnd(S_π(x), h^{j+1}(x))`.
//! The initial colouring counts as one resampling of every vertex.
//!
//! The bad set is maintained incrementally: after a round only the clauses in
//! `Cl(Var(IB))` can change status, and those are the only re-evaluations.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{greedy_mis, Digraph, VertexOrder};
use crate::partition::SparsePartition;
use crate::rule::{Assignment, Colouring, ColouringProblem};
use crate::tape::SymbolSource;

pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// Above this many vertices only a short window of colourings is kept.
pub const FULL_HISTORY_LIMIT: usize = 10_000;

/// Chooses `IB` from the bad set. May depend on the round.
pub trait IndependenceFn {
    fn select(&mut self, round: usize, rel: &Digraph, bad: &[usize]) -> Vec<usize>;
}

impl<F> IndependenceFn for F
where
    F: FnMut(usize, &Digraph, &[usize]) -> Vec<usize>,
{
    fn select(&mut self, round: usize, rel: &Digraph, bad: &[usize]) -> Vec<usize> {
        self(round, rel, bad)
    }
}

/// Greedy scan in a fixed vertex order, the default independence function.
#[derive(Debug, Clone)]
pub struct GreedyByOrder(pub VertexOrder);

impl IndependenceFn for GreedyByOrder {
    fn select(&mut self, _round: usize, rel: &Digraph, bad: &[usize]) -> Vec<usize> {
        greedy_mis(rel, bad, &self.0)
    }
}

/// True iff `ib ⊆ bad`, `ib` is independent in `rel` (loops ignored) and
/// every member of `bad` is in `ib` or adjacent to it.
pub fn is_maximal_independent(rel: &Digraph, bad: &[usize], ib: &[usize]) -> bool {
    let n = rel.num_vertices();
    let mut in_ib = vec![false; n];
    let mut in_bad = vec![false; n];
    for &x in bad {
        in_bad[x] = true;
    }
    for &x in ib {
        if !in_bad[x] || in_ib[x] {
            return false;
        }
        in_ib[x] = true;
    }
    let independent = ib
        .iter()
        .all(|&x| rel.var(x).iter().all(|&y| y == x || !in_ib[y]));
    let maximal = bad
        .iter()
        .all(|&x| in_ib[x] || rel.var(x).iter().any(|&y| in_ib[y]));
    independent && maximal
}

/// Mutable state between rounds: `MT^j`, `h^{j+1}` and `B(MT^j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MtaState {
    pub colouring: Colouring,
    pub h: Vec<u32>,
    /// Bad set of `colouring`, ascending.
    pub bad: Vec<usize>,
    /// Index `j` of the current colouring.
    pub round: usize,
    /// Clause evaluations after the initial full scan.
    pub re_evaluations: u64,
}

impl MtaState {
    pub fn initial<S: SymbolSource + ?Sized>(
        p: &ColouringProblem,
        pi: &SparsePartition,
        tape: &S,
    ) -> Result<Self> {
        let colouring = initial_colouring(p, pi, tape)?;
        let bad = p.bad_set(&colouring);
        Ok(Self {
            h: vec![1; p.num_vertices()],
            colouring,
            bad,
            round: 0,
            re_evaluations: 0,
        })
    }
}

/// `MT^0(x) = rnd(S_π(x), 0)`.
pub fn initial_colouring<S: SymbolSource + ?Sized>(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &S,
) -> Result<Colouring> {
    (0..p.num_vertices())
        .map(|x| tape.symbol(pi.part_of(x), 0))
        .collect::<Result<Vec<_>>>()
        .map(Colouring)
}

/// What one round did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    /// `|B(MT^j)|`.
    pub bad_count: usize,
    /// `IB(MT^j)`, ascending.
    pub ib: Vec<usize>,
    /// `res_x(MT^j)` for each `x` in `ib`, aligned with it.
    pub viol: Vec<Assignment>,
    /// `Var(IB(MT^j))` in the order of `ib`, then `Var(x)` ascending; aligned
    /// with the concatenation of `viol`.
    pub vars: Vec<usize>,
    /// Clause evaluations spent updating the bad set.
    pub evaluations: u64,
}

impl Round {
    pub fn resampled(&self) -> usize {
        self.vars.len()
    }
}

/// Performs one round in place. Returns `None` when the bad set is empty
/// (a fixed point; only the round counter advances).
pub fn step<S, I>(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &S,
    state: &mut MtaState,
    independence: &mut I,
) -> Result<Option<Round>>
where
    S: SymbolSource + ?Sized,
    I: IndependenceFn + ?Sized,
{
    let g = p.graph();
    if state.bad.is_empty() {
        state.round += 1;
        return Ok(None);
    }
    let mut ib = independence.select(state.round, p.rel(), &state.bad);
    ib.sort_unstable();
    debug_assert!(
        is_maximal_independent(p.rel(), &state.bad, &ib),
        "independence function returned a set that is not maximal independent in the bad set"
    );

    // Read every new symbol first so a failing read leaves MT^j intact.
    let vars: Vec<usize> = ib.iter().flat_map(|&c| g.var(c).iter().copied()).collect();
    let values = vars
        .iter()
        .map(|&v| tape.symbol(pi.part_of(v), state.h[v] as usize))
        .collect::<Result<Vec<_>>>()?;
    let viol: Vec<Assignment> = ib.iter().map(|&c| p.restriction(&state.colouring, c)).collect();

    let mut touched: Vec<usize> = Vec::new();
    for (&v, &value) in vars.iter().zip(&values) {
        state.colouring[v] = value;
        state.h[v] += 1;
        touched.extend_from_slice(g.cl(v));
    }
    touched.sort_unstable();
    touched.dedup();

    let evaluations = touched.len() as u64;
    let mut next_bad: Vec<usize> = state
        .bad
        .iter()
        .copied()
        .filter(|c| touched.binary_search(c).is_err())
        .collect();
    next_bad.extend(
        touched
            .iter()
            .copied()
            .filter(|&c| p.is_violated(&state.colouring, c)),
    );
    next_bad.sort_unstable();
    debug_assert_eq!(next_bad, p.bad_set(&state.colouring));

    let round = Round {
        bad_count: state.bad.len(),
        ib,
        viol,
        vars,
        evaluations,
    };
    state.bad = next_bad;
    state.round += 1;
    state.re_evaluations += evaluations;
    Ok(Some(round))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    /// `B(MT^{steps-1}) = ∅`.
    Succeeded { steps: usize },
    /// `steps` bad sets evaluated, all nonempty.
    BudgetExhausted { steps: usize },
    /// A finite tape ran out while computing `MT^steps`.
    TapeExhausted { steps: usize },
}

impl RunStatus {
    /// Bad sets evaluated.
    pub fn steps(&self) -> usize {
        match *self {
            RunStatus::Succeeded { steps }
            | RunStatus::BudgetExhausted { steps }
            | RunStatus::TapeExhausted { steps } => steps,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Succeeded { .. } => "succeeded",
            RunStatus::BudgetExhausted { .. } => "budget_exhausted",
            RunStatus::TapeExhausted { .. } => "tape_exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum History {
    /// Full up to [`FULL_HISTORY_LIMIT`] vertices, a window of two above.
    Auto,
    Full,
    Window(usize),
}

impl History {
    fn window(self, n: usize) -> Option<usize> {
        match self {
            History::Auto if n <= FULL_HISTORY_LIMIT => None,
            History::Auto => Some(2),
            History::Full => None,
            History::Window(w) => Some(w.max(1)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Maximum number of bad-set evaluations.
    pub max_steps: usize,
    pub history: History,
    pub order: VertexOrder,
}

impl RunConfig {
    pub fn new(n: usize) -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            history: History::Auto,
            order: VertexOrder::identity(n),
        }
    }

    pub fn max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn history(mut self, history: History) -> Self {
        self.history = history;
        self
    }

    pub fn order(mut self, order: VertexOrder) -> Self {
        self.order = order;
        self
    }
}

/// Record of a run: every round, some colourings, and the final counters.
///
/// Colourings not retained are recovered by rolling back from a later one
/// with the stored `viol` tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace {
    status: RunStatus,
    rounds: Vec<Round>,
    /// Retained `(j, MT^j)`, ascending in `j`; the last is `MT^J`.
    colourings: Vec<(usize, Colouring)>,
    /// `h^{J+1}`.
    h: Vec<u32>,
    initial_evaluations: u64,
    re_evaluations: u64,
}

impl RunTrace {
    pub fn status(&self) -> RunStatus {
        self.status
    }

    pub fn succeeded(&self) -> bool {
        matches!(self.status, RunStatus::Succeeded { .. })
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Index `J` of the last colouring computed.
    pub fn last_index(&self) -> usize {
        self.rounds.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.h.len()
    }

    pub fn final_colouring(&self) -> &Colouring {
        &self.colourings.last().expect("trace keeps its last colouring").1
    }

    /// `h^{J+1}`; equals `h^∞` for a converged run.
    pub fn h(&self) -> &[u32] {
        &self.h
    }

    fn too_short(&self, requested: usize) -> Error {
        Error::TraceTooShort {
            requested,
            available: self.rounds.len() + 1,
        }
    }

    /// `IB(MT^j)`; empty past the end of a converged run.
    pub fn ib(&self, j: usize) -> Result<&[usize]> {
        match self.rounds.get(j) {
            Some(r) => Ok(&r.ib),
            None if self.succeeded() => Ok(&[]),
            None => Err(self.too_short(j + 1)),
        }
    }

    /// The round that produced `MT^{j+1}`, if one was performed.
    pub fn round(&self, j: usize) -> Option<&Round> {
        self.rounds.get(j)
    }

    pub fn initial_evaluations(&self) -> u64 {
        self.initial_evaluations
    }

    /// Clause evaluations after the initial full scan.
    pub fn re_evaluations(&self) -> u64 {
        self.re_evaluations
    }

    pub fn total_resampled(&self) -> usize {
        self.rounds.iter().map(Round::resampled).sum()
    }

    /// `h^k`: `0` at `k = 0`, else one plus the number of `j ≤ k−2` with
    /// `x ∈ Var(IB(MT^j))`.
    pub fn h_at(&self, k: usize) -> Result<Vec<u32>> {
        let n = self.h.len();
        if k == 0 {
            return Ok(vec![0; n]);
        }
        let upto = k - 1;
        if upto > self.rounds.len() {
            return if self.succeeded() {
                Ok(self.h.clone())
            } else {
                Err(self.too_short(k))
            };
        }
        let mut h = vec![1u32; n];
        for r in &self.rounds[..upto] {
            for &v in &r.vars {
                h[v] += 1;
            }
        }
        Ok(h)
    }

    /// `MT^k`. Past the end of a converged run this is the final colouring.
    pub fn colouring_at(&self, k: usize) -> Result<Colouring> {
        let last = self.last_index();
        if k > last {
            return if self.succeeded() {
                Ok(self.final_colouring().clone())
            } else {
                Err(self.too_short(k + 1))
            };
        }
        let pos = self.colourings.partition_point(|(j, _)| *j < k);
        let (from, base) = &self.colourings[pos];
        let mut f = base.clone();
        for r in self.rounds[k..*from].iter().rev() {
            let mut it = r.vars.iter();
            for tuple in &r.viol {
                for &c in tuple {
                    f[*it.next().expect("vars align with viol")] = c;
                }
            }
        }
        Ok(f)
    }

    /// Per-round CSV: `round,bad,ib,resampled,cumulative_resamples,evaluations`.
    pub fn write_csv_summary<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "round",
            "bad",
            "ib",
            "resampled",
            "cumulative_resamples",
            "evaluations",
        ])?;
        let mut cumulative = self.h.len();
        for (j, r) in self.rounds.iter().enumerate() {
            cumulative += r.resampled();
            w.write_record([
                j.to_string(),
                r.bad_count.to_string(),
                r.ib.len().to_string(),
                r.resampled().to_string(),
                cumulative.to_string(),
                r.evaluations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs with the greedy independence function in `config.order`.
pub fn run<S: SymbolSource + ?Sized>(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &S,
    config: &RunConfig,
) -> Result<RunTrace> {
    let mut mis = GreedyByOrder(config.order.clone());
    run_with(p, pi, tape, config, &mut mis)
}

/// Runs with a caller-supplied independence function.
pub fn run_with<S, I>(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &S,
    config: &RunConfig,
    independence: &mut I,
) -> Result<RunTrace>
where
    S: SymbolSource + ?Sized,
    I: IndependenceFn + ?Sized,
{
    if config.max_steps == 0 {
        return Err(Error::Parameter("max_steps must be at least 1".into()));
    }
    let n = p.num_vertices();
    let window = config.history.window(n);
    let mut state = match MtaState::initial(p, pi, tape) {
        Ok(s) => s,
        Err(Error::TapeExhausted { .. }) => {
            return Err(Error::Parameter("finite tape has no round 0".into()))
        }
        Err(e) => return Err(e),
    };
    let mut rounds = Vec::new();
    let mut colourings = vec![(0, state.colouring.clone())];
    let status = loop {
        let evaluated = state.round + 1;
        if state.bad.is_empty() {
            break RunStatus::Succeeded { steps: evaluated };
        }
        if evaluated >= config.max_steps {
            break RunStatus::BudgetExhausted { steps: evaluated };
        }
        match step(p, pi, tape, &mut state, independence) {
            Ok(Some(round)) => rounds.push(round),
            Ok(None) => unreachable!("bad set checked nonempty"),
            Err(Error::TapeExhausted { .. }) => {
                break RunStatus::TapeExhausted { steps: evaluated }
            }
            Err(e) => return Err(e),
        }
        colourings.push((state.round, state.colouring.clone()));
        if let Some(w) = window {
            if colourings.len() > w {
                colourings.drain(..colourings.len() - w);
            }
        }
    };
    if let RunStatus::Succeeded { .. } = status {
        assert!(
            p.satisfies(&state.colouring),
            "converged colouring fails the rule"
        );
    }
    Ok(RunTrace {
        status,
        rounds,
        colourings,
        h: state.h,
        initial_evaluations: n as u64,
        re_evaluations: state.re_evaluations,
    })
}

/// `h^∞` of a converged run.
pub fn h_infinity(trace: &RunTrace) -> Result<Vec<u32>> {
    if trace.succeeded() {
        Ok(trace.h.clone())
    } else {
        Err(Error::NotConverged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Digraph;
    use crate::rule::LocalRule;
    use crate::tape::{FiniteTape, RandomTape};

    /// Clause 0 with `Var(0) = {1}` forbidding colour 0.
    fn single_clause() -> ColouringProblem {
        let g = Digraph::from_edges(2, [(0, 1)]).unwrap();
        let (rule, _) = LocalRule::from_forbidden(vec![vec![vec![0]], vec![]]);
        ColouringProblem::new(g, 2, rule).unwrap()
    }

    fn seed_with_prefix(part: usize, prefix: &[u32]) -> u64 {
        (0..)
            .find(|&s| {
                let tape = RandomTape::new(s, 2);
                prefix
                    .iter()
                    .enumerate()
                    .all(|(t, &c)| tape.symbol(part, t).unwrap() == c)
            })
            .unwrap()
    }

    #[test]
    fn all_allowed_succeeds_at_once() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = ColouringProblem::new(g, 2, LocalRule::all_allowed(3)).unwrap();
        let pi = SparsePartition::singletons(3);
        let trace = run(&p, &pi, &RandomTape::new(5, 2), &RunConfig::new(3)).unwrap();
        assert_eq!(trace.status(), RunStatus::Succeeded { steps: 1 });
        assert_eq!(h_infinity(&trace).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn single_clause_resampled_once() {
        let p = single_clause();
        let pi = SparsePartition::singletons(2);
        let seed = seed_with_prefix(1, &[0, 1]);
        let tape = RandomTape::new(seed, 2);
        let trace = run(&p, &pi, &tape, &RunConfig::new(2)).unwrap();
        assert_eq!(trace.status(), RunStatus::Succeeded { steps: 2 });
        assert_eq!(h_infinity(&trace).unwrap()[1], 2);
        assert_eq!(h_infinity(&trace).unwrap()[0], 1);
        assert_eq!(trace.ib(0).unwrap(), &[0]);
        assert_eq!(trace.rounds()[0].viol, vec![vec![0]]);
        assert_eq!(trace.final_colouring()[1], tape.symbol(1, 1).unwrap());
    }

    #[test]
    fn step_at_fixed_point_only_counts() {
        let g = Digraph::from_edges(2, [(0, 1)]).unwrap();
        let p = ColouringProblem::new(g, 2, LocalRule::all_allowed(2)).unwrap();
        let pi = SparsePartition::singletons(2);
        let tape = RandomTape::new(1, 2);
        let mut state = MtaState::initial(&p, &pi, &tape).unwrap();
        let before = state.clone();
        let mut mis = GreedyByOrder(VertexOrder::identity(2));
        assert!(step(&p, &pi, &tape, &mut state, &mut mis).unwrap().is_none());
        assert_eq!(state.round, 1);
        assert_eq!(state.colouring, before.colouring);
        assert_eq!(state.h, before.h);
    }

    #[test]
    fn adjacent_violations_resample_lower_rank() {
        // clauses 0 and 1 share variable 2; both forbid 0
        let g = Digraph::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let (rule, _) = LocalRule::from_forbidden(vec![vec![vec![0]], vec![vec![0]], vec![]]);
        let p = ColouringProblem::new(g, 2, rule).unwrap();
        let pi = SparsePartition::singletons(3);
        let tape = FiniteTape::from_cells(2, 3, 2, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let mut state = MtaState::initial(&p, &pi, &tape).unwrap();
        assert_eq!(state.bad, vec![0, 1]);
        let mut mis = GreedyByOrder(VertexOrder::identity(3));
        let round = step(&p, &pi, &tape, &mut state, &mut mis).unwrap().unwrap();
        assert_eq!(round.ib, vec![0]);
        let mut reversed = GreedyByOrder(VertexOrder::from_sequence(&[1, 0, 2]).unwrap());
        let mut other = MtaState::initial(&p, &pi, &tape).unwrap();
        let round = step(&p, &pi, &tape, &mut other, &mut reversed).unwrap().unwrap();
        assert_eq!(round.ib, vec![1]);
    }

    #[test]
    fn unsatisfiable_clause_exhausts_budget() {
        let g = Digraph::from_edges(2, [(0, 1)]).unwrap();
        let (rule, _) = LocalRule::from_forbidden(vec![vec![vec![0], vec![1]], vec![]]);
        let p = ColouringProblem::new(g, 2, rule).unwrap();
        let pi = SparsePartition::singletons(2);
        let trace = run(&p, &pi, &RandomTape::new(3, 2), &RunConfig::new(2).max_steps(50)).unwrap();
        assert_eq!(trace.status(), RunStatus::BudgetExhausted { steps: 50 });
        assert_eq!(trace.rounds().len(), 49);
        assert!(h_infinity(&trace).is_err());
    }

    #[test]
    fn finite_tape_runs_out() {
        let p = single_clause();
        let pi = SparsePartition::singletons(2);
        let tape = FiniteTape::from_cells(2, 2, 1, vec![0, 0]).unwrap();
        let trace = run(&p, &pi, &tape, &RunConfig::new(2)).unwrap();
        assert_eq!(trace.status(), RunStatus::TapeExhausted { steps: 1 });
    }

    #[test]
    fn shared_part_gives_constant_start() {
        let g = Digraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let p = ColouringProblem::new(g, 3, LocalRule::all_allowed(4)).unwrap();
        let pi = SparsePartition::from_parts(&[0, 0, 0, 0], 0);
        let f = initial_colouring(&p, &pi, &RandomTape::new(11, 3)).unwrap();
        assert!(f.iter().all(|&c| c == f[0]));
    }

    fn torus_like(seed: u64) -> (ColouringProblem, RunTrace) {
        let n = 12;
        let mut edges = Vec::new();
        for x in 0..n {
            edges.push((x, x));
            edges.push((x, (x + 1) % n));
        }
        let g = Digraph::from_edges(n, edges).unwrap();
        let forbidden = (0..n).map(|_| vec![vec![0, 0], vec![1, 1]]).collect();
        let (rule, _) = LocalRule::from_forbidden(forbidden);
        let p = ColouringProblem::new(g, 2, rule).unwrap();
        let pi = SparsePartition::singletons(n);
        let trace = run(&p, &pi, &RandomTape::new(seed, 2), &RunConfig::new(n)).unwrap();
        (p, trace)
    }

    #[test]
    fn rollback_matches_full_history() {
        for seed in 0..20 {
            let (p, full) = torus_like(seed);
            let pi = SparsePartition::singletons(p.num_vertices());
            let cfg = RunConfig::new(p.num_vertices()).history(History::Window(1));
            let windowed = run(&p, &pi, &RandomTape::new(seed, 2), &cfg).unwrap();
            for k in 0..=full.last_index() + 2 {
                assert_eq!(full.colouring_at(k).unwrap(), windowed.colouring_at(k).unwrap());
            }
        }
    }

    #[test]
    fn counters_follow_recurrence() {
        for seed in 0..20 {
            let (p, trace) = torus_like(seed);
            assert!(trace.succeeded());
            for k in 1..=trace.last_index() {
                let h = trace.h_at(k).unwrap();
                let next = trace.h_at(k + 1).unwrap();
                let vars = &trace.rounds()[k - 1].vars;
                for x in 0..p.num_vertices() {
                    assert_eq!(next[x], h[x] + u32::from(vars.contains(&x)));
                }
                let before = trace.colouring_at(k - 1).unwrap();
                let after = trace.colouring_at(k).unwrap();
                for x in 0..p.num_vertices() {
                    if !vars.contains(&x) {
                        assert_eq!(before[x], after[x]);
                    }
                }
            }
            let h = h_infinity(&trace).unwrap();
            assert!(h.iter().all(|&v| v as usize <= 1 + trace.last_index()));
        }
    }

    #[test]
    fn counter_identity_with_tape() {
        let (p, trace) = torus_like(4);
        let pi = SparsePartition::singletons(p.num_vertices());
        let tape = RandomTape::new(4, 2);
        for k in 0..=trace.last_index() {
            let f = trace.colouring_at(k).unwrap();
            let h = trace.h_at(k + 1).unwrap();
            for x in 0..p.num_vertices() {
                assert_eq!(f[x], tape.symbol(pi.part_of(x), h[x] as usize - 1).unwrap());
            }
        }
    }

    #[test]
    fn csv_summary_has_header_and_rows() {
        let (_, trace) = torus_like(2);
        let mut buf = Vec::new();
        trace.write_csv_summary(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "round,bad,ib,resampled,cumulative_resamples,evaluations"
        );
        assert_eq!(lines.count(), trace.rounds().len());
    }

    #[test]
    fn trace_json_round_trip() {
        let (_, trace) = torus_like(9);
        let json = serde_json::to_string(&trace).unwrap();
        let back: RunTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trace);
    }
}
