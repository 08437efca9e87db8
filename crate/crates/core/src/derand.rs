//! Deterministic sequential solver: try every finite tape in `b^{π×m}` in
//! lexicographic order and run the resampling loop on each until it succeeds
//! or needs a symbol at round index `m`.
//!
//! One pass of the inner loop performs one parallel round. It keeps two
//! lists: `currently_violated`, exactly the bad set at the start of a pass,
//! and `potentially_violated`, that list together with its `Rel`-neighbours.
//! Only members of the latter can be violated after the pass, so only they
//! are re-evaluated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::SparsePartition;
use crate::rule::{Colouring, ColouringProblem};
use crate::tape::{FiniteTape, SymbolSource};

pub const DEFAULT_TAPE_CAP: u64 = 1 << 24;

/// `ln K` for `K = d (|π|^d 2^{b^d+1} b)^{|π|} |π|! / (1 − (eΔ)^{−δ})^{|π|}`.
pub fn explicit_log_k(b: u32, delta: f64, d: usize, num_parts: usize, big_delta: usize) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 || big_delta == 0 || d == 0 || num_parts == 0 {
        return Err(Error::Parameter(
            "explicit K needs δ > 0, Δ ≥ 1, d ≥ 1 and at least one part".into(),
        ));
    }
    let parts = num_parts as f64;
    let decay = (-delta * (std::f64::consts::E * big_delta as f64).ln()).exp();
    let per_part = d as f64 * parts.ln()
        + (f64::from(b).powi(d as i32) + 1.0) * std::f64::consts::LN_2
        + f64::from(b).ln();
    let log_factorial: f64 = (2..=num_parts).map(|j| (j as f64).ln()).sum();
    Ok((d as f64).ln() + parts * per_part + log_factorial - parts * (-decay).ln_1p())
}

/// `K` evaluated factor by factor; infinite when it overflows.
pub fn explicit_k(b: u32, delta: f64, d: usize, num_parts: usize, big_delta: usize) -> Result<f64> {
    explicit_log_k(b, delta, d, num_parts, big_delta)?;
    let parts = num_parts as f64;
    let base = parts.powi(d as i32) * 2f64.powf(f64::from(b).powi(d as i32) + 1.0) * f64::from(b);
    let factorial: f64 = (1..=num_parts).map(|j| j as f64).product();
    let decay = (std::f64::consts::E * big_delta as f64).powf(-delta);
    Ok(d as f64 * base.powi(num_parts as i32) * factorial / (1.0 - decay).powi(num_parts as i32))
}

/// `ln K` with `Δ` replaced by its worst case `d²`.
pub fn explicit_log_k_worst_case(b: u32, delta: f64, d: usize, num_parts: usize) -> Result<f64> {
    explicit_log_k(b, delta, d, num_parts, d * d)
}

/// Smallest `m ≥ 1` with `ln K + |π| ln(m+1) − δ m ln(eΔ) < 0`.
pub fn threshold_m(log_k: f64, num_parts: usize, big_delta: usize, delta: f64) -> Result<u64> {
    let rate = delta * (std::f64::consts::E * big_delta as f64).ln();
    if rate.is_nan() || rate <= 0.0 || !log_k.is_finite() {
        return Err(Error::Parameter("threshold needs δ·ln(eΔ) > 0 and finite ln K".into()));
    }
    let value = |m: u64| log_k + num_parts as f64 * ((m + 1) as f64).ln() - rate * m as f64;
    // The expression is convex in m; gallop to a bracket, then bisect.
    let mut hi = 1u64;
    while value(hi) >= 0.0 {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // value is decreasing beyond its minimum, so scan the bracket from the
    // left end when it is short and bisect otherwise.
    if hi - lo <= 64 {
        return Ok((lo.max(1)..=hi).find(|&m| value(m) < 0.0).unwrap_or(hi));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if value(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(1))
}

/// Theoretical constants and tape-space size for a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerandBudget {
    pub m: u64,
    pub log_k: f64,
    pub log_k_worst_case: f64,
    /// `log2 b^{|π|·m}`.
    pub num_tapes_log2: f64,
    pub infeasible: bool,
}

impl DerandBudget {
    pub fn theoretical(
        p: &ColouringProblem,
        pi: &SparsePartition,
        delta: f64,
        d: usize,
        tape_cap: u64,
    ) -> Result<Self> {
        let big_delta = p.rel_max_degree().max(1);
        let log_k = explicit_log_k(p.b(), delta, d, pi.num_parts(), big_delta)?;
        let log_k_worst_case = explicit_log_k_worst_case(p.b(), delta, d, pi.num_parts())?;
        let m = threshold_m(log_k, pi.num_parts(), big_delta, delta)?;
        let num_tapes_log2 = num_tapes_log2(p.b(), pi.num_parts(), m as usize);
        Ok(Self {
            m,
            log_k,
            log_k_worst_case,
            num_tapes_log2,
            infeasible: num_tapes_log2 > (tape_cap as f64).log2(),
        })
    }
}

pub fn num_tapes_log2(b: u32, num_parts: usize, m: usize) -> f64 {
    (num_parts * m) as f64 * f64::from(b).log2()
}

/// `b^{|π|·m}` when it fits under `cap`.
pub fn num_tapes(b: u32, num_parts: usize, m: usize, cap: u64) -> Result<u64> {
    let mut count: u64 = 1;
    for _ in 0..num_parts * m {
        count = count.saturating_mul(u64::from(b));
        if count > cap {
            return Err(Error::Infeasible {
                num_tapes_log2: num_tapes_log2(b, num_parts, m),
                cap,
            });
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassLists {
    pub currently_violated: Vec<usize>,
    pub potentially_violated: Vec<usize>,
}

/// State of the inner loop on one tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassState {
    pub colouring: Colouring,
    pub h: Vec<u32>,
    pub lists: PassLists,
    pub passes: usize,
    /// Clause evaluations after the initial scan.
    pub re_evaluations: u64,
}

impl PassState {
    pub fn initial<S: SymbolSource + ?Sized>(
        p: &ColouringProblem,
        pi: &SparsePartition,
        tape: &S,
    ) -> Result<Self> {
        let colouring = crate::mta::initial_colouring(p, pi, tape)?;
        let currently_violated = p.bad_set(&colouring);
        let potentially_violated = with_neighbours(p, &currently_violated);
        Ok(Self {
            h: vec![1; p.num_vertices()],
            colouring,
            lists: PassLists {
                currently_violated,
                potentially_violated,
            },
            passes: 0,
            re_evaluations: 0,
        })
    }

    pub fn is_satisfied(&self) -> bool {
        self.lists.currently_violated.is_empty()
    }
}

/// `list ∪ N_Rel(list)`, ascending.
fn with_neighbours(p: &ColouringProblem, list: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = list
        .iter()
        .flat_map(|&c| std::iter::once(c).chain(p.rel().var(c).iter().copied()))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// One pass. Returns the clauses resampled, in scan order; an empty result
/// means the colouring already satisfies the rule. A read past the tape end
/// surfaces as [`Error::TapeExhausted`].
pub fn internal_pass<S: SymbolSource + ?Sized>(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &S,
    state: &mut PassState,
) -> Result<Vec<usize>> {
    debug_assert!(
        p.bad_set(&state.colouring)
            .iter()
            .all(|c| state.lists.currently_violated.contains(c)),
        "currently violated list misses a violated clause"
    );
    if state.lists.currently_violated.is_empty() {
        return Ok(Vec::new());
    }
    let g = p.graph();
    let rel = p.rel();
    let mut resampled_mark = vec![false; p.num_vertices()];
    let mut resampled = Vec::new();
    for &c in &state.lists.currently_violated {
        if rel.var(c).iter().any(|&y| y != c && resampled_mark[y]) {
            continue;
        }
        for &v in g.var(c) {
            state.colouring[v] = tape.symbol(pi.part_of(v), state.h[v] as usize)?;
            state.h[v] += 1;
        }
        resampled_mark[c] = true;
        resampled.push(c);
    }
    let next: Vec<usize> = state
        .lists
        .potentially_violated
        .iter()
        .copied()
        .filter(|&c| p.is_violated(&state.colouring, c))
        .collect();
    state.re_evaluations += state.lists.potentially_violated.len() as u64;
    state.lists.potentially_violated = with_neighbours(p, &next);
    state.lists.currently_violated = next;
    state.passes += 1;
    Ok(resampled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TapeOutcome {
    Satisfied,
    Exhausted,
}

/// What happened on one tape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapeStats {
    pub tape: u64,
    pub outcome: TapeOutcome,
    pub passes: usize,
    pub re_evaluations: u64,
}

/// Result of running the inner loop on a single tape.
#[derive(Debug, Clone)]
pub struct TapeRun {
    pub stats: TapeStats,
    pub colouring: Colouring,
    /// Resampled clauses of each pass, in scan order.
    pub passes: Vec<Vec<usize>>,
}

/// `d^4 · m · n` with `d = maxdeg(G)`.
pub fn work_bound(p: &ColouringProblem, m: usize) -> u64 {
    let d = p.graph().max_degree() as u64;
    d.pow(4) * m as u64 * p.num_vertices() as u64
}

/// Runs passes until success or tape exhaustion.
pub fn run_tape(
    p: &ColouringProblem,
    pi: &SparsePartition,
    tape: &FiniteTape,
    index: u64,
    record: bool,
) -> Result<TapeRun> {
    let mut state = PassState::initial(p, pi, tape)?;
    let mut passes = Vec::new();
    let outcome = loop {
        if state.is_satisfied() {
            break TapeOutcome::Satisfied;
        }
        match internal_pass(p, pi, tape, &mut state) {
            Ok(resampled) => {
                if record {
                    passes.push(resampled);
                }
            }
            Err(Error::TapeExhausted { .. }) => break TapeOutcome::Exhausted,
            Err(e) => return Err(e),
        }
    };
    let bound = work_bound(p, tape.rounds());
    assert!(
        state.re_evaluations <= bound,
        "{} re-evaluations exceed d^4·m·n = {bound}",
        state.re_evaluations
    );
    if outcome == TapeOutcome::Satisfied {
        assert!(p.satisfies(&state.colouring), "inner loop stopped on a bad colouring");
    }
    Ok(TapeRun {
        stats: TapeStats {
            tape: index,
            outcome,
            passes: state.passes,
            re_evaluations: state.re_evaluations,
        },
        colouring: state.colouring,
        passes,
    })
}

/// A satisfying colouring with the tape that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerandSolution {
    pub colouring: Colouring,
    pub tape: u64,
    pub m: usize,
    /// One entry per tape tried, the successful one last.
    pub tapes: Vec<TapeStats>,
}

impl DerandSolution {
    pub fn total_re_evaluations(&self) -> u64 {
        self.tapes.iter().map(|t| t.re_evaluations).sum()
    }
}

/// Sequential external loop over tapes `0, 1, …`.
pub fn derand_solve(
    p: &ColouringProblem,
    pi: &SparsePartition,
    m: usize,
    tape_cap: u64,
) -> Result<DerandSolution> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    let total = num_tapes(p.b(), pi.num_parts(), m, tape_cap)?;
    let mut tapes = Vec::new();
    for index in 0..total {
        let tape = FiniteTape::nth(p.b(), pi.num_parts(), m, u128::from(index));
        let run = run_tape(p, pi, &tape, index, false)?;
        let satisfied = run.stats.outcome == TapeOutcome::Satisfied;
        tapes.push(run.stats);
        if satisfied {
            return Ok(DerandSolution {
                colouring: run.colouring,
                tape: index,
                m,
                tapes,
            });
        }
    }
    Err(Error::Exhausted { tried: total })
}

/// Parallel external loop; the lowest successful tape wins, so the result
/// equals [`derand_solve`] apart from the per-tape statistics, which cover
/// only the winning tape.
pub fn derand_solve_par(
    p: &ColouringProblem,
    pi: &SparsePartition,
    m: usize,
    tape_cap: u64,
) -> Result<DerandSolution> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    let total = num_tapes(p.b(), pi.num_parts(), m, tape_cap)?;
    let found = (0..total).into_par_iter().find_map_first(|index| {
        let tape = FiniteTape::nth(p.b(), pi.num_parts(), m, u128::from(index));
        match run_tape(p, pi, &tape, index, false) {
            Ok(run) if run.stats.outcome == TapeOutcome::Satisfied => Some(Ok(run)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        }
    });
    match found {
        Some(run) => {
            let run = run?;
            Ok(DerandSolution {
                colouring: run.colouring,
                tape: run.stats.tape,
                m,
                tapes: vec![run.stats],
            })
        }
        None => Err(Error::Exhausted { tried: total }),
    }
}

/// Post-initialisation clause evaluations summed over every tape tried.
pub fn work_counter(solution: &DerandSolution) -> u64 {
    solution.total_re_evaluations()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Digraph, VertexOrder};
    use crate::mta::{is_maximal_independent, run, RunConfig, RunStatus};
    use crate::rule::LocalRule;

    fn single_clause(forbidden: Vec<Vec<u32>>) -> ColouringProblem {
        let g = Digraph::from_edges(2, [(0, 1)]).unwrap();
        let (rule, _) = LocalRule::from_forbidden(vec![forbidden, vec![]]);
        ColouringProblem::new(g, 2, rule).unwrap()
    }

    #[test]
    fn k_example_value() {
        let log_k = explicit_log_k(2, 1.0, 1, 1, 1).unwrap();
        let expected = 16.0 / (1.0 - (-1f64).exp());
        assert!((log_k.exp() - expected).abs() < 1e-9 * expected);
        assert!((log_k.exp() - 25.311627309909223).abs() < 1e-9);
        let direct = explicit_k(2, 1.0, 1, 1, 1).unwrap();
        assert!((direct - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn log_and_direct_agree() {
        for parts in 1..=4 {
            for d in 1..=3 {
                for big_delta in 1..=9 {
                    let log_k = explicit_log_k(2, 0.5, d, parts, big_delta).unwrap();
                    let direct = explicit_k(2, 0.5, d, parts, big_delta).unwrap();
                    assert!(((log_k.exp() - direct) / direct).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn k_grows_with_parts() {
        let ks: Vec<f64> = (1..8)
            .map(|parts| explicit_log_k(3, 0.2, 4, parts, 12).unwrap())
            .collect();
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        let worst = explicit_log_k_worst_case(3, 0.2, 4, 3).unwrap();
        assert_eq!(worst, explicit_log_k(3, 0.2, 4, 3, 16).unwrap());
    }

    #[test]
    fn threshold_examples() {
        let log_k = explicit_log_k(2, 1.0, 1, 1, 1).unwrap();
        assert_eq!(threshold_m(log_k, 1, 1, 1.0).unwrap(), 6);
        let at5 = log_k.exp() * 6.0 / 5f64.exp();
        assert!(at5 > 1.0 && at5 < 1.03);
        assert_eq!(threshold_m(0.5f64.ln(), 1, 1, 1.0).unwrap(), 1);
        let ms: Vec<u64> = [0.1, 0.2, 0.5, 1.0, 2.0]
            .iter()
            .map(|&delta| threshold_m(30.0, 4, 6, delta).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn threshold_matches_linear_scan() {
        for &(log_k, parts, big_delta, delta) in &[
            (25.0, 3, 6, 0.1),
            (400.0, 10, 13, 0.05),
            (3.0, 1, 2, 1.0),
            (1e4, 50, 8, 0.5),
        ] {
            let rate = delta * (std::f64::consts::E * big_delta as f64).ln();
            let scan = (1u64..)
                .find(|&m| log_k + parts as f64 * ((m + 1) as f64).ln() - rate * (m as f64) < 0.0)
                .unwrap();
            assert_eq!(threshold_m(log_k, parts, big_delta, delta).unwrap(), scan);
        }
    }

    #[test]
    fn all_allowed_uses_first_tape() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = ColouringProblem::new(g, 2, LocalRule::all_allowed(3)).unwrap();
        let pi = SparsePartition::from_parts(&[0, 0, 0], 0);
        let sol = derand_solve(&p, &pi, 2, DEFAULT_TAPE_CAP).unwrap();
        assert_eq!(sol.tape, 0);
        assert_eq!(work_counter(&sol), 0);
    }

    #[test]
    fn single_clause_needs_second_tape() {
        let p = single_clause(vec![vec![0]]);
        let pi = SparsePartition::from_parts(&[0, 0], 0);
        let sol = derand_solve(&p, &pi, 1, DEFAULT_TAPE_CAP).unwrap();
        assert_eq!(sol.tape, 1);
        assert_eq!(sol.colouring[1], 1);
        assert_eq!(sol.tapes[0].outcome, TapeOutcome::Exhausted);
        assert_eq!(sol.tapes[0].re_evaluations, 0);
        assert_eq!(work_counter(&sol), 0);
        assert!(work_counter(&sol) <= work_bound(&p, 1));
    }

    #[test]
    fn unsatisfiable_exhausts_every_tape() {
        let p = single_clause(vec![vec![0], vec![1]]);
        let pi = SparsePartition::from_parts(&[0, 0], 0);
        assert!(matches!(
            derand_solve(&p, &pi, 2, DEFAULT_TAPE_CAP),
            Err(Error::Exhausted { tried: 4 })
        ));
        assert!(matches!(
            derand_solve_par(&p, &pi, 2, DEFAULT_TAPE_CAP),
            Err(Error::Exhausted { tried: 4 })
        ));
    }

    #[test]
    fn tape_space_cap() {
        let p = single_clause(vec![vec![0]]);
        let pi = SparsePartition::singletons(2);
        assert!(matches!(
            derand_solve(&p, &pi, 20, 1 << 10),
            Err(Error::Infeasible { .. })
        ));
    }

    fn cycle_nae(n: usize) -> ColouringProblem {
        let mut edges = Vec::new();
        for x in 0..n {
            edges.push((x, x));
            edges.push((x, (x + 1) % n));
        }
        let g = Digraph::from_edges(n, edges).unwrap();
        let (rule, _) = LocalRule::from_forbidden(vec![vec![vec![0, 0], vec![1, 1]]; n]);
        ColouringProblem::new(g, 2, rule).unwrap()
    }

    #[test]
    fn adjacent_violations_take_the_first() {
        let p = cycle_nae(4);
        let pi = SparsePartition::singletons(4);
        let tape = FiniteTape::from_cells(2, 4, 2, vec![0, 0, 1, 1, 1, 1, 1, 1]).unwrap();
        let mut state = PassState::initial(&p, &pi, &tape).unwrap();
        assert_eq!(state.lists.currently_violated, vec![0, 2]);
        let resampled = internal_pass(&p, &pi, &tape, &mut state).unwrap();
        assert_eq!(resampled, vec![0, 2]);
        let tape = FiniteTape::from_cells(2, 4, 2, vec![0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
        let mut state = PassState::initial(&p, &pi, &tape).unwrap();
        assert_eq!(state.lists.currently_violated, vec![0, 1]);
        assert_eq!(internal_pass(&p, &pi, &tape, &mut state).unwrap(), vec![0]);
    }

    #[test]
    fn passes_match_the_parallel_runner() {
        let p = cycle_nae(9);
        let pi = SparsePartition::from_parts(&[0, 1, 2, 0, 1, 2, 0, 1, 2], 1);
        for index in 0..512u64 {
            let tape = FiniteTape::nth(2, 3, 3, u128::from(index));
            let derand = run_tape(&p, &pi, &tape, index, true).unwrap();
            let trace = run(&p, &pi, &tape, &RunConfig::new(9)).unwrap();
            for (j, resampled) in derand.passes.iter().enumerate() {
                let mut sorted = resampled.clone();
                sorted.sort_unstable();
                assert_eq!(trace.ib(j).unwrap(), &sorted[..]);
                let bad = p.bad_set(&trace.colouring_at(j).unwrap());
                assert!(is_maximal_independent(p.rel(), &bad, &sorted));
            }
            match derand.stats.outcome {
                TapeOutcome::Satisfied => {
                    assert!(matches!(trace.status(), RunStatus::Succeeded { .. }));
                    assert_eq!(&derand.colouring, trace.final_colouring());
                }
                TapeOutcome::Exhausted => {
                    assert!(matches!(trace.status(), RunStatus::TapeExhausted { .. }));
                }
            }
        }
        let _ = VertexOrder::identity(9);
    }

    #[test]
    fn parallel_search_agrees() {
        let p = cycle_nae(6);
        let pi = SparsePartition::from_parts(&[0, 1, 0, 1, 0, 1], 0);
        let seq = derand_solve(&p, &pi, 4, DEFAULT_TAPE_CAP).unwrap();
        let par = derand_solve_par(&p, &pi, 4, DEFAULT_TAPE_CAP).unwrap();
        assert_eq!(seq.tape, par.tape);
        assert_eq!(seq.colouring, par.colouring);
        assert!(p.satisfies(&seq.colouring));
    }
}
