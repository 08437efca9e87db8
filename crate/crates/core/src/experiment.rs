//! Seeded trial batches and the summaries drawn from them: tail tables of
//! `max h^∞`, geometric decay fits, means and medians.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::ExperimentRecord;
use crate::mta::{run, RunConfig, RunStatus};
use crate::partition::{sparse_partition, SparsePartition};
use crate::rule::ColouringProblem;
use crate::tape::{symbols_consumed, RandomTape};

/// The partition the solver uses: `3R`-sparse, or singletons in classic mode.
pub fn solver_partition(p: &ColouringProblem, big_r: usize, classic: bool) -> SparsePartition {
    if classic {
        SparsePartition::singletons(p.num_vertices())
    } else {
        sparse_partition(p.graph(), 3 * big_r)
    }
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub status: RunStatus,
    /// Final colouring passes the rule check.
    pub satisfied: bool,
    pub rounds: usize,
    pub max_h: u32,
    pub symbols: u64,
    pub bits: f64,
    pub parts: usize,
    pub re_evaluations: u64,
    pub wall_ms: f64,
}

impl TrialResult {
    pub fn succeeded(&self) -> bool {
        matches!(self.status, RunStatus::Succeeded { .. })
    }

    pub fn record(&self, instance: &str, n: usize) -> ExperimentRecord {
        ExperimentRecord {
            instance: instance.to_string(),
            n,
            seed: self.seed,
            parts: self.parts,
            rounds: self.rounds,
            max_h: self.max_h,
            symbols: self.symbols,
            bits: self.bits,
            wall_ms: self.wall_ms,
        }
    }
}

pub fn run_trial(
    p: &ColouringProblem,
    pi: &SparsePartition,
    seed: u64,
    max_steps: usize,
) -> Result<TrialResult> {
    let start = Instant::now();
    let tape = RandomTape::new(seed, p.b());
    let config = RunConfig::new(p.num_vertices())
        .max_steps(max_steps)
        .history(crate::mta::History::Window(1));
    let trace = run(p, pi, &tape, &config)?;
    let consumption = symbols_consumed(&trace, pi);
    Ok(TrialResult {
        seed,
        status: trace.status(),
        satisfied: p.satisfies(trace.final_colouring()),
        rounds: trace.status().steps(),
        max_h: trace.h().iter().copied().max().unwrap_or(0),
        symbols: consumption.symbols,
        bits: consumption.bits(p.b()),
        parts: pi.num_parts(),
        re_evaluations: trace.re_evaluations(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs one trial per seed in parallel; results come back sorted by seed.
pub fn run_trials(
    p: &ColouringProblem,
    pi: &SparsePartition,
    seeds: impl IntoParallelIterator<Item = u64>,
    max_steps: usize,
) -> Result<Vec<TrialResult>> {
    let mut out: Vec<TrialResult> = seeds
        .into_par_iter()
        .map(|seed| run_trial(p, pi, seed, max_steps))
        .collect::<Result<_>>()?;
    out.sort_by_key(|t| t.seed);
    Ok(out)
}

/// `(m, Pr(X ≥ m))` for `m = 1..=max X`.
pub fn tail_table(samples: &[u32]) -> Vec<(u32, f64)> {
    let Some(&top) = samples.iter().max() else {
        return Vec::new();
    };
    let total = samples.len() as f64;
    let mut counts = vec![0usize; top as usize + 2];
    for &s in samples {
        counts[s as usize] += 1;
    }
    let mut at_least = samples.len();
    let mut out = Vec::with_capacity(top as usize);
    for m in 0..=top {
        if m >= 1 {
            out.push((m, at_least as f64 / total));
        }
        at_least -= counts[m as usize];
    }
    out
}

/// Least-squares line through `(m, ln Pr(X ≥ m))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// `exp(slope)`: the fitted factor by which the tail shrinks per unit m.
    pub ratio: f64,
    pub points: usize,
}

/// Fits the tail over points with `0 < Pr < 1`, the observed support where
/// the tail actually decays. Needs at least two such points.
pub fn fit_geometric_decay(tail: &[(u32, f64)]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&(_, p)| p > 0.0 && p < 1.0)
        .map(|&(m, p)| (f64::from(m), p.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(DecayFit {
        slope,
        intercept: my - slope * mx,
        ratio: slope.exp(),
        points: pts.len(),
    })
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Summary of a trial batch at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub instance: String,
    pub n: usize,
    pub parts: usize,
    pub trials: usize,
    pub succeeded: usize,
    pub mean_symbols: f64,
    pub mean_max_h: f64,
    pub median_re_evaluations: f64,
}

pub fn summarise(instance: &str, n: usize, trials: &[TrialResult]) -> SizeSummary {
    let pick = |f: fn(&TrialResult) -> f64| trials.iter().map(f).collect::<Vec<f64>>();
    SizeSummary {
        instance: instance.to_string(),
        n,
        parts: trials.first().map_or(0, |t| t.parts),
        trials: trials.len(),
        succeeded: trials.iter().filter(|t| t.succeeded()).count(),
        mean_symbols: mean(&pick(|t| t.symbols as f64)),
        mean_max_h: mean(&pick(|t| f64::from(t.max_h))),
        median_re_evaluations: median(&pick(|t| t.re_evaluations as f64)),
    }
}
