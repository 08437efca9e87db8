use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde::Serialize;

use resample_forge::derand::{self, DerandBudget, DerandSolution, TapeStats};
use resample_forge::experiment::{
    fit_geometric_decay, run_trials, solver_partition, summarise, tail_table, DecayFit, SizeSummary,
};
use resample_forge::io::{self, GridKsat, Instance};
use resample_forge::landscape::{
    count_delta_trees_with_budget, enumerate_grounded_forests, forest_count_bound, fuss_catalan,
    q_poly, TreeBudget,
};
use resample_forge::mta::{run, RunConfig};
use resample_forge::tape::{symbols_consumed, RandomTape};
use resample_forge::{Digraph, Error};

use crate::{Family, GenArgs, GenKind, OracleArgs, SolveArgs, SolveDetArgs, StatsArgs, VerifyArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    Error = 1,
    Unsolved = 2,
    Infeasible = 3,
    Exhausted = 4,
}

pub struct Context {
    pub quiet: bool,
}

impl Context {
    fn table(&self, text: impl FnOnce() -> String) {
        if !self.quiet {
            eprint!("{}", text());
        }
    }
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)?;
    Ok(())
}

fn load(path: &Path) -> Result<Instance> {
    io::load_problem(path).with_context(|| format!("loading {}", path.display()))
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    status: &'static str,
    rounds: usize,
    max_h: u32,
    symbols: u64,
    bits: f64,
    parts: usize,
    n: usize,
    seed: u64,
    re_evaluations: u64,
}

pub fn solve(ctx: &Context, args: SolveArgs) -> Result<Outcome> {
    let p = load(&args.problem)?.problem;
    let pi = solver_partition(&p, args.partition.big_r, args.partition.classic);
    let tape = RandomTape::new(args.seed, p.b());
    let config = RunConfig::new(p.num_vertices()).max_steps(args.max_steps);
    let trace = run(&p, &pi, &tape, &config)?;
    let consumption = symbols_consumed(&trace, &pi);
    let summary = SolveSummary {
        status: trace.status().label(),
        rounds: trace.status().steps(),
        max_h: trace.h().iter().copied().max().unwrap_or(0),
        symbols: consumption.symbols,
        bits: consumption.bits(p.b()),
        parts: pi.num_parts(),
        n: p.num_vertices(),
        seed: args.seed,
        re_evaluations: trace.re_evaluations(),
    };
    if let Some(path) = &args.trace {
        let mut out = BufWriter::new(File::create(path)?);
        trace.write_csv_summary(&mut out)?;
        out.flush()?;
    }
    let succeeded = trace.succeeded();
    if succeeded {
        if args.verify && !p.satisfies(trace.final_colouring()) {
            bail!("verification failed: the reported colouring violates {:?}", p.bad_set(trace.final_colouring()));
        }
        if let Some(path) = &args.out {
            io::save_colouring(path, p.b(), trace.final_colouring())?;
        }
    }
    ctx.table(|| {
        format!(
            "status   {}\nrounds   {}\nmax h    {}\nsymbols  {} ({:.1} bits)\nparts    {}\n",
            summary.status, summary.rounds, summary.max_h, summary.symbols, summary.bits, summary.parts
        )
    });
    emit(&summary)?;
    Ok(if succeeded { Outcome::Ok } else { Outcome::Unsolved })
}

#[derive(Debug, Serialize)]
struct DetSummary {
    theoretical: DerandBudget,
    m: usize,
    parts: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tape: Option<u64>,
    tapes_tried: u64,
    re_evaluations: u64,
}

fn write_tapes_csv(path: &Path, tapes: &[TapeStats]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for t in tapes {
        writer.serialize(t)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn solve_det(ctx: &Context, args: SolveDetArgs) -> Result<Outcome> {
    let p = load(&args.problem)?.problem;
    let pi = solver_partition(&p, args.partition.big_r, args.partition.classic);
    let d = args.d.unwrap_or_else(|| p.graph().max_degree()).max(1);
    let theoretical = DerandBudget::theoretical(&p, &pi, args.delta, d, args.tape_cap)?;
    ctx.table(|| {
        format!(
            "ln K         {:.3} (worst case Δ=d²: {:.3})\ntheoretical m {} ({:.1} bits of tape space{})\n",
            theoretical.log_k,
            theoretical.log_k_worst_case,
            theoretical.m,
            theoretical.num_tapes_log2,
            if theoretical.infeasible { ", infeasible" } else { "" }
        )
    });
    let solved = if args.parallel {
        derand::derand_solve_par(&p, &pi, args.m, args.tape_cap)
    } else {
        derand::derand_solve(&p, &pi, args.m, args.tape_cap)
    };
    let (summary, outcome) = match solved {
        Ok(DerandSolution {
            colouring,
            tape,
            tapes,
            ..
        }) => {
            if let Some(path) = &args.out {
                io::save_colouring(path, p.b(), &colouring)?;
            }
            if let Some(path) = &args.tapes_csv {
                write_tapes_csv(path, &tapes)?;
            }
            let summary = DetSummary {
                theoretical,
                m: args.m,
                parts: pi.num_parts(),
                status: "succeeded",
                tape: Some(tape),
                tapes_tried: tape + 1,
                re_evaluations: tapes.iter().map(|t| t.re_evaluations).sum(),
            };
            (summary, Outcome::Ok)
        }
        Err(Error::Infeasible { num_tapes_log2, cap }) => {
            eprintln!("tape space of {num_tapes_log2:.1} bits exceeds the cap of {cap} tapes");
            let summary = DetSummary {
                theoretical,
                m: args.m,
                parts: pi.num_parts(),
                status: "infeasible",
                tape: None,
                tapes_tried: 0,
                re_evaluations: 0,
            };
            (summary, Outcome::Infeasible)
        }
        Err(Error::Exhausted { tried }) => {
            let summary = DetSummary {
                theoretical,
                m: args.m,
                parts: pi.num_parts(),
                status: "exhausted",
                tape: None,
                tapes_tried: tried,
                re_evaluations: 0,
            };
            (summary, Outcome::Exhausted)
        }
        Err(e) => return Err(e.into()),
    };
    ctx.table(|| {
        format!(
            "status       {}\ntapes tried  {}\n",
            summary.status, summary.tapes_tried
        )
    });
    emit(&summary)?;
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct StatsSize {
    #[serde(flatten)]
    summary: SizeSummary,
    tail: Vec<(u32, f64)>,
    fit: Option<DecayFit>,
}

fn instance_for(args: &StatsArgs, side: usize) -> Result<(String, Instance)> {
    Ok(match args.family {
        Family::Torus => (
            format!("torus_nae_{side}x{side}_b{}", args.b),
            io::gen_torus_nae(side, side, args.b)?,
        ),
        Family::Ksat => {
            let params = GridKsat {
                w: side,
                h: side,
                k: args.k,
                clause_radius: args.clause_radius,
                clauses_per_cell: 1,
                b: args.b,
                seed: args.seed,
            };
            (
                format!("grid_ksat_{side}x{side}_k{}_s{}", args.k, args.seed),
                io::gen_grid_ksat(params)?,
            )
        }
    })
}

pub fn stats(ctx: &Context, args: StatsArgs) -> Result<Outcome> {
    if let Some(path) = &args.results {
        io::append_records(path, &[])?;
    }
    let mut sizes = Vec::new();
    for &side in &args.sizes {
        let (name, instance) = instance_for(&args, side)?;
        let p = instance.problem;
        let pi = solver_partition(&p, args.partition.big_r, args.partition.classic);
        let seeds: Vec<u64> = (0..args.repeat).map(|i| args.seed + i).collect();
        let trials = run_trials(&p, &pi, seeds, args.max_steps)?;
        if let Some(path) = &args.results {
            let records: Vec<_> = trials.iter().map(|t| t.record(&name, p.num_vertices())).collect();
            io::append_records(path, &records)?;
        }
        let max_h: Vec<u32> = trials.iter().map(|t| t.max_h).collect();
        let tail = tail_table(&max_h);
        sizes.push(StatsSize {
            summary: summarise(&name, p.num_vertices(), &trials),
            fit: fit_geometric_decay(&tail),
            tail,
        });
    }
    ctx.table(|| {
        let mut s = format!(
            "{:<28} {:>6} {:>6} {:>8} {:>10} {:>8} {:>10}\n",
            "instance", "n", "parts", "solved", "symbols", "max h", "decay"
        );
        for row in &sizes {
            let t = &row.summary;
            s += &format!(
                "{:<28} {:>6} {:>6} {:>4}/{:<3} {:>10.2} {:>8.3} {:>10}\n",
                t.instance,
                t.n,
                t.parts,
                t.succeeded,
                t.trials,
                t.mean_symbols,
                t.mean_max_h,
                row.fit.map_or("-".into(), |f| format!("{:.3}", f.ratio))
            );
        }
        s
    });
    emit(&serde_json::json!({ "sizes": sizes }))?;
    Ok(Outcome::Ok)
}

#[derive(Debug, Serialize)]
struct TreeRow {
    delta: usize,
    i: usize,
    count: u64,
    fuss_catalan: u128,
    bound: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct QRow {
    delta: usize,
    j: usize,
    coefficients: Vec<u128>,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct ForestRow {
    n: usize,
    m: usize,
    graphs: usize,
    max_ratio: f64,
    pass: bool,
}

/// Every digraph on `n` vertices with at most `max_edges` edges, loops included.
fn small_digraphs(n: usize, max_edges: usize) -> impl Iterator<Item = Digraph> {
    let slots = n * n;
    (0u64..1 << slots)
        .filter(move |mask| mask.count_ones() as usize <= max_edges)
        .map(move |mask| {
            let edges = (0..slots).filter(|s| mask >> s & 1 == 1).map(|s| (s / n, s % n));
            Digraph::from_edges(n, edges).expect("edges in range")
        })
}

pub fn oracle(ctx: &Context, args: OracleArgs) -> Result<Outcome> {
    if args.max_vertices > 4 {
        bail!("forest enumeration is limited to 4 vertices, got {}", args.max_vertices);
    }
    let budget = TreeBudget::default();
    let e = std::f64::consts::E;
    let mut trees = Vec::new();
    for delta in 1..=args.max_delta {
        for i in 1..=args.max_size {
            let count = count_delta_trees_with_budget(delta, i, budget)?;
            let bound = (e * delta as f64).powi(i as i32);
            let fc = fuss_catalan(delta, i);
            trees.push(TreeRow {
                delta,
                i,
                count,
                fuss_catalan: fc,
                bound,
                pass: (count as f64) <= bound && u128::from(count) == fc,
            });
        }
    }
    let mut q_rows = Vec::new();
    for delta in 1..=args.max_delta {
        for j in 0..args.max_size {
            let coefficients = q_poly(delta, j, j + 2)?;
            let pass = coefficients
                .iter()
                .enumerate()
                .all(|(n, &c)| count_delta_trees_with_budget(delta, n, budget).map(u128::from).ok() == Some(c));
            q_rows.push(QRow {
                delta,
                j,
                coefficients,
                pass,
            });
        }
    }
    let mut forests = Vec::new();
    for n in 1..=args.max_vertices {
        for m in 1..=args.max_nodes {
            let (mut graphs, mut max_ratio, mut pass) = (0, 0.0f64, true);
            for g in small_digraphs(n, args.max_edges) {
                let big_delta = resample_forge::graph::build_rel(&g).max_degree();
                if big_delta == 0 {
                    continue;
                }
                let count = enumerate_grounded_forests(&g, m)?;
                let bound = forest_count_bound(n, m, big_delta);
                graphs += 1;
                max_ratio = max_ratio.max(count as f64 / bound);
                pass &= count as f64 <= bound;
            }
            forests.push(ForestRow {
                n,
                m,
                graphs,
                max_ratio,
                pass,
            });
        }
    }
    let all_pass = trees.iter().all(|r| r.pass) && q_rows.iter().all(|r| r.pass) && forests.iter().all(|r| r.pass);
    ctx.table(|| {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        let mut s = String::from("trees: P_i ≤ (eΔ)^i\n");
        for r in &trees {
            s += &format!(
                "  Δ={} i={} P={} ≤ {:.1} {}\n",
                r.delta, r.i, r.count, r.bound, mark(r.pass)
            );
        }
        s += "Q_j prefix = P_n\n";
        for r in &q_rows {
            s += &format!("  Δ={} j={} {:?} {}\n", r.delta, r.j, r.coefficients, mark(r.pass));
        }
        s += "grounded forests ≤ (m+1)^(n−1) (eΔ)^m\n";
        for r in &forests {
            s += &format!(
                "  n={} m={} graphs={} max ratio {:.4} {}\n",
                r.n, r.m, r.graphs, r.max_ratio, mark(r.pass)
            );
        }
        s
    });
    emit(&serde_json::json!({
        "trees": trees,
        "q_poly": q_rows,
        "forests": forests,
        "all_pass": all_pass,
    }))?;
    Ok(if all_pass { Outcome::Ok } else { Outcome::Unsolved })
}

pub fn gen(ctx: &Context, args: GenArgs) -> Result<Outcome> {
    let instance = match args.kind {
        GenKind::Torus { w, h, b } => io::gen_torus_nae(w, h, b)?,
        GenKind::Ksat {
            w,
            h,
            k,
            clause_radius,
            per_cell,
            b,
            seed,
        } => io::gen_grid_ksat(GridKsat {
            w,
            h,
            k,
            clause_radius,
            clauses_per_cell: per_cell,
            b,
            seed,
        })?,
        GenKind::Random { n, b, seed } => io::gen_random_small(n, b, seed)?,
        GenKind::Dimacs { input } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            io::read_dimacs(std::io::BufReader::new(file))?
        }
    };
    ctx.table(|| {
        let p = &instance.problem;
        format!(
            "{}: n={} Δ={} d={} margin={:.3e}\n",
            instance.metadata.generator,
            p.num_vertices(),
            p.rel_max_degree(),
            p.graph().max_degree(),
            p.lll_margin()
        )
    });
    match &args.out {
        Some(path) => io::save_problem(&instance, path)?,
        None => io::write_problem(&instance, std::io::stdout().lock())?,
    }
    Ok(Outcome::Ok)
}

pub fn verify(ctx: &Context, args: VerifyArgs) -> Result<Outcome> {
    let p = load(&args.problem)?.problem;
    let file = io::load_colouring(&args.colouring)
        .with_context(|| format!("loading {}", args.colouring.display()))?;
    if file.b != p.b() {
        bail!("colouring uses b={}, problem has b={}", file.b, p.b());
    }
    p.check_colouring(&file.colouring)?;
    let violated = p.bad_set(&file.colouring);
    ctx.table(|| {
        if violated.is_empty() {
            "colouring satisfies every clause\n".to_string()
        } else {
            format!("{} violated clause(s)\n", violated.len())
        }
    });
    emit(&serde_json::json!({
        "satisfied": violated.is_empty(),
        "violated": violated,
    }))?;
    Ok(if violated.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Unsolved
    })
}
