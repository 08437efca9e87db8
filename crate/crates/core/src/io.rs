//! Instance generators, the `problem.json` format, a DIMACS importer and the
//! results CSV.
//!
//! `problem.json`:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "b": 2,
//!   "num_vertices": 3,
//!   "edges": [[0, 1], [0, 2]],
//!   "forbidden": { "0": [[0, 0], [1, 1]] },
//!   "metadata": { "generator": "manual" }
//! }
//! ```
//!
//! Tuples list colours of `Var(x)` in ascending vertex order. Vertices absent
//! from `forbidden` allow everything. `allowed` may replace `forbidden`; the
//! loader complements it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, check_subexp, Digraph};
use crate::rule::{Assignment, Colour, Colouring, ColouringProblem, LocalRule};

pub const SCHEMA_VERSION: u32 = 1;

/// Ball-growth witness: every radius-`3r` ball has at most `(1+eps)^r`
/// vertices and `maxdeg ≤ d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubexpCertificate {
    pub r: usize,
    pub eps: f64,
    pub d: usize,
    pub max_ball: usize,
}

/// Quantities every generated instance reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    /// `Δ = maxdeg(Rel(G))`.
    pub rel_max_degree: usize,
    /// `d = maxdeg(G)`.
    pub max_degree: usize,
    pub margin: f64,
    pub subexp: SubexpCertificate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<InstanceStats>,
}

/// A problem together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub problem: ColouringProblem,
    pub metadata: Metadata,
}

impl Instance {
    pub fn stats(&self) -> Option<&InstanceStats> {
        self.metadata.stats.as_ref()
    }
}

/// Smallest `eps` making `g` a member of `subexp(r, eps, maxdeg g)`.
pub fn subexp_certificate(g: &Digraph, r: usize) -> SubexpCertificate {
    let r = r.max(1);
    let max_ball = (0..g.num_vertices())
        .map(|x| ball(g, x, 3 * r).len())
        .max()
        .unwrap_or(0);
    let eps = (max_ball.max(1) as f64).powf(1.0 / r as f64) - 1.0;
    let d = g.max_degree();
    debug_assert!(check_subexp(g, r, eps, d));
    SubexpCertificate { r, eps, d, max_ball }
}

pub fn instance_stats(p: &ColouringProblem, r: usize) -> InstanceStats {
    InstanceStats {
        rel_max_degree: p.rel_max_degree(),
        max_degree: p.graph().max_degree(),
        margin: p.lll_margin(),
        subexp: subexp_certificate(p.graph(), r),
    }
}

fn param<T: Serialize>(map: &mut BTreeMap<String, serde_json::Value>, key: &str, value: T) {
    map.insert(
        key.to_string(),
        serde_json::to_value(value).expect("plain values serialise"),
    );
}

/// "Not all equal" on a `w × h` torus: every vertex is a clause over itself
/// and its four torus neighbours forbidding the `b` constant tuples.
pub fn gen_torus_nae(w: usize, h: usize, b: Colour) -> Result<Instance> {
    if w < 3 || h < 3 {
        return Err(Error::Parameter(format!("torus needs w,h ≥ 3, got {w}×{h}")));
    }
    let n = w * h;
    let id = |x: usize, y: usize| (y % h) * w + (x % w);
    let mut edges = Vec::with_capacity(5 * n);
    for y in 0..h {
        for x in 0..w {
            let v = id(x, y);
            for u in [v, id(x + 1, y), id(x + w - 1, y), id(x, y + 1), id(x, y + h - 1)] {
                edges.push((v, u));
            }
        }
    }
    let graph = Digraph::from_edges(n, edges)?;
    let constants: Vec<Assignment> = (0..b).map(|c| vec![c; 5]).collect();
    let (rule, _) = LocalRule::from_forbidden(vec![constants; n]);
    let problem = ColouringProblem::new(graph, b, rule)?;
    let mut parameters = BTreeMap::new();
    param(&mut parameters, "w", w);
    param(&mut parameters, "h", h);
    param(&mut parameters, "b", b);
    let metadata = Metadata {
        generator: "torus_nae".into(),
        seed: None,
        parameters,
        stats: Some(instance_stats(&problem, 1)),
    };
    Ok(Instance { problem, metadata })
}

/// Parameters of [`gen_grid_ksat`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridKsat {
    pub w: usize,
    pub h: usize,
    pub k: usize,
    pub clause_radius: usize,
    pub clauses_per_cell: usize,
    pub b: Colour,
    pub seed: u64,
}

impl GridKsat {
    pub fn new(w: usize, h: usize, k: usize, seed: u64) -> Self {
        Self {
            w,
            h,
            k,
            clause_radius: 2,
            clauses_per_cell: 1,
            b: 2,
            seed,
        }
    }
}

/// Bipartite random k-SAT on a grid. Vertices `0..w·h` are variables
/// (no out-edges); each cell then owns `clauses_per_cell` clause vertices
/// over `k` distinct variables within Manhattan distance `clause_radius`,
/// each forbidding one uniformly random tuple.
pub fn gen_grid_ksat(params: GridKsat) -> Result<Instance> {
    let GridKsat {
        w,
        h,
        k,
        clause_radius,
        clauses_per_cell,
        b,
        seed,
    } = params;
    if k == 0 || clause_radius == 0 || w == 0 || h == 0 || b < 2 {
        return Err(Error::Parameter(
            "grid k-SAT needs k ≥ 1, radius ≥ 1, a nonempty grid and b ≥ 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = w * h;
    let n = vars + vars * clauses_per_cell;
    let radius = clause_radius as isize;
    let mut edges = Vec::new();
    let mut forbidden = vec![Vec::new(); vars];
    for cy in 0..h as isize {
        for cx in 0..w as isize {
            let mut window = Vec::new();
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    let (x, y) = (cx + dx, cy + dy);
                    if dx.abs() + dy.abs() <= radius
                        && (0..w as isize).contains(&x)
                        && (0..h as isize).contains(&y)
                    {
                        window.push(y as usize * w + x as usize);
                    }
                }
            }
            if window.len() < k {
                return Err(Error::Parameter(format!(
                    "cell ({cx},{cy}) has {} variables within radius {clause_radius}, k = {k}",
                    window.len()
                )));
            }
            for _ in 0..clauses_per_cell {
                let clause = forbidden.len();
                let mut chosen: Vec<usize> =
                    sample(&mut rng, window.len(), k).into_iter().map(|i| window[i]).collect();
                chosen.sort_unstable();
                edges.extend(chosen.iter().map(|&v| (clause, v)));
                let tuple: Assignment = (0..k).map(|_| rng.gen_range(0..b)).collect();
                forbidden.push(vec![tuple]);
            }
        }
    }
    debug_assert_eq!(forbidden.len(), n);
    let graph = Digraph::from_edges(n, edges)?;
    let (rule, _) = LocalRule::from_forbidden(forbidden);
    let problem = ColouringProblem::new(graph, b, rule)?;
    let mut parameters = BTreeMap::new();
    param(&mut parameters, "w", w);
    param(&mut parameters, "h", h);
    param(&mut parameters, "k", k);
    param(&mut parameters, "clause_radius", clause_radius);
    param(&mut parameters, "clauses_per_cell", clauses_per_cell);
    param(&mut parameters, "b", b);
    let metadata = Metadata {
        generator: "grid_ksat".into(),
        seed: Some(seed),
        parameters,
        stats: Some(instance_stats(&problem, 1)),
    };
    Ok(Instance { problem, metadata })
}

/// Small random instance for property tests: a path with self-loops plus
/// random forward chords, one random forbidden tuple per clause.
pub fn gen_random_small(n: usize, b: Colour, seed: u64) -> Result<Instance> {
    if n == 0 || b < 2 {
        return Err(Error::Parameter("random instance needs n ≥ 1 and b ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for x in 0..n {
        edges.push((x, x));
        if x + 1 < n {
            edges.push((x, x + 1));
        }
        if rng.gen_bool(0.5) {
            let y = x + rng.gen_range(2..=3);
            if y < n {
                edges.push((x, y));
            }
        }
    }
    let graph = Digraph::from_edges(n, edges)?;
    let forbidden = (0..n)
        .map(|x| {
            let arity = graph.var(x).len();
            vec![(0..arity).map(|_| rng.gen_range(0..b)).collect()]
        })
        .collect();
    let (rule, _) = LocalRule::from_forbidden(forbidden);
    let problem = ColouringProblem::new(graph, b, rule)?;
    let mut parameters = BTreeMap::new();
    param(&mut parameters, "n", n);
    param(&mut parameters, "b", b);
    Ok(Instance {
        problem,
        metadata: Metadata {
            generator: "random_small".into(),
            seed: Some(seed),
            parameters,
            stats: None,
        },
    })
}

/// On-disk problem representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub b: Colour,
    pub num_vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<BTreeMap<usize, Vec<Assignment>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed: Option<BTreeMap<usize, Vec<Assignment>>>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl ProblemFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let p = &instance.problem;
        let forbidden = (0..p.num_vertices())
            .filter(|&x| !p.rule().forbidden(x).is_empty())
            .map(|x| (x, p.rule().forbidden(x).to_vec()))
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            b: p.b(),
            num_vertices: p.num_vertices(),
            edges: p.graph().edges().map(|(x, y)| [x, y]).collect(),
            forbidden: Some(forbidden),
            allowed: None,
            metadata: instance.metadata.clone(),
        }
    }

    /// Validates and builds the problem. Duplicate forbidden tuples are
    /// dropped with a warning; every other defect is an error naming the
    /// offending field.
    pub fn into_instance(self) -> Result<Instance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        if self.b < 2 {
            return Err(Error::Schema(format!("b: must be at least 2, found {}", self.b)));
        }
        let n = self.num_vertices;
        if let Some((i, e)) = self.edges.iter().enumerate().find(|(_, e)| e[0] >= n || e[1] >= n) {
            return Err(Error::Schema(format!(
                "edges[{i}]: [{}, {}] references a vertex outside 0..{n}",
                e[0], e[1]
            )));
        }
        let graph = Digraph::from_edges(n, self.edges.iter().map(|e| (e[0], e[1])))?;
        let lists = |field: &str, map: BTreeMap<usize, Vec<Assignment>>| -> Result<Vec<Vec<Assignment>>> {
            let mut out = vec![Vec::new(); n];
            for (x, tuples) in map {
                if x >= n {
                    return Err(Error::Schema(format!("{field}.{x}: vertex outside 0..{n}")));
                }
                let arity = graph.var(x).len();
                for (i, t) in tuples.iter().enumerate() {
                    if t.len() != arity {
                        return Err(Error::Schema(format!(
                            "{field}.{x}[{i}]: tuple of length {} but vertex {x} has {arity} variables",
                            t.len()
                        )));
                    }
                    if let Some(&c) = t.iter().find(|&&c| c >= self.b) {
                        return Err(Error::Schema(format!(
                            "{field}.{x}[{i}]: colour {c} out of range for b={}",
                            self.b
                        )));
                    }
                }
                out[x] = tuples;
            }
            Ok(out)
        };
        let rule = match (self.forbidden, self.allowed) {
            (Some(_), Some(_)) => {
                return Err(Error::Schema("give either forbidden or allowed, not both".into()))
            }
            (Some(map), None) => {
                let (rule, dropped) = LocalRule::from_forbidden(lists("forbidden", map)?);
                if dropped > 0 {
                    log::warn!("dropped {dropped} duplicate forbidden tuple(s)");
                }
                rule
            }
            (None, Some(map)) => {
                let mut allowed = lists("allowed", map)?;
                // An absent entry in an allowed map means "everything allowed".
                for (x, list) in allowed.iter_mut().enumerate() {
                    if list.is_empty() {
                        *list = all_tuples(self.b, graph.var(x).len())?;
                    }
                }
                LocalRule::from_allowed(&graph, self.b, allowed)?
            }
            (None, None) => LocalRule::all_allowed(n),
        };
        let problem = ColouringProblem::new(graph, self.b, rule)?;
        Ok(Instance {
            problem,
            metadata: self.metadata,
        })
    }
}

fn all_tuples(b: Colour, arity: usize) -> Result<Vec<Assignment>> {
    let space = u64::from(b)
        .checked_pow(arity as u32)
        .filter(|&s| s <= 1 << 20)
        .ok_or_else(|| Error::Schema(format!("cannot list {b}^{arity} tuples")))?;
    Ok((0..space)
        .map(|mut code| {
            let mut t = vec![0; arity];
            for slot in t.iter_mut().rev() {
                *slot = (code % u64::from(b)) as Colour;
                code /= u64::from(b);
            }
            t
        })
        .collect())
}

pub fn read_problem<R: Read>(reader: R) -> Result<Instance> {
    let file: ProblemFile = serde_json::from_reader(reader).map_err(|e| {
        Error::Schema(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    file.into_instance()
}

pub fn write_problem<W: Write>(instance: &Instance, writer: W) -> Result<()> {
    let mut writer = writer;
    serde_json::to_writer_pretty(&mut writer, &ProblemFile::from_instance(instance))?;
    writeln!(writer)?;
    Ok(())
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<Instance> {
    read_problem(BufReader::new(File::open(path)?))
}

pub fn save_problem(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_problem(instance, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Imports a DIMACS CNF file as a bipartite `b = 2` problem: vertices
/// `0..vars` are variables, each clause becomes a vertex forbidding the one
/// assignment that falsifies it. Tautological clauses forbid nothing.
pub fn read_dimacs<R: BufRead>(reader: R) -> Result<Instance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", v, c] => {
                    let parse = |s: &str| {
                        s.parse::<usize>().map_err(|_| {
                            Error::Schema(format!("line {}: bad header count {s:?}", lineno + 1))
                        })
                    };
                    header = Some((parse(v)?, parse(c)?));
                }
                _ => return Err(Error::Schema(format!("line {}: expected 'p cnf V C'", lineno + 1))),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(Error::Schema(format!("line {}: clause before header", lineno + 1)));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Schema(format!("line {}: bad literal {tok:?}", lineno + 1)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(Error::Schema(format!(
                    "line {}: literal {lit} exceeds {vars} variables",
                    lineno + 1
                )));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let (vars, declared) = header.ok_or_else(|| Error::Schema("missing 'p cnf' header".into()))?;
    if declared != clauses.len() {
        log::warn!("header declares {declared} clauses, found {}", clauses.len());
    }
    let n = vars + clauses.len();
    let mut edges = Vec::new();
    let mut forbidden = vec![Vec::new(); n];
    for (i, clause) in clauses.iter().enumerate() {
        let c = vars + i;
        let mut sign: BTreeMap<usize, i64> = BTreeMap::new();
        let mut tautology = false;
        for &lit in clause {
            let v = lit.unsigned_abs() as usize - 1;
            if let Some(&prev) = sign.get(&v) {
                tautology |= prev != lit.signum();
            }
            sign.insert(v, lit.signum());
        }
        edges.extend(sign.keys().map(|&v| (c, v)));
        if !tautology && !sign.is_empty() {
            // The falsifying assignment sets positive literals to 0.
            forbidden[c].push(sign.values().map(|&s| Colour::from(s < 0)).collect());
        }
    }
    let graph = Digraph::from_edges(n, edges)?;
    let (rule, _) = LocalRule::from_forbidden(forbidden);
    let problem = ColouringProblem::new(graph, 2, rule)?;
    let mut parameters = BTreeMap::new();
    param(&mut parameters, "variables", vars);
    param(&mut parameters, "clauses", clauses.len());
    Ok(Instance {
        problem,
        metadata: Metadata {
            generator: "dimacs".into(),
            seed: None,
            parameters,
            stats: None,
        },
    })
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instance: String,
    pub n: usize,
    pub seed: u64,
    pub parts: usize,
    pub rounds: usize,
    pub max_h: u32,
    pub symbols: u64,
    pub bits: f64,
    pub wall_ms: f64,
}

pub const RESULTS_HEADER: [&str; 9] = [
    "instance", "n", "seed", "parts", "rounds", "max_h", "symbols", "bits", "wall_ms",
];

/// Appends records to a CSV file, writing the header when the file is new
/// or empty.
pub fn append_records(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    let path = path.as_ref();
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        writer.write_record(RESULTS_HEADER)?;
    }
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes records with header to any sink; `wall_ms` is zeroed when
/// `with_timing` is false so that outputs are reproducible.
pub fn write_records<W: Write>(writer: W, records: &[ExperimentRecord], with_timing: bool) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    writer.write_record(RESULTS_HEADER)?;
    for r in records {
        if with_timing {
            writer.serialize(r)?;
        } else {
            writer.serialize(ExperimentRecord { wall_ms: 0.0, ..r.clone() })?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(reader);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::Schema(format!("results header {header:?}")));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// On-disk colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub b: Colour,
    pub colouring: Colouring,
}

pub fn save_colouring(path: impl AsRef<Path>, b: Colour, f: &Colouring) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &ColouringFile { b, colouring: f.clone() })?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn load_colouring(path: impl AsRef<Path>) -> Result<ColouringFile> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
