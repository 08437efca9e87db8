//! The random tape `rnd ∈ b^{π×ℕ}`.
//!
//! Symbols are produced by a counter-based construction: cell `(part, t)` is
//! a pure function of `(seed, part, t, b)`, so cells can be read lazily, out of
//! order and from several threads. Vertices in one part read one stream.
//!
//! Bit-exact contract for `symbol(part, t)`:
//!
//! ```text
//! v_j = mix64(seed + (part·2^32 + t + 1)·GAMMA + j·SALT)     (mod 2^64)
//! accept the first v_j < floor(2^64 / b)·b, return v_j mod b
//! ```
//!
//! `scripts/gen_tape_vectors.py` is an independent implementation used to
//! produce the golden vectors in `tests/data/tape_vectors.json`.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mta::RunTrace;
use crate::partition::SparsePartition;
use crate::rule::Colour;

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
pub const SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The reference cell function. Pure; no bookkeeping.
pub fn tape_symbol(seed: u64, part: u64, t: u64, b: Colour) -> Result<Colour> {
    if part >= 1 << 32 || t >= 1 << 32 {
        return Err(Error::TapeIndexOverflow { part, t });
    }
    let b = u64::from(b.max(1));
    let limit = (u128::from(u64::MAX) + 1) / u128::from(b) * u128::from(b);
    let base = seed.wrapping_add(((part << 32).wrapping_add(t + 1)).wrapping_mul(GAMMA));
    let mut j: u64 = 0;
    loop {
        let v = mix64(base.wrapping_add(j.wrapping_mul(SALT)));
        if u128::from(v) < limit {
            return Ok((v % b) as Colour);
        }
        j += 1;
    }
}

/// Anything the resampling loop can read symbols from.
pub trait SymbolSource {
    fn b(&self) -> Colour;

    fn symbol(&self, part: usize, t: usize) -> Result<Colour>;
}

/// Seeded, unbounded tape with per-part access highwater marks.
#[derive(Debug)]
pub struct RandomTape {
    seed: u64,
    b: Colour,
    // cells_touched[part] = 1 + max round index read so far
    highwater: Mutex<Vec<u64>>,
}

impl RandomTape {
    pub fn new(seed: u64, b: Colour) -> Self {
        Self {
            seed,
            b,
            highwater: Mutex::new(Vec::new()),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of leading cells of `part` read so far.
    pub fn cells_touched(&self, part: usize) -> u64 {
        let marks = self.highwater.lock().expect("highwater lock poisoned");
        marks.get(part).copied().unwrap_or(0)
    }

    /// Total of `cells_touched` over all parts.
    pub fn total_cells_touched(&self) -> u64 {
        self.highwater
            .lock()
            .expect("highwater lock poisoned")
            .iter()
            .sum()
    }

    pub fn reset_accounting(&self) {
        self.highwater.lock().expect("highwater lock poisoned").clear();
    }
}

impl SymbolSource for RandomTape {
    fn b(&self) -> Colour {
        self.b
    }

    fn symbol(&self, part: usize, t: usize) -> Result<Colour> {
        let value = tape_symbol(self.seed, part as u64, t as u64, self.b)?;
        let mut marks = self.highwater.lock().expect("highwater lock poisoned");
        if marks.len() <= part {
            marks.resize(part + 1, 0);
        }
        marks[part] = marks[part].max(t as u64 + 1);
        Ok(value)
    }
}

/// An explicit table in `b^{π×m}`; reads at round index `≥ m` fail with
/// [`Error::TapeExhausted`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTape {
    b: Colour,
    num_parts: usize,
    rounds: usize,
    // cell (part, t) at t * num_parts + part
    cells: Vec<Colour>,
}

impl FiniteTape {
    pub fn from_cells(b: Colour, num_parts: usize, rounds: usize, cells: Vec<Colour>) -> Result<Self> {
        if cells.len() != num_parts * rounds {
            return Err(Error::Parameter(format!(
                "finite tape needs {} cells, got {}",
                num_parts * rounds,
                cells.len()
            )));
        }
        if cells.iter().any(|&c| c >= b) {
            return Err(Error::Parameter("finite tape symbol out of range".into()));
        }
        Ok(Self {
            b,
            num_parts,
            rounds,
            cells,
        })
    }

    /// The `index`-th tape in lexicographic order. Cell `(part, t)` is the
    /// base-`b` digit of weight `b^{t·|π| + part}`, so the last round is the
    /// most significant and tape 0 is all zeros.
    pub fn nth(b: Colour, num_parts: usize, rounds: usize, mut index: u128) -> Self {
        let mut cells = vec![0; num_parts * rounds];
        for cell in &mut cells {
            *cell = (index % u128::from(b)) as Colour;
            index /= u128::from(b);
        }
        Self {
            b,
            num_parts,
            rounds,
            cells,
        }
    }

    /// Copies the first `rounds` cells of every part from a seeded tape.
    pub fn prefix_of(tape: &RandomTape, num_parts: usize, rounds: usize) -> Result<Self> {
        let mut cells = Vec::with_capacity(num_parts * rounds);
        for t in 0..rounds {
            for part in 0..num_parts {
                cells.push(tape_symbol(tape.seed, part as u64, t as u64, tape.b)?);
            }
        }
        Self::from_cells(tape.b, num_parts, rounds, cells)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn num_parts(&self) -> usize {
        self.num_parts
    }

    pub fn cells(&self) -> &[Colour] {
        &self.cells
    }
}

impl SymbolSource for FiniteTape {
    fn b(&self) -> Colour {
        self.b
    }

    fn symbol(&self, part: usize, t: usize) -> Result<Colour> {
        if t >= self.rounds {
            return Err(Error::TapeExhausted {
                t,
                available: self.rounds,
            });
        }
        if part >= self.num_parts {
            return Err(Error::Parameter(format!("part {part} outside finite tape")));
        }
        Ok(self.cells[t * self.num_parts + part])
    }
}

/// A finite symbol sequence, an element of `b^{⊕ℕ}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolSeq(pub Vec<Colour>);

impl SymbolSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &SymbolSeq) -> SymbolSeq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SymbolSeq(v)
    }
}

/// `(Used^k, Unused^k)`: for every vertex the symbols of its part at rounds
/// `0..h^k(x)` and `h^k(x)..k` respectively.
pub fn used_unused<S: SymbolSource + ?Sized>(
    trace: &RunTrace,
    pi: &SparsePartition,
    tape: &S,
    k: usize,
) -> Result<(Vec<SymbolSeq>, Vec<SymbolSeq>)> {
    let h = trace.h_at(k)?;
    let mut used = Vec::with_capacity(h.len());
    let mut unused = Vec::with_capacity(h.len());
    for (x, &hx) in h.iter().enumerate() {
        let part = pi.part_of(x);
        let hx = hx as usize;
        let read = |range: std::ops::Range<usize>| -> Result<SymbolSeq> {
            range
                .map(|t| tape.symbol(part, t))
                .collect::<Result<Vec<_>>>()
                .map(SymbolSeq)
        };
        used.push(read(0..hx)?);
        unused.push(read(hx..k.max(hx))?);
    }
    Ok((used, unused))
}

/// Distinct tape cells a run reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consumption {
    pub symbols: u64,
    /// False when the run did not converge; `symbols` is then a lower bound.
    pub converged: bool,
}

impl Consumption {
    pub fn bits(&self, b: Colour) -> f64 {
        self.symbols as f64 * f64::from(b).log2()
    }
}

/// `Σ_α max_{S_π(x)=α} h(x)` over the final counters of the trace.
pub fn symbols_consumed(trace: &RunTrace, pi: &SparsePartition) -> Consumption {
    let mut best = vec![0u64; pi.num_parts()];
    for (x, &hx) in trace.h().iter().enumerate() {
        let p = pi.part_of(x);
        best[p] = best[p].max(u64::from(hx));
    }
    Consumption {
        symbols: best.iter().sum(),
        converged: trace.succeeded(),
    }
}
