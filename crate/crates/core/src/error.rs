use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid rule at vertex {vertex}: {reason}")]
    InvalidRule { vertex: usize, reason: String },

    #[error("colour count b must be at least 2, got {0}")]
    TooFewColours(u32),

    #[error("colouring has length {got}, problem has {expected} vertices")]
    ColouringLength { expected: usize, got: usize },

    #[error("colour {colour} at vertex {vertex} is out of range for b={b}")]
    ColourOutOfRange { vertex: usize, colour: u32, b: u32 },

    #[error("malformed problem: {0}")]
    MalformedProblem(String),

    #[error("tape index out of range: part {part}, round {t}")]
    TapeIndexOverflow { part: u64, t: u64 },

    #[error("tape exhausted: round index {t} requested with only {available} rounds available")]
    TapeExhausted { t: usize, available: usize },

    #[error("trace covers {available} colourings, {requested} requested")]
    TraceTooShort { requested: usize, available: usize },

    #[error("run has not converged")]
    NotConverged,

    #[error("set is not unique under the partition projection")]
    NotPiUnique,

    #[error("no stable radius in 3..={max}")]
    NoStableRadius { max: usize },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("grounding exceeded the step cap of {0}")]
    GroundingStepCap(u64),

    #[error("landscape invariant violated: {0}")]
    InvalidLandscape(String),

    #[error("tape space of {num_tapes_log2:.1} bits exceeds the cap of {cap} tapes")]
    Infeasible { num_tapes_log2: f64, cap: u64 },

    #[error("no tape among {tried} produced a satisfying colouring")]
    Exhausted { tried: u64 },

    #[error("{0}")]
    Parameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
