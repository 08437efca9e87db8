//! Shared-tape parallel resampling for local colouring problems, its
//! derandomised sequential variant, and the witness-landscape toolkit used to
//! check the counting arguments behind them.

pub mod derand;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod landscape;
pub mod mta;
pub mod partition;
pub mod rule;
pub mod tape;

pub use error::{Error, Result};
pub use graph::{Digraph, VertexOrder};
pub use mta::{run, RunConfig, RunStatus, RunTrace};
pub use partition::{sparse_partition, SparsePartition};
pub use rule::{Colour, Colouring, ColouringProblem, LocalRule};
pub use tape::{FiniteTape, RandomTape, SymbolSource};
