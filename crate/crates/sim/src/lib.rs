//! Replay, budget sweeps and file formats around `clmm-jit-core`.
//!
//! * [`snapshot`] and [`ingest`] read `pool.json` snapshots and
//!   `swaps.csv` event files.
//! * [`replay`] runs each event without JIT, with the observed JIT position
//!   and with the optimized one; [`sweep`] scales budgets; [`summary`]
//!   aggregates records; [`output`] writes the CSV and JSON results.
//! * [`oracle`] holds slow reference computations and [`synth`] builds
//!   seeded synthetic corpora.

pub mod error;
pub mod ingest;
pub mod oracle;
pub mod output;
pub mod replay;
pub mod snapshot;
pub mod summary;
pub mod sweep;
pub mod synth;

pub use error::{Result, SimError};
pub use ingest::{ingest, SwapEvent};
pub use replay::{replay, ReplayConfig, ReplayRecord};
pub use summary::{summarize, Summary};
pub use sweep::{budget_sweep, SweepPoint};
