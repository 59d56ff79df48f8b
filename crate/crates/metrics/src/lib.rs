//! Measurement primitives for simulation runs.
//!
//! The simulator emits [`TraceEvent`]s (a deterministic, serializable
//! record of everything that happened), counts work in [`Counters`],
//! gathers finality latencies in [`LatencyStats`], and — across parameter
//! sweeps — fits scaling exponents with [`fit_loglog`]. Nothing in this
//! crate touches the network model; it only measures.

mod fit;
mod rounds;
mod stats;
mod trace;

pub use fit::{fit_loglog, Fit};
pub use rounds::IssueLog;
pub use stats::{Counters, LatencyStats, LatencySummary, Report};
pub use trace::TraceEvent;
