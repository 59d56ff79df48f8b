//! Payment agents for the blocklace ledger.
//!
//! Agents are pure state machines: they consume [`Input`]s (a start
//! signal, delivered blocks, payment intents, timer fires) and emit all
//! effects — issued blocks, sends, timer requests, diagnostics — into an
//! [`Outbox`]. Nothing here performs I/O or reads a clock, which makes
//! every agent deterministic and directly drivable from tests and from
//! the network simulator.
//!
//! Two strategies are provided behind the common [`Agent`] trait:
//!
//! * [`LowAgent`] — one small block per payment, eager dissemination;
//!   suited to lightly loaded networks.
//! * [`HighAgent`] — batched large blocks on cordiality-gated rounds;
//!   suited to saturated networks.

mod high;
mod io;
mod ledger;
mod low;

pub use high::{DeltaPolicy, HighAgent, HighConfig};
pub use io::{Agent, BlockKind, Input, Note, Outbox, Outgoing};
pub use ledger::SentLedger;
pub use low::{LowAgent, LowConfig};
