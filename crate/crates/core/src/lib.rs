//! Core ledger data structure for an asynchronous payment system.
//!
//! The ledger is a DAG of signed blocks. Each block carries a list of
//! payments and a set of hash pointers to earlier blocks; some pointers are
//! marked as *inputs*, meaning the block spends the payments addressed to its
//! creator in the target block. On top of the raw DAG this crate implements:
//!
//! * reachability predicates (`observes`, `depends_on`) and closures,
//! * fault predicates (equivocation, doublespend) and block correctness,
//! * approval and quorum-based finality, monotone under growth,
//! * UTXO-style balance accounting with whole-block spend granularity,
//! * a deterministic canonical byte encoding and a JSON-lines snapshot format.
//!
//! [`Blocklace`] is the mutable container: blocks are fed to
//! [`Blocklace::accept`], which verifies them, buffers blocks whose
//! predecessors have not arrived yet, and incrementally maintains
//! reachability bitsets, approval masks and finality flags so that queries
//! are cheap. All iteration orders are deterministic.

mod bits;
mod block;
mod crypto;
mod encoding;
mod error;
mod lace;
pub mod lacegen;
mod snapshot;
mod types;

pub use bits::Bits;
pub use block::{Block, BlockBody};
pub use crypto::{BlockHash, Crypto, Signature};
pub use encoding::{canonical_body_bytes, encoded_len, ENVELOPE_BYTES};
pub use error::LaceError;
pub use lace::{
    AcceptOutcome, AcceptStatus, Blocklace, ConservationSummary, LaceConfig, RejectReason,
};
pub use snapshot::{load_snapshot, write_snapshot};
pub use types::{AgentId, Amount, Payment, Pointer, Utxo};

/// Smallest number of agents that is strictly more than `(n + f) / 2`.
///
/// A set of this size is a quorum: any two quorums intersect in more than
/// `f` agents, so when at most `f` agents misbehave, two quorums always
/// share a well-behaved agent. The arithmetic is total; configuration-level
/// validation of `3f < n` happens in [`LaceConfig`].
pub fn supermajority_size(n: u32, f: u32) -> u32 {
    (n + f) / 2 + 1
}
