//! A flat, serializable record of a simulation run.
//!
//! Traces serve two purposes: they make runs auditable, and — because a
//! run is fully determined by its scenario and seed — their serialized
//! form doubles as a determinism check: two runs of the same scenario and
//! seed must produce byte-identical trace lines.

use blocklace_core::{AgentId, BlockHash};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "ev", rename_all = "snake_case")]
pub enum TraceEvent {
    /// An agent created a block.
    Issue {
        t: u64,
        agent: AgentId,
        block: BlockHash,
        kind: String,
        height: u32,
        bytes: usize,
        /// Positive payments to other agents carried by the block.
        pays: u32,
    },
    /// A message left an agent.
    Send {
        t: u64,
        from: AgentId,
        to: AgentId,
        block: BlockHash,
        catchup: bool,
    },
    /// A message reached its destination.
    Deliver {
        t: u64,
        from: AgentId,
        to: AgentId,
        block: BlockHash,
    },
    /// A block turned final in one agent's local lace.
    Final { t: u64, agent: AgentId, block: BlockHash },
    /// An agent-side diagnostic (refusal, urgent budget events).
    Note { t: u64, agent: AgentId, text: String },
}

impl TraceEvent {
    /// One JSON line, newline-terminated; the unit of trace comparison.
    pub fn to_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("trace event serializes");
        line.push('\n');
        line
    }
}
