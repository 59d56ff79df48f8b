//! Inputs, effects, and the trait every agent implements.
//!
//! Agents are pure state machines: the driver hands them one [`Input`] at a
//! time together with the current clock, and they record everything they
//! want to happen — blocks issued, unicast sends, timer requests, trace
//! notes — in an [`Outbox`]. Nothing here touches a network or a clock,
//! which is what keeps runs deterministic and replayable.

use blocklace_core::{AgentId, Amount, Block, BlockHash, Blocklace};
use serde::{Deserialize, Serialize};

/// One event delivered to an agent.
#[derive(Clone, Debug)]
pub enum Input {
    /// The run begins: adopt the opening state.
    Start,
    /// A block arrived from peer `from` (who therefore holds it).
    Block { from: AgentId, block: Block },
    /// The local user asks to pay `to` the given amount.
    Intent {
        to: AgentId,
        amount: Amount,
        urgent: bool,
    },
    /// A timer requested via [`Outbox::arm_timer`] fired.
    Timer { token: u64 },
    /// End of the current tick: all inputs stamped with this instant have
    /// been handled, so reactions deferred to see the whole batch (acks,
    /// consolidations) can be issued against a complete view.
    Flush,
}

/// What role a block plays in the protocol, attached to every issue for
/// tracing. The ledger semantics come from the block alone; this is
/// bookkeeping for metrics.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Initial,
    Payment,
    Consolidation,
    Ack,
    Large,
}

/// A unicast transmission. `catchup` marks retransmission of an older block
/// for a lagging peer, as opposed to the first broadcast of a new one.
#[derive(Clone, Debug)]
pub struct Outgoing {
    pub to: AgentId,
    pub block: Block,
    pub catchup: bool,
}

/// Diagnostics the agent wants on the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Note {
    /// An incoming block was refused or dropped by the local blocklace.
    Refused { block: BlockHash, why: String },
    /// An urgent intent exceeded the issuer-side budget and was sent as an
    /// ordinary payment instead.
    UrgentDemoted { to: AgentId },
    /// An urgent block exceeded the sender's budget here; no ack was sent.
    UrgentIgnored { from: AgentId },
}

/// Effects accumulated during one `handle` call.
#[derive(Default)]
pub struct Outbox {
    /// Blocks created by the agent this step, in creation order.
    pub issued: Vec<(Block, BlockKind)>,
    /// Transmissions, in send order.
    pub sends: Vec<Outgoing>,
    /// Absolute-time timer requests: deliver `Timer { token }` at `at`.
    pub timers: Vec<(u64, u64)>,
    pub notes: Vec<Note>,
}

impl Outbox {
    pub fn issue(&mut self, block: Block, kind: BlockKind) {
        self.issued.push((block, kind));
    }

    pub fn send(&mut self, to: AgentId, block: Block, catchup: bool) {
        self.sends.push(Outgoing { to, block, catchup });
    }

    pub fn arm_timer(&mut self, at: u64, token: u64) {
        self.timers.push((at, token));
    }

    pub fn note(&mut self, note: Note) {
        self.notes.push(note);
    }
}

/// A deterministic protocol agent owning a local blocklace replica.
pub trait Agent {
    fn id(&self) -> AgentId;

    /// Process one input at time `now`, recording effects in `out`.
    fn handle(&mut self, now: u64, input: Input, out: &mut Outbox);

    /// The agent's local view of the ledger.
    fn lace(&self) -> &Blocklace;

    /// Queued work not yet turned into blocks (payment intents waiting for
    /// funds or a round, receipts waiting to be folded in). Zero means the
    /// agent will stay silent until new input arrives.
    fn backlog(&self) -> usize;
}
