//! Plain data types shared across the workspace.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::crypto::BlockHash;

/// Agent identity. Agents are numbered `0..n` within a run; the numeric id
/// stands in for a public key and gives a deterministic total order.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Integer money amount. All accounting is exact integer arithmetic.
pub type Amount = u64;

/// A single payment: `amount` addressed to `recipient`. The urgent flag is
/// carried in the canonical encoding and asks receivers to acknowledge the
/// containing block immediately.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Payment {
    pub recipient: AgentId,
    pub amount: Amount,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub urgent: bool,
}

impl Payment {
    pub fn new(recipient: AgentId, amount: Amount) -> Self {
        Payment {
            recipient,
            amount,
            urgent: false,
        }
    }

    pub fn urgent(recipient: AgentId, amount: Amount) -> Self {
        Payment {
            recipient,
            amount,
            urgent: true,
        }
    }
}

/// Hash pointer to an earlier block. `creator` names the signer of the
/// target block so a receiver knows whose block it is still missing.
/// `input = true` marks the pointer as spending: the new block consumes
/// every payment addressed to its creator inside the target block.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Pointer {
    pub target: BlockHash,
    pub creator: AgentId,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub input: bool,
}

impl Pointer {
    pub fn observe(target: BlockHash, creator: AgentId) -> Self {
        Pointer {
            target,
            creator,
            input: false,
        }
    }

    pub fn spend(target: BlockHash, creator: AgentId) -> Self {
        Pointer {
            target,
            creator,
            input: true,
        }
    }
}

/// An unspent payment: `amount` addressed to `recipient`, sitting at
/// position `index` in the payment list of final block `block`, with no
/// recipient block spending that block.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Utxo {
    pub block: BlockHash,
    pub index: usize,
    pub recipient: AgentId,
    pub amount: Amount,
}
