//! Immutable signed blocks.

use serde::{Deserialize, Serialize};

use crate::crypto::{BlockHash, Crypto, Signature};
use crate::encoding::canonical_body_bytes;
use crate::error::LaceError;
use crate::types::{AgentId, Amount, Payment, Pointer};

/// A signed block: payments plus hash pointers to earlier blocks.
///
/// Constructed only through [`Block::new`] / [`Block::initial`], which
/// canonicalize pointer order, compute the content hash and sign it. A block
/// is immutable after construction; equality of hashes is equality of
/// blocks.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Block {
    pub creator: AgentId,
    /// Sorted ascending by target hash; at most one pointer per target.
    pub pointers: Vec<Pointer>,
    /// In creator-chosen order, which the encoding preserves.
    pub payments: Vec<Payment>,
    pub signature: Signature,
    pub hash: BlockHash,
}

/// The signed portion of a block, before hashing. Exists mostly to make
/// test construction of hand-rolled (including malformed) blocks explicit.
#[derive(Clone, Debug)]
pub struct BlockBody {
    pub creator: AgentId,
    pub pointers: Vec<Pointer>,
    pub payments: Vec<Payment>,
}

impl Block {
    /// Build and sign a block. Pointers are sorted into canonical order;
    /// duplicate pointer targets are rejected here because no well-formed
    /// block carries two pointers to the same block.
    pub fn new(
        crypto: Crypto,
        creator: AgentId,
        mut pointers: Vec<Pointer>,
        payments: Vec<Payment>,
    ) -> Result<Block, LaceError> {
        pointers.sort_by(|a, b| a.target.cmp(&b.target));
        if pointers.windows(2).any(|w| w[0].target == w[1].target) {
            return Err(LaceError::Malformed(
                "duplicate pointer target".to_string(),
            ));
        }
        let body = canonical_body_bytes(creator, &pointers, &payments);
        let hash = crypto.digest(&body);
        let signature = crypto.sign(creator, &hash);
        Ok(Block {
            creator,
            pointers,
            payments,
            signature,
            hash,
        })
    }

    /// Build an initial block: no pointers, a single self-payment carrying
    /// the agent's opening balance.
    pub fn initial(
        crypto: Crypto,
        creator: AgentId,
        amount: Amount,
    ) -> Result<Block, LaceError> {
        Block::new(crypto, creator, vec![], vec![Payment::new(creator, amount)])
    }

    /// Recompute the hash and check the signature against the creator.
    pub fn verify(&self, crypto: Crypto) -> bool {
        let body = canonical_body_bytes(self.creator, &self.pointers, &self.payments);
        crypto.digest(&body) == self.hash
            && crypto.verify(self.creator, &self.hash, &self.signature)
    }

    /// Initial blocks have no pointers at all.
    pub fn is_initial(&self) -> bool {
        self.pointers.is_empty()
    }

    /// A block with no payments only acknowledges what it observes.
    pub fn is_ack(&self) -> bool {
        self.payments.is_empty()
    }

    pub fn is_urgent(&self) -> bool {
        self.payments.iter().any(|p| p.urgent)
    }

    pub fn input_pointers(&self) -> impl Iterator<Item = &Pointer> {
        self.pointers.iter().filter(|p| p.input)
    }

    /// Sum of payments addressed to `agent` in this block.
    pub fn paid_to(&self, agent: AgentId) -> Amount {
        self.payments
            .iter()
            .filter(|p| p.recipient == agent)
            .map(|p| p.amount)
            .sum()
    }

    /// Total of the block's payment outputs.
    pub fn outputs_total(&self) -> Amount {
        self.payments.iter().map(|p| p.amount).sum()
    }

    /// Payments addressed to agents other than the creator.
    pub fn nonself_payment_count(&self) -> usize {
        self.payments
            .iter()
            .filter(|p| p.recipient != self.creator)
            .count()
    }
}

impl BlockBody {
    /// Sign the body as-is, without canonicalization or duplicate checks.
    /// Lets tests and adversaries produce byte-faithful malformed blocks.
    pub fn sign(self, crypto: Crypto) -> Block {
        let body = canonical_body_bytes(self.creator, &self.pointers, &self.payments);
        let hash = crypto.digest(&body);
        let signature = crypto.sign(self.creator, &hash);
        Block {
            creator: self.creator,
            pointers: self.pointers,
            payments: self.payments,
            signature,
            hash,
        }
    }
}
