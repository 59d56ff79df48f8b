//! Canonical block encoding.
//!
//! Every block has exactly one byte representation, used both for hashing
//! and for measuring message sizes. Layout (all integers big-endian):
//!
//! ```text
//! u32  creator
//! u32  pointer count
//!      per pointer, sorted ascending by target hash bytes:
//!        [u8; 32] target hash, u32 target creator, u8 input flag
//! u32  payment count
//!      per payment, in list order:
//!        u32 recipient, u64 amount, u8 urgent flag
//! ```
//!
//! The block hash is the digest of these body bytes; the signature signs the
//! hash. On the wire a block is body plus a 32-byte signature (the hash is
//! recomputed by the receiver), plus a fixed per-message envelope charge
//! standing in for transport framing.

use crate::block::Block;
use crate::types::{AgentId, Payment, Pointer};

/// Flat per-message byte charge for addressing/framing when sizing traffic.
pub const ENVELOPE_BYTES: usize = 16;

/// Canonical body bytes of a block. `pointers` must already be sorted by
/// target hash; [`Block::new`] guarantees that for every constructed block.
pub fn canonical_body_bytes(
    creator: AgentId,
    pointers: &[Pointer],
    payments: &[Payment],
) -> Vec<u8> {
    let mut out =
        Vec::with_capacity(12 + pointers.len() * 37 + payments.len() * 13);
    out.extend_from_slice(&creator.0.to_be_bytes());
    out.extend_from_slice(&(pointers.len() as u32).to_be_bytes());
    for p in pointers {
        out.extend_from_slice(&p.target.0);
        out.extend_from_slice(&p.creator.0.to_be_bytes());
        out.push(p.input as u8);
    }
    out.extend_from_slice(&(payments.len() as u32).to_be_bytes());
    for pay in payments {
        out.extend_from_slice(&pay.recipient.0.to_be_bytes());
        out.extend_from_slice(&pay.amount.to_be_bytes());
        out.push(pay.urgent as u8);
    }
    out
}

/// Wire size of a block: canonical body plus signature.
pub fn encoded_len(block: &Block) -> usize {
    12 + block.pointers.len() * 37 + block.payments.len() * 13 + 32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::Crypto;

    #[test]
    fn body_layout_is_fixed() {
        let bytes = canonical_body_bytes(
            AgentId(7),
            &[],
            &[Payment::new(AgentId(2), 5)],
        );
        // creator, zero pointers, one payment, recipient, amount, flag
        assert_eq!(bytes[..4], 7u32.to_be_bytes());
        assert_eq!(bytes[4..8], 0u32.to_be_bytes());
        assert_eq!(bytes[8..12], 1u32.to_be_bytes());
        assert_eq!(bytes[12..16], 2u32.to_be_bytes());
        assert_eq!(bytes[16..24], 5u64.to_be_bytes());
        assert_eq!(bytes[24], 0);
        assert_eq!(bytes.len(), 25);
    }

    #[test]
    fn encoded_len_matches_body_plus_signature() {
        let genesis = Block::initial(Crypto::Sha256, AgentId(0), 10).unwrap();
        let body = canonical_body_bytes(genesis.creator, &genesis.pointers, &genesis.payments);
        assert_eq!(encoded_len(&genesis), body.len() + 32);
    }

    #[test]
    fn pointer_order_changes_do_not_change_the_hash() {
        // Block construction sorts pointers, so permuted inputs hash alike.
        let crypto = Crypto::Sha256;
        let a = Block::initial(crypto, AgentId(0), 1).unwrap();
        let b = Block::initial(crypto, AgentId(1), 1).unwrap();
        let ptrs1 = vec![
            Pointer::observe(a.hash, a.creator),
            Pointer::observe(b.hash, b.creator),
        ];
        let ptrs2 = vec![ptrs1[1], ptrs1[0]];
        let blk1 = Block::new(crypto, AgentId(2), ptrs1, vec![]).unwrap();
        let blk2 = Block::new(crypto, AgentId(2), ptrs2, vec![]).unwrap();
        assert_eq!(blk1.hash, blk2.hash);
    }
}
