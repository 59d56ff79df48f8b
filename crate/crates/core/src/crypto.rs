//! Hashing and signatures.
//!
//! Two interchangeable schemes implement the same interface:
//!
//! * [`Crypto::Sha256`] — SHA-256 content hashes with keyed-digest
//!   signatures. Signatures model authenticity (a receiver can verify that a
//!   block was produced by the claimed creator within the simulation); real
//!   key distribution is out of scope.
//! * [`Crypto::Fnv`] — a cheap 64-bit FNV-1a content hash and an
//!   identity-echo signature, for high-volume deterministic tests where
//!   hashing dominates the profile.
//!
//! Both are fully deterministic. Within a run a hash is assumed to identify
//! one block; the FNV scheme relies on that as a modeling assumption.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

use crate::types::AgentId;

/// Content hash identifying a block.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockHash(pub [u8; 32]);

impl BlockHash {
    pub fn short(&self) -> String {
        hex::encode(&self.0[..6])
    }
}

impl fmt::Debug for BlockHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

impl fmt::Display for BlockHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

impl Serialize for BlockHash {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for BlockHash {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("hash must be 32 bytes"))?;
        Ok(BlockHash(arr))
    }
}

/// Creator signature over a block hash.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature(pub [u8; 32]);

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sig:{}", hex::encode(&self.0[..6]))
    }
}

impl Serialize for Signature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("signature must be 32 bytes"))?;
        Ok(Signature(arr))
    }
}

/// Hash-and-signature scheme selector.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crypto {
    #[default]
    Sha256,
    Fnv,
}

impl Crypto {
    pub fn digest(self, bytes: &[u8]) -> BlockHash {
        match self {
            Crypto::Sha256 => {
                let mut h = Sha256::new();
                h.update(bytes);
                BlockHash(h.finalize().into())
            }
            Crypto::Fnv => {
                let mut out = [0u8; 32];
                out[..8].copy_from_slice(&fnv1a(bytes).to_le_bytes());
                BlockHash(out)
            }
        }
    }

    pub fn sign(self, creator: AgentId, hash: &BlockHash) -> Signature {
        match self {
            Crypto::Sha256 => {
                let mut h = Sha256::new();
                h.update(b"sign");
                h.update(secret(creator));
                h.update(hash.0);
                Signature(h.finalize().into())
            }
            Crypto::Fnv => {
                let mut out = [0u8; 32];
                out[..4].copy_from_slice(&creator.0.to_le_bytes());
                out[4..12].copy_from_slice(&hash.0[..8]);
                Signature(out)
            }
        }
    }

    pub fn verify(self, creator: AgentId, hash: &BlockHash, sig: &Signature) -> bool {
        self.sign(creator, hash) == *sig
    }
}

/// Per-agent signing secret, derived deterministically from the id. This is
/// where a deployment would plug in real key material.
fn secret(creator: AgentId) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"agent-secret");
    h.update(creator.0.to_be_bytes());
    h.finalize().into()
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_deterministic_and_distinct() {
        for crypto in [Crypto::Sha256, Crypto::Fnv] {
            let a = crypto.digest(b"abc");
            let b = crypto.digest(b"abc");
            let c = crypto.digest(b"abd");
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn signatures_bind_creator_and_hash() {
        for crypto in [Crypto::Sha256, Crypto::Fnv] {
            let h1 = crypto.digest(b"one");
            let h2 = crypto.digest(b"two");
            let sig = crypto.sign(AgentId(3), &h1);
            assert!(crypto.verify(AgentId(3), &h1, &sig));
            assert!(!crypto.verify(AgentId(4), &h1, &sig));
            assert!(!crypto.verify(AgentId(3), &h2, &sig));
        }
    }

    #[test]
    fn hash_serde_round_trips_as_hex() {
        let h = Crypto::Sha256.digest(b"x");
        let json = serde_json::to_string(&h).unwrap();
        let back: BlockHash = serde_json::from_str(&json).unwrap();
        assert_eq!(h, back);
    }
}
