//! Per-peer record of which blocks have already been transmitted, so
//! dissemination never repeats itself. Keyed by the *local* receipt index
//! of the agent's own blocklace replica.

use blocklace_core::Bits;

pub struct SentLedger {
    per_peer: Vec<Bits>,
}

impl SentLedger {
    pub fn new(n: usize) -> Self {
        SentLedger {
            per_peer: (0..n).map(|_| Bits::new()).collect(),
        }
    }

    pub fn mark(&mut self, peer: usize, idx: usize) {
        self.per_peer[peer].set(idx);
    }

    pub fn contains(&self, peer: usize, idx: usize) -> bool {
        self.per_peer[peer].get(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_peers_independently() {
        let mut ledger = SentLedger::new(3);
        ledger.mark(0, 5);
        ledger.mark(1, 2);
        assert!(ledger.contains(0, 5));
        assert!(!ledger.contains(0, 2));
        assert!(ledger.contains(1, 2));
        assert!(!ledger.contains(2, 5));
    }
}
