//! Counters and latency aggregation.

use serde::Serialize;

/// Work counters for one run. `payments` counts positive payments to other
/// agents — the unit every per-payment cost is normalized by.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Blocks issued by correct agents.
    pub blocks: u64,
    /// Among them, blocks carrying a positive payment to another agent.
    pub payment_blocks: u64,
    /// Positive payments to other agents, summed over blocks.
    pub payments: u64,
    /// Empty blocks issued to acknowledge urgent payments.
    pub acks: u64,
    /// Messages sent by correct agents (broadcast and catchup).
    pub sends: u64,
    /// Among them, catchup relays of other creators' blocks.
    pub catchup_sends: u64,
    /// Encoded bytes of all messages sent by correct agents.
    pub bytes: u64,
    /// Messages delivered (to anyone, from anyone).
    pub deliveries: u64,
}

/// Finality latency samples in ticks, from block issue to the block being
/// final in every correct agent's lace.
#[derive(Clone, Debug, Default)]
pub struct LatencyStats {
    samples: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LatencySummary {
    pub count: usize,
    pub mean: f64,
    pub p50: u64,
    pub p90: u64,
    pub max: u64,
}

impl LatencyStats {
    pub fn record(&mut self, ticks: u64) {
        self.samples.push(ticks);
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn max(&self) -> Option<u64> {
        self.samples.iter().copied().max()
    }

    /// Nearest-rank percentile over the recorded samples.
    pub fn percentile(&self, p: u32) -> Option<u64> {
        if self.samples.is_empty() {
            return None;
        }
        let mut sorted = self.samples.clone();
        sorted.sort_unstable();
        let rank = (sorted.len() - 1) * p.clamp(0, 100) as usize / 100;
        Some(sorted[rank])
    }

    pub fn summary(&self) -> LatencySummary {
        if self.samples.is_empty() {
            return LatencySummary::default();
        }
        let sum: u64 = self.samples.iter().sum();
        LatencySummary {
            count: self.samples.len(),
            mean: sum as f64 / self.samples.len() as f64,
            p50: self.percentile(50).unwrap(),
            p90: self.percentile(90).unwrap(),
            max: self.max().unwrap(),
        }
    }
}

/// Per-run report: totals, per-payment ratios, and the latency picture.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub messages: u64,
    pub bytes: u64,
    pub blocks: u64,
    pub payments_finalized: u64,
    /// messages / payments_finalized; 0 when nothing finalized.
    pub msgs_per_payment: f64,
    pub bytes_per_payment: f64,
    /// Catchup relays of other creators' blocks.
    pub retransmissions: u64,
    pub ack_blocks: u64,
    pub latency_rounds: LatencySummary,
}

impl Report {
    pub fn new(counters: &Counters, payments_finalized: u64, latency_rounds: LatencySummary) -> Report {
        let per = |total: u64| {
            if payments_finalized > 0 {
                total as f64 / payments_finalized as f64
            } else {
                0.0
            }
        };
        Report {
            messages: counters.sends,
            bytes: counters.bytes,
            blocks: counters.blocks,
            payments_finalized,
            msgs_per_payment: per(counters.sends),
            bytes_per_payment: per(counters.bytes),
            retransmissions: counters.catchup_sends,
            ack_blocks: counters.acks,
            latency_rounds,
        }
    }
}
