//! Large-block agent for heavily loaded networks.
//!
//! Instead of one block per payment, the agent runs *rounds*. A round
//! starts once the agent is *cordial* — it has accepted fresh blocks from
//! enough distinct creators since its last issue that, counting itself,
//! a supermajority is represented. Becoming cordial arms a one-shot timer
//! a grace delay Δ in the future, letting stragglers' blocks arrive so the
//! next block can observe them. When the timer fires the agent issues one
//! large block: it spends the current balance block plus every finalized
//! incoming payment gathered since the previous round, pays the longest
//! affordable prefix of the intent queue (strict FIFO — nothing overtakes
//! the head), always keeps a self-change payment, and observes every DAG
//! root so the block's closure covers the whole local lace.
//!
//! If the timer fires with nothing to pay and nothing to fold in, the
//! round stays open and the block is issued the moment a payload shows up,
//! so an idle network stays quiet instead of spinning empty rounds.
//!
//! Dissemination is receive-driven: accepting a block of height k from a
//! peer triggers sending that peer every accepted block of lower height it
//! has not been observed to hold and has not already been sent.
//!
//! Δ is either fixed or adaptive: the adaptive policy tracks, per block
//! height, the spread between the first and last arrival, and uses a
//! percentile of recent closed heights, clamped to a configured range.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use blocklace_core::{
    AcceptOutcome, AcceptStatus, AgentId, Amount, Block, BlockHash, Blocklace, LaceConfig,
    Payment, Pointer,
};
use serde::{Deserialize, Serialize};

use crate::io::{Agent, BlockKind, Input, Note, Outbox};
use crate::ledger::SentLedger;

/// How long to wait after becoming cordial before issuing the round block.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// A constant grace delay in ticks.
    Fixed { ticks: u64 },
    /// A percentile of the per-height arrival spreads observed recently.
    Adaptive {
        /// Nearest-rank percentile in 1..=100.
        percentile: u32,
        /// Lower clamp, also used before any height has closed.
        min: u64,
        /// Upper clamp.
        max: u64,
        /// How many recently closed heights to consider.
        window: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct HighConfig {
    pub delta: DeltaPolicy,
    /// Upper bound on payments batched per round (change excluded).
    pub batch_cap: Option<usize>,
}

impl Default for HighConfig {
    fn default() -> Self {
        HighConfig {
            delta: DeltaPolicy::Fixed { ticks: 4 },
            batch_cap: None,
        }
    }
}

pub struct HighAgent {
    id: AgentId,
    config: HighConfig,
    lace: Blocklace,
    sent: SentLedger,
    intents: VecDeque<(AgentId, Amount, bool)>,
    /// Final incoming payment blocks to spend in the next round block.
    receipts: VecDeque<BlockHash>,
    balance: Amount,
    balance_block: Option<BlockHash>,
    started: bool,
    /// Creators of blocks accepted since the agent's last issue.
    fresh: BTreeSet<AgentId>,
    /// Round counter; doubles as the timer token so stale timers miss.
    round: u64,
    /// Timer armed (or already fired) for the current round.
    armed: bool,
    /// Timer fired; issue as soon as there is a payload.
    fired: bool,
    /// Per height: (first arrival, last arrival) of delivered blocks.
    arrivals: BTreeMap<u32, (u64, u64)>,
    pending_from: HashMap<BlockHash, AgentId>,
}

impl HighAgent {
    pub fn new(id: AgentId, lace_config: LaceConfig, config: HighConfig) -> Self {
        let lace = Blocklace::new(lace_config).expect("invalid lace config");
        let n = lace.agent_count() as usize;
        HighAgent {
            id,
            config,
            lace,
            sent: SentLedger::new(n),
            intents: VecDeque::new(),
            receipts: VecDeque::new(),
            balance: 0,
            balance_block: None,
            started: false,
            fresh: BTreeSet::new(),
            round: 0,
            armed: false,
            fired: false,
            arrivals: BTreeMap::new(),
            pending_from: HashMap::new(),
        }
    }

    fn current_delta(&self) -> u64 {
        match &self.config.delta {
            DeltaPolicy::Fixed { ticks } => *ticks,
            DeltaPolicy::Adaptive {
                percentile,
                min,
                max,
                window,
            } => {
                // A height is closed once a higher one has been seen: its
                // arrival spread can no longer grow.
                let Some(&top) = self.arrivals.keys().last() else {
                    return *min;
                };
                let mut spreads: Vec<u64> = self
                    .arrivals
                    .iter()
                    .filter(|(h, _)| **h < top)
                    .map(|(_, (first, last))| last - first)
                    .collect();
                if spreads.is_empty() {
                    return *min;
                }
                if spreads.len() > *window {
                    spreads.drain(..spreads.len() - *window);
                }
                spreads.sort_unstable();
                let rank = (spreads.len() - 1) * (*percentile).clamp(1, 100) as usize / 100;
                spreads[rank].clamp(*min, *max)
            }
        }
    }

    fn check_cordial(&mut self, now: u64, out: &mut Outbox) {
        if !self.started || self.armed {
            return;
        }
        let represented = self.fresh.len() as u32 + 1;
        if represented >= self.lace.quorum_size() {
            self.armed = true;
            out.arm_timer(now + self.current_delta(), self.round);
        }
    }

    /// True if a round block issued now would carry actual work.
    fn has_payload(&self) -> bool {
        if !self.receipts.is_empty() {
            return true;
        }
        let gain: Amount = self
            .receipts
            .iter()
            .filter_map(|h| self.lace.get(h))
            .map(|b| b.paid_to(self.id))
            .sum();
        match self.intents.front() {
            Some(&(_, amount, _)) => amount <= self.balance + gain,
            None => false,
        }
    }

    fn try_issue(&mut self, out: &mut Outbox) {
        if self.started && self.fired && self.has_payload() {
            self.issue_round_block(out);
        }
    }

    fn issue_round_block(&mut self, out: &mut Outbox) {
        let balance_block = self.balance_block.expect("round before start");
        let mut inputs: Vec<(BlockHash, AgentId)> = vec![(balance_block, self.id)];
        let mut total = self.balance;
        while let Some(receipt) = self.receipts.pop_front() {
            let incoming = self.lace.get(&receipt).unwrap();
            total += incoming.paid_to(self.id);
            inputs.push((receipt, incoming.creator));
        }
        // Longest affordable prefix of the queue, strictly in order.
        let mut batch: Vec<Payment> = Vec::new();
        let mut spent: Amount = 0;
        let cap = self.config.batch_cap.unwrap_or(usize::MAX);
        while let Some(&(to, amount, urgent)) = self.intents.front() {
            if batch.len() >= cap || spent + amount > total {
                break;
            }
            self.intents.pop_front();
            spent += amount;
            batch.push(Payment {
                recipient: to,
                amount,
                urgent,
            });
        }
        batch.push(Payment::new(self.id, total - spent));

        let input_idx: Vec<usize> = inputs
            .iter()
            .map(|(h, _)| self.lace.index_of(h).unwrap())
            .collect();
        let mut pointers: Vec<Pointer> = inputs
            .iter()
            .map(|&(h, c)| Pointer::spend(h, c))
            .collect();
        for root in self.lace.root_indices() {
            if !input_idx.contains(&root) {
                pointers.push(Pointer::observe(
                    self.lace.hash_at(root),
                    self.lace.creator_at(root),
                ));
            }
        }
        let block = Block::new(self.lace.crypto(), self.id, pointers, batch)
            .expect("malformed round block");
        self.balance = total - spent;
        self.balance_block = Some(block.hash);
        self.round += 1;
        self.fresh.clear();
        self.armed = false;
        self.fired = false;

        let outcome = self.lace.accept(block.clone());
        assert_eq!(
            outcome.status,
            AcceptStatus::Accepted,
            "own round block refused: {:?}",
            outcome.status
        );
        self.collect_receipts(&outcome);
        out.issue(block.clone(), BlockKind::Large);
        let idx = self.lace.index_of(&block.hash).unwrap();
        for q in 0..self.lace.agent_count() {
            if q == self.id.0 {
                continue;
            }
            out.send(AgentId(q), block.clone(), false);
            self.sent.mark(q as usize, idx);
        }
    }

    fn collect_receipts(&mut self, outcome: &AcceptOutcome) {
        for h in &outcome.newly_final {
            let block = self.lace.get(h).unwrap();
            if block.creator != self.id && block.paid_to(self.id) > 0 {
                self.receipts.push_back(*h);
            }
        }
    }

    /// Accepting a peer's block of height k means the peer may lack blocks
    /// below k: relay whatever it has not observed and was never sent.
    fn receive_and_disseminate(&mut self, peer: AgentId, accepted: BlockHash, out: &mut Outbox) {
        let idx = self.lace.index_of(&accepted).unwrap();
        let height = self.lace.height_at(idx);
        for i in 0..self.lace.len() {
            if self.lace.height_at(i) < height
                && !self.lace.agent_observed_contains(peer, i)
                && !self.sent.contains(peer.index(), i)
            {
                out.send(peer, self.lace.block_at(i).clone(), true);
                self.sent.mark(peer.index(), i);
            }
        }
    }

    fn on_block(&mut self, now: u64, from: AgentId, block: Block, out: &mut Outbox) {
        let hash = block.hash;
        let outcome = self.lace.accept(block);
        match outcome.status {
            AcceptStatus::Accepted | AcceptStatus::Duplicate => {
                if let Some(idx) = self.lace.index_of(&hash) {
                    self.sent.mark(from.index(), idx);
                }
            }
            AcceptStatus::Pending => {
                self.pending_from.insert(hash, from);
            }
            AcceptStatus::Rejected(reason) => out.note(Note::Refused {
                block: hash,
                why: reason.to_string(),
            }),
            AcceptStatus::Overflow => out.note(Note::Refused {
                block: hash,
                why: "pending buffer full".into(),
            }),
        }
        for h in &outcome.accepted {
            if let Some(q) = self.pending_from.remove(h) {
                if let Some(idx) = self.lace.index_of(h) {
                    self.sent.mark(q.index(), idx);
                }
            }
            let idx = self.lace.index_of(h).unwrap();
            let creator = self.lace.creator_at(idx);
            let height = self.lace.height_at(idx);
            let slot = self.arrivals.entry(height).or_insert((now, now));
            slot.1 = now;
            if creator != self.id {
                self.fresh.insert(creator);
                self.receive_and_disseminate(creator, *h, out);
            }
        }
        self.collect_receipts(&outcome);
        self.check_cordial(now, out);
        self.try_issue(out);
    }
}

impl Agent for HighAgent {
    fn id(&self) -> AgentId {
        self.id
    }

    fn lace(&self) -> &Blocklace {
        &self.lace
    }

    fn backlog(&self) -> usize {
        self.intents.len() + self.receipts.len()
    }

    fn handle(&mut self, now: u64, input: Input, out: &mut Outbox) {
        match input {
            Input::Start => {
                if self.started {
                    return;
                }
                let amount = self.lace.config().genesis[self.id.index()];
                let block =
                    Block::initial(self.lace.crypto(), self.id, amount).expect("initial block");
                self.balance = amount;
                self.balance_block = Some(block.hash);
                self.started = true;
                let outcome = self.lace.accept(block.clone());
                assert_eq!(outcome.status, AcceptStatus::Accepted);
                out.issue(block.clone(), BlockKind::Initial);
                let idx = self.lace.index_of(&block.hash).unwrap();
                for q in 0..self.lace.agent_count() {
                    if q == self.id.0 {
                        continue;
                    }
                    out.send(AgentId(q), block.clone(), false);
                    self.sent.mark(q as usize, idx);
                }
                self.check_cordial(now, out);
            }
            Input::Intent { to, amount, urgent } => {
                self.intents.push_back((to, amount, urgent));
                self.try_issue(out);
            }
            Input::Block { from, block } => self.on_block(now, from, block, out),
            Input::Timer { token } => {
                if token == self.round && self.armed {
                    self.fired = true;
                    self.try_issue(out);
                }
            }
            // Rounds already batch a whole tick's arrivals; nothing defers.
            Input::Flush => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use blocklace_core::Crypto;

    const CRYPTO: Crypto = Crypto::Sha256;

    fn lace_config() -> LaceConfig {
        LaceConfig::uniform(4, 1, CRYPTO, 10)
    }

    fn agent(id: u32) -> HighAgent {
        HighAgent::new(AgentId(id), lace_config(), HighConfig::default())
    }

    fn started(id: u32) -> HighAgent {
        let mut a = agent(id);
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        a
    }

    fn deliver(a: &mut HighAgent, now: u64, from: u32, block: &Block) -> Outbox {
        let mut out = Outbox::default();
        a.handle(
            now,
            Input::Block {
                from: AgentId(from),
                block: block.clone(),
            },
            &mut out,
        );
        out
    }

    fn intent(a: &mut HighAgent, now: u64, to: u32, amount: Amount) -> Outbox {
        let mut out = Outbox::default();
        a.handle(
            now,
            Input::Intent {
                to: AgentId(to),
                amount,
                urgent: false,
            },
            &mut out,
        );
        out
    }

    fn fire(a: &mut HighAgent, now: u64, token: u64) -> Outbox {
        let mut out = Outbox::default();
        a.handle(now, Input::Timer { token }, &mut out);
        out
    }

    fn initial(id: u32) -> Block {
        Block::initial(CRYPTO, AgentId(id), 10).unwrap()
    }

    #[test]
    fn cordiality_arms_the_round_timer_exactly_once() {
        let mut a = started(0);
        let out = deliver(&mut a, 1, 1, &initial(1));
        assert!(out.timers.is_empty(), "two of four is no supermajority");
        let out = deliver(&mut a, 2, 2, &initial(2));
        assert_eq!(out.timers, vec![(6, 0)], "armed at now + fixed delta");
        let out = deliver(&mut a, 3, 3, &initial(3));
        assert!(out.timers.is_empty(), "already armed this round");
    }

    #[test]
    fn the_round_block_batches_intents_and_observes_every_root() {
        let mut a = started(0);
        intent(&mut a, 0, 1, 3);
        intent(&mut a, 0, 2, 4);
        deliver(&mut a, 1, 1, &initial(1));
        deliver(&mut a, 2, 2, &initial(2));
        deliver(&mut a, 3, 3, &initial(3));
        let out = fire(&mut a, 6, 0);
        assert_eq!(out.issued.len(), 1);
        let (block, kind) = &out.issued[0];
        assert_eq!(*kind, BlockKind::Large);
        let pays: Vec<(u32, Amount)> = block
            .payments
            .iter()
            .map(|p| (p.recipient.0, p.amount))
            .collect();
        assert_eq!(pays, vec![(1, 3), (2, 4), (0, 3)]);
        // One input (the own initial) plus an observation per other root.
        assert_eq!(block.input_pointers().count(), 1);
        assert_eq!(block.pointers.len(), 4);
        for other in 1..4u32 {
            let g = a.lace.initial_of(AgentId(other)).unwrap();
            assert!(a.lace.observes(&block.hash, &g).unwrap());
        }
        assert_eq!(out.sends.len(), 3, "round block broadcast");
    }

    #[test]
    fn an_empty_round_waits_for_a_payload() {
        let mut a = started(0);
        deliver(&mut a, 1, 1, &initial(1));
        deliver(&mut a, 2, 2, &initial(2));
        let out = fire(&mut a, 6, 0);
        assert!(out.issued.is_empty(), "nothing to pay, nothing to fold in");
        // The payload arriving later completes the round immediately.
        let out = intent(&mut a, 9, 1, 5);
        assert_eq!(out.issued.len(), 1);
        assert_eq!(out.issued[0].0.payments[0].amount, 5);
        // A stale timer for the finished round is ignored.
        let out = fire(&mut a, 10, 0);
        assert!(out.issued.is_empty());
    }

    #[test]
    fn the_batch_is_a_strict_fifo_prefix() {
        let mut a = started(0);
        intent(&mut a, 0, 1, 6);
        intent(&mut a, 0, 2, 7); // unaffordable after the 6
        intent(&mut a, 0, 3, 1); // affordable but must not overtake
        deliver(&mut a, 1, 1, &initial(1));
        deliver(&mut a, 2, 2, &initial(2));
        let out = fire(&mut a, 6, 0);
        let block = &out.issued[0].0;
        let pays: Vec<(u32, Amount)> = block
            .payments
            .iter()
            .map(|p| (p.recipient.0, p.amount))
            .collect();
        assert_eq!(pays, vec![(1, 6), (0, 4)]);
        assert_eq!(a.backlog(), 2);
    }

    #[test]
    fn batch_cap_limits_payments_per_round() {
        let mut a = HighAgent::new(
            AgentId(0),
            lace_config(),
            HighConfig {
                batch_cap: Some(1),
                ..HighConfig::default()
            },
        );
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        intent(&mut a, 0, 1, 1);
        intent(&mut a, 0, 2, 1);
        deliver(&mut a, 1, 1, &initial(1));
        deliver(&mut a, 2, 2, &initial(2));
        let out = fire(&mut a, 6, 0);
        assert_eq!(out.issued[0].0.payments.len(), 2, "one payment plus change");
        assert_eq!(a.backlog(), 1);
    }

    #[test]
    fn finalized_incoming_payments_are_spent_by_the_next_round() {
        let mut a = started(0);
        let g1 = initial(1);
        let g2 = initial(2);
        let g3 = initial(3);
        let payment = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(g1.hash, AgentId(1))],
            vec![Payment::new(AgentId(0), 5), Payment::new(AgentId(1), 5)],
        )
        .unwrap();
        deliver(&mut a, 1, 1, &g1);
        deliver(&mut a, 1, 2, &g2);
        deliver(&mut a, 1, 3, &g3);
        deliver(&mut a, 2, 1, &payment);
        for (peer, g) in [(2u32, &g2), (3u32, &g3)] {
            let ack = Block::new(
                CRYPTO,
                AgentId(peer),
                vec![
                    Pointer::observe(payment.hash, AgentId(1)),
                    Pointer::observe(g.hash, AgentId(peer)),
                ],
                vec![],
            )
            .unwrap();
            deliver(&mut a, 3, peer, &ack);
        }
        assert!(a.lace.is_final(&payment.hash).unwrap());
        let out = fire(&mut a, 5, 0);
        assert_eq!(out.issued.len(), 1, "receipts alone are a payload");
        let block = &out.issued[0].0;
        assert_eq!(block.input_pointers().count(), 2);
        assert!(block.input_pointers().any(|p| p.target == payment.hash));
        assert_eq!(block.payments.len(), 1);
        assert_eq!(block.payments[0].amount, 15);
    }

    #[test]
    fn accepting_a_high_block_relays_lower_blocks_the_peer_lacks() {
        let mut a = started(0);
        let g1 = initial(1);
        let g2 = initial(2);
        let g3 = initial(3);
        deliver(&mut a, 1, 2, &g2);
        deliver(&mut a, 1, 3, &g3);
        let b1 = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(g1.hash, AgentId(1))],
            vec![Payment::new(AgentId(1), 10)],
        )
        .unwrap();
        // Height-2 block before its parent: buffered, resolved by g1.
        deliver(&mut a, 2, 1, &b1);
        assert!(!a.lace.contains(&b1.hash));
        let out = deliver(&mut a, 3, 1, &g1);
        assert!(a.lace.contains(&b1.hash));
        let relayed: BTreeSet<BlockHash> = out
            .sends
            .iter()
            .filter(|s| s.catchup && s.to == AgentId(1))
            .map(|s| s.block.hash)
            .collect();
        // Peer 1 sits at height 2 but observed neither g2 nor g3; the own
        // initial was already broadcast at start and is not resent.
        assert_eq!(relayed, BTreeSet::from([g2.hash, g3.hash]));
    }

    #[test]
    fn adaptive_delta_follows_the_arrival_spread_of_closed_heights() {
        let mut a = HighAgent::new(
            AgentId(0),
            lace_config(),
            HighConfig {
                delta: DeltaPolicy::Adaptive {
                    percentile: 100,
                    min: 1,
                    max: 100,
                    window: 8,
                },
                batch_cap: None,
            },
        );
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        let g1 = initial(1);
        let g2 = initial(2);
        deliver(&mut a, 2, 1, &g1);
        let out = deliver(&mut a, 8, 2, &g2);
        // No height closed yet: the minimum applies.
        assert_eq!(out.timers, vec![(9, 0)]);
        fire(&mut a, 9, 0);
        intent(&mut a, 9, 1, 1); // completes round 0
        // Two height-2 blocks close height 1, whose spread was 8 - 2 = 6.
        let b1 = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(g1.hash, AgentId(1))],
            vec![Payment::new(AgentId(1), 10)],
        )
        .unwrap();
        let b2 = Block::new(
            CRYPTO,
            AgentId(2),
            vec![Pointer::spend(g2.hash, AgentId(2))],
            vec![Payment::new(AgentId(2), 10)],
        )
        .unwrap();
        deliver(&mut a, 10, 1, &b1);
        let out = deliver(&mut a, 11, 2, &b2);
        assert_eq!(out.timers, vec![(17, 1)], "delta grew to the spread of 6");
    }

    #[test]
    fn rounds_count_distinct_creators_not_block_volume() {
        let mut a = started(0);
        let g1 = initial(1);
        deliver(&mut a, 1, 1, &g1);
        let mut prev = g1.hash;
        for _ in 0..5 {
            let b = Block::new(
                CRYPTO,
                AgentId(1),
                vec![Pointer::spend(prev, AgentId(1))],
                vec![Payment::new(AgentId(1), 10)],
            )
            .unwrap();
            prev = b.hash;
            let out = deliver(&mut a, 2, 1, &b);
            assert!(
                out.timers.is_empty(),
                "a single chatty peer must not look like a supermajority"
            );
        }
    }
}
