//! Small-block agent for lightly loaded networks.
//!
//! Every payment intent becomes its own block with at most two payments
//! (recipient plus change) and at most four pointers. The agent spends only
//! its own chain: incoming payments are folded in by a *consolidation*
//! block — two inputs, one self-payment — issued once the incoming block
//! turns final in the local lace. Observation pointers follow a root rule
//! that drags the most-lagging part of the DAG into the new block's
//! closure, and a self-chain guard keeps the agent's blocks totally
//! ordered even when acks interleave with payments.
//!
//! The opening ledger is common knowledge: every agent's initial block is
//! derivable from the shared configuration, so at start the agent adopts
//! all of them locally instead of transmitting anything.
//!
//! Every block issued is broadcast and followed by a *cordial* pass that
//! sends each peer the blocks it demonstrably lacks. The demonstration is
//! the peer's own issuing: its outgoing payments mark how far it had read
//! the DAG when it spoke. One payment written while a block was fresh
//! proves nothing — pointer budgets make a busy peer lag a little — so a
//! block counts as missing only once the peer has paid twice since the
//! block arrived and its blocks still do not observe it. Anything so
//! proven — and not already sent — is relayed. Peers that have not spoken
//! are left alone; with timely delivery the pass stays silent and every
//! block travels exactly once.
//!
//! Reactions to incoming blocks — acks for urgent payments, consolidations
//! for finalized receipts — are deferred to the end-of-tick flush so they
//! are issued against the tick's complete view. Urgent payments ask every
//! receiver for an immediate ack (an empty block), with a per-window
//! budget on both sides: issuers demote their own urgent payments beyond
//! the budget, receivers stop acking senders who exceed it.

use std::collections::{BTreeMap, HashMap, VecDeque};

use blocklace_core::{
    AcceptOutcome, AcceptStatus, AgentId, Amount, Block, BlockHash, Blocklace, LaceConfig,
    Payment, Pointer,
};
use serde::{Deserialize, Serialize};

use crate::io::{Agent, BlockKind, Input, Note, Outbox};
use crate::ledger::SentLedger;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct LowConfig {
    /// Pointer budget per block.
    pub max_pointers: usize,
    /// Urgent payments allowed per window, on both the issuing and the
    /// acking side.
    pub urgent_budget: u32,
    /// Window length in ticks for the urgent budget.
    pub urgent_window: u64,
}

impl Default for LowConfig {
    fn default() -> Self {
        LowConfig {
            max_pointers: 4,
            urgent_budget: 2,
            urgent_window: 64,
        }
    }
}

pub struct LowAgent {
    id: AgentId,
    config: LowConfig,
    lace: Blocklace,
    sent: SentLedger,
    /// Payment intents in arrival order; the head blocks until affordable.
    intents: VecDeque<(AgentId, Amount, bool)>,
    /// Final incoming payment blocks awaiting a consolidation block.
    receipts: VecDeque<BlockHash>,
    /// Change riding on `balance_block`, the agent's spendable funds.
    balance: Amount,
    balance_block: Option<BlockHash>,
    started: bool,
    /// Per urgent sender: (window index, urgent blocks acked in it).
    acks_given: BTreeMap<AgentId, (u64, u32)>,
    /// (window index, own urgent payments issued in it).
    urgent_issued: (u64, u32),
    /// First sender of each block buffered out-of-order, so it is not
    /// echoed back once accepted.
    pending_from: HashMap<BlockHash, AgentId>,
    /// Urgent blocks accepted this tick, acked at the flush.
    pending_acks: VecDeque<(BlockHash, AgentId)>,
    /// Per peer: indices of the two newest blocks accepted from it that pay
    /// another agent (newest, second-newest) — the high-water marks of what
    /// the peer has demonstrably read.
    demo: Vec<(Option<usize>, Option<usize>)>,
    /// Local arrival tick of every block in the lace, by index.
    arrived: Vec<u64>,
}

impl LowAgent {
    pub fn new(id: AgentId, lace_config: LaceConfig, mut config: LowConfig) -> Self {
        config.urgent_window = config.urgent_window.max(1);
        config.max_pointers = config.max_pointers.max(3); // input + root + chain
        let lace = Blocklace::new(lace_config).expect("invalid lace config");
        let n = lace.agent_count() as usize;
        LowAgent {
            id,
            config,
            lace,
            sent: SentLedger::new(n),
            intents: VecDeque::new(),
            receipts: VecDeque::new(),
            balance: 0,
            balance_block: None,
            started: false,
            acks_given: BTreeMap::new(),
            urgent_issued: (0, 0),
            pending_from: HashMap::new(),
            pending_acks: VecDeque::new(),
            demo: vec![(None, None); n],
            arrived: Vec::new(),
        }
    }

    /// Stamp every block the lace gained since the last call with its
    /// local arrival tick.
    fn stamp_arrivals(&mut self, now: u64) {
        self.arrived.resize(self.lace.len(), now);
    }

    fn window(&self, now: u64) -> u64 {
        now / self.config.urgent_window
    }

    /// Accept an own block, queue any receipts it finalized, broadcast it,
    /// and run the cordial pass.
    fn issue(&mut self, block: Block, kind: BlockKind, out: &mut Outbox) {
        let prev_self = self
            .lace
            .last_block(self.id)
            .and_then(|b| self.lace.index_of(&b.hash));
        let outcome = self.lace.accept(block.clone());
        assert_eq!(
            outcome.status,
            AcceptStatus::Accepted,
            "own block refused: {:?}",
            outcome.status
        );
        self.collect_receipts(&outcome);
        out.issue(block.clone(), kind);
        let idx = self.lace.index_of(&block.hash).unwrap();
        for q in 0..self.lace.agent_count() {
            if q == self.id.0 {
                continue;
            }
            out.send(AgentId(q), block.clone(), false);
            self.sent.mark(q as usize, idx);
        }
        self.cordial_pass(prev_self, out);
    }

    /// Send every peer not known faulty the blocks it demonstrably lacks:
    /// whatever this agent already vouched for one issue ago (the closure
    /// of its previous own block), arrived here strictly before the peer's
    /// second-newest outgoing payment did (so the peer paid twice with
    /// time to have read it), is not observed by the peer's own blocks,
    /// and was never sent to it. Fresh arrivals this agent has not yet
    /// built on prove nothing, blocks the peer has paid over only once
    /// may merely be outpacing its pointer budget, and a peer yet to make
    /// two payments has demonstrated nothing; none of those get relays.
    fn cordial_pass(&mut self, prev_self: Option<usize>, out: &mut Outbox) {
        let Some(prev_idx) = prev_self else { return };
        let faulty = self.lace.known_faulty();
        for q in 0..self.lace.agent_count() as usize {
            let peer = AgentId(q as u32);
            if peer == self.id || faulty.contains(&peer) {
                continue;
            }
            let (_, Some(watermark)) = self.demo[q] else { continue };
            for i in 0..watermark {
                if self.arrived[i] < self.arrived[watermark]
                    && !self.lace.block_at(i).is_initial()
                    && self.lace.observes_idx(prev_idx, i)
                    && !self.lace.agent_observed_contains(peer, i)
                    && !self.sent.contains(q, i)
                {
                    out.send(peer, self.lace.block_at(i).clone(), true);
                    self.sent.mark(q, i);
                }
            }
        }
    }

    /// Pointer selection: the inputs, then up to two roots — one covering
    /// the oldest block no self-block observes, one lowest-keyed — then the
    /// own tip if the choice so far does not reach it.
    fn choose_pointers(&self, inputs: &[(BlockHash, AgentId)]) -> Vec<Pointer> {
        let lace = &self.lace;
        let mut pointers: Vec<Pointer> = inputs
            .iter()
            .map(|&(h, c)| Pointer::spend(h, c))
            .collect();
        let mut chosen: Vec<usize> = inputs
            .iter()
            .map(|(h, _)| lace.index_of(h).unwrap())
            .collect();
        let key = |i: &usize| (lace.creator_at(*i).0, lace.hash_at(*i));
        let roots: Vec<usize> = lace
            .root_indices()
            .into_iter()
            .filter(|i| !chosen.contains(i))
            .collect();
        let add = |i: usize, pointers: &mut Vec<Pointer>, chosen: &mut Vec<usize>| {
            pointers.push(Pointer::observe(lace.hash_at(i), lace.creator_at(i)));
            chosen.push(i);
        };
        if roots.len() == 1 {
            add(roots[0], &mut pointers, &mut chosen);
        } else if roots.len() >= 2 {
            let oldest = lace.first_unobserved_by(self.id, 0);
            let first = oldest
                .and_then(|u| {
                    roots
                        .iter()
                        .copied()
                        .filter(|&r| lace.observes_idx(r, u))
                        .min_by_key(key)
                })
                .unwrap_or_else(|| roots.iter().copied().min_by_key(key).unwrap());
            add(first, &mut pointers, &mut chosen);
            if pointers.len() < self.config.max_pointers {
                if let Some(second) = roots
                    .iter()
                    .copied()
                    .filter(|&r| r != first)
                    .min_by_key(key)
                {
                    add(second, &mut pointers, &mut chosen);
                }
            }
        }
        // Self-chain guard: the new block must observe the own tip, or two
        // own blocks end up incomparable.
        if let Some(tip) = lace.last_block(self.id) {
            let tip_idx = lace.index_of(&tip.hash).unwrap();
            let covered = chosen.iter().any(|&t| lace.observes_idx(t, tip_idx));
            if !covered {
                let ptr = Pointer::observe(tip.hash, self.id);
                if pointers.len() < self.config.max_pointers {
                    pointers.push(ptr);
                } else {
                    // The last pointer is always an observation here: if all
                    // roots were inputs, their closures would cover the tip.
                    debug_assert!(!pointers.last().unwrap().input);
                    *pointers.last_mut().unwrap() = ptr;
                }
            }
        }
        pointers
    }

    fn collect_receipts(&mut self, outcome: &AcceptOutcome) {
        for h in &outcome.newly_final {
            let block = self.lace.get(h).unwrap();
            if block.creator != self.id && block.paid_to(self.id) > 0 {
                self.receipts.push_back(*h);
            }
        }
    }

    /// Issue consolidations for all queued receipts, then payments while
    /// the head intent is affordable.
    fn drain(&mut self, now: u64, out: &mut Outbox) {
        if !self.started {
            return;
        }
        loop {
            if let Some(receipt) = self.receipts.pop_front() {
                self.issue_consolidation(receipt, out);
                continue;
            }
            match self.intents.front() {
                Some(&(_, amount, _)) if amount <= self.balance => {
                    let (to, amount, urgent) = self.intents.pop_front().unwrap();
                    self.issue_payment(now, to, amount, urgent, out);
                }
                _ => break,
            }
        }
    }

    fn issue_payment(&mut self, now: u64, to: AgentId, amount: Amount, urgent: bool, out: &mut Outbox) {
        let urgent = urgent && self.take_urgent_token(now, to, out);
        let from = self.balance_block.expect("payment before start");
        let pointers = self.choose_pointers(&[(from, self.id)]);
        let payments = vec![
            Payment {
                recipient: to,
                amount,
                urgent,
            },
            Payment::new(self.id, self.balance - amount),
        ];
        let block = Block::new(self.lace.crypto(), self.id, pointers, payments)
            .expect("malformed payment block");
        self.balance -= amount;
        self.balance_block = Some(block.hash);
        self.issue(block, BlockKind::Payment, out);
    }

    fn issue_consolidation(&mut self, receipt: BlockHash, out: &mut Outbox) {
        let from = self.balance_block.expect("consolidation before start");
        let incoming = self.lace.get(&receipt).unwrap();
        let gained = incoming.paid_to(self.id);
        let inputs = [(from, self.id), (receipt, incoming.creator)];
        let pointers = self.choose_pointers(&inputs);
        let payments = vec![Payment::new(self.id, self.balance + gained)];
        let block = Block::new(self.lace.crypto(), self.id, pointers, payments)
            .expect("malformed consolidation block");
        self.balance += gained;
        self.balance_block = Some(block.hash);
        self.issue(block, BlockKind::Consolidation, out);
    }

    /// Issuer-side urgent budget: true if this payment may stay urgent.
    fn take_urgent_token(&mut self, now: u64, to: AgentId, out: &mut Outbox) -> bool {
        let w = self.window(now);
        if self.urgent_issued.0 != w {
            self.urgent_issued = (w, 0);
        }
        if self.urgent_issued.1 >= self.config.urgent_budget {
            out.note(Note::UrgentDemoted { to });
            return false;
        }
        self.urgent_issued.1 += 1;
        true
    }

    /// Receiver side of an urgent block: ack it — an empty block pointing
    /// at the urgent block plus the own tip when uncovered — unless the
    /// sender is over budget this window.
    fn maybe_ack(&mut self, now: u64, urgent: BlockHash, sender: AgentId, out: &mut Outbox) {
        if !self.started {
            return;
        }
        let w = self.window(now);
        let entry = self.acks_given.entry(sender).or_insert((w, 0));
        if entry.0 != w {
            *entry = (w, 0);
        }
        if entry.1 >= self.config.urgent_budget {
            out.note(Note::UrgentIgnored { from: sender });
            return;
        }
        entry.1 += 1;
        let mut pointers = vec![Pointer::observe(urgent, sender)];
        if let Some(tip) = self.lace.last_block(self.id) {
            if !self.lace.observes(&urgent, &tip.hash).unwrap() {
                pointers.push(Pointer::observe(tip.hash, self.id));
            }
        }
        let block = Block::new(self.lace.crypto(), self.id, pointers, vec![])
            .expect("malformed ack block");
        self.issue(block, BlockKind::Ack, out);
    }

    fn on_block(&mut self, from: AgentId, block: Block, out: &mut Outbox) {
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
            let accepted = self.lace.block_at(idx);
            if accepted.creator != self.id {
                // Only a block paying someone else is considered speech that
                // demonstrates the creator's frontier; consolidations and
                // acks are reactive bookkeeping issued under time pressure.
                if !accepted.is_initial()
                    && accepted
                        .payments
                        .iter()
                        .any(|p| p.recipient != accepted.creator)
                {
                    let slot = &mut self.demo[accepted.creator.index()];
                    *slot = (Some(idx), slot.0);
                }
                if accepted.is_urgent() {
                    self.pending_acks.push_back((*h, accepted.creator));
                }
            }
        }
        self.collect_receipts(&outcome);
    }
}

impl Agent for LowAgent {
    fn id(&self) -> AgentId {
        self.id
    }

    fn lace(&self) -> &Blocklace {
        &self.lace
    }

    fn backlog(&self) -> usize {
        self.intents.len() + self.receipts.len() + self.pending_acks.len()
    }

    fn handle(&mut self, now: u64, input: Input, out: &mut Outbox) {
        match input {
            Input::Start => {
                if self.started {
                    return;
                }
                // The opening ledger is derivable from the configuration,
                // so all initial blocks are adopted without any traffic.
                for q in 0..self.lace.agent_count() {
                    let peer = AgentId(q);
                    let amount = self.lace.config().genesis[peer.index()];
                    let g = Block::initial(self.lace.crypto(), peer, amount)
                        .expect("initial block");
                    let hash = g.hash;
                    let outcome = self.lace.accept(g);
                    assert_eq!(outcome.status, AcceptStatus::Accepted);
                    if peer == self.id {
                        self.balance = amount;
                        self.balance_block = Some(hash);
                    }
                }
                self.started = true;
                self.drain(now, out);
            }
            Input::Intent { to, amount, urgent } => {
                self.intents.push_back((to, amount, urgent));
                self.drain(now, out);
            }
            Input::Block { from, block } => self.on_block(from, block, out),
            Input::Timer { .. } => {}
            Input::Flush => {
                while let Some((urgent, sender)) = self.pending_acks.pop_front() {
                    self.maybe_ack(now, urgent, sender, out);
                }
                self.drain(now, out);
            }
        }
        self.stamp_arrivals(now);
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

    fn agent(id: u32) -> LowAgent {
        LowAgent::new(AgentId(id), lace_config(), LowConfig::default())
    }

    fn started(id: u32) -> (LowAgent, Outbox) {
        let mut a = agent(id);
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        (a, out)
    }

    fn deliver(a: &mut LowAgent, now: u64, from: u32, block: &Block) -> Outbox {
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

    fn intent(a: &mut LowAgent, now: u64, to: u32, amount: Amount, urgent: bool) -> Outbox {
        let mut out = Outbox::default();
        a.handle(
            now,
            Input::Intent {
                to: AgentId(to),
                amount,
                urgent,
            },
            &mut out,
        );
        out
    }

    fn flush(a: &mut LowAgent, now: u64) -> Outbox {
        let mut out = Outbox::default();
        a.handle(now, Input::Flush, &mut out);
        out
    }

    fn initial(id: u32) -> Block {
        Block::initial(CRYPTO, AgentId(id), 10).unwrap()
    }

    #[test]
    fn start_adopts_the_opening_ledger_without_transmitting() {
        let (a, out) = started(0);
        assert!(out.issued.is_empty());
        assert!(out.sends.is_empty());
        assert_eq!(a.lace().len(), 4, "all four initial blocks adopted");
        for id in 0..4 {
            assert!(a.lace().initial_of(AgentId(id)).is_some());
        }
        assert_eq!(a.backlog(), 0);
    }

    #[test]
    fn payment_spends_the_balance_block_and_keeps_change() {
        let (mut a, _) = started(0);
        let g1 = initial(1);
        let out = intent(&mut a, 2, 1, 4, false);
        assert_eq!(out.issued.len(), 1);
        let (block, kind) = &out.issued[0];
        assert_eq!(*kind, BlockKind::Payment);
        assert_eq!(block.payments.len(), 2);
        assert_eq!(block.payments[0].recipient, AgentId(1));
        assert_eq!(block.payments[0].amount, 4);
        assert_eq!(block.payments[1].recipient, AgentId(0));
        assert_eq!(block.payments[1].amount, 6);
        assert!(block.pointers.len() <= 4);
        // The one input is the agent's own initial block.
        let inputs: Vec<_> = block.input_pointers().collect();
        assert_eq!(inputs.len(), 1);
        assert_eq!(inputs[0].target, a.lace.initial_of(AgentId(0)).unwrap());
        // The observation frontier is covered: the block observes g1.
        assert!(a.lace.observes(&block.hash, &g1.hash).unwrap());
    }

    #[test]
    fn unaffordable_intents_queue_in_order() {
        let (mut a, _) = started(0);
        intent(&mut a, 1, 1, 6, false); // leaves 4
        let out = intent(&mut a, 2, 2, 7, false); // too big: queue
        assert!(out.issued.is_empty());
        // A later small intent must not jump the queue.
        let out = intent(&mut a, 3, 3, 1, false);
        assert!(out.issued.is_empty());
        assert_eq!(a.backlog(), 2);
    }

    /// Quorum-finalize a payment to `a`'s owner without its participation:
    /// payer issues the payment, two other agents ack it, and the tick
    /// closes with a flush so deferred reactions fire.
    fn paid_from_outside(a: &mut LowAgent, payer: u32, amount: Amount) -> (Block, Vec<Outbox>) {
        let me = a.id().0;
        let gp = initial(payer);
        let payment = Block::new(
            CRYPTO,
            AgentId(payer),
            vec![Pointer::spend(gp.hash, AgentId(payer))],
            vec![
                Payment::new(AgentId(me), amount),
                Payment::new(AgentId(payer), 10 - amount),
            ],
        )
        .unwrap();
        let mut outs = Vec::new();
        outs.push(deliver(a, 2, payer, &payment));
        for other in (0..4).filter(|&q| q != me && q != payer).take(2) {
            let go = initial(other);
            let ack = Block::new(
                CRYPTO,
                AgentId(other),
                vec![
                    Pointer::observe(payment.hash, AgentId(payer)),
                    Pointer::observe(go.hash, AgentId(other)),
                ],
                vec![],
            )
            .unwrap();
            outs.push(deliver(a, 4, other, &ack));
        }
        outs.push(flush(a, 5));
        (payment, outs)
    }

    #[test]
    fn incoming_payment_consolidates_on_finality_and_unblocks_intents() {
        let (mut a, _) = started(0);
        let big = intent(&mut a, 1, 3, 12, false); // beyond the opening 10
        assert!(big.issued.is_empty());

        let (payment, outs) = paid_from_outside(&mut a, 1, 5);
        assert!(a.lace.is_final(&payment.hash).unwrap());
        let issued: Vec<(Block, BlockKind)> =
            outs.into_iter().flat_map(|o| o.issued).collect();
        // One consolidation (two inputs, one self-payment of 10+5)…
        let consolidations: Vec<_> = issued
            .iter()
            .filter(|(_, k)| *k == BlockKind::Consolidation)
            .collect();
        assert_eq!(consolidations.len(), 1);
        let c = &consolidations[0].0;
        assert_eq!(c.input_pointers().count(), 2);
        assert_eq!(c.payments.len(), 1);
        assert_eq!(c.payments[0].recipient, AgentId(0));
        assert_eq!(c.payments[0].amount, 15);
        assert!(c.input_pointers().any(|p| p.target == payment.hash));
        // …which made the queued 12 affordable.
        let payments: Vec<_> = issued
            .iter()
            .filter(|(_, k)| *k == BlockKind::Payment)
            .collect();
        assert_eq!(payments.len(), 1);
        assert_eq!(payments[0].0.payments[0].amount, 12);
        assert_eq!(a.backlog(), 0);
    }

    #[test]
    fn zero_amount_incoming_payments_are_not_consolidated() {
        let (mut a, _) = started(0);
        let (payment, outs) = paid_from_outside(&mut a, 1, 0);
        assert!(a.lace.is_final(&payment.hash).unwrap());
        let kinds: Vec<BlockKind> = outs
            .into_iter()
            .flat_map(|o| o.issued)
            .map(|(_, k)| k)
            .collect();
        assert!(!kinds.contains(&BlockKind::Consolidation));
    }

    #[test]
    fn urgent_blocks_are_acked_at_the_flush_within_budget_then_ignored() {
        let (mut a, _) = started(0);
        let mut prev = initial(1).hash;
        let mut balance = 10;
        for round in 0..3u64 {
            let urgent = Block::new(
                CRYPTO,
                AgentId(1),
                vec![Pointer::spend(prev, AgentId(1))],
                vec![
                    Payment::urgent(AgentId(0), 1),
                    Payment::new(AgentId(1), balance - 1),
                ],
            )
            .unwrap();
            balance -= 1;
            prev = urgent.hash;
            let at_delivery = deliver(&mut a, 2 + round, 1, &urgent);
            assert!(
                at_delivery.issued.is_empty(),
                "acks wait for the end of the tick"
            );
            let out = flush(&mut a, 2 + round);
            let acks: Vec<_> = out
                .issued
                .iter()
                .filter(|(_, k)| *k == BlockKind::Ack)
                .collect();
            if round < 2 {
                // Within budget: one ack, empty, at most two pointers,
                // broadcast to everyone.
                assert_eq!(acks.len(), 1, "round {round}");
                let ack = &acks[0].0;
                assert!(ack.payments.is_empty());
                assert!(ack.pointers.len() <= 2);
                assert!(ack.pointers.iter().any(|p| p.target == urgent.hash));
                assert_eq!(
                    out.sends.iter().filter(|s| s.block.hash == ack.hash).count(),
                    3
                );
                assert!(out.notes.is_empty());
            } else {
                assert!(acks.is_empty(), "budget exceeded but acked");
                assert!(out
                    .notes
                    .contains(&Note::UrgentIgnored { from: AgentId(1) }));
            }
        }
    }

    #[test]
    fn urgent_intents_beyond_the_budget_are_demoted() {
        let (mut a, _) = started(0);
        for i in 0..3u64 {
            let out = intent(&mut a, i, 1, 1, true);
            let (block, _) = &out.issued[0];
            if i < 2 {
                assert!(block.is_urgent(), "intent {i}");
            } else {
                assert!(!block.is_urgent(), "intent {i} should be demoted");
                assert!(out.notes.contains(&Note::UrgentDemoted { to: AgentId(1) }));
            }
        }
        // A fresh window restores the budget.
        let out = intent(&mut a, 1_000, 1, 1, true);
        assert!(out.issued[0].0.is_urgent());
    }

    #[test]
    fn cordial_pass_relays_what_a_peer_demonstrably_lacks() {
        let (mut a, _) = started(0);
        // A payment from agent 2 that agent 1 never saw…
        let x = Block::new(
            CRYPTO,
            AgentId(2),
            vec![Pointer::spend(initial(2).hash, AgentId(2))],
            vec![Payment::new(AgentId(2), 10)],
        )
        .unwrap();
        deliver(&mut a, 1, 2, &x);
        // …as agent 1's own chain keeps growing without observing it.
        let p1 = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(initial(1).hash, AgentId(1))],
            vec![Payment::new(AgentId(3), 4), Payment::new(AgentId(1), 6)],
        )
        .unwrap();
        let p1b = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(p1.hash, AgentId(1))],
            vec![Payment::new(AgentId(3), 2), Payment::new(AgentId(1), 4)],
        )
        .unwrap();
        deliver(&mut a, 2, 1, &p1);
        deliver(&mut a, 3, 1, &p1b);

        // The first payment builds on x but the block before it (the
        // initial) vouched for nothing, so nothing is relayed yet.
        let out = intent(&mut a, 4, 3, 1, false);
        assert!(out.sends.iter().all(|s| !s.catchup));
        // By the second payment the previous own block vouches for x,
        // which predates agent 1's newest payment yet stays unobserved by
        // agent 1's blocks: demonstrably missing, so it is relayed.
        let out = intent(&mut a, 5, 3, 1, false);
        let to1: Vec<BlockHash> = out
            .sends
            .iter()
            .filter(|s| s.catchup && s.to == AgentId(1))
            .map(|s| s.block.hash)
            .collect();
        assert_eq!(to1, vec![x.hash]);
        // Agent 2 demonstrated nothing beyond x itself; agent 3 has never
        // spoken at all. Mere silence earns neither of them a relay.
        assert!(out
            .sends
            .iter()
            .all(|s| !s.catchup || s.to == AgentId(1)));
        // Nothing is ever relayed twice.
        let out = intent(&mut a, 6, 3, 1, false);
        assert!(out.sends.iter().all(|s| !s.catchup));
    }

    #[test]
    fn ack_interleaving_keeps_the_self_chain_intact() {
        // Agent 3 acks an urgent payment, then pays: the payment block must
        // observe the ack even though the ack carries no balance.
        let mut a = LowAgent::new(AgentId(3), lace_config(), LowConfig::default());
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        let urgent = Block::new(
            CRYPTO,
            AgentId(0),
            vec![Pointer::spend(initial(0).hash, AgentId(0))],
            vec![Payment::urgent(AgentId(3), 2), Payment::new(AgentId(0), 8)],
        )
        .unwrap();
        deliver(&mut a, 2, 0, &urgent);
        let out = flush(&mut a, 2);
        let ack = out
            .issued
            .iter()
            .find(|(_, k)| *k == BlockKind::Ack)
            .map(|(b, _)| b.clone())
            .unwrap();

        let out = intent(&mut a, 3, 0, 1, false);
        let (payment, _) = &out.issued[0];
        assert!(a.lace.observes(&payment.hash, &ack.hash).unwrap());
        assert!(!a.lace.is_equivocator(AgentId(3)));
    }

    #[test]
    fn chain_guard_replaces_an_observation_at_the_pointer_cap() {
        // Consolidation already carries two inputs; when both chosen roots
        // miss the agent's tip (an ack), the second root gives way to it.
        let mut a = LowAgent::new(AgentId(3), lace_config(), LowConfig::default());
        let mut out = Outbox::default();
        a.handle(0, Input::Start, &mut out);
        let g1 = initial(1);
        let g2 = initial(2);
        // Agent 0 pays agent 3 urgently; agent 3 acks (tip is now the ack).
        let payment = Block::new(
            CRYPTO,
            AgentId(0),
            vec![Pointer::spend(initial(0).hash, AgentId(0))],
            vec![Payment::urgent(AgentId(3), 5), Payment::new(AgentId(0), 5)],
        )
        .unwrap();
        deliver(&mut a, 2, 0, &payment);
        let out = flush(&mut a, 2);
        let ack = out
            .issued
            .iter()
            .find(|(_, k)| *k == BlockKind::Ack)
            .map(|(b, _)| b.clone())
            .unwrap();

        // Acks from agents 1 and 2 finalize the payment; each chains its
        // own initial, so neither observes agent 3's ack.
        for (agent, g) in [(1u32, &g1), (2u32, &g2)] {
            let peer_ack = Block::new(
                CRYPTO,
                AgentId(agent),
                vec![
                    Pointer::observe(payment.hash, AgentId(0)),
                    Pointer::observe(g.hash, AgentId(agent)),
                ],
                vec![],
            )
            .unwrap();
            deliver(&mut a, 3, agent, &peer_ack);
        }
        assert!(a.lace.is_final(&payment.hash).unwrap());
        flush(&mut a, 3);
        let consolidation = a
            .lace
            .receipt_order()
            .find(|b| b.creator == AgentId(3) && b.input_pointers().count() == 2)
            .cloned()
            .expect("no consolidation issued");
        assert_eq!(consolidation.pointers.len(), 4);
        assert!(a
            .lace
            .observes(&consolidation.hash, &ack.hash)
            .unwrap());
        assert!(!a.lace.is_equivocator(AgentId(3)));
        assert_eq!(consolidation.payments[0].amount, 15);
    }

    #[test]
    fn rejected_blocks_are_noted_not_adopted() {
        let (mut a, _) = started(0);
        let theft = Block::new(
            CRYPTO,
            AgentId(2),
            vec![Pointer::spend(initial(1).hash, AgentId(1))],
            vec![Payment::new(AgentId(2), 10)],
        )
        .unwrap();
        let out = deliver(&mut a, 2, 2, &theft);
        assert!(out
            .notes
            .iter()
            .any(|n| matches!(n, Note::Refused { block, .. } if *block == theft.hash)));
        assert!(!a.lace.contains(&theft.hash));
    }

    #[test]
    fn out_of_order_delivery_resolves_and_remembers_the_sender() {
        let (mut a, _) = started(0);
        let p1 = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(initial(1).hash, AgentId(1))],
            vec![Payment::new(AgentId(3), 4), Payment::new(AgentId(1), 6)],
        )
        .unwrap();
        let p1b = Block::new(
            CRYPTO,
            AgentId(1),
            vec![Pointer::spend(p1.hash, AgentId(1))],
            vec![Payment::new(AgentId(3), 2), Payment::new(AgentId(1), 4)],
        )
        .unwrap();
        // Child before parent: buffered, then both accepted on the parent.
        deliver(&mut a, 1, 1, &p1b);
        assert!(!a.lace.contains(&p1b.hash));
        deliver(&mut a, 2, 1, &p1);
        assert!(a.lace.contains(&p1b.hash));
        // The cordial pass never echoes those blocks back to agent 1.
        let outs = [
            intent(&mut a, 3, 2, 1, false),
            intent(&mut a, 4, 2, 1, false),
        ];
        let echoed = outs
            .iter()
            .flat_map(|o| o.sends.iter())
            .filter(|s| {
                s.to == AgentId(1) && (s.block.hash == p1.hash || s.block.hash == p1b.hash)
            })
            .count();
        assert_eq!(echoed, 0, "echoed blocks back to their sender");
    }
}
