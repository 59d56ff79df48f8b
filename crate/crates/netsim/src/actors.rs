//! The processes a run is made of: honest agents and scripted adversaries.
//!
//! Honest agents are the real protocol state machines from the agents
//! crate, boxed behind their common trait. Scripted adversaries do not run
//! the protocol at all — they hold exactly the blocks they fabricated and
//! follow their script, which is what makes behaviors like equivocation or
//! selective disclosure expressible without contorting the honest code.

use std::collections::BTreeSet;

use blocklace_core::{AgentId, Amount, Block, BlockHash, Crypto, LaceConfig, Payment, Pointer};
use blocklace_agents::{Agent, HighAgent, HighConfig, LowAgent, LowConfig};

use crate::scenario::{Behavior, Variant};

/// Build the honest state machine for one agent.
pub(crate) fn honest_agent(
    variant: Variant,
    id: u32,
    lace: LaceConfig,
    low: &LowConfig,
    high: &HighConfig,
) -> Box<dyn Agent + Send> {
    match variant {
        Variant::Low => Box::new(LowAgent::new(AgentId(id), lace, low.clone())),
        Variant::High => Box::new(HighAgent::new(AgentId(id), lace, high.clone())),
    }
}

/// When the simulator must poke a scripted adversary, besides deliveries.
pub(crate) fn wake_times(behavior: &Behavior) -> Vec<(u64, u32)> {
    match *behavior {
        Behavior::NaiveDoublespend { at } => vec![(at, 0), (at + 1, 1)],
        Behavior::EquivDoublespend { at, .. } => vec![(at, 0)],
        Behavior::UrgentSpam {
            start,
            period,
            count,
        } => (0..count).map(|k| (start + k as u64 * period, k)).collect(),
        Behavior::Silent | Behavior::Withholding { .. } | Behavior::Colluder { .. } => Vec::new(),
    }
}

/// A transmission requested by a scripted adversary. `extra_delay` is added
/// on top of the network's sampled delay — the adversary deciding to sit on
/// a block, not the network being slow.
pub(crate) struct ByzSend {
    pub to: u32,
    pub block: Block,
    pub extra_delay: u64,
}

#[derive(Default)]
pub(crate) struct ByzOut {
    /// Fabricated blocks, in creation order, for the run's evidence log.
    pub issued: Vec<Block>,
    pub sends: Vec<ByzSend>,
}

/// An adversary following a [`Behavior`] script.
pub(crate) struct Scripted {
    id: AgentId,
    crypto: Crypto,
    genesis: Amount,
    behavior: Behavior,
    /// Opening blocks are common knowledge (small-block variant): the own
    /// initial exists from the start and is never transmitted. When false
    /// (large-block variant), it is issued and broadcast at start instead.
    seeded: bool,
    /// Honest agents, ascending — victim selection and half-splits key off
    /// positions in this list.
    correct: Vec<u32>,
    /// Fellow scripted agents, who get forged blocks without delay games.
    byz_others: Vec<u32>,
    initial: Option<Block>,
    /// Last block in the adversary's own chain (urgent spam spends it).
    tip: Option<Block>,
    /// Fork sides already seconded, for the colluder.
    acked: BTreeSet<BlockHash>,
}

impl Scripted {
    pub(crate) fn new(
        id: u32,
        crypto: Crypto,
        genesis: Amount,
        behavior: Behavior,
        correct: &BTreeSet<u32>,
        byz: &BTreeSet<u32>,
        seeded: bool,
    ) -> Self {
        let initial = seeded.then(|| {
            Block::initial(crypto, AgentId(id), genesis).expect("initial block is well-formed")
        });
        Scripted {
            id: AgentId(id),
            crypto,
            genesis,
            behavior,
            seeded,
            correct: correct.iter().copied().collect(),
            byz_others: byz.iter().copied().filter(|&b| b != id).collect(),
            tip: initial.clone(),
            initial,
            acked: BTreeSet::new(),
        }
    }

    fn victim(&self, k: usize) -> AgentId {
        AgentId(self.correct[k % self.correct.len()])
    }

    fn broadcast(&self, out: &mut ByzOut, block: &Block) {
        for &to in self.correct.iter().chain(&self.byz_others) {
            out.sends.push(ByzSend {
                to,
                block: block.clone(),
                extra_delay: 0,
            });
        }
    }

    pub(crate) fn on_start(&mut self) -> ByzOut {
        let mut out = ByzOut::default();
        if self.seeded || matches!(self.behavior, Behavior::Silent) {
            return out;
        }
        let g = Block::initial(self.crypto, self.id, self.genesis)
            .expect("initial block is well-formed");
        self.broadcast(&mut out, &g);
        out.issued.push(g.clone());
        self.tip = Some(g.clone());
        self.initial = Some(g);
        out
    }

    pub(crate) fn on_wake(&mut self, step: u32) -> ByzOut {
        let mut out = ByzOut::default();
        let Some(initial) = self.initial.clone() else {
            return out;
        };
        match self.behavior.clone() {
            Behavior::NaiveDoublespend { .. } => {
                if step == 0 {
                    let a = self.pay_block(
                        vec![Pointer::spend(initial.hash, self.id)],
                        self.victim(0),
                    );
                    self.broadcast(&mut out, &a);
                    self.tip = Some(a.clone());
                    out.issued.push(a);
                } else if let Some(a) = self.tip.clone() {
                    // Spend the opening funds a second time while admitting
                    // the first spend: the fraud is visible in this block's
                    // own history, so every honest replica refuses it.
                    let b = self.pay_block(
                        vec![
                            Pointer::spend(initial.hash, self.id),
                            Pointer::observe(a.hash, self.id),
                        ],
                        self.victim(1),
                    );
                    self.broadcast(&mut out, &b);
                    out.issued.push(b);
                }
            }
            Behavior::EquivDoublespend { reveal_delay, .. } => {
                if step == 0 {
                    let a = self.pay_block(
                        vec![Pointer::spend(initial.hash, self.id)],
                        self.victim(0),
                    );
                    let b = self.pay_block(
                        vec![Pointer::spend(initial.hash, self.id)],
                        self.victim(1),
                    );
                    for (i, &to) in self.correct.iter().enumerate() {
                        let (own, other) = if i % 2 == 0 { (&a, &b) } else { (&b, &a) };
                        out.sends.push(ByzSend {
                            to,
                            block: own.clone(),
                            extra_delay: 0,
                        });
                        out.sends.push(ByzSend {
                            to,
                            block: other.clone(),
                            extra_delay: reveal_delay,
                        });
                    }
                    for &to in &self.byz_others {
                        for side in [&a, &b] {
                            out.sends.push(ByzSend {
                                to,
                                block: side.clone(),
                                extra_delay: 0,
                            });
                        }
                    }
                    out.issued.push(a);
                    out.issued.push(b);
                }
            }
            Behavior::UrgentSpam { .. } => {
                if let Some(tip) = self.tip.clone() {
                    let u = Block::new(
                        self.crypto,
                        self.id,
                        vec![Pointer::spend(tip.hash, self.id)],
                        vec![
                            Payment::urgent(self.victim(step as usize), 0),
                            Payment::new(self.id, self.genesis),
                        ],
                    )
                    .expect("spam block is well-formed");
                    self.broadcast(&mut out, &u);
                    self.tip = Some(u.clone());
                    out.issued.push(u);
                }
            }
            Behavior::Silent
            | Behavior::Withholding { .. }
            | Behavior::Colluder { .. } => {}
        }
        out
    }

    pub(crate) fn on_deliver(&mut self, block: &Block) -> ByzOut {
        let mut out = ByzOut::default();
        let Behavior::Colluder { partner } = self.behavior else {
            return out;
        };
        let Some(initial) = self.initial.clone() else {
            return out;
        };
        let is_fork_side = block.creator == AgentId(partner)
            && !block.is_initial()
            && block.input_pointers().next().is_some();
        if !is_fork_side || !self.acked.insert(block.hash) {
            return out;
        }
        // Second this side with an ack, shown only to the half of the
        // network that received the side first. The two acks share no
        // history beyond the opening block, so they are themselves an
        // equivocation — which is exactly what lets both fork sides gather
        // approvals.
        let ack = Block::new(
            self.crypto,
            self.id,
            vec![
                Pointer::observe(block.hash, block.creator),
                Pointer::observe(initial.hash, self.id),
            ],
            Vec::new(),
        )
        .expect("ack is well-formed");
        let side = if block.paid_to(self.victim(0)) > 0 { 0 } else { 1 };
        for (i, &to) in self.correct.iter().enumerate() {
            if i % 2 == side {
                out.sends.push(ByzSend {
                    to,
                    block: ack.clone(),
                    extra_delay: 0,
                });
            }
        }
        out.issued.push(ack);
        out
    }
}

impl Scripted {
    fn pay_block(&self, pointers: Vec<Pointer>, to: AgentId) -> Block {
        Block::new(
            self.crypto,
            self.id,
            pointers,
            vec![
                Payment::new(to, 1),
                Payment::new(self.id, self.genesis - 1),
            ],
        )
        .expect("scripted block is well-formed")
    }
}
