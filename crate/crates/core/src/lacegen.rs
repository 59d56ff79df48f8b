//! Deterministic generation of random *valid* blocklaces for tests.
//!
//! The generator drives a real [`Blocklace`] and asserts every block it
//! fabricates is accepted, so the output is valid by construction: payments
//! balance, chains include the creator's initial block, and the only
//! misbehaviour is the deliberate forks requested through
//! [`GenConfig::fork_permille`]. Fork sides after the first are abandoned —
//! no later block of the forking agent may observe them — which keeps the
//! forker's continuing chain acceptable while leaving the equivocation (and
//! optional doublespend) evidence in the lace.
//!
//! Everything is keyed off a single seed, so a failing case reproduces from
//! its seed alone.

use std::collections::BTreeSet;

use crate::block::Block;
use crate::crypto::Crypto;
use crate::lace::{AcceptStatus, Blocklace, LaceConfig};
use crate::types::{AgentId, Amount, Payment, Pointer};

/// Tiny deterministic RNG (splitmix64). Good enough statistical quality for
/// test-case generation, trivially seedable, no state beyond one word.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Multiply-shift rejection-free mapping; bias is negligible for the
        // small bounds used in tests.
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// True with probability `permille`/1000.
    pub fn chance(&mut self, permille: u32) -> bool {
        self.below(1000) < permille as u64
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            items.get(self.below(items.len() as u64) as usize)
        }
    }
}

/// Shape parameters for generated laces.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub n: u32,
    pub f: u32,
    pub crypto: Crypto,
    /// Opening balance for every agent.
    pub genesis: Amount,
    /// Blocks to generate after the initial blocks.
    pub blocks: usize,
    /// Probability (per mille) that a step issues a payment rather than an
    /// observation-only block.
    pub pay_permille: u32,
    /// Probability (per mille) that a step forks its agent's chain.
    pub fork_permille: u32,
    /// Of forks, probability (per mille) that both sides spend the same
    /// input, i.e. a doublespend rather than a bare equivocation.
    pub doublespend_permille: u32,
    pub max_pointers: usize,
}

impl GenConfig {
    pub fn honest(n: u32, f: u32, blocks: usize) -> Self {
        GenConfig {
            n,
            f,
            crypto: Crypto::Sha256,
            genesis: 100,
            blocks,
            pay_permille: 500,
            fork_permille: 0,
            doublespend_permille: 0,
            max_pointers: 4,
        }
    }

    pub fn adversarial(n: u32, f: u32, blocks: usize) -> Self {
        GenConfig {
            fork_permille: 100,
            doublespend_permille: 500,
            ..Self::honest(n, f, blocks)
        }
    }
}

/// A generated lace: the blocks in acceptance order plus the lace itself.
pub struct GeneratedLace {
    pub blocks: Vec<Block>,
    pub lace: Blocklace,
    pub config: LaceConfig,
}

struct AgentState {
    /// Receipt index of the latest own block (designated chain head).
    tip: usize,
    /// Receipt index of the own block currently carrying the balance.
    balance_block: usize,
    balance: Amount,
    /// Abandoned fork sides: no later own block may observe these.
    forbidden: Vec<usize>,
    /// Other-creator blocks paying this agent, not yet spent: (idx, amount).
    received: Vec<(usize, Amount)>,
}

/// Generate a valid blocklace from a seed. Panics only on internal
/// inconsistency (a generated block failing acceptance), which is a bug in
/// the generator, not an input condition.
pub fn generate(seed: u64, cfg: &GenConfig) -> GeneratedLace {
    let mut rng = SplitMix64::new(seed);
    let lace_config = LaceConfig::uniform(cfg.n, cfg.f, cfg.crypto, cfg.genesis);
    let mut lace = Blocklace::new(lace_config.clone()).expect("generator config invalid");
    let mut out = Vec::new();
    let mut agents: Vec<AgentState> = Vec::new();

    let push = |lace: &mut Blocklace, out: &mut Vec<Block>, block: Block| -> usize {
        let hash = block.hash;
        let status = lace.accept(block.clone()).status;
        assert_eq!(
            status,
            AcceptStatus::Accepted,
            "generator produced an unacceptable block: {status:?}"
        );
        out.push(block);
        lace.index_of(&hash).unwrap()
    };

    for a in 0..cfg.n {
        let g = Block::initial(cfg.crypto, AgentId(a), cfg.genesis).unwrap();
        let idx = push(&mut lace, &mut out, g);
        agents.push(AgentState {
            tip: idx,
            balance_block: idx,
            balance: cfg.genesis,
            forbidden: Vec::new(),
            received: Vec::new(),
        });
    }

    // A pointer target is usable for agent q only if its closure avoids all
    // of q's abandoned fork sides; otherwise q's own chain check trips.
    let allowed = |lace: &Blocklace, st: &AgentState, t: usize| -> bool {
        st.forbidden.iter().all(|&f| !lace.observes_idx(t, f))
    };

    for _ in 0..cfg.blocks {
        let q = rng.below(cfg.n as u64) as u32;
        let creator = AgentId(q);

        if cfg.fork_permille > 0 && rng.chance(cfg.fork_permille) {
            // Fork: two blocks from the same state, neither observing the
            // other. Optionally both spend the balance block (doublespend).
            let doublespend = rng.chance(cfg.doublespend_permille);
            let st = &agents[q as usize];
            let base_ptrs = |lace: &Blocklace, spend: bool| {
                let mut ptrs = vec![if spend {
                    Pointer::spend(lace.hash_at(st.balance_block), creator)
                } else {
                    Pointer::observe(lace.hash_at(st.balance_block), creator)
                }];
                if st.tip != st.balance_block {
                    ptrs.push(Pointer::observe(lace.hash_at(st.tip), creator));
                }
                ptrs
            };
            let recipient = AgentId((q + 1 + rng.below(cfg.n as u64 - 1) as u32) % cfg.n);
            let amount = rng.below(st.balance + 1);
            let side_a = Block::new(
                cfg.crypto,
                creator,
                base_ptrs(&lace, true),
                vec![
                    Payment::new(recipient, amount),
                    Payment::new(creator, st.balance - amount),
                ],
            )
            .unwrap();
            let side_b = if doublespend {
                let recipient_b = AgentId((q + 1 + rng.below(cfg.n as u64 - 1) as u32) % cfg.n);
                Block::new(
                    cfg.crypto,
                    creator,
                    base_ptrs(&lace, true),
                    vec![
                        Payment::new(recipient_b, amount),
                        Payment::new(creator, st.balance - amount),
                    ],
                )
                .unwrap()
            } else {
                Block::new(cfg.crypto, creator, base_ptrs(&lace, false), vec![]).unwrap()
            };
            if side_a.hash == side_b.hash {
                continue; // identical twins are one block, not a fork
            }
            let ia = push(&mut lace, &mut out, side_a);
            let ib = push(&mut lace, &mut out, side_b);
            record_receipts(&lace, ia, &mut agents);
            record_receipts(&lace, ib, &mut agents);
            let st = &mut agents[q as usize];
            st.tip = ia;
            st.balance_block = ia;
            st.balance -= amount;
            st.forbidden.push(ib);
            continue;
        }

        let st = &agents[q as usize];
        let mut pointers = Vec::new();
        let mut targets: BTreeSet<usize> = BTreeSet::new();
        let mut payments = Vec::new();
        let mut new_balance = st.balance;
        let mut spent_received: Option<usize> = None;

        if rng.chance(cfg.pay_permille) {
            // Payment: spend the balance block, maybe one received payment.
            pointers.push(Pointer::spend(lace.hash_at(st.balance_block), creator));
            targets.insert(st.balance_block);
            let mut consumed = st.balance;
            let spendable: Vec<(usize, Amount)> = st
                .received
                .iter()
                .copied()
                .filter(|&(i, _)| allowed(&lace, st, i))
                .collect();
            if !spendable.is_empty() && rng.chance(400) {
                let &(ri, ramount) = rng.pick(&spendable).unwrap();
                pointers.push(Pointer::spend(lace.hash_at(ri), lace.creator_at(ri)));
                targets.insert(ri);
                consumed += ramount;
                spent_received = Some(ri);
            }
            let recipient = AgentId((q + 1 + rng.below(cfg.n as u64 - 1) as u32) % cfg.n);
            let amount = rng.below(consumed + 1);
            let mut pay = Payment::new(recipient, amount);
            pay.urgent = rng.chance(125);
            payments.push(pay);
            payments.push(Payment::new(creator, consumed - amount));
            new_balance = consumed - amount;
        } else {
            // Observation-only block; still chains on the agent's tip.
            pointers.push(Pointer::observe(lace.hash_at(st.tip), creator));
            targets.insert(st.tip);
        }
        if st.tip != st.balance_block && !targets.contains(&st.tip) {
            pointers.push(Pointer::observe(lace.hash_at(st.tip), creator));
            targets.insert(st.tip);
        }

        // Random extra observations up to the pointer budget.
        let extras = rng.below(cfg.max_pointers as u64) as usize;
        for _ in 0..extras {
            if pointers.len() >= cfg.max_pointers || lace.len() == 0 {
                break;
            }
            let t = rng.below(lace.len() as u64) as usize;
            if targets.contains(&t) || !allowed(&lace, st, t) {
                continue;
            }
            pointers.push(Pointer::observe(lace.hash_at(t), lace.creator_at(t)));
            targets.insert(t);
        }

        let block = Block::new(cfg.crypto, creator, pointers, payments).unwrap();
        let idx = push(&mut lace, &mut out, block);
        record_receipts(&lace, idx, &mut agents);
        let st = &mut agents[q as usize];
        st.tip = idx;
        if new_balance != st.balance || spent_received.is_some() || st.balance_block != st.tip {
            // A payment moves the balance onto the new block.
            if lace.block_at(idx).input_pointers().next().is_some() {
                st.balance_block = idx;
                st.balance = new_balance;
            }
        }
        if let Some(ri) = spent_received {
            st.received.retain(|&(i, _)| i != ri);
        }
    }

    GeneratedLace {
        blocks: out,
        lace,
        config: lace_config,
    }
}

/// Register the payments of a freshly accepted block as spendable receipts
/// for their recipients (the creator's own change stays on its chain).
fn record_receipts(lace: &Blocklace, idx: usize, agents: &mut [AgentState]) {
    let block = lace.block_at(idx);
    let creator = block.creator;
    let mut recipients: BTreeSet<AgentId> = BTreeSet::new();
    for p in &block.payments {
        if p.recipient != creator {
            recipients.insert(p.recipient);
        }
    }
    for r in recipients {
        let amount = block.paid_to(r);
        agents[r.index()].received.push((idx, amount));
    }
}
