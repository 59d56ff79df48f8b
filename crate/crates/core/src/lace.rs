//! The blocklace: a growing DAG of accepted blocks with incremental indices.
//!
//! `accept` is the single mutation point. It verifies a candidate block,
//! buffers it while predecessors are missing, and on acceptance updates:
//!
//! * per-block reachability bitsets (`observes` over all pointers,
//!   `depends_on` over input pointers only),
//! * per-agent block lists, chain tips and observed-unions,
//! * the root set (blocks no accepted block points to),
//! * equivocation pairs and the sticky faulty-agent sets,
//! * input-spend indices, and
//! * approval masks with quorum finality flags.
//!
//! Approval of one block by another is decided once, at acceptance time, and
//! never changes afterwards: a block's closure is fixed, and any block
//! equivocating with something in that closure can only arrive later and
//! therefore outside it. That makes the caches append-only and finality
//! monotone, which the property tests lean on.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::bits::Bits;
use crate::block::Block;
use crate::crypto::{BlockHash, Crypto};
use crate::error::LaceError;
use crate::types::{AgentId, Amount, Utxo};

/// Static parameters of a blocklace.
#[derive(Clone, Debug)]
pub struct LaceConfig {
    /// Number of agents; ids are `0..n`.
    pub n: u32,
    /// Fault tolerance the quorum size is computed for.
    pub f: u32,
    pub crypto: Crypto,
    /// Opening balance required of each agent's initial block, indexed by id.
    pub genesis: Vec<Amount>,
    /// Maximum number of blocks buffered while predecessors are missing.
    pub pending_cap: usize,
}

impl LaceConfig {
    pub fn uniform(n: u32, f: u32, crypto: Crypto, amount: Amount) -> Self {
        LaceConfig {
            n,
            f,
            crypto,
            genesis: vec![amount; n as usize],
            pending_cap: 4096,
        }
    }

    pub fn validate(&self) -> Result<(), LaceError> {
        if self.n < 2 || self.n > 64 {
            return Err(LaceError::Config(format!(
                "agent count must be in 2..=64, got {}",
                self.n
            )));
        }
        if 3 * self.f >= self.n {
            return Err(LaceError::Config(format!(
                "fault bound requires 3f < n, got n={} f={}",
                self.n, self.f
            )));
        }
        if self.genesis.len() != self.n as usize {
            return Err(LaceError::Config(format!(
                "genesis table has {} entries for {} agents",
                self.genesis.len(),
                self.n
            )));
        }
        if self.pending_cap == 0 {
            return Err(LaceError::Config("pending capacity must be > 0".into()));
        }
        Ok(())
    }
}

/// Why a block was refused outright. Every reason is a fault attributable
/// to the block itself; order of arrival never causes rejection.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RejectReason {
    BadSignature,
    UnknownCreator,
    MalformedInitial,
    WrongGenesisAmount,
    DuplicatePointerTarget,
    InputWithoutPayment,
    Unbalanced,
    MissingOwnInitial,
    OwnEquivocationInClosure,
    OwnDoublespendInClosure,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = match self {
            RejectReason::BadSignature => "bad signature or hash",
            RejectReason::UnknownCreator => "creator id out of range",
            RejectReason::MalformedInitial => "malformed initial block",
            RejectReason::WrongGenesisAmount => "initial amount differs from genesis table",
            RejectReason::DuplicatePointerTarget => "duplicate pointer target",
            RejectReason::InputWithoutPayment => "input target holds no payment to creator",
            RejectReason::Unbalanced => "outputs do not equal consumed inputs",
            RejectReason::MissingOwnInitial => "closure lacks the creator's initial block",
            RejectReason::OwnEquivocationInClosure => "closure contains creator equivocation",
            RejectReason::OwnDoublespendInClosure => "closure contains creator doublespend",
        };
        f.write_str(text)
    }
}

/// What `accept` did with a block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AcceptStatus {
    /// Verified and added to the blocklace.
    Accepted,
    /// Buffered: some pointer targets have not been accepted yet.
    Pending,
    /// Already accepted (or already buffered) — a no-op.
    Duplicate,
    /// Refused for a verifiable fault in the block itself.
    Rejected(RejectReason),
    /// Dropped because the pending buffer is full.
    Overflow,
}

/// Result of one `accept` call, including knock-on effects: blocks that
/// left the pending buffer and blocks whose finality flag flipped.
#[derive(Clone, Debug)]
pub struct AcceptOutcome {
    pub status: AcceptStatus,
    /// Hashes accepted by this call, in acceptance order (the offered block
    /// first if it was accepted, then any unblocked pending blocks).
    pub accepted: Vec<BlockHash>,
    /// Blocks that reached quorum approval during this call, in receipt order.
    pub newly_final: Vec<BlockHash>,
}

impl AcceptOutcome {
    fn plain(status: AcceptStatus) -> Self {
        AcceptOutcome {
            status,
            accepted: Vec::new(),
            newly_final: Vec::new(),
        }
    }
}

/// Exact value-conservation accounting over the current blocklace.
///
/// Classifies every payment in every accepted block: a payment is *unspent*
/// while no block of its recipient uses the containing block as input.
/// Because each non-initial block's outputs equal what its inputs pay its
/// creator, the total of unspent payments telescopes back to the accepted
/// genesis value — except that each extra spender of an already-spent
/// payment duplicates that value, which `overspend_excess` captures. The
/// invariant checked by the simulator's verdicts is
/// `unspent_total == genesis_present + overspend_excess`, exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConservationSummary {
    /// Opening value of all accepted initial blocks.
    pub genesis_present: Amount,
    /// All unspent payments, final or not.
    pub unspent_total: Amount,
    /// Unspent payments in final blocks: the sum of all balances.
    pub final_unspent: Amount,
    /// Unspent payments in non-final blocks: value still in flight.
    pub latent: Amount,
    /// Value duplicated by multiply-spent payments (doublespend forks).
    pub overspend_excess: Amount,
}

struct Entry {
    block: Block,
    /// Closure bitset over receipt indices, including this block.
    reach: Bits,
    /// Input-pointer closure bitset, including this block.
    input_reach: Bits,
    /// 1 for initial blocks, else 1 + max over pointer targets.
    height: u32,
    /// Bitmask of agents with a block approving this one.
    approvers: u64,
    is_final: bool,
    /// Receipt indices of same-creator blocks equivocating with this one.
    eq_partners: Vec<usize>,
}

/// Indexed, append-only DAG of accepted blocks. See the module docs.
pub struct Blocklace {
    config: LaceConfig,
    smaj: u32,
    entries: Vec<Entry>,
    by_hash: HashMap<BlockHash, usize>,
    /// Buffered blocks keyed by hash, each registered under exactly one
    /// missing predecessor in `waiting`.
    pending: HashMap<BlockHash, Block>,
    waiting: HashMap<BlockHash, Vec<BlockHash>>,
    pending_overflow: u64,
    /// Per-agent receipt indices, ascending.
    agent_blocks: Vec<Vec<usize>>,
    /// Per-agent maximal blocks (no later block of the agent observes them).
    agent_tips: Vec<Vec<usize>>,
    /// Per-agent union of the closures of the agent's blocks.
    agent_observed: Vec<Bits>,
    initial_of: Vec<Option<usize>>,
    roots: BTreeSet<usize>,
    equivocators: BTreeSet<AgentId>,
    doublespenders: BTreeSet<AgentId>,
    /// For each receipt index, the blocks using it as input.
    spenders: Vec<Vec<usize>>,
    eq_pairs: Vec<(usize, usize)>,
}

impl Blocklace {
    pub fn new(config: LaceConfig) -> Result<Self, LaceError> {
        config.validate()?;
        let n = config.n as usize;
        let smaj = crate::supermajority_size(config.n, config.f);
        Ok(Blocklace {
            config,
            smaj,
            entries: Vec::new(),
            by_hash: HashMap::new(),
            pending: HashMap::new(),
            waiting: HashMap::new(),
            pending_overflow: 0,
            agent_blocks: vec![Vec::new(); n],
            agent_tips: vec![Vec::new(); n],
            agent_observed: vec![Bits::new(); n],
            initial_of: vec![None; n],
            roots: BTreeSet::new(),
            equivocators: BTreeSet::new(),
            doublespenders: BTreeSet::new(),
            spenders: Vec::new(),
            eq_pairs: Vec::new(),
        })
    }

    pub fn config(&self) -> &LaceConfig {
        &self.config
    }

    pub fn crypto(&self) -> Crypto {
        self.config.crypto
    }

    pub fn agent_count(&self) -> u32 {
        self.config.n
    }

    pub fn quorum_size(&self) -> u32 {
        self.smaj
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn pending_overflow(&self) -> u64 {
        self.pending_overflow
    }

    // ------------------------------------------------------------------
    // Acceptance
    // ------------------------------------------------------------------

    /// Offer a block. Never panics on untrusted input; see [`AcceptStatus`].
    pub fn accept(&mut self, block: Block) -> AcceptOutcome {
        let mut outcome = match self.admit(block) {
            Ok(first) => first,
            Err(status) => return AcceptOutcome::plain(status),
        };
        // Unblock pending blocks whose last missing predecessor arrived.
        let mut work: VecDeque<BlockHash> = outcome.accepted.iter().copied().collect();
        while let Some(done) = work.pop_front() {
            let Some(dependents) = self.waiting.remove(&done) else {
                continue;
            };
            for dep in dependents {
                let Some(candidate) = self.pending.remove(&dep) else {
                    continue; // already resolved through another path
                };
                if let Some(missing) = self.first_missing(&candidate) {
                    // Still blocked: park it under the next missing target.
                    self.waiting.entry(missing).or_default().push(dep);
                    self.pending.insert(dep, candidate);
                    continue;
                }
                match self.accept_ready(candidate) {
                    Ok(newly_final) => {
                        outcome.accepted.push(dep);
                        outcome.newly_final.extend(newly_final);
                        work.push_back(dep);
                    }
                    Err(_reason) => {
                        // A buffered block can still turn out faulty once its
                        // closure is visible; it is dropped silently here and
                        // surfaced through the normal reject path only when
                        // offered directly.
                    }
                }
            }
        }
        outcome
    }

    fn admit(&mut self, block: Block) -> Result<AcceptOutcome, AcceptStatus> {
        if self.by_hash.contains_key(&block.hash) || self.pending.contains_key(&block.hash) {
            return Err(AcceptStatus::Duplicate);
        }
        if block.creator.0 >= self.config.n {
            return Err(AcceptStatus::Rejected(RejectReason::UnknownCreator));
        }
        if !block.verify(self.config.crypto) {
            return Err(AcceptStatus::Rejected(RejectReason::BadSignature));
        }
        if block
            .pointers
            .windows(2)
            .any(|w| w[0].target == w[1].target)
        {
            return Err(AcceptStatus::Rejected(RejectReason::DuplicatePointerTarget));
        }
        if block.is_initial() {
            let expected = self.config.genesis[block.creator.index()];
            if block.payments.len() != 1
                || block.payments[0].recipient != block.creator
                || block.payments[0].urgent
            {
                return Err(AcceptStatus::Rejected(RejectReason::MalformedInitial));
            }
            if block.payments[0].amount != expected {
                return Err(AcceptStatus::Rejected(RejectReason::WrongGenesisAmount));
            }
        }
        if let Some(missing) = self.first_missing(&block) {
            if self.pending.len() >= self.config.pending_cap {
                self.pending_overflow += 1;
                return Err(AcceptStatus::Overflow);
            }
            self.waiting.entry(missing).or_default().push(block.hash);
            self.pending.insert(block.hash, block);
            return Err(AcceptStatus::Pending);
        }
        let hash = block.hash;
        match self.accept_ready(block) {
            Ok(newly_final) => Ok(AcceptOutcome {
                status: AcceptStatus::Accepted,
                accepted: vec![hash],
                newly_final,
            }),
            Err(reason) => Err(AcceptStatus::Rejected(reason)),
        }
    }

    fn first_missing(&self, block: &Block) -> Option<BlockHash> {
        block
            .pointers
            .iter()
            .map(|p| p.target)
            .find(|t| !self.by_hash.contains_key(t))
    }

    /// Validate and insert a block whose predecessors are all accepted.
    fn accept_ready(&mut self, block: Block) -> Result<Vec<BlockHash>, RejectReason> {
        let creator = block.creator;
        let c = creator.index();

        // Closure bitsets of the candidate, before it has an index.
        let mut reach = Bits::with_capacity(self.entries.len() + 1);
        let mut input_reach = Bits::new();
        let mut target_idxs = Vec::with_capacity(block.pointers.len());
        for p in &block.pointers {
            let t = self.by_hash[&p.target];
            target_idxs.push((t, p.input));
            reach.union_with(&self.entries[t].reach);
            reach.set(t);
            if p.input {
                input_reach.union_with(&self.entries[t].input_reach);
                input_reach.set(t);
            }
        }

        // Every input must actually pay the creator something.
        for &(t, input) in &target_idxs {
            if input && !self.entries[t].block.payments.iter().any(|p| p.recipient == creator) {
                return Err(RejectReason::InputWithoutPayment);
            }
        }

        // Outputs must equal the value the inputs address to the creator.
        if !block.is_initial() {
            let consumed: Amount = target_idxs
                .iter()
                .filter(|&&(_, input)| input)
                .map(|&(t, _)| self.entries[t].block.paid_to(creator))
                .sum();
            if block.outputs_total() != consumed {
                return Err(RejectReason::Unbalanced);
            }
            match self.initial_of[c] {
                Some(init) if reach.get(init) => {}
                _ => return Err(RejectReason::MissingOwnInitial),
            }
        }

        // The creator's blocks inside the closure must form a chain: any
        // incomparable same-creator pair in view is the creator's own
        // equivocation and makes the block incorrect.
        {
            let mut prev: Option<usize> = None;
            for &own in &self.agent_blocks[c] {
                if !reach.get(own) {
                    continue;
                }
                if let Some(p) = prev {
                    if !self.entries[own].reach.get(p) {
                        return Err(RejectReason::OwnEquivocationInClosure);
                    }
                }
                prev = Some(own);
            }
        }

        // A visible same-creator block spending one of our inputs is the
        // creator doublespending in plain sight.
        for &(t, input) in &target_idxs {
            if !input {
                continue;
            }
            if self.spenders[t]
                .iter()
                .any(|&s| self.entries[s].block.creator == creator && reach.get(s))
            {
                return Err(RejectReason::OwnDoublespendInClosure);
            }
        }

        // --- Validation passed: insert. ---
        let idx = self.entries.len();
        reach.set(idx);
        input_reach.set(idx);
        let height = if block.is_initial() {
            1
        } else {
            1 + target_idxs
                .iter()
                .map(|&(t, _)| self.entries[t].height)
                .max()
                .unwrap_or(0)
        };

        // Equivocations against previously accepted same-creator blocks:
        // every prior block of the creator not in the new closure is a fork.
        let mut partners = Vec::new();
        for &own in &self.agent_blocks[c] {
            if !reach.get(own) {
                partners.push(own);
                self.entries[own].eq_partners.push(idx);
                self.eq_pairs.push((own, idx));
                self.equivocators.insert(creator);
            }
        }

        // Record input spends; a same-creator co-spender marks a doublespend.
        for &(t, input) in &target_idxs {
            if !input {
                continue;
            }
            if self.spenders[t]
                .iter()
                .any(|&s| self.entries[s].block.creator == creator)
            {
                self.doublespenders.insert(creator);
            }
            self.spenders[t].push(idx);
        }

        // Roots: pointer targets stop being maximal, the new block starts.
        for &(t, _) in &target_idxs {
            self.roots.remove(&t);
        }
        self.roots.insert(idx);

        // Tips: the new block supersedes every own tip it observes.
        self.agent_tips[c].retain(|&tip| !reach.get(tip));
        self.agent_tips[c].push(idx);

        self.agent_observed[c].union_with(&reach);
        if block.is_initial() {
            self.initial_of[c] = Some(idx);
        }
        self.agent_blocks[c].push(idx);
        self.by_hash.insert(block.hash, idx);

        // Approvals: the new block approves every closure member it sees no
        // equivocation partner of. These verdicts are final on arrival.
        let mut newly_final = Vec::new();
        let creator_bit = 1u64 << c;
        for j in reach.iter_ones() {
            if j == idx {
                continue;
            }
            let approved = self.entries[j]
                .eq_partners
                .iter()
                .all(|&p| !reach.get(p));
            if approved {
                let e = &mut self.entries[j];
                e.approvers |= creator_bit;
                if !e.is_final && e.approvers.count_ones() >= self.smaj {
                    e.is_final = true;
                    newly_final.push(e.block.hash);
                }
            }
        }

        let mut entry = Entry {
            block,
            reach,
            input_reach,
            height,
            approvers: creator_bit, // a block approves itself
            is_final: false,
            eq_partners: partners,
        };
        if entry.approvers.count_ones() >= self.smaj {
            entry.is_final = true;
            newly_final.push(entry.block.hash);
        }
        self.entries.push(entry);
        self.spenders.push(Vec::new());
        Ok(newly_final)
    }

    // ------------------------------------------------------------------
    // Lookup
    // ------------------------------------------------------------------

    pub fn contains(&self, hash: &BlockHash) -> bool {
        self.by_hash.contains_key(hash)
    }

    pub fn get(&self, hash: &BlockHash) -> Option<&Block> {
        self.by_hash.get(hash).map(|&i| &self.entries[i].block)
    }

    pub fn index_of(&self, hash: &BlockHash) -> Option<usize> {
        self.by_hash.get(hash).copied()
    }

    pub fn hash_at(&self, idx: usize) -> BlockHash {
        self.entries[idx].block.hash
    }

    pub fn block_at(&self, idx: usize) -> &Block {
        &self.entries[idx].block
    }

    pub fn creator_at(&self, idx: usize) -> AgentId {
        self.entries[idx].block.creator
    }

    pub fn height_at(&self, idx: usize) -> u32 {
        self.entries[idx].height
    }

    /// Accepted blocks in receipt order.
    pub fn receipt_order(&self) -> impl Iterator<Item = &Block> {
        self.entries.iter().map(|e| &e.block)
    }

    fn idx(&self, hash: &BlockHash) -> Result<usize, LaceError> {
        self.by_hash
            .get(hash)
            .copied()
            .ok_or(LaceError::UnknownBlock(*hash))
    }

    // ------------------------------------------------------------------
    // Reachability and fault predicates
    // ------------------------------------------------------------------

    /// Reflexive reachability over all pointers.
    pub fn observes(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Ok(self.observes_idx(ia, ib))
    }

    pub fn observes_idx(&self, a: usize, b: usize) -> bool {
        self.entries[a].reach.get(b)
    }

    /// Reflexive reachability over input pointers only.
    pub fn depends_on(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Ok(self.entries[ia].input_reach.get(ib))
    }

    /// All blocks the given block observes, in receipt order.
    pub fn closure(&self, hash: &BlockHash) -> Result<Vec<BlockHash>, LaceError> {
        let i = self.idx(hash)?;
        Ok(self.entries[i]
            .reach
            .iter_ones()
            .map(|j| self.entries[j].block.hash)
            .collect())
    }

    /// Blocks the given block depends on, plus same-creator blocks it
    /// observes, in receipt order. This is the set whose correctness the
    /// block's own correctness recursively requires.
    pub fn input_closure(&self, hash: &BlockHash) -> Result<Vec<BlockHash>, LaceError> {
        let i = self.idx(hash)?;
        let e = &self.entries[i];
        let creator = e.block.creator;
        let mut set: BTreeSet<usize> = e.input_reach.iter_ones().collect();
        for j in e.reach.iter_ones() {
            if self.entries[j].block.creator == creator {
                set.insert(j);
            }
        }
        Ok(set.into_iter().map(|j| self.entries[j].block.hash).collect())
    }

    /// Two same-creator blocks neither of which observes the other.
    pub fn equivocation(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Ok(self.equivocation_idx(ia, ib))
    }

    fn equivocation_idx(&self, ia: usize, ib: usize) -> bool {
        ia != ib
            && self.entries[ia].block.creator == self.entries[ib].block.creator
            && !self.entries[ia].reach.get(ib)
            && !self.entries[ib].reach.get(ia)
    }

    /// Two blocks by different creators neither of which observes the other.
    /// Harmless concurrency, in contrast to an equivocation.
    pub fn collision(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Ok(self.entries[ia].block.creator != self.entries[ib].block.creator
            && !self.entries[ia].reach.get(ib)
            && !self.entries[ib].reach.get(ia))
    }

    /// Two same-creator blocks sharing an input target.
    pub fn doublespend(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        if ia == ib || self.entries[ia].block.creator != self.entries[ib].block.creator {
            return Ok(false);
        }
        let ta: BTreeSet<BlockHash> = self.entries[ia]
            .block
            .input_pointers()
            .map(|p| p.target)
            .collect();
        Ok(self.entries[ib]
            .block
            .input_pointers()
            .any(|p| ta.contains(&p.target)))
    }

    /// The blocklace holds an equivocation by `agent`. Sticky: later blocks
    /// merging the fork do not clear the evidence.
    pub fn is_equivocator(&self, agent: AgentId) -> bool {
        self.equivocators.contains(&agent)
    }

    /// The blocklace holds two blocks by `agent` spending the same target.
    pub fn is_doublespender(&self, agent: AgentId) -> bool {
        self.doublespenders.contains(&agent)
    }

    /// Agents with equivocation or doublespend evidence in this blocklace.
    pub fn known_faulty(&self) -> BTreeSet<AgentId> {
        let mut out = self.equivocators.clone();
        out.extend(self.doublespenders.iter().copied());
        out
    }

    /// All equivocation pairs discovered so far, as hashes, in discovery
    /// order. Each unordered pair appears once.
    pub fn equivocation_pairs(&self) -> Vec<(BlockHash, BlockHash)> {
        self.eq_pairs
            .iter()
            .map(|&(a, b)| (self.entries[a].block.hash, self.entries[b].block.hash))
            .collect()
    }

    // ------------------------------------------------------------------
    // Approval and finality
    // ------------------------------------------------------------------

    /// `a` observes `b` and observes no block equivocating with `b`.
    pub fn approves(&self, a: &BlockHash, b: &BlockHash) -> Result<bool, LaceError> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        if !self.entries[ia].reach.get(ib) {
            return Ok(false);
        }
        Ok(self.entries[ib]
            .eq_partners
            .iter()
            .all(|&p| !self.entries[ia].reach.get(p)))
    }

    /// Some block by `agent` approves `b`. Monotone in blocklace growth.
    pub fn agent_approves(&self, agent: AgentId, b: &BlockHash) -> Result<bool, LaceError> {
        let i = self.idx(b)?;
        Ok(self.entries[i].approvers & (1u64 << agent.index()) != 0)
    }

    pub fn approver_count(&self, b: &BlockHash) -> Result<u32, LaceError> {
        let i = self.idx(b)?;
        Ok(self.entries[i].approvers.count_ones())
    }

    /// A quorum of agents approves the block.
    pub fn is_final(&self, b: &BlockHash) -> Result<bool, LaceError> {
        let i = self.idx(b)?;
        Ok(self.entries[i].is_final)
    }

    pub fn is_final_idx(&self, idx: usize) -> bool {
        self.entries[idx].is_final
    }

    pub fn final_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_final).count()
    }

    // ------------------------------------------------------------------
    // Money
    // ------------------------------------------------------------------

    /// True if some block by `spender` uses the given block as input.
    pub fn is_spent_by(&self, block: &BlockHash, spender: AgentId) -> Result<bool, LaceError> {
        let i = self.idx(block)?;
        Ok(self.spenders[i]
            .iter()
            .any(|&s| self.entries[s].block.creator == spender))
    }

    /// Unspent payments to `agent` in final blocks, in (receipt, position)
    /// order. A spend is any `agent` block using the paying block as input,
    /// final or not.
    pub fn utxos(&self, agent: AgentId) -> Vec<Utxo> {
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if !e.is_final {
                continue;
            }
            if self.spenders[i]
                .iter()
                .any(|&s| self.entries[s].block.creator == agent)
            {
                continue;
            }
            for (pos, pay) in e.block.payments.iter().enumerate() {
                if pay.recipient == agent {
                    out.push(Utxo {
                        block: e.block.hash,
                        index: pos,
                        recipient: agent,
                        amount: pay.amount,
                    });
                }
            }
        }
        out
    }

    pub fn balance(&self, agent: AgentId) -> Amount {
        self.utxos(agent).iter().map(|u| u.amount).sum()
    }

    pub fn balances(&self) -> BTreeMap<AgentId, Amount> {
        (0..self.config.n)
            .map(|a| (AgentId(a), self.balance(AgentId(a))))
            .collect()
    }

    /// See [`ConservationSummary`].
    pub fn conservation_summary(&self) -> ConservationSummary {
        let mut s = ConservationSummary {
            genesis_present: 0,
            unspent_total: 0,
            final_unspent: 0,
            latent: 0,
            overspend_excess: 0,
        };
        for (i, e) in self.entries.iter().enumerate() {
            if e.block.is_initial() {
                s.genesis_present += e.block.payments[0].amount;
            }
            // Group spenders per recipient once per block.
            for pay in &e.block.payments {
                let spend_count = self.spenders[i]
                    .iter()
                    .filter(|&&sp| self.entries[sp].block.creator == pay.recipient)
                    .count() as Amount;
                if spend_count == 0 {
                    s.unspent_total += pay.amount;
                    if e.is_final {
                        s.final_unspent += pay.amount;
                    } else {
                        s.latent += pay.amount;
                    }
                } else {
                    s.overspend_excess += (spend_count - 1) * pay.amount;
                }
            }
        }
        s
    }

    // ------------------------------------------------------------------
    // Structure queries used by the protocol layers
    // ------------------------------------------------------------------

    /// Blocks no accepted block points to, in receipt order.
    pub fn roots(&self) -> Vec<BlockHash> {
        self.roots
            .iter()
            .map(|&i| self.entries[i].block.hash)
            .collect()
    }

    pub fn root_indices(&self) -> Vec<usize> {
        self.roots.iter().copied().collect()
    }

    /// The agent's latest maximal block: the most recently accepted block of
    /// theirs that none of their other blocks observes. For an equivocator
    /// several maximal blocks exist; the latest accepted one is returned and
    /// [`Blocklace::is_equivocator`] flags the ambiguity.
    pub fn last_block(&self, agent: AgentId) -> Option<&Block> {
        self.agent_tips
            .get(agent.index())?
            .iter()
            .max()
            .map(|&i| &self.entries[i].block)
    }

    /// All maximal blocks of the agent, ascending by receipt.
    pub fn tips(&self, agent: AgentId) -> Vec<BlockHash> {
        self.agent_tips
            .get(agent.index())
            .map(|tips| {
                let mut sorted = tips.clone();
                sorted.sort_unstable();
                sorted.iter().map(|&i| self.entries[i].block.hash).collect()
            })
            .unwrap_or_default()
    }

    pub fn blocks_of(&self, agent: AgentId) -> Vec<BlockHash> {
        self.agent_blocks
            .get(agent.index())
            .map(|v| v.iter().map(|&i| self.entries[i].block.hash).collect())
            .unwrap_or_default()
    }

    pub fn initial_of(&self, agent: AgentId) -> Option<BlockHash> {
        self.initial_of
            .get(agent.index())
            .and_then(|&i| i.map(|i| self.entries[i].block.hash))
    }

    /// 1 for initial blocks, else 1 + the maximum height the block observes.
    pub fn height(&self, hash: &BlockHash) -> Result<u32, LaceError> {
        Ok(self.entries[self.idx(hash)?].height)
    }

    pub fn max_height(&self) -> u32 {
        self.entries.iter().map(|e| e.height).max().unwrap_or(0)
    }

    /// True if some block of `agent` observes the block at `idx`.
    pub fn agent_observed_contains(&self, agent: AgentId, idx: usize) -> bool {
        self.agent_observed[agent.index()].get(idx)
    }

    /// First receipt index at or after `start` that no block of `agent`
    /// observes. Monotone in `start`, so callers can keep a cursor.
    pub fn first_unobserved_by(&self, agent: AgentId, start: usize) -> Option<usize> {
        (start..self.entries.len()).find(|&i| !self.agent_observed[agent.index()].get(i))
    }
}
