//! The deterministic discrete-event simulator.
//!
//! One run is a single-threaded event loop over a priority queue keyed by
//! (tick, phase, insertion sequence): within a tick deliveries come first,
//! then intents and timers, then per-agent flushes — so every agent reacts
//! to a tick's traffic with the complete inbox in hand — and remaining
//! ties break by insertion order. Every send schedules exactly one
//! delivery, and all randomness flows from one seeded generator consumed
//! in event order, so a (scenario, seed) pair fully determines the run,
//! trace line for trace line.
//!
//! Alongside the agents the simulator keeps an omniscient evidence lace
//! fed with every issued block. Agents never read it; verdicts do, to find
//! conflicting sibling blocks even when the adversary showed each side to
//! a different victim.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use blocklace_core::lacegen::SplitMix64;
use blocklace_core::{
    encoded_len, AgentId, Amount, Block, BlockHash, Blocklace, ENVELOPE_BYTES,
};
use blocklace_agents::{Agent, BlockKind, Input, Note, Outbox};
use blocklace_metrics::{Counters, IssueLog, LatencyStats, Report, TraceEvent};
use serde::Serialize;

use crate::actors::{honest_agent, wake_times, ByzOut, Scripted};
use crate::scenario::{Behavior, Scenario, ScenarioError, Variant};
use crate::verdict::{ConflictReport, Verdict};

/// Everything a single event carries. Blocks ride inside deliveries.
#[derive(Clone, Debug)]
enum EvKind {
    Start,
    Intent { to: u32, amount: Amount, urgent: bool },
    Deliver { from: u32, block: Block },
    Timer { token: u64 },
    Wake { step: u32 },
    Flush,
}

#[derive(Clone, Debug)]
struct Ev {
    time: u64,
    seq: u64,
    agent: u32,
    kind: EvKind,
}

impl Ev {
    /// Intra-tick phase: starts, then deliveries, then local stimuli, then
    /// the end-of-tick flushes.
    fn phase(&self) -> u8 {
        match self.kind {
            EvKind::Start => 0,
            EvKind::Deliver { .. } => 1,
            EvKind::Intent { .. } | EvKind::Timer { .. } | EvKind::Wake { .. } => 2,
            EvKind::Flush => 3,
        }
    }
}

impl PartialEq for Ev {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.phase(), self.seq) == (other.time, other.phase(), other.seq)
    }
}
impl Eq for Ev {}
impl PartialOrd for Ev {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ev {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.phase(), self.seq).cmp(&(other.time, other.phase(), other.seq))
    }
}

/// One participant's process.
enum Slot {
    Honest(Box<dyn Agent + Send>),
    /// Honest logic, hostile network interface: sends to `targets` vanish.
    Withholding {
        inner: Box<dyn Agent + Send>,
        targets: BTreeSet<u32>,
    },
    Byz(Scripted),
}

fn slot_lace(slot: &Slot) -> Option<&Blocklace> {
    match slot {
        Slot::Honest(agent) => Some(agent.lace()),
        Slot::Withholding { inner, .. } => Some(inner.lace()),
        Slot::Byz(_) => None,
    }
}

/// Per-block lifecycle record for blocks issued by honest agents.
struct Tracked {
    issue_idx: usize,
    issue_t: u64,
    kind: BlockKind,
    creator: u32,
    /// Positive payments to other agents in the block.
    pays: u32,
    /// Bit per honest agent that holds the block final.
    final_mask: u64,
    first_final: Option<u64>,
    final_all: Option<u64>,
}

/// Public per-block summary included in the run result.
#[derive(Clone, Debug, Serialize)]
pub struct BlockStat {
    pub block: String,
    pub creator: u32,
    pub kind: String,
    pub issue_t: u64,
    pub first_final_t: Option<u64>,
    pub final_all_t: Option<u64>,
    pub pays: u32,
    /// Finality latency in protocol rounds, for paying blocks that
    /// finalized.
    pub latency_rounds: Option<u32>,
}

/// The complete outcome of one run.
#[derive(Debug, Serialize)]
pub struct RunResult {
    pub scenario: String,
    pub variant: Variant,
    pub n: u32,
    pub f: u32,
    pub seed: u64,
    pub verdict: Verdict,
    pub report: Report,
    pub counters: Counters,
    /// Tick of the last processed event.
    pub ticks: u64,
    /// Events processed.
    pub events: u64,
    /// Blocks accepted into the evidence lace, scripted agents included.
    pub blocks_observed: usize,
    /// Each agent's balance in its own view; None for scripted agents,
    /// which keep no ledger.
    pub balances: Vec<Option<Amount>>,
    pub note_counts: BTreeMap<String, u64>,
    pub conflicts: Vec<ConflictReport>,
    pub block_stats: Vec<BlockStat>,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

impl RunResult {
    /// Process exit code the CLI maps this run to.
    pub fn exit_code(&self) -> i32 {
        if self.verdict.exit_ok() {
            0
        } else {
            1
        }
    }
}

/// Run a scenario without collecting a trace.
pub fn run(scenario: &Scenario) -> Result<RunResult, ScenarioError> {
    run_traced(scenario, false)
}

/// Run a scenario, optionally recording the full event trace.
pub fn run_traced(scenario: &Scenario, trace: bool) -> Result<RunResult, ScenarioError> {
    scenario.validate()?;
    Ok(Sim::new(scenario, trace).run())
}

struct Sim {
    scenario: Scenario,
    slots: Vec<Slot>,
    correct: BTreeSet<u32>,
    correct_mask: u64,
    observer: Blocklace,
    rng: SplitMix64,
    heap: BinaryHeap<Reverse<Ev>>,
    seq: u64,
    now: u64,
    events: u64,
    counters: Counters,
    issue_log: IssueLog,
    tracked: BTreeMap<BlockHash, Tracked>,
    last_final: Vec<usize>,
    note_counts: BTreeMap<String, u64>,
    /// (tick, agent) pairs with an end-of-tick flush already queued.
    flushed: BTreeSet<(u64, u32)>,
    trace_on: bool,
    trace: Vec<TraceEvent>,
    nonquiescent: bool,
}

impl Sim {
    fn new(scenario: &Scenario, trace_on: bool) -> Sim {
        let lace_cfg = scenario.lace_config();
        let correct = scenario.correct_ids();
        let byz_ids: BTreeSet<u32> = scenario.byzantine.iter().map(|b| b.agent).collect();
        let behavior_of: BTreeMap<u32, &Behavior> = scenario
            .byzantine
            .iter()
            .map(|b| (b.agent, &b.behavior))
            .collect();
        let slots: Vec<Slot> = (0..scenario.n)
            .map(|id| match behavior_of.get(&id) {
                None => Slot::Honest(honest_agent(
                    scenario.variant,
                    id,
                    lace_cfg.clone(),
                    &scenario.low,
                    &scenario.high,
                )),
                Some(Behavior::Withholding { targets }) => Slot::Withholding {
                    inner: honest_agent(
                        scenario.variant,
                        id,
                        lace_cfg.clone(),
                        &scenario.low,
                        &scenario.high,
                    ),
                    targets: targets.iter().copied().collect(),
                },
                Some(behavior) => Slot::Byz(Scripted::new(
                    id,
                    scenario.crypto,
                    scenario.genesis,
                    (*behavior).clone(),
                    &correct,
                    &byz_ids,
                    scenario.variant == Variant::Low,
                )),
            })
            .collect();
        let correct_mask = correct.iter().fold(0u64, |m, &id| m | (1 << id));
        let mut sim = Sim {
            slots,
            correct: correct.clone(),
            correct_mask,
            observer: Blocklace::new(lace_cfg).expect("validated config"),
            rng: SplitMix64::new(scenario.seed),
            heap: BinaryHeap::new(),
            seq: 0,
            now: 0,
            events: 0,
            counters: Counters::default(),
            issue_log: IssueLog::new(correct.iter().map(|&id| AgentId(id)).collect()),
            tracked: BTreeMap::new(),
            last_final: vec![0; scenario.n as usize],
            note_counts: BTreeMap::new(),
            flushed: BTreeSet::new(),
            trace_on,
            trace: Vec::new(),
            nonquiescent: false,
            scenario: scenario.clone(),
        };
        if scenario.variant == Variant::Low {
            // The opening ledger is common knowledge in this variant: the
            // evidence lace adopts every initial block, mirroring what each
            // agent does at start. Nothing is issued or transmitted.
            for id in 0..scenario.n {
                let g = Block::initial(scenario.crypto, AgentId(id), scenario.genesis)
                    .expect("initial block");
                sim.observer.accept(g);
            }
        }
        sim.seed_events();
        sim
    }

    fn push(&mut self, time: u64, agent: u32, kind: EvKind) {
        let seq = self.seq;
        self.seq += 1;
        self.heap.push(Reverse(Ev {
            time,
            seq,
            agent,
            kind,
        }));
    }

    /// Queue the end-of-tick flush for an honest agent, once per (tick,
    /// agent). Scripted adversaries react inline and never flush.
    fn ensure_flush(&mut self, time: u64, agent: u32) {
        if matches!(self.slots[agent as usize], Slot::Byz(_)) {
            return;
        }
        if self.flushed.insert((time, agent)) {
            self.push(time, agent, EvKind::Flush);
        }
    }

    fn seed_events(&mut self) {
        for id in 0..self.scenario.n {
            self.push(0, id, EvKind::Start);
        }
        // Intents and scripted wake-ups, merged in time order so the seed
        // queue is insensitive to how the scenario file is organized.
        let mut planned: Vec<(u64, u32, u32, EvKind)> = Vec::new();
        for intent in self.scenario.schedule() {
            if matches!(self.slots[intent.from as usize], Slot::Byz(_)) {
                continue;
            }
            planned.push((
                intent.at,
                intent.from,
                0,
                EvKind::Intent {
                    to: intent.to,
                    amount: intent.amount,
                    urgent: intent.urgent,
                },
            ));
        }
        for spec in &self.scenario.byzantine {
            for (at, step) in wake_times(&spec.behavior) {
                planned.push((at, spec.agent, step, EvKind::Wake { step }));
            }
        }
        planned.sort_by_key(|&(at, agent, step, _)| (at, agent, step));
        for (at, agent, _, kind) in planned {
            self.push(at, agent, kind);
        }
    }

    fn run(mut self) -> RunResult {
        while let Some(Reverse(ev)) = self.heap.pop() {
            if self.events >= self.scenario.max_events {
                self.nonquiescent = true;
                break;
            }
            self.events += 1;
            self.now = ev.time;
            self.dispatch(ev);
        }
        self.finish()
    }

    fn dispatch(&mut self, ev: Ev) {
        let agent = ev.agent;
        if let EvKind::Deliver { .. } = ev.kind {
            self.counters.deliveries += 1;
            if self.trace_on {
                if let EvKind::Deliver { from, ref block } = ev.kind {
                    self.trace.push(TraceEvent::Deliver {
                        t: self.now,
                        from: AgentId(from),
                        to: AgentId(agent),
                        block: block.hash,
                    });
                }
            }
        }
        match &mut self.slots[agent as usize] {
            Slot::Byz(_) => {
                let out = {
                    let Slot::Byz(scripted) = &mut self.slots[agent as usize] else {
                        unreachable!()
                    };
                    match ev.kind {
                        EvKind::Start => scripted.on_start(),
                        EvKind::Wake { step } => scripted.on_wake(step),
                        EvKind::Deliver { ref block, .. } => scripted.on_deliver(block),
                        EvKind::Intent { .. } | EvKind::Timer { .. } | EvKind::Flush => {
                            ByzOut::default()
                        }
                    }
                };
                self.process_byz(agent, out);
            }
            _ => {
                match ev.kind {
                    EvKind::Deliver { .. } | EvKind::Intent { .. } | EvKind::Timer { .. } => {
                        self.ensure_flush(ev.time, agent);
                    }
                    EvKind::Flush => {
                        // Forget the marker so a zero-delay arrival later
                        // this tick can queue a fresh flush behind itself.
                        self.flushed.remove(&(ev.time, agent));
                    }
                    _ => {}
                }
                let input = match ev.kind {
                    EvKind::Start => Input::Start,
                    EvKind::Intent { to, amount, urgent } => Input::Intent {
                        to: AgentId(to),
                        amount,
                        urgent,
                    },
                    EvKind::Deliver { from, block } => Input::Block {
                        from: AgentId(from),
                        block,
                    },
                    EvKind::Timer { token } => Input::Timer { token },
                    EvKind::Wake { .. } => return,
                    EvKind::Flush => Input::Flush,
                };
                let mut out = Outbox::default();
                let withhold = match &mut self.slots[agent as usize] {
                    Slot::Honest(inner) => {
                        inner.handle(self.now, input, &mut out);
                        None
                    }
                    Slot::Withholding { inner, targets } => {
                        inner.handle(self.now, input, &mut out);
                        Some(targets.clone())
                    }
                    Slot::Byz(_) => unreachable!(),
                };
                self.process_outbox(agent, out, withhold);
                self.scan_finality(agent);
            }
        }
    }

    fn process_outbox(&mut self, agent: u32, out: Outbox, withhold: Option<BTreeSet<u32>>) {
        let is_correct = self.correct.contains(&agent);
        for (block, kind) in out.issued {
            self.record_issue(agent, &block, kind_label(kind), is_correct, Some(kind));
        }
        for send in out.sends {
            if let Some(targets) = &withhold {
                if targets.contains(&send.to.0) {
                    continue;
                }
            }
            if is_correct {
                self.counters.sends += 1;
                self.counters.bytes += (encoded_len(&send.block) + ENVELOPE_BYTES) as u64;
                if send.catchup {
                    self.counters.catchup_sends += 1;
                }
            }
            self.schedule_delivery(agent, send.to.0, send.block, 0, send.catchup);
        }
        for (at, token) in out.timers {
            self.push(at.max(self.now), agent, EvKind::Timer { token });
        }
        for note in out.notes {
            self.record_note(agent, note);
        }
    }

    fn process_byz(&mut self, agent: u32, out: ByzOut) {
        for block in out.issued {
            let label = byz_kind_label(&block);
            self.record_issue(agent, &block, label, false, None);
        }
        for send in out.sends {
            self.schedule_delivery(agent, send.to, send.block, send.extra_delay, false);
        }
    }

    fn record_issue(
        &mut self,
        agent: u32,
        block: &Block,
        label: &'static str,
        is_correct: bool,
        kind: Option<BlockKind>,
    ) {
        let outcome = self.observer.accept(block.clone());
        debug_assert!(
            !is_correct || outcome.accepted.contains(&block.hash),
            "evidence lace refused an honest block: {:?}",
            outcome.status
        );
        let pays = block
            .payments
            .iter()
            .filter(|p| p.amount > 0 && p.recipient != block.creator)
            .count() as u32;
        if self.trace_on {
            self.trace.push(TraceEvent::Issue {
                t: self.now,
                agent: AgentId(agent),
                block: block.hash,
                kind: label.to_string(),
                height: self.observer.height(&block.hash).unwrap_or(0),
                bytes: encoded_len(block),
                pays,
            });
        }
        if is_correct {
            self.counters.blocks += 1;
            if kind == Some(BlockKind::Ack) {
                self.counters.acks += 1;
            }
            if pays > 0 {
                self.counters.payment_blocks += 1;
                self.counters.payments += pays as u64;
            }
            let issue_idx = self.issue_log.push(self.now, AgentId(agent));
            self.tracked.insert(
                block.hash,
                Tracked {
                    issue_idx,
                    issue_t: self.now,
                    kind: kind.unwrap_or(BlockKind::Payment),
                    creator: agent,
                    pays,
                    final_mask: 0,
                    first_final: None,
                    final_all: None,
                },
            );
        }
    }

    fn schedule_delivery(&mut self, from: u32, to: u32, block: Block, extra: u64, catchup: bool) {
        let delay = self.scenario.delay.sample(&mut self.rng) + extra;
        if self.trace_on {
            self.trace.push(TraceEvent::Send {
                t: self.now,
                from: AgentId(from),
                to: AgentId(to),
                block: block.hash,
                catchup,
            });
        }
        self.push(self.now + delay, to, EvKind::Deliver { from, block });
    }

    fn record_note(&mut self, agent: u32, note: Note) {
        let (key, text) = match &note {
            Note::Refused { block, why } => ("refused", format!("refused {}: {why}", block.short())),
            Note::UrgentDemoted { to } => ("urgent_demoted", format!("urgent to {to} demoted")),
            Note::UrgentIgnored { from } => {
                ("urgent_ignored", format!("urgent from {from} not acked"))
            }
        };
        *self.note_counts.entry(key.to_string()).or_insert(0) += 1;
        if self.trace_on {
            self.trace.push(TraceEvent::Note {
                t: self.now,
                agent: AgentId(agent),
                text,
            });
        }
    }

    /// Re-check tracked blocks against one honest agent's lace after it
    /// changed. Finality is monotone, so each (block, agent) bit is set at
    /// most once.
    fn scan_finality(&mut self, agent: u32) {
        if !self.correct.contains(&agent) {
            return;
        }
        let Some(lace) = slot_lace(&self.slots[agent as usize]) else {
            return;
        };
        let fc = lace.final_count();
        if fc == self.last_final[agent as usize] {
            return;
        }
        self.last_final[agent as usize] = fc;
        let bit = 1u64 << agent;
        for (hash, entry) in self.tracked.iter_mut() {
            if entry.final_mask & bit != 0 {
                continue;
            }
            if !lace.is_final(hash).unwrap_or(false) {
                continue;
            }
            entry.final_mask |= bit;
            if entry.first_final.is_none() {
                entry.first_final = Some(self.now);
            }
            if entry.final_mask == self.correct_mask {
                entry.final_all = Some(self.now);
            }
            if self.trace_on {
                self.trace.push(TraceEvent::Final {
                    t: self.now,
                    agent: AgentId(agent),
                    block: *hash,
                });
            }
        }
    }

    fn finish(self) -> RunResult {
        let Sim {
            scenario,
            slots,
            correct,
            observer,
            counters,
            issue_log,
            tracked,
            note_counts,
            trace,
            nonquiescent,
            now,
            events,
            heap,
            ..
        } = self;

        let mut latency = LatencyStats::default();
        let payments_finalized: u64 = tracked
            .values()
            .filter(|t| t.pays > 0 && t.first_final.is_some())
            .map(|t| t.pays as u64)
            .sum();
        let mut block_stats: Vec<BlockStat> = tracked
            .iter()
            .map(|(hash, t)| {
                let latency_rounds = match (t.pays > 0, t.first_final) {
                    (true, Some(final_t)) => {
                        let rounds = issue_log.latency(t.issue_idx, final_t);
                        latency.record(rounds as u64);
                        Some(rounds)
                    }
                    _ => None,
                };
                BlockStat {
                    block: hash.to_string(),
                    creator: t.creator,
                    kind: kind_label(t.kind).to_string(),
                    issue_t: t.issue_t,
                    first_final_t: t.first_final,
                    final_all_t: t.final_all,
                    pays: t.pays,
                    latency_rounds,
                }
            })
            .collect();
        block_stats.sort_by(|a, b| {
            (a.issue_t, a.creator, &a.block).cmp(&(b.issue_t, b.creator, &b.block))
        });

        let conflicts = conflict_reports(&observer, &slots, &correct);
        let verdict = decide(
            &scenario,
            &slots,
            &correct,
            &observer,
            &tracked,
            &conflicts,
            nonquiescent,
            heap.len(),
        );
        let balances: Vec<Option<Amount>> = slots
            .iter()
            .enumerate()
            .map(|(id, slot)| slot_lace(slot).map(|lace| lace.balance(AgentId(id as u32))))
            .collect();
        let report = Report::new(&counters, payments_finalized, latency.summary());
        RunResult {
            scenario: scenario.name.clone(),
            variant: scenario.variant,
            n: scenario.n,
            f: scenario.f,
            seed: scenario.seed,
            verdict,
            report,
            counters,
            ticks: now,
            events,
            blocks_observed: observer.len(),
            balances,
            note_counts,
            conflicts,
            block_stats,
            trace,
        }
    }
}

fn kind_label(kind: BlockKind) -> &'static str {
    match kind {
        BlockKind::Initial => "initial",
        BlockKind::Payment => "payment",
        BlockKind::Consolidation => "consolidation",
        BlockKind::Ack => "ack",
        BlockKind::Large => "large",
    }
}

fn byz_kind_label(block: &Block) -> &'static str {
    if block.is_initial() {
        "initial"
    } else if block.is_ack() {
        "ack"
    } else {
        "payment"
    }
}

/// Sibling-block conflicts in the evidence lace, annotated with where each
/// side finalized.
fn conflict_reports(
    observer: &Blocklace,
    slots: &[Slot],
    correct: &BTreeSet<u32>,
) -> Vec<ConflictReport> {
    let final_at = |hash: &BlockHash| -> Vec<u32> {
        correct
            .iter()
            .copied()
            .filter(|&id| {
                slot_lace(&slots[id as usize])
                    .map(|lace| lace.is_final(hash).unwrap_or(false))
                    .unwrap_or(false)
            })
            .collect()
    };
    observer
        .equivocation_pairs()
        .into_iter()
        .map(|(a, b)| {
            let shared_input = observer.doublespend(&a, &b).unwrap_or(false);
            ConflictReport {
                kind: if shared_input {
                    "equivocating_doublespend".to_string()
                } else {
                    "equivocation".to_string()
                },
                creator: observer.get(&a).map(|blk| blk.creator.0).unwrap_or(0),
                a: a.to_string(),
                b: b.to_string(),
                a_final_at: final_at(&a),
                b_final_at: final_at(&b),
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn decide(
    scenario: &Scenario,
    slots: &[Slot],
    correct: &BTreeSet<u32>,
    observer: &Blocklace,
    tracked: &BTreeMap<BlockHash, Tracked>,
    conflicts: &[ConflictReport],
    nonquiescent: bool,
    queued: usize,
) -> Verdict {
    // Ledger arithmetic must balance in every view, evidence lace
    // included, regardless of what the scenario assumes.
    let mut views: Vec<(String, &Blocklace)> = vec![("evidence".to_string(), observer)];
    for &id in correct {
        if let Some(lace) = slot_lace(&slots[id as usize]) {
            views.push((format!("agent {id}"), lace));
        }
    }
    for (who, lace) in views {
        let s = lace.conservation_summary();
        let total_ok = s.unspent_total == s.genesis_present + s.overspend_excess;
        let split_ok = s.unspent_total == s.final_unspent + s.latent;
        if !total_ok || !split_ok {
            return Verdict::ConservationViolation {
                detail: format!(
                    "{who}: unspent={} genesis={} excess={} final={} latent={}",
                    s.unspent_total, s.genesis_present, s.overspend_excess, s.final_unspent, s.latent
                ),
            };
        }
    }

    let breach = conflicts.iter().find(|c| c.both_final());
    match (breach, scenario.assume_violation) {
        (Some(c), true) => {
            return Verdict::AssumptionViolated {
                detail: format!(
                    "{} by agent {}: {} final at {:?}, {} final at {:?}",
                    c.kind,
                    c.creator,
                    &c.a[..12.min(c.a.len())],
                    c.a_final_at,
                    &c.b[..12.min(c.b.len())],
                    c.b_final_at
                ),
            }
        }
        (Some(c), false) => {
            return Verdict::SafetyViolation {
                detail: format!(
                    "{} by agent {}: both sides final ({:?} / {:?})",
                    c.kind, c.creator, c.a_final_at, c.b_final_at
                ),
            }
        }
        (None, true) => return Verdict::ExpectedViolationMissing,
        (None, false) => {}
    }

    if nonquiescent {
        return Verdict::Nonquiescent {
            detail: format!("event budget exhausted with {queued} events queued"),
        };
    }

    if scenario.expects_liveness() {
        let stragglers: Vec<String> = tracked
            .iter()
            .filter(|(_, t)| t.pays > 0 && t.final_all.is_none())
            .map(|(hash, t)| format!("{} by {}", hash.short(), t.creator))
            .collect();
        if !stragglers.is_empty() {
            return Verdict::LivenessViolation {
                detail: format!(
                    "{} paying blocks not final everywhere: {}",
                    stragglers.len(),
                    stragglers.join(", ")
                ),
            };
        }
        for &id in correct {
            let backlog = match &slots[id as usize] {
                Slot::Honest(agent) => agent.backlog(),
                Slot::Withholding { inner, .. } => inner.backlog(),
                Slot::Byz(_) => 0,
            };
            if backlog > 0 {
                return Verdict::LivenessViolation {
                    detail: format!("agent {id} still holds {backlog} queued items"),
                };
            }
        }
    }

    Verdict::Clean
}
