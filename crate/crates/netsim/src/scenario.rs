//! Declarative run descriptions: topology, faults, delays, and workload.
//!
//! A [`Scenario`] is the single input to a simulation run. It is plain data
//! — loadable from TOML, serializable back — and everything in it has a
//! deterministic effect: the same scenario with the same seed produces the
//! same run, byte for byte.

use std::collections::BTreeSet;
use std::path::Path;

use blocklace_core::{Amount, Crypto, LaceConfig};
use blocklace_agents::{HighConfig, LowConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delay::DelayModel;

/// Which agent implementation the honest agents run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Eager constant-size blocks, immediate dissemination.
    Low,
    /// Batched linear-size round blocks behind a grace timer.
    High,
}

/// A single user payment request handed to an agent at a fixed tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intent {
    pub at: u64,
    pub from: u32,
    pub to: u32,
    pub amount: Amount,
    #[serde(default)]
    pub urgent: bool,
}

/// Generated payment traffic plus optional hand-written intents.
///
/// Generated traffic: every issuing agent (honest agents, plus byzantine
/// ones whose behavior wraps an honest agent) submits `payments` intents,
/// the `j`-th agent starting at `start + j·stagger` and then one every
/// `gap` ticks, paying honest peers round-robin. After the last intent,
/// `drain_waves` rounds of zero-amount payments are scheduled `drain_gap`
/// apart so that earlier blocks gather enough approvals to finalize
/// everywhere before the run quiesces.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Workload {
    /// Generated payments per issuing agent.
    pub payments: u32,
    /// Amount per generated payment.
    pub amount: Amount,
    /// Tick of the first generated intent.
    pub start: u64,
    /// Ticks between consecutive intents of one agent.
    pub gap: u64,
    /// Offset between agents' schedules.
    pub stagger: u64,
    /// Mark generated payments urgent.
    pub urgent: bool,
    /// Zero-amount payment rounds appended after the main traffic.
    pub drain_waves: u32,
    /// Ticks between drain waves.
    pub drain_gap: u64,
    /// Extra hand-written intents, merged into the schedule.
    pub intents: Vec<Intent>,
}

impl Default for Workload {
    fn default() -> Self {
        Workload {
            payments: 0,
            amount: 1,
            start: 10,
            gap: 40,
            stagger: 2,
            urgent: false,
            drain_waves: 0,
            drain_gap: 60,
            intents: Vec::new(),
        }
    }
}

/// Scripted misbehavior for one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Behavior {
    /// Issues nothing at all, not even an opening block.
    Silent,
    /// Runs an honest agent but drops every send addressed to `targets`.
    Withholding { targets: Vec<u32> },
    /// Spends the opening funds, then spends them again in a block that
    /// admits the first spend — a fork every honest replica rejects on
    /// sight.
    NaiveDoublespend { at: u64 },
    /// Issues two sibling blocks spending the same funds to different
    /// recipients. Each honest agent receives one side immediately and the
    /// other side `reveal_delay` ticks later; fellow byzantine agents get
    /// both at once.
    EquivDoublespend {
        at: u64,
        #[serde(default)]
        reveal_delay: u64,
    },
    /// Seconds a partner's fork with a pair of equivocating
    /// acknowledgments, showing each half of the network only the ack for
    /// the side it already holds.
    Colluder { partner: u32 },
    /// Floods the network with chained urgent payments to exhaust
    /// receiver-side ack budgets.
    UrgentSpam { start: u64, period: u64, count: u32 },
}

/// Assigns a [`Behavior`] to one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByzSpec {
    pub agent: u32,
    #[serde(flatten)]
    pub behavior: Behavior,
}

/// Everything a run needs: who participates, how they are connected, what
/// traffic they carry, and who misbehaves.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    /// Number of agents.
    pub n: u32,
    /// Fault tolerance the protocol is configured for (3f < n).
    pub f: u32,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_crypto")]
    pub crypto: Crypto,
    /// Opening balance granted to every agent.
    #[serde(default = "default_genesis")]
    pub genesis: Amount,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Event budget; exceeding it fails the run as non-quiescent.
    #[serde(default = "default_max_events")]
    pub max_events: u64,
    /// Declares that the run violates a protocol assumption on purpose
    /// (e.g. more faults than f) and a safety violation is the expected
    /// outcome rather than a failure.
    #[serde(default)]
    pub assume_violation: bool,
    #[serde(default)]
    pub delay: DelayModel,
    #[serde(default)]
    pub workload: Workload,
    #[serde(default)]
    pub byzantine: Vec<ByzSpec>,
    #[serde(default)]
    pub low: LowConfig,
    #[serde(default)]
    pub high: HighConfig,
}

fn default_name() -> String {
    "unnamed".into()
}
fn default_variant() -> Variant {
    Variant::Low
}
fn default_crypto() -> Crypto {
    Crypto::Sha256
}
fn default_genesis() -> Amount {
    1000
}
fn default_seed() -> u64 {
    1
}
fn default_max_events() -> u64 {
    2_000_000
}

/// Why a scenario cannot run.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
}

impl Scenario {
    /// Parse a scenario from TOML text and validate it.
    pub fn from_toml(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Load and validate a scenario file.
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        Scenario::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Serialize back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    /// Check structural soundness; every runnable scenario passes this.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Invalid(msg));
        if !(2..=64).contains(&self.n) {
            return fail(format!("n must be in 2..=64, got {}", self.n));
        }
        if 3 * self.f >= self.n {
            return fail(format!("need 3f < n, got n={} f={}", self.n, self.f));
        }
        if self.genesis == 0 {
            return fail("genesis amount must be positive".into());
        }
        if self.max_events < 1000 {
            return fail("max_events must be at least 1000".into());
        }
        self.delay.validate().map_err(ScenarioError::Invalid)?;
        let mut seen = BTreeSet::new();
        for spec in &self.byzantine {
            if spec.agent >= self.n {
                return fail(format!("byzantine agent {} out of range", spec.agent));
            }
            if !seen.insert(spec.agent) {
                return fail(format!("agent {} assigned two behaviors", spec.agent));
            }
            match &spec.behavior {
                Behavior::Withholding { targets } => {
                    if targets.is_empty() {
                        return fail("withholding needs at least one target".into());
                    }
                    let distinct: BTreeSet<_> = targets.iter().copied().collect();
                    if distinct.len() != targets.len() {
                        return fail("withholding targets repeat".into());
                    }
                    for &t in targets {
                        if t >= self.n || t == spec.agent {
                            return fail(format!("withholding target {t} invalid"));
                        }
                    }
                    if distinct.len() as u32 >= self.n - 1 {
                        return fail("withholding from everyone is just silence".into());
                    }
                }
                Behavior::Colluder { partner } => {
                    let ok = self.byzantine.iter().any(|other| {
                        other.agent == *partner
                            && matches!(other.behavior, Behavior::EquivDoublespend { .. })
                    });
                    if !ok {
                        return fail(format!(
                            "colluder {} needs partner {partner} running an equivocating doublespend",
                            spec.agent
                        ));
                    }
                }
                Behavior::UrgentSpam { period, count, .. } => {
                    if *period == 0 || *count == 0 {
                        return fail("urgent spam needs period and count >= 1".into());
                    }
                }
                Behavior::Silent
                | Behavior::NaiveDoublespend { .. }
                | Behavior::EquivDoublespend { .. } => {}
            }
        }
        if seen.len() as u32 > self.f && !self.assume_violation {
            return fail(format!(
                "{} byzantine agents exceed f={}; set assume_violation to run anyway",
                seen.len(),
                self.f
            ));
        }
        if self.correct_ids().is_empty() {
            return fail("no honest agents left".into());
        }
        for intent in &self.workload.intents {
            if intent.from >= self.n || intent.to >= self.n {
                return fail(format!(
                    "intent references agent out of range: {} -> {}",
                    intent.from, intent.to
                ));
            }
            if intent.from == intent.to {
                return fail(format!("intent from agent {} to itself", intent.from));
            }
        }
        if self.workload.payments > 0 && self.workload.gap == 0 {
            return fail("generated payments need gap >= 1".into());
        }
        if self.workload.drain_waves > 0 && self.workload.drain_gap == 0 {
            return fail("drain waves need drain_gap >= 1".into());
        }
        Ok(())
    }

    /// Ledger parameters shared by every replica in this scenario.
    pub fn lace_config(&self) -> LaceConfig {
        LaceConfig::uniform(self.n, self.f, self.crypto, self.genesis)
    }

    /// Agents with no scripted behavior.
    pub fn correct_ids(&self) -> BTreeSet<u32> {
        let byz: BTreeSet<u32> = self.byzantine.iter().map(|b| b.agent).collect();
        (0..self.n).filter(|id| !byz.contains(id)).collect()
    }

    /// Agents that take payment intents: the honest ones plus withholding
    /// agents, which run an honest core behind a lossy network interface.
    pub fn issuing_ids(&self) -> BTreeSet<u32> {
        let mut ids = self.correct_ids();
        for spec in &self.byzantine {
            if matches!(spec.behavior, Behavior::Withholding { .. }) {
                ids.insert(spec.agent);
            }
        }
        ids
    }

    /// The full intent schedule: generated traffic, drain waves, and
    /// hand-written intents, sorted by (tick, sender).
    pub fn schedule(&self) -> Vec<Intent> {
        let w = &self.workload;
        let correct: Vec<u32> = self.correct_ids().into_iter().collect();
        let mut out: Vec<Intent> = w.intents.clone();
        for (j, &from) in self.issuing_ids().iter().enumerate() {
            let others: Vec<u32> = correct.iter().copied().filter(|&c| c != from).collect();
            if others.is_empty() {
                continue;
            }
            for k in 0..w.payments {
                out.push(Intent {
                    at: w.start + j as u64 * w.stagger + k as u64 * w.gap,
                    from,
                    to: others[(j + k as usize) % others.len()],
                    amount: w.amount,
                    urgent: w.urgent,
                });
            }
        }
        let main_end = out.iter().map(|i| i.at).max().unwrap_or(w.start);
        for wave in 0..w.drain_waves {
            let at = main_end + (wave as u64 + 1) * w.drain_gap;
            for (j, &from) in self.issuing_ids().iter().enumerate() {
                let others: Vec<u32> = correct.iter().copied().filter(|&c| c != from).collect();
                if others.is_empty() {
                    continue;
                }
                out.push(Intent {
                    // Staggered like the main traffic: simultaneous issues
                    // would leave every wave block ignorant of its siblings.
                    at: at + j as u64 * w.stagger,
                    from,
                    to: others[(j + wave as usize) % others.len()],
                    amount: 0,
                    urgent: false,
                });
            }
        }
        out.sort_by_key(|i| (i.at, i.from));
        out
    }

    /// Whether the run is expected to finalize all positive payments: true
    /// once the workload ends in drain waves or consists of urgent
    /// payments, which carry their own finalization traffic.
    pub fn expects_liveness(&self) -> bool {
        self.workload.drain_waves > 0 || self.workload.urgent
    }

    /// Same scenario at a different network size, for complexity sweeps.
    /// Fault tolerance is scaled to the maximum the size admits, the gap
    /// between payment rounds grows with the network so the offered system
    /// load stays constant (more agents take proportionally longer to each
    /// have a turn), and scripted agents are kept only if still in range.
    pub fn with_n(&self, n: u32) -> Result<Scenario, ScenarioError> {
        let mut scaled = self.clone();
        scaled.n = n;
        scaled.f = if n > 3 { (n - 1) / 3 } else { self.f.min((n.saturating_sub(1)) / 3) };
        scaled.workload.gap = (self.workload.gap * u64::from(n)).div_ceil(u64::from(self.n));
        if scaled.byzantine.iter().any(|b| b.agent >= n) {
            return Err(ScenarioError::Invalid(format!(
                "scenario {} pins byzantine agents outside n={n}",
                self.name
            )));
        }
        scaled.validate()?;
        Ok(scaled)
    }
}
