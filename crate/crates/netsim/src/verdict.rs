//! Run outcomes.
//!
//! Every run ends in exactly one verdict. Checks run in severity order —
//! conservation, safety, quiescence, liveness — and scenarios that violate
//! protocol assumptions on purpose get their expected violations labeled
//! as such instead of failing, while a missing expected violation is
//! itself a failure.

use serde::{Deserialize, Serialize};

/// The single outcome of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// All checks passed.
    Clean,
    /// A safety violation occurred in a scenario that declared it would
    /// break protocol assumptions; this is the expected outcome there.
    AssumptionViolated { detail: String },
    /// Conflicting payments both reached finality under claimed-valid
    /// assumptions.
    SafetyViolation { detail: String },
    /// Some replica's ledger arithmetic failed to balance; always a bug.
    ConservationViolation { detail: String },
    /// Payments that should have finalized everywhere did not.
    LivenessViolation { detail: String },
    /// The run hit its event budget before going quiet.
    Nonquiescent { detail: String },
    /// The scenario declared an assumption violation but the run stayed
    /// clean.
    ExpectedViolationMissing,
}

impl Verdict {
    /// Whether the run counts as successful for process exit purposes.
    pub fn exit_ok(&self) -> bool {
        matches!(self, Verdict::Clean | Verdict::AssumptionViolated { .. })
    }

    /// Stable lowercase label for tables and summaries.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Clean => "clean",
            Verdict::AssumptionViolated { .. } => "assumption-violated",
            Verdict::SafetyViolation { .. } => "safety-violation",
            Verdict::ConservationViolation { .. } => "conservation-violation",
            Verdict::LivenessViolation { .. } => "liveness-violation",
            Verdict::Nonquiescent { .. } => "nonquiescent",
            Verdict::ExpectedViolationMissing => "expected-violation-missing",
        }
    }
}

/// A pair of same-creator conflicting blocks found anywhere in the run,
/// with the honest agents at which each side finalized. Both lists being
/// non-empty is the disaster the protocol exists to prevent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    /// "equivocation" for sibling blocks, "equivocating_doublespend" when
    /// the siblings also spend the same funds.
    pub kind: String,
    pub creator: u32,
    pub a: String,
    pub b: String,
    pub a_final_at: Vec<u32>,
    pub b_final_at: Vec<u32>,
}

impl ConflictReport {
    pub fn both_final(&self) -> bool {
        !self.a_final_at.is_empty() && !self.b_final_at.is_empty()
    }
}
