//! Message delay models.
//!
//! Every send samples one delay from the scenario's model using the run's
//! single seeded generator, so delivery schedules are reproducible. All
//! models keep delays at one tick or more: delivery is reliable and never
//! instantaneous, but unbounded patterns can be approximated by large
//! adversarial bounds.

use blocklace_core::lacegen::SplitMix64;
use serde::{Deserialize, Serialize};

/// How long a message stays in flight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DelayModel {
    /// Every message takes exactly `ticks` ticks: lockstep rounds.
    Synchronous { ticks: u64 },
    /// Gaussian around `mu` with deviation `sigma`, truncated below one
    /// tick to stay reliable.
    Normal { mu: f64, sigma: f64 },
    /// Each message is held an arbitrary 1..=bound ticks, the pattern an
    /// adversary gets to pick (here: drawn from the seeded generator).
    Adversarial { bound: u64 },
}

impl Default for DelayModel {
    fn default() -> Self {
        DelayModel::Synchronous { ticks: 1 }
    }
}

impl DelayModel {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            DelayModel::Synchronous { ticks } if ticks == 0 => {
                Err("synchronous delay needs ticks >= 1".into())
            }
            DelayModel::Normal { mu, sigma } if !(mu.is_finite() && sigma.is_finite()) => {
                Err("normal delay needs finite mu and sigma".into())
            }
            DelayModel::Normal { sigma, .. } if sigma < 0.0 => {
                Err("normal delay needs sigma >= 0".into())
            }
            DelayModel::Adversarial { bound } if bound == 0 => {
                Err("adversarial delay needs bound >= 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Draw one delay in ticks. The synchronous model consumes no
    /// randomness, so switching models never perturbs unrelated draws.
    pub fn sample(&self, rng: &mut SplitMix64) -> u64 {
        match *self {
            DelayModel::Synchronous { ticks } => ticks.max(1),
            DelayModel::Normal { mu, sigma } => {
                let d = (mu + sigma * gaussian(rng)).round();
                if d < 1.0 {
                    1
                } else {
                    d as u64
                }
            }
            DelayModel::Adversarial { bound } => 1 + rng.below(bound.max(1)),
        }
    }
}

/// Standard normal draw via the Box-Muller transform. `u1` is mapped into
/// (0, 1] so the logarithm is always finite.
fn gaussian(rng: &mut SplitMix64) -> f64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
