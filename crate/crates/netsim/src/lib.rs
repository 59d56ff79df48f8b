//! Deterministic discrete-event network simulation for blocklace payment
//! agents.
//!
//! A [`Scenario`] — loadable from TOML — declares the network (size, fault
//! tolerance, delay model), the workload (generated and hand-written
//! payment intents), and any scripted misbehavior. [`run`] executes it as
//! a single-threaded event loop driven entirely by one seeded generator,
//! so every run is reproducible down to the trace bytes, and returns a
//! [`RunResult`]: verdict, cost counters, per-block finality records, and
//! any conflicting block pairs found by an omniscient evidence replica.
//! [`run_seeds`] and [`sweep`] fan independent runs out across cores.

mod actors;
mod batch;
mod delay;
mod scenario;
mod sim;
mod verdict;

pub use batch::{run_seeds, sweep, Sweep, SweepPoint};
pub use delay::DelayModel;
pub use scenario::{Behavior, ByzSpec, Intent, Scenario, ScenarioError, Variant, Workload};
pub use sim::{run, run_traced, BlockStat, RunResult};
pub use verdict::{ConflictReport, Verdict};
