//! Optimistic online convex optimization under stochastically extended
//! adversaries.
//!
//! The crate bundles four things:
//!
//! - **Learners**: adaptive optimistic FTRL and mirror descent
//!   ([`optimistic`]), optimistic FTL on strongly convex surrogates
//!   ([`strongly_convex`]), a multi-scale multiplicative-weights meta-learner
//!   for unknown curvature ([`msmwc`]), and an AdaHedge-style dynamic-regret
//!   meta-learner ([`dyn_meta`]).
//! - **Environments** ([`environments`]): a seeded zoo of distribution
//!   adversaries — i.i.d., fully adversarial, corrupted i.i.d., random-order
//!   pools, drifting means, distribution switches, and a Rademacher
//!   lower-bound construction — each with analytic variance oracles.
//! - **A harness** ([`harness`]): deterministic episode execution, hindsight
//!   comparators, regret accounting, rate fitting, and variance diagnostics.
//! - **A verification suite** ([`verify`]): every regret bound the learners
//!   are supposed to satisfy, executed numerically at desk scale with pinned
//!   constants and tolerances.
//!
//! Start with the runnable examples (`cargo run --release --example ...`):
//!
//! - `adaptive_stepsizes` — OFTRL/OMD on adversarial vs. i.i.d. data
//! - `strongly_convex` — log-regret with known curvature
//! - `unknown_curvature` — the multi-scale meta-learner
//! - `dynamic_tracking` — dynamic regret against drifting distributions
//! - `corruption_and_rom` — corrupted i.i.d. scaling and random-order pools
//! - `accelerated_averaging` — online-to-batch with scaled losses
//! - `variance_lower_bound` — the Rademacher regret floor
//! - `interpolation_sweep` — one learner across every environment kind
//!
//! The thin `ocosim` binary drives config-file sweeps (`ocosim run`) and the
//! verification suites (`ocosim verify`).

pub mod bounds;
pub mod cli;
pub mod conversions;
pub mod dyn_meta;
pub mod environments;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod learner;
pub mod linalg;
pub mod losses;
pub mod msmwc;
pub mod optimistic;
pub mod oracles;
pub mod rng;
pub mod stats;
pub mod strongly_convex;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{project, prox_step, Domain};
pub use harness::{best_fixed_comparator, expected_regret, run_episode, LearnerSpec};
pub use losses::{LossFamily, LossKind, Sample};
pub use trace::{RegretReport, Trace};

pub use environments::{EnvKindSpec, EnvSpec, FamilySpec, SeaEnvironment};
