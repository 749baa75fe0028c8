//! Common interface every online learner implements.
//!
//! The harness drives the protocol: `play` produces the round's iterate and
//! may evaluate gradients of the *previous* round's sample at points of the
//! learner's choosing (that is where optimism comes from); `observe` receives
//! the realized sample. Learner state has value semantics inside an episode;
//! parallelism happens only across episodes.

use crate::error::Result;
use crate::losses::Sample;

pub trait Learner {
    /// Produce `x_t`. `prev` is the previous round's sample (None at t = 1);
    /// `extra` is an independent sample from the previous distribution,
    /// supplied only when [`Learner::wants_extra_sample`] returns true.
    fn play(&mut self, t: usize, prev: Option<&Sample>, extra: Option<&Sample>)
        -> Result<Vec<f64>>;

    /// Observe the realized sample for the round just played.
    fn observe(&mut self, t: usize, x: &[f64], xi: &Sample) -> Result<()>;

    /// Step size in force for the round just played (eta_t, or gamma_t for
    /// meta learners).
    fn step_size(&self) -> f64;

    /// Whether the learner consumes the per-round independent sample of
    /// assumption A5. Only the multi-scale meta learner does.
    fn wants_extra_sample(&self) -> bool {
        false
    }

    /// The optimism used in the round just played, as the pair
    /// (evaluation point `y_t`, predicted gradient `m_t`).
    fn optimism(&self) -> (Vec<f64>, Vec<f64>);
}
