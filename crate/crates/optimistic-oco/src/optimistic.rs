//! Optimistic FTRL and optimistic mirror descent with the shared self-tuned
//! step size
//!
//! ```text
//! eta_t = D^2 / sum_{s<t} delta_s,
//! delta_s = (eta_s ||g_s - m_s||^2 / 2) /\ (D ||g_s - m_s||),
//! ```
//!
//! where the empty sum at t = 1 is read as eta_1 = infinity. Both learners
//! need only the domain diameter D; everything else is adaptive.

use crate::error::Result;
use crate::geometry::{linear_argmin, prox_step, Domain};
use crate::learner::Learner;
use crate::linalg;
use crate::losses::{LossFamily, Sample};

/// `delta = (eta ||g - m||^2 / 2) /\ (D ||g - m||)`; the infinite-eta branch
/// collapses to the linear term.
pub fn delta_of(eta: f64, dev_norm: f64, d: f64) -> f64 {
    debug_assert!(dev_norm >= 0.0 && d > 0.0);
    if dev_norm == 0.0 {
        return 0.0;
    }
    let linear = d * dev_norm;
    if eta.is_finite() {
        (0.5 * eta * dev_norm * dev_norm).min(linear)
    } else {
        linear
    }
}

/// The adaptive step-size recursion shared by OFTRL and OMD.
#[derive(Debug, Clone)]
pub struct AdaptiveStep {
    d: f64,
    delta_cumsum: f64,
    eta: f64,
}

impl AdaptiveStep {
    pub fn new(d: f64) -> Self {
        assert!(d > 0.0 && d.is_finite());
        AdaptiveStep {
            d,
            delta_cumsum: 0.0,
            eta: f64::INFINITY,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta_cumsum(&self) -> f64 {
        self.delta_cumsum
    }

    pub fn diameter(&self) -> f64 {
        self.d
    }

    /// Fold in one observed deviation `||g_t - m_t||`; eta never increases.
    pub fn observe(&mut self, dev_norm: f64) {
        self.delta_cumsum += delta_of(self.eta, dev_norm, self.d);
        if self.delta_cumsum > 0.0 {
            self.eta = self.d * self.d / self.delta_cumsum;
        }
    }
}

/// Optimistic follow-the-regularized-leader:
/// `x_t = argmin_x <x, m_t + sum_{s<t} g_s> + ||x||^2 / (2 eta_t)` with
/// `m_t = g_{t-1}` (zero at t = 1).
pub struct OftrlLearner {
    domain: Domain,
    family: LossFamily,
    step: AdaptiveStep,
    grad_accum: Vec<f64>,
    last_grad: Vec<f64>,
    /// Play point of the previous round, where the optimism was evaluated.
    x_prev: Vec<f64>,
    x_cur: Vec<f64>,
    played: bool,
}

impl OftrlLearner {
    pub fn new(domain: Domain, family: LossFamily) -> Self {
        let dim = domain.dim();
        let center = domain.center();
        OftrlLearner {
            step: AdaptiveStep::new(domain.diameter()),
            domain,
            family,
            grad_accum: linalg::zeros(dim),
            last_grad: linalg::zeros(dim),
            x_prev: center.clone(),
            x_cur: center,
            played: false,
        }
    }

    pub fn adaptive_step(&self) -> &AdaptiveStep {
        &self.step
    }

    /// Produce the round's iterate from the current state. Equivalent to
    /// [`Learner::play`]; exposed for callers that feed gradients directly.
    pub fn play_raw(&mut self) -> Result<Vec<f64>> {
        let x = self.argmin()?;
        self.x_prev = std::mem::replace(&mut self.x_cur, x.clone());
        self.played = true;
        Ok(x)
    }

    /// Fold in an explicit observed gradient (used by loss-scaling wrappers).
    pub fn observe_grad(&mut self, g: &[f64]) {
        let dev = linalg::dist(g, &self.last_grad);
        self.step.observe(dev);
        linalg::axpy(&mut self.grad_accum, 1.0, g);
        self.last_grad = g.to_vec();
    }

    fn argmin(&self) -> Result<Vec<f64>> {
        let theta = linalg::add(&self.last_grad, &self.grad_accum);
        let eta = self.step.eta();
        if eta.is_finite() {
            prox_step(&self.domain, &theta, 1.0 / eta, &linalg::zeros(theta.len()))
        } else if linalg::norm(&theta) == 0.0 {
            Ok(self.domain.center())
        } else {
            // vanished regularizer: minimize the linear term, ties toward the
            // projection of the origin
            linear_argmin(&self.domain, &theta, &linalg::zeros(theta.len()))
        }
    }
}

impl Learner for OftrlLearner {
    fn play(
        &mut self,
        _t: usize,
        _prev: Option<&Sample>,
        _extra: Option<&Sample>,
    ) -> Result<Vec<f64>> {
        self.play_raw()
    }

    fn observe(&mut self, _t: usize, x: &[f64], xi: &Sample) -> Result<()> {
        let g = self.family.grad(x, xi)?;
        self.observe_grad(&g);
        Ok(())
    }

    fn step_size(&self) -> f64 {
        self.step.eta()
    }

    fn optimism(&self) -> (Vec<f64>, Vec<f64>) {
        // m_t = g_{t-1}, evaluated at the previous play with the previous
        // sample
        let y = if self.played {
            self.x_prev.clone()
        } else {
            self.x_cur.clone()
        };
        (y, self.last_grad.clone())
    }
}

/// Optimistic mirror descent with Euclidean mirror map `||.||^2 / (2 eta_t)`:
///
/// ```text
/// x_t     = argmin_x <x, m_t>   + ||x - y_t||^2 / (2 eta_t)
/// y_{t+1} = argmin_y <y, ell_t> + ||y - y_t||^2 / (2 eta_t)
/// ```
///
/// with `m_t = grad f(y_t, xi_{t-1})` and `ell_t = grad f(x_t, xi_t)`.
pub struct OmdLearner {
    domain: Domain,
    family: LossFamily,
    step: AdaptiveStep,
    y: Vec<f64>,
    m_cur: Vec<f64>,
    x_cur: Vec<f64>,
}

impl OmdLearner {
    pub fn new(domain: Domain, family: LossFamily) -> Self {
        let center = domain.center();
        let dim = domain.dim();
        OmdLearner {
            step: AdaptiveStep::new(domain.diameter()),
            domain,
            family,
            y: center.clone(),
            m_cur: linalg::zeros(dim),
            x_cur: center,
        }
    }

    pub fn adaptive_step(&self) -> &AdaptiveStep {
        &self.step
    }

    pub fn secondary_iterate(&self) -> &[f64] {
        &self.y
    }

    /// Play against an explicit optimism vector.
    pub fn play_raw(&mut self, m: Vec<f64>) -> Result<Vec<f64>> {
        self.m_cur = m;
        let x = self.mirror_step(&self.m_cur)?;
        self.x_cur = x.clone();
        Ok(x)
    }

    /// Fold in an explicit loss gradient.
    pub fn observe_grad(&mut self, ell: &[f64]) -> Result<()> {
        self.y = self.mirror_step(ell)?;
        let dev = linalg::dist(ell, &self.m_cur);
        self.step.observe(dev);
        Ok(())
    }

    fn mirror_step(&self, lin: &[f64]) -> Result<Vec<f64>> {
        let eta = self.step.eta();
        if eta.is_finite() {
            prox_step(&self.domain, lin, 1.0 / eta, &self.y)
        } else if linalg::norm(lin) == 0.0 {
            Ok(self.y.clone())
        } else {
            linear_argmin(&self.domain, lin, &self.y)
        }
    }
}

impl Learner for OmdLearner {
    fn play(
        &mut self,
        _t: usize,
        prev: Option<&Sample>,
        _extra: Option<&Sample>,
    ) -> Result<Vec<f64>> {
        let m = match prev {
            Some(xi) => self.family.grad(&self.y, xi)?,
            None => linalg::zeros(self.domain.dim()),
        };
        self.play_raw(m)
    }

    fn observe(&mut self, _t: usize, x: &[f64], xi: &Sample) -> Result<()> {
        let ell = self.family.grad(x, xi)?;
        self.observe_grad(&ell)
    }

    fn step_size(&self) -> f64 {
        self.step.eta()
    }

    fn optimism(&self) -> (Vec<f64>, Vec<f64>) {
        // x_t was computed against y_t, which observe() has not yet replaced
        // when the harness records the round
        (self.y.clone(), self.m_cur.clone())
    }
}

// For the optimism record the OMD learner needs y_t to survive until the
// harness copies it; observe() replaces y after recording, so the harness
// snapshots optimism() between play and observe.
