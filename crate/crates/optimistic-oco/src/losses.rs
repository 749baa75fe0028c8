//! Parametric loss families `f(x, xi)` with gradient oracles and certified
//! constants `G` (a.s. gradient bound), `L` (smoothness of the expected
//! loss), and `mu` (strong convexity of the expected loss).
//!
//! Samples are opaque records owned by the environment; the families
//! pattern-match on the sample kind. A corrupted sample carries its i.i.d.
//! base next to the adversarial linear shift, so corrupted losses decompose
//! as `h(x, base) + <shift, x>`.

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    /// Plain vector payload: a gradient for linear losses, a tracking target
    /// for quadratic losses, a feature vector for log-smooth losses.
    Point { v: Vec<f64>, id: u64 },
    /// i.i.d. base plus adversarial linear corruption.
    Corrupted {
        base: Vec<f64>,
        shift: Vec<f64>,
        id: u64,
    },
    /// Lower-bound adversary coin; even rounds carry no gradient.
    Coin { odd: bool, sign: f64, id: u64 },
}

impl Sample {
    pub fn id(&self) -> u64 {
        match self {
            Sample::Point { id, .. } | Sample::Corrupted { id, .. } | Sample::Coin { id, .. } => {
                *id
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    /// `f(x, xi) = <xi, x>`
    Linear,
    /// `f(x, xi) = (scale/2) ||x - xi||^2`
    QuadraticTracking { scale: f64 },
    /// `f(x, xi) = log(1 + exp(<xi, x>))`
    LogSmooth,
    /// The environment supplies the gradient map directly. Used by the
    /// lower-bound adversary: on odd rounds the loss is
    /// `sign * g * x^2 / (4b)` over an interval `[a, b]`, zero on even rounds.
    GradientOracle { g: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossFamily {
    pub kind: LossKind,
    /// Almost-sure bound on `||grad(x, xi)||` over feasible `x`, declared by
    /// the environment that emits the samples and validated empirically.
    pub g_bound: f64,
    /// Smoothness of the expected loss.
    pub smoothness: f64,
    /// Strong convexity of the expected loss (0 when absent).
    pub strong_convexity: f64,
}

impl LossFamily {
    pub fn linear(g_bound: f64) -> Self {
        LossFamily {
            kind: LossKind::Linear,
            g_bound,
            smoothness: 0.0,
            strong_convexity: 0.0,
        }
    }

    pub fn quadratic_tracking(scale: f64, g_bound: f64) -> Self {
        assert!(scale > 0.0, "quadratic_tracking needs scale > 0");
        LossFamily {
            kind: LossKind::QuadraticTracking { scale },
            g_bound,
            smoothness: scale,
            strong_convexity: scale,
        }
    }

    pub fn log_smooth(g_bound: f64, smoothness: f64) -> Self {
        LossFamily {
            kind: LossKind::LogSmooth,
            g_bound,
            smoothness,
            strong_convexity: 0.0,
        }
    }

    pub fn gradient_oracle(g: f64, b: f64) -> Self {
        LossFamily {
            kind: LossKind::GradientOracle { g, b },
            g_bound: g,
            // the coin has zero mean, so the expected loss is identically
            // zero and its smoothness constant vanishes
            smoothness: 0.0,
            strong_convexity: 0.0,
        }
    }

    pub fn eval(&self, x: &[f64], xi: &Sample) -> Result<f64> {
        if !linalg::all_finite(x) {
            return Err(Error::NonFinite("losses::eval"));
        }
        let v = match (&self.kind, xi) {
            (LossKind::Linear, Sample::Point { v, .. }) => linalg::dot(v, x),
            (LossKind::Linear, Sample::Corrupted { base, shift, .. }) => {
                linalg::dot(base, x) + linalg::dot(shift, x)
            }
            (LossKind::QuadraticTracking { scale }, Sample::Point { v, .. }) => {
                0.5 * scale * linalg::dist_sq(x, v)
            }
            (LossKind::QuadraticTracking { scale }, Sample::Corrupted { base, shift, .. }) => {
                0.5 * scale * linalg::dist_sq(x, base) + linalg::dot(shift, x)
            }
            (LossKind::LogSmooth, Sample::Point { v, .. }) => softplus(linalg::dot(v, x)),
            (LossKind::GradientOracle { g, b }, Sample::Coin { odd, sign, .. }) => {
                if *odd {
                    sign * g * x[0] * x[0] / (4.0 * b)
                } else {
                    0.0
                }
            }
            _ => {
                return Err(Error::IncompatibleSetup(format!(
                    "loss kind {:?} cannot consume sample {:?}",
                    self.kind, xi
                )))
            }
        };
        if !v.is_finite() {
            return Err(Error::NumericalOverflow);
        }
        Ok(v)
    }

    pub fn grad(&self, x: &[f64], xi: &Sample) -> Result<Vec<f64>> {
        if !linalg::all_finite(x) {
            return Err(Error::NonFinite("losses::grad"));
        }
        let g = match (&self.kind, xi) {
            (LossKind::Linear, Sample::Point { v, .. }) => v.clone(),
            (LossKind::Linear, Sample::Corrupted { base, shift, .. }) => linalg::add(base, shift),
            (LossKind::QuadraticTracking { scale }, Sample::Point { v, .. }) => {
                linalg::scale(&linalg::sub(x, v), *scale)
            }
            (LossKind::QuadraticTracking { scale }, Sample::Corrupted { base, shift, .. }) => {
                let mut g = linalg::scale(&linalg::sub(x, base), *scale);
                linalg::axpy(&mut g, 1.0, shift);
                g
            }
            (LossKind::LogSmooth, Sample::Point { v, .. }) => {
                linalg::scale(v, sigmoid(linalg::dot(v, x)))
            }
            (LossKind::GradientOracle { g, b }, Sample::Coin { odd, sign, .. }) => {
                if *odd {
                    vec![sign * g * x[0] / (2.0 * b)]
                } else {
                    vec![0.0]
                }
            }
            _ => {
                return Err(Error::IncompatibleSetup(format!(
                    "loss kind {:?} cannot consume sample {:?}",
                    self.kind, xi
                )))
            }
        };
        if !linalg::all_finite(&g) {
            return Err(Error::NumericalOverflow);
        }
        Ok(g)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
