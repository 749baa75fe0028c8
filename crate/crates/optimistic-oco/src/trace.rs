//! Episode traces and regret reports.
//!
//! A trace records everything a bound check or diagnostic needs: iterates,
//! samples, realized gradients, the optimism actually used (vector and
//! evaluation point), step sizes, losses, and the environment's per-round
//! variance oracles. CSV export uses 17 significant digits so values
//! round-trip bit-exactly.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg;
use crate::losses::{LossFamily, Sample};
use crate::stats::kahan_sum;

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub t: usize,
    pub x: Vec<f64>,
    /// Point where the round's optimism was evaluated (y_t).
    pub optimism_point: Vec<f64>,
    /// The optimism vector m_t.
    pub optimism: Vec<f64>,
    pub xi: Sample,
    pub grad: Vec<f64>,
    pub step_size: f64,
    pub loss: f64,
    pub sigma_sq: f64,
    pub cap_sigma_sq: f64,
    /// Minimizer of the round's expected loss, when the environment has a
    /// closed form for it (dynamic-regret comparator path).
    pub risk_minimizer: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub rows: Vec<RoundRecord>,
    pub domain: Domain,
    pub family: LossFamily,
    pub learner: String,
    pub env: String,
    pub seed: u64,
    pub episode: u64,
}

impl Trace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    /// `sum_t f(x_t, xi_t) - f(u, xi_t)` for a fixed feasible comparator.
    pub fn regret(&self, u: &[f64]) -> Result<f64> {
        if !self.domain.contains(u) {
            return Err(Error::Config("comparator must be feasible".into()));
        }
        let mut diffs = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            diffs.push(r.loss - self.family.eval(u, &r.xi)?);
        }
        Ok(kahan_sum(diffs))
    }

    /// `sum_t <g_t, x_t - u>`: an upper bound on [`Trace::regret`] for convex
    /// losses.
    pub fn linearized_regret(&self, u: &[f64]) -> Result<f64> {
        if !self.domain.contains(u) {
            return Err(Error::Config("comparator must be feasible".into()));
        }
        Ok(kahan_sum(
            self.rows
                .iter()
                .map(|r| linalg::dot(&r.grad, &linalg::sub(&r.x, u))),
        ))
    }

    /// `sum_t f(x_t, xi_t) - f(u_t, xi_t)` against a comparator path; a
    /// constant path reduces to static regret.
    pub fn dynamic_regret(&self, path: &[Vec<f64>]) -> Result<f64> {
        if path.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: path.len(),
            });
        }
        let mut diffs = Vec::with_capacity(self.rows.len());
        for (r, u) in self.rows.iter().zip(path) {
            if !self.domain.contains(u) {
                return Err(Error::Config("comparator path must be feasible".into()));
            }
            diffs.push(r.loss - self.family.eval(u, &r.xi)?);
        }
        Ok(kahan_sum(diffs))
    }

    /// Comparator path of per-round expected-loss minimizers; available when
    /// the environment exposes closed-form means.
    pub fn risk_minimizer_path(&self) -> Option<Vec<Vec<f64>>> {
        self.rows.iter().map(|r| r.risk_minimizer.clone()).collect()
    }

    pub fn to_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dim = self.domain.dim();
        let xs: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "t,{},loss,grad_norm,eta,sigma_sq,Sigma_sq", xs.join(","))?;
        for r in &self.rows {
            let coords: Vec<String> = r.x.iter().map(|v| fmt17(*v)).collect();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.t,
                coords.join(","),
                fmt17(r.loss),
                fmt17(linalg::norm(&r.grad)),
                fmt17(r.step_size),
                fmt17(r.sigma_sq),
                fmt17(r.cap_sigma_sq),
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits: enough for f64 round-trips.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Fixed(Vec<f64>),
    Path(Vec<Vec<f64>>),
}

/// Aggregated result of one experiment cell, exported as JSON.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RegretReport {
    pub static_regret: f64,
    pub linearized_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamic_regret: Option<f64>,
    pub comparator: Comparator,
    pub bound_value: f64,
    pub bound_margin: f64,
    pub sigma_bar: f64,
    #[serde(rename = "Sigma_bar")]
    pub cap_sigma_bar: f64,
    pub sigma_max: f64,
    #[serde(rename = "Sigma_max")]
    pub cap_sigma_max: f64,
}

impl RegretReport {
    /// Convexity makes the linearized regret dominate the realized one.
    pub fn consistent(&self) -> bool {
        self.linearized_regret >= self.static_regret - 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_trace() -> Trace {
        let domain = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let family = LossFamily::linear(2.0);
        let rows = (1..=3)
            .map(|t| {
                let xi = Sample::Point {
                    v: vec![t as f64 * 0.1, -0.1],
                    id: t as u64,
                };
                let x = vec![0.1, 0.1];
                let loss = family.eval(&x, &xi).unwrap();
                let grad = family.grad(&x, &xi).unwrap();
                RoundRecord {
                    t,
                    x,
                    optimism_point: vec![0.0, 0.0],
                    optimism: vec![0.0, 0.0],
                    xi,
                    grad,
                    step_size: 1.0,
                    loss,
                    sigma_sq: 0.0,
                    cap_sigma_sq: 0.0,
                    risk_minimizer: None,
                }
            })
            .collect();
        Trace {
            rows,
            domain,
            family,
            learner: "test".into(),
            env: "script".into(),
            seed: 0,
            episode: 0,
        }
    }

    #[test]
    fn regret_at_own_play_is_zero() {
        let tr = tiny_trace();
        let r = tr.regret(&[0.1, 0.1]).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn constant_path_equals_static_regret() {
        let tr = tiny_trace();
        let u = vec![-0.3, 0.2];
        let path = vec![u.clone(); 3];
        assert!((tr.dynamic_regret(&path).unwrap() - tr.regret(&u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hand_summed_three_round_regret() {
        let tr = tiny_trace();
        let u = vec![0.5, 0.0];
        // losses at x = (0.1, 0.1): <xi, x>, comparator losses <xi, u>
        let mut expect = 0.0;
        for t in 1..=3 {
            let xi = [t as f64 * 0.1, -0.1];
            expect += xi[0] * 0.1 + xi[1] * 0.1 - (xi[0] * 0.5);
        }
        assert!((tr.regret(&u).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn infeasible_comparator_rejected() {
        let tr = tiny_trace();
        assert!(tr.regret(&[2.0, 0.0]).is_err());
    }

    #[test]
    fn csv_header_and_roundtrip_precision() {
        let tr = tiny_trace();
        let mut buf = Vec::new();
        tr.to_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,x0,x1,loss,grad_norm,eta,sigma_sq,Sigma_sq"
        );
        assert_eq!(lines.count(), 3);
        let v = 0.1f64 + 0.2f64;
        let parsed: f64 = fmt17(v).parse().unwrap();
        assert_eq!(parsed.to_bits(), v.to_bits());
    }
}
