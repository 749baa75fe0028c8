//! Aggregation helpers: compensated summation, confidence intervals, and
//! least-squares rate fitting.

use crate::error::{Error, Result};

/// Kahan compensated accumulator; keeps reductions order-stable enough that
/// thread counts never change reported aggregates.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(vals: I) -> f64 {
    let mut acc = KahanSum::new();
    for v in vals {
        acc.add(v);
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Stats {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: f64,
    pub n: usize,
}

/// Sample mean with normal-approximation 95% confidence half-width.
pub fn mean_ci(values: &[f64]) -> Stats {
    let n = values.len();
    assert!(n >= 1, "mean_ci needs at least one value");
    let mean = kahan_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return Stats {
            mean,
            stderr: 0.0,
            ci95: 0.0,
            n,
        };
    }
    let var = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n as f64 - 1.0);
    let stderr = (var / n as f64).sqrt();
    Stats {
        mean,
        stderr,
        ci95: 1.96 * stderr,
        n,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linfit(xs: &[f64], ys: &[f64]) -> LinFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = kahan_sum(xs.iter().copied()) / n;
    let my = kahan_sum(ys.iter().copied()) / n;
    let sxx = kahan_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = kahan_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = kahan_sum(ys.iter().map(|y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    LinFit {
        slope,
        intercept,
        r2,
    }
}

/// Least-squares slope in log-log space: recovers the exponent of power-law
/// series. Requires at least four points with positive values.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 4 {
        return Err(Error::Config("rate_fit needs at least 4 points".into()));
    }
    if points.iter().any(|(t, v)| *t <= 0.0 || *v <= 0.0) {
        return Err(Error::Config(
            "rate_fit requires positive abscissae and values".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    Ok(linfit(&xs, &ys).slope)
}
