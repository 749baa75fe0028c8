//! Dynamic-regret meta-learner: optimistic AdaHedge-style FTRL over
//! fixed-step OMD workers on a geometric grid, measured against a moving
//! comparator path.
//!
//! The meta learning rate is tuned by the cumulative mixability gap
//! `gamma_t = log(K) / sum_{s<t} delta_s`, where each `delta_s` maximizes
//! `<P_s - P, L_s - M_s> - ||P_s - P||_1^2 / (4 gamma_s)` over the simplex.
//! That maximum is computed exactly by a breakpoint scan: optimal transport
//! moves mass from the highest-score coordinates onto the lowest one, and the
//! objective is concave piecewise-quadratic in the moved mass.

use crate::error::{Error, Result};
use crate::geometry::{prox_step, Domain};
use crate::learner::Learner;
use crate::linalg;
use crate::losses::{LossFamily, Sample};

/// Grid `eta_i = 2^i / (D L sqrt(T+1))`, `i = 1..K`, `K = ceil(log2(D T))`.
#[derive(Debug, Clone)]
pub struct DynGrid {
    pub etas: Vec<f64>,
}

impl DynGrid {
    pub fn new(d: f64, l: f64, horizon: usize) -> Result<Self> {
        if d <= 0.0 || l <= 0.0 {
            return Err(Error::IncompatibleSetup(
                "dyn_meta requires D > 0 and a smooth family (L > 0)".into(),
            ));
        }
        let k = (d * horizon as f64).log2().ceil().max(1.0) as usize;
        let base = d * l * ((horizon as f64) + 1.0).sqrt();
        let etas = (1..=k).map(|i| (2.0f64).powi(i as i32) / base).collect();
        Ok(DynGrid { etas })
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

/// AdaHedge-style meta state: `gamma_t = log K / sum delta_s` with the empty
/// sum read as `gamma_1 = infinity`.
#[derive(Debug, Clone)]
pub struct AdaHedgeState {
    k: usize,
    pub gap_cumsum: f64,
    pub cum_loss: Vec<f64>,
}

impl AdaHedgeState {
    pub fn new(k: usize) -> Self {
        AdaHedgeState {
            k,
            gap_cumsum: 0.0,
            cum_loss: vec![0.0; k],
        }
    }

    pub fn gamma(&self) -> f64 {
        if self.gap_cumsum > 0.0 && self.k > 1 {
            (self.k as f64).ln() / self.gap_cumsum
        } else {
            f64::INFINITY
        }
    }
}

/// `P_{t,k} proportional to P_{1,k} exp(-gamma (M_{t,k} + sum_{s<t} L_{s,k}))`
/// from a uniform prior; the `gamma = infinity` limit puts uniform mass on
/// the argmin of the scores.
pub fn dyn_meta_weights(state: &AdaHedgeState, optimism: &[f64]) -> Vec<f64> {
    let k = state.cum_loss.len();
    let scores: Vec<f64> = state
        .cum_loss
        .iter()
        .zip(optimism)
        .map(|(c, m)| c + m)
        .collect();
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let gamma = state.gamma();
    if gamma.is_finite() {
        let mut w: Vec<f64> = scores.iter().map(|s| (-gamma * (s - min)).exp()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    } else {
        let tol = 1e-12 * (1.0 + min.abs());
        let hits: Vec<usize> = (0..k).filter(|&i| scores[i] - min <= tol).collect();
        let mut w = vec![0.0; k];
        for i in &hits {
            w[*i] = 1.0 / hits.len() as f64;
        }
        w
    }
}

/// Exact mixability gap
/// `max_{P in simplex} { <p - P, v> - ||p - P||_1^2 / (4 gamma) }`.
pub fn adahedge_gap(p: &[f64], v: &[f64], gamma: f64) -> f64 {
    let k = p.len();
    if k <= 1 {
        return 0.0;
    }
    // target: the lowest-score coordinate; sources: all others, taken in
    // decreasing score order
    let j = (0..k)
        .min_by(|a, b| v[*a].partial_cmp(&v[*b]).expect("finite scores"))
        .expect("nonempty");
    let mut sources: Vec<usize> = (0..k).filter(|i| *i != j).collect();
    sources.sort_by(|a, b| v[*b].partial_cmp(&v[*a]).expect("finite scores"));

    // gain(m) is piecewise linear in the moved mass m; the penalty is m^2/gamma
    let penalty = |m: f64| -> f64 {
        if gamma.is_finite() {
            m * m / gamma
        } else {
            0.0
        }
    };
    let mut best = 0.0f64; // m = 0 is feasible
    let mut moved = 0.0;
    let mut gain = 0.0;
    for &i in &sources {
        let slope = v[i] - v[j];
        let cap = p[i];
        // candidate at the segment's interior stationary point
        if gamma.is_finite() && slope > 0.0 {
            let m_star = 0.5 * gamma * slope;
            if m_star > moved && m_star < moved + cap {
                let val = gain + slope * (m_star - moved) - penalty(m_star);
                best = best.max(val);
            }
        }
        moved += cap;
        gain += slope * cap;
        best = best.max(gain - penalty(moved));
    }
    best
}

/// `Path_T = sum_t ||u_t - u_{t-1}||` with `u_0 = u_1`.
pub fn path_length(comparators: &[Vec<f64>]) -> f64 {
    comparators
        .windows(2)
        .map(|w| linalg::dist(&w[1], &w[0]))
        .sum()
}

/// Per-round internals, kept when round logging is enabled.
#[derive(Debug, Clone)]
pub struct DynMetaRound {
    pub p: Vec<f64>,
    pub worker_plays: Vec<Vec<f64>>,
    pub meta_play: Vec<f64>,
    pub meta_loss: Vec<f64>,
    pub meta_optimism: Vec<f64>,
    pub loss_grad: Vec<f64>,
    /// Per-worker loss gradients evaluated at the worker's own play.
    pub worker_loss_grads: Vec<Vec<f64>>,
    pub worker_optimism: Vec<Vec<f64>>,
    pub gamma: f64,
    pub gap: f64,
}

struct DynWorker {
    eta: f64,
    w_hat: Vec<f64>,
    w: Vec<f64>,
    m: Vec<f64>,
}

pub struct DynMetaLearner {
    domain: Domain,
    family: LossFamily,
    grid: DynGrid,
    hedge: AdaHedgeState,
    p_prev: Vec<f64>,
    p: Vec<f64>,
    workers: Vec<DynWorker>,
    meta_optimism: Vec<f64>,
    opt_point: Vec<f64>,
    opt_grad: Vec<f64>,
    round_log: Option<Vec<DynMetaRound>>,
}

impl DynMetaLearner {
    pub fn new(domain: Domain, family: LossFamily, horizon: usize) -> Result<Self> {
        let grid = DynGrid::new(domain.diameter(), family.smoothness, horizon)?;
        let k = grid.len();
        let center = domain.center();
        let workers = grid
            .etas
            .iter()
            .map(|&eta| DynWorker {
                eta,
                w_hat: center.clone(),
                w: center.clone(),
                m: linalg::zeros(domain.dim()),
            })
            .collect();
        Ok(DynMetaLearner {
            hedge: AdaHedgeState::new(k),
            p_prev: vec![1.0 / k as f64; k],
            p: vec![1.0 / k as f64; k],
            meta_optimism: vec![0.0; k],
            opt_point: center,
            opt_grad: linalg::zeros(domain.dim()),
            workers,
            grid,
            domain,
            family,
            round_log: None,
        })
    }

    pub fn with_round_log(mut self) -> Self {
        self.round_log = Some(Vec::new());
        self
    }

    pub fn rounds(&self) -> &[DynMetaRound] {
        self.round_log.as_deref().unwrap_or(&[])
    }

    pub fn grid(&self) -> &DynGrid {
        &self.grid
    }

    pub fn hedge(&self) -> &AdaHedgeState {
        &self.hedge
    }
}

impl Learner for DynMetaLearner {
    fn play(
        &mut self,
        t: usize,
        prev: Option<&Sample>,
        _extra: Option<&Sample>,
    ) -> Result<Vec<f64>> {
        // worker optimistic steps: m_t^k = grad f(w_hat_t^k, xi_{t-1})
        for wk in &mut self.workers {
            wk.m = match prev {
                Some(xi) => self.family.grad(&wk.w_hat, xi)?,
                None => linalg::zeros(self.domain.dim()),
            };
            wk.w = prox_step(&self.domain, &wk.m, 1.0 / wk.eta, &wk.w_hat)?;
        }
        // pre-play mixture under last round's weights carries the optimism
        let mut w_pre = linalg::zeros(self.domain.dim());
        for (wk, pk) in self.workers.iter().zip(&self.p_prev) {
            linalg::axpy(&mut w_pre, *pk, &wk.w);
        }
        let ell_hat = match (t, prev) {
            (1, _) | (_, None) => linalg::zeros(self.domain.dim()),
            (_, Some(xi)) => self.family.grad(&w_pre, xi)?,
        };
        self.meta_optimism = self
            .workers
            .iter()
            .map(|wk| linalg::dot(&ell_hat, &wk.w))
            .collect();
        self.opt_point = w_pre;
        self.opt_grad = ell_hat;
        self.p = dyn_meta_weights(&self.hedge, &self.meta_optimism);
        let mut play = linalg::zeros(self.domain.dim());
        for (wk, pk) in self.workers.iter().zip(&self.p) {
            linalg::axpy(&mut play, *pk, &wk.w);
        }
        if let Some(log) = &mut self.round_log {
            log.push(DynMetaRound {
                p: self.p.clone(),
                worker_plays: self.workers.iter().map(|w| w.w.clone()).collect(),
                meta_play: play.clone(),
                meta_loss: Vec::new(),
                meta_optimism: self.meta_optimism.clone(),
                loss_grad: Vec::new(),
                worker_loss_grads: Vec::new(),
                worker_optimism: self.workers.iter().map(|w| w.m.clone()).collect(),
                gamma: self.hedge.gamma(),
                gap: 0.0,
            });
        }
        Ok(play)
    }

    fn observe(&mut self, _t: usize, x: &[f64], xi: &Sample) -> Result<()> {
        let ell = self.family.grad(x, xi)?;
        let meta_loss: Vec<f64> = self
            .workers
            .iter()
            .map(|wk| linalg::dot(&ell, &wk.w))
            .collect();
        let diff: Vec<f64> = meta_loss
            .iter()
            .zip(&self.meta_optimism)
            .map(|(l, m)| l - m)
            .collect();
        let gamma = self.hedge.gamma();
        let gap = adahedge_gap(&self.p, &diff, gamma);
        self.hedge.gap_cumsum += gap;
        for (c, l) in self.hedge.cum_loss.iter_mut().zip(&meta_loss) {
            *c += l;
        }
        // workers descend on their own linearized losses
        let mut worker_loss_grads = Vec::with_capacity(self.workers.len());
        for wk in &mut self.workers {
            let ell_k = self.family.grad(&wk.w, xi)?;
            wk.w_hat = prox_step(&self.domain, &ell_k, 1.0 / wk.eta, &wk.w_hat)?;
            worker_loss_grads.push(ell_k);
        }
        if let Some(log) = &mut self.round_log {
            let round = log.last_mut().expect("observe follows play");
            round.meta_loss = meta_loss;
            round.loss_grad = ell;
            round.worker_loss_grads = worker_loss_grads;
            round.gap = gap;
        }
        self.p_prev = self.p.clone();
        Ok(())
    }

    fn step_size(&self) -> f64 {
        self.hedge.gamma()
    }

    fn optimism(&self) -> (Vec<f64>, Vec<f64>) {
        (self.opt_point.clone(), self.opt_grad.clone())
    }
}
