//! Multi-scale multiplicative weights with correction: a meta-algorithm over
//! a geometric grid of OMD workers that reaches strongly-convex rates without
//! knowing the strong-convexity parameter.
//!
//! The meta distribution lives on the simplex under the weighted negative
//! entropy `phi(P) = sum_k P(k)/eta_k log P(k)`; both meta updates are
//! Bregman projections solved exactly by a one-dimensional root find on the
//! normalization multiplier. Workers run optimistic mirror descent on
//! quadratically corrected surrogate losses with per-worker adaptive scale
//! `A_t = eta_k (8 G^2 + sum_{s<t} ||grad c_s(w_s) - m_s||^2)`.

use crate::error::{Error, Result};
use crate::geometry::{prox_step, Domain};
use crate::learner::Learner;
use crate::linalg;
use crate::losses::{LossFamily, Sample};

/// Probability floor applied before logarithms.
const PROB_FLOOR: f64 = 1e-300;

/// Geometric step-size grid `eta_i = 1 / (D G 2^{i+8})`, `i = 1..K`,
/// `K = ceil(log2(2 D T))`.
#[derive(Debug, Clone)]
pub struct MsmwcGrid {
    pub etas: Vec<f64>,
}

impl MsmwcGrid {
    pub fn new(d: f64, g: f64, horizon: usize) -> Result<Self> {
        if d <= 0.0 || g <= 0.0 {
            return Err(Error::Config("grid requires D > 0 and G > 0".into()));
        }
        let k = (2.0 * d * horizon as f64).log2().ceil().max(1.0) as usize;
        let etas: Vec<f64> = (1..=k)
            .map(|i| 1.0 / (d * g * (2.0f64).powi(i as i32 + 8)))
            .collect();
        debug_assert!(etas[0] <= 1.0 / (512.0 * d * g) + 1e-18);
        Ok(MsmwcGrid { etas })
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    /// `P_hat_1(k) = eta_k^2 / sum_s eta_s^2`
    pub fn initial_weights(&self) -> Vec<f64> {
        let total: f64 = self.etas.iter().map(|e| e * e).sum();
        self.etas.iter().map(|e| e * e / total).collect()
    }
}

/// `argmin_{P in simplex} <linear, P> + D_phi(P, anchor)` for the weighted
/// negative entropy. The minimizer has the closed form
/// `P_k = anchor_k exp(-eta_k (linear_k + lambda))` with `lambda` the unique
/// root of the normalization; the root is found by safeguarded bisection on
/// a log-sum-exp reformulation.
pub fn weighted_entropy_argmin(etas: &[f64], linear: &[f64], anchor: &[f64]) -> Result<Vec<f64>> {
    let k = etas.len();
    if linear.len() != k || anchor.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: linear.len().max(anchor.len()),
        });
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    // a_k = log anchor_k - eta_k linear_k; seek s(lambda) = lse_k(a_k - eta_k lambda) = 0
    let a: Vec<f64> = anchor
        .iter()
        .zip(linear)
        .zip(etas)
        .map(|((p, c), e)| p.max(PROB_FLOOR).ln() - e * c)
        .collect();
    let s = |lambda: f64| -> f64 {
        let m = a
            .iter()
            .zip(etas)
            .map(|(ai, e)| ai - e * lambda)
            .fold(f64::NEG_INFINITY, f64::max);
        m + a
            .iter()
            .zip(etas)
            .map(|(ai, e)| (ai - e * lambda - m).exp())
            .sum::<f64>()
            .ln()
    };

    let linf = linear.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let reach = linf + etas.iter().map(|e| 1.0 / e).fold(0.0f64, f64::max);
    let mut lo = -reach;
    let mut hi = reach;
    let mut expansions = 0;
    while s(lo) < 0.0 {
        lo = 2.0 * lo - 1.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::SolverDivergence(expansions));
        }
    }
    while s(hi) > 0.0 {
        hi = 2.0 * hi + 1.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::SolverDivergence(expansions));
        }
    }
    // bisect until the normalization is tight
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..500 {
        lambda = 0.5 * (lo + hi);
        let v = s(lambda);
        if v.abs() <= 1e-15 || (hi - lo) <= f64::EPSILON * (1.0 + lambda.abs()) {
            break;
        }
        if v > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
    // normalize in log space so stray exponents cannot overflow
    let shift = a
        .iter()
        .zip(etas)
        .map(|(ai, e)| ai - e * lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = a
        .iter()
        .zip(etas)
        .map(|(ai, e)| (ai - e * lambda - shift).exp())
        .collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}

#[derive(Debug, Clone)]
struct WorkerState {
    eta: f64,
    w_hat: Vec<f64>,
    w: Vec<f64>,
    /// `sum_{s<t} ||grad c_s(w_s) - m_s||^2`
    dev_accum: f64,
}

impl WorkerState {
    fn a_coeff(&self, g: f64) -> f64 {
        self.eta * (8.0 * g * g + self.dev_accum)
    }
}

/// One round of learner internals, kept when round logging is enabled.
#[derive(Debug, Clone)]
pub struct MsmwcRound {
    pub p: Vec<f64>,
    pub worker_plays: Vec<Vec<f64>>,
    pub meta_play: Vec<f64>,
    pub meta_loss: Vec<f64>,
    pub meta_optimism: Vec<f64>,
    pub correction: Vec<f64>,
    pub loss_grad: Vec<f64>,
    pub optimism_grad: Vec<f64>,
}

pub struct MsmwcLearner {
    domain: Domain,
    family: LossFamily,
    grid: MsmwcGrid,
    p_hat: Vec<f64>,
    p: Vec<f64>,
    workers: Vec<WorkerState>,
    w_prev: Vec<f64>,
    m_cur: Vec<f64>,
    m_point: Vec<f64>,
    meta_play: Vec<f64>,
    round_log: Option<Vec<MsmwcRound>>,
}

impl MsmwcLearner {
    pub fn new(domain: Domain, family: LossFamily, horizon: usize) -> Result<Self> {
        let grid = MsmwcGrid::new(domain.diameter(), family.g_bound, horizon)?;
        let p_hat = grid.initial_weights();
        let center = domain.center();
        let workers = grid
            .etas
            .iter()
            .map(|&eta| WorkerState {
                eta,
                w_hat: center.clone(),
                w: center.clone(),
                dev_accum: 0.0,
            })
            .collect();
        let dim = domain.dim();
        Ok(MsmwcLearner {
            domain,
            family,
            p: p_hat.clone(),
            p_hat,
            grid,
            workers,
            w_prev: center.clone(),
            m_cur: linalg::zeros(dim),
            m_point: center,
            meta_play: linalg::zeros(dim),
            round_log: None,
        })
    }

    pub fn with_round_log(mut self) -> Self {
        self.round_log = Some(Vec::new());
        self
    }

    pub fn rounds(&self) -> &[MsmwcRound] {
        self.round_log.as_deref().unwrap_or(&[])
    }

    pub fn grid(&self) -> &MsmwcGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }
}

impl Learner for MsmwcLearner {
    fn play(
        &mut self,
        t: usize,
        _prev: Option<&Sample>,
        extra: Option<&Sample>,
    ) -> Result<Vec<f64>> {
        let g = self.family.g_bound;
        // optimism from the independent previous-round sample, evaluated at
        // the previous meta play
        self.m_point = self.w_prev.clone();
        self.m_cur = match (t, extra) {
            (1, _) | (_, None) => linalg::zeros(self.domain.dim()),
            (_, Some(xi)) => self.family.grad(&self.w_prev, xi)?,
        };
        // worker optimistic steps under psi_t = (A_t/2) ||.||^2
        for wk in &mut self.workers {
            let a = wk.a_coeff(g);
            wk.w = prox_step(&self.domain, &self.m_cur, a, &wk.w_hat)?;
        }
        // meta optimistic step
        let meta_m: Vec<f64> = self
            .workers
            .iter()
            .map(|wk| linalg::dot(&self.m_cur, &wk.w))
            .collect();
        self.p = weighted_entropy_argmin(&self.grid.etas, &meta_m, &self.p_hat)?;
        let mut play = linalg::zeros(self.domain.dim());
        for (wk, pk) in self.workers.iter().zip(&self.p) {
            linalg::axpy(&mut play, *pk, &wk.w);
        }
        if let Some(log) = &mut self.round_log {
            log.push(MsmwcRound {
                p: self.p.clone(),
                worker_plays: self.workers.iter().map(|w| w.w.clone()).collect(),
                meta_play: play.clone(),
                meta_loss: Vec::new(),
                meta_optimism: meta_m,
                correction: Vec::new(),
                loss_grad: Vec::new(),
                optimism_grad: self.m_cur.clone(),
            });
        }
        self.meta_play = play.clone();
        Ok(play)
    }

    fn observe(&mut self, _t: usize, x: &[f64], xi: &Sample) -> Result<()> {
        let g = self.family.g_bound;
        let ell = self.family.grad(x, xi)?;
        let meta_loss: Vec<f64> = self
            .workers
            .iter()
            .map(|wk| linalg::dot(&wk.w, &ell))
            .collect();
        let meta_m: Vec<f64> = self
            .workers
            .iter()
            .map(|wk| linalg::dot(&self.m_cur, &wk.w))
            .collect();
        // second-order correction around the played mixture
        let mixture: f64 = self
            .p
            .iter()
            .zip(meta_loss.iter().zip(&meta_m))
            .map(|(pk, (l, m))| pk * (l - m))
            .sum();
        let correction: Vec<f64> = self
            .grid
            .etas
            .iter()
            .zip(meta_loss.iter().zip(&meta_m))
            .map(|(eta, (l, m))| 32.0 * eta * (l - (m + mixture)) * (l - (m + mixture)))
            .collect();
        let combined: Vec<f64> = meta_loss
            .iter()
            .zip(&correction)
            .map(|(l, c)| l + c)
            .collect();
        self.p_hat = weighted_entropy_argmin(&self.grid.etas, &combined, &self.p_hat)?;

        // worker descent steps on the corrected surrogate gradient
        let dev_sq = linalg::dist_sq(&ell, &self.m_cur);
        for wk in &mut self.workers {
            let a = wk.a_coeff(g);
            // grad c(w) = ell + 2^7 eta ||ell - m||^2 (w - W_t)
            let mut grad_c = ell.clone();
            let coeff = 128.0 * wk.eta * dev_sq;
            for i in 0..grad_c.len() {
                grad_c[i] += coeff * (wk.w[i] - x[i]);
            }
            wk.w_hat = prox_step(&self.domain, &grad_c, a, &wk.w_hat)?;
            wk.dev_accum += linalg::dist_sq(&grad_c, &self.m_cur);
        }

        if let Some(log) = &mut self.round_log {
            let round = log.last_mut().expect("observe follows play");
            round.meta_loss = meta_loss;
            round.correction = correction;
            round.loss_grad = ell;
        }
        self.w_prev = x.to_vec();
        Ok(())
    }

    fn step_size(&self) -> f64 {
        // the meta scale is the finest grid step in play
        self.grid.etas[0]
    }

    fn wants_extra_sample(&self) -> bool {
        true
    }

    fn optimism(&self) -> (Vec<f64>, Vec<f64>) {
        (self.m_point.clone(), self.m_cur.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_admissibility() {
        let grid = MsmwcGrid::new(2.0, 1.0, 1024).unwrap();
        assert_eq!(grid.len(), 12); // ceil(log2(2 * 2 * 1024))
        assert!(grid.etas[0] <= 1.0 / (512.0 * 2.0));
        assert!(grid.etas.windows(2).all(|w| w[1] < w[0]));
        let p = grid.initial_weights();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn entropy_argmin_equal_weights_reduce_to_hedge() {
        let p = weighted_entropy_argmin(&[0.5, 0.5], &[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_argmin_constant_linear_returns_anchor() {
        let anchor = [0.2, 0.3, 0.5];
        let p = weighted_entropy_argmin(&[1.0, 0.5, 0.25], &[3.0, 3.0, 3.0], &anchor).unwrap();
        for (a, b) in anchor.iter().zip(&p) {
            assert!((a - b).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn entropy_argmin_satisfies_kkt() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let k = rng.random_range(2..=5);
            let etas: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let linear: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut anchor: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = anchor.iter().sum();
            anchor.iter_mut().for_each(|a| *a /= s);
            let p = weighted_entropy_argmin(&etas, &linear, &anchor).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            // stationarity: linear_k + (log(p_k/anchor_k))/eta_k constant
            let lam: Vec<f64> = (0..k)
                .map(|i| -(linear[i] + (p[i] / anchor[i]).ln() / etas[i]))
                .collect();
            for w in lam.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-9, "stationarity residual {lam:?}");
            }
        }
    }

    #[test]
    fn singleton_grid_puts_all_mass_on_the_worker() {
        let domain = Domain::ball(vec![0.0], 0.5).unwrap();
        let family = LossFamily::linear(1.0);
        // D = 1 and horizon 1 force K = ceil(log2(2)) = 1
        let mut l = MsmwcLearner::new(domain, family, 1).unwrap();
        assert_eq!(l.grid().len(), 1);
        l.play(1, None, None).unwrap();
        assert_eq!(l.weights(), &[1.0]);
    }

    #[test]
    fn identical_workers_make_the_mixture_their_common_play() {
        // all workers start at the center with m_1 = 0, so w_1^k = center
        let domain = Domain::ball(vec![0.3, -0.1], 0.7).unwrap();
        let family = LossFamily::linear(1.0);
        let mut l = MsmwcLearner::new(domain.clone(), family, 64).unwrap();
        let w = l.play(1, None, None).unwrap();
        assert!(linalg::dist(&w, &domain.center()) < 1e-12);
    }

    /// Two-expert weighted update against a brute-force scan of the Bregman
    /// objective on a 1e-4 simplex grid.
    #[test]
    fn two_expert_update_matches_simplex_grid_oracle() {
        let etas = [0.5, 0.25];
        let anchor = [0.6, 0.4];
        // combined loss vector of one scripted round: L_t + hat L_t
        let linear = [0.8, -0.3];
        let p = weighted_entropy_argmin(&etas, &linear, &anchor).unwrap();
        let objective = |q0: f64| -> f64 {
            let q = [q0, 1.0 - q0];
            let mut v = 0.0;
            for i in 0..2 {
                v += linear[i] * q[i];
                // D_phi(q, anchor) for phi(P) = sum P_k/eta_k log P_k
                v += (q[i] * (q[i].max(1e-300) / anchor[i]).ln() - q[i] + anchor[i]) / etas[i];
            }
            v
        };
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=10_000 {
            let q0 = k as f64 / 10_000.0;
            let v = objective(q0);
            if v < best.0 {
                best = (v, q0);
            }
        }
        // parabolic vertex through the best lattice point and its neighbors
        // recovers the sub-grid location of the smooth minimum
        let h = 1e-4;
        let (x0, f0) = (best.1, best.0);
        let (fm, fp) = (objective(x0 - h), objective(x0 + h));
        let vertex = x0 - 0.5 * h * (fp - fm) / (fp - 2.0 * f0 + fm);
        assert!(
            (p[0] - vertex).abs() <= 1e-6,
            "solver {} vs refined grid {}",
            p[0],
            vertex
        );
    }

    /// Coincident steps: with ell_t = m_t and w_t = W_t the corrected
    /// surrogate gradient collapses to m_t, so the descent step reproduces
    /// the optimistic step exactly. On a constant Dirac script all workers
    /// coincide, so the recursion `w_{t+1} = prox(c, eta_k 8 G^2, w_t)`
    /// must hold for every worker from round 2 on.
    #[test]
    fn constant_script_worker_recursion() {
        use crate::environments::{EnvKindSpec, EnvSpec, FamilySpec};
        use crate::harness::drive_episode;
        let c = vec![0.4, -0.1];
        let spec = EnvSpec {
            domain: Domain::ball(vec![0.0, 0.0], 1.0).unwrap(),
            family: FamilySpec::Linear,
            env: EnvKindSpec::AdversarialScript {
                points: vec![c.clone()],
            },
        };
        let mut env = spec.build(12, 0, 0).unwrap();
        let g = env.family.g_bound;
        let mut learner = MsmwcLearner::new(env.domain.clone(), env.family.clone(), 12)
            .unwrap()
            .with_round_log();
        drive_episode(&mut learner, &mut env, "msmwc", 0, 0).unwrap();
        let rounds = learner.rounds();
        let etas = learner.grid().etas.clone();
        let domain = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        for t in 2..rounds.len() {
            for (k, eta) in etas.iter().enumerate() {
                // deviations vanish on the constant script, so A_t stays at
                // eta_k * 8 G^2 and the plays follow the simple recursion
                let a = eta * 8.0 * g * g;
                let expect = prox_step(&domain, &c, a, &rounds[t - 1].worker_plays[k]).unwrap();
                assert!(
                    linalg::dist(&rounds[t].worker_plays[k], &expect) < 1e-12,
                    "worker {k} broke the coincident-step recursion at t={t}"
                );
            }
        }
    }
}
