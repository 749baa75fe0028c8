//! Episode execution, comparator computation, regret accounting, and the
//! paired-gradient diagnostics. Episodes are deterministic given the master
//! seed and episode index, and independent across episodes, so Monte-Carlo
//! sweeps parallelize over seeds without changing any reported number.

use rayon::prelude::*;

use crate::environments::{EnvSpec, SeaEnvironment};
use crate::error::{Error, Result};
use crate::geometry::{linear_argmin, project, Domain};
use crate::learner::Learner;
use crate::linalg;
use crate::losses::{LossKind, Sample};
use crate::msmwc::MsmwcLearner;
use crate::optimistic::{OftrlLearner, OmdLearner};
use crate::stats::{kahan_sum, mean_ci, Stats};
use crate::strongly_convex::OftlScLearner;
use crate::trace::{RoundRecord, Trace};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Oftrl,
    Omd,
    OftlSc { mu: f64 },
    Msmwc,
    DynMeta,
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Oftrl => "oftrl",
            LearnerSpec::Omd => "omd",
            LearnerSpec::OftlSc { .. } => "oftl_sc",
            LearnerSpec::Msmwc => "msmwc",
            LearnerSpec::DynMeta => "dyn_meta",
        }
    }
}

pub fn build_learner(
    spec: LearnerSpec,
    domain: Domain,
    family: crate::losses::LossFamily,
    horizon: usize,
) -> Result<Box<dyn Learner>> {
    Ok(match spec {
        LearnerSpec::Oftrl => Box::new(OftrlLearner::new(domain, family)),
        LearnerSpec::Omd => Box::new(OmdLearner::new(domain, family)),
        LearnerSpec::OftlSc { mu } => {
            if mu <= 0.0 {
                return Err(Error::Config("oftl_sc requires mu > 0".into()));
            }
            Box::new(OftlScLearner::new(domain, family, mu))
        }
        LearnerSpec::Msmwc => Box::new(MsmwcLearner::new(domain, family, horizon)?),
        LearnerSpec::DynMeta => Box::new(crate::dyn_meta::DynMetaLearner::new(
            domain, family, horizon,
        )?),
    })
}

/// Run one full episode of the protocol with a freshly built learner.
pub fn run_episode(
    learner: LearnerSpec,
    env_spec: &EnvSpec,
    horizon: usize,
    master_seed: u64,
    episode: u64,
) -> Result<Trace> {
    Ok(run_episode_with_profile(learner, env_spec, horizon, master_seed, episode)?.0)
}

/// As [`run_episode`], also returning the environment's variance profile.
pub fn run_episode_with_profile(
    learner: LearnerSpec,
    env_spec: &EnvSpec,
    horizon: usize,
    master_seed: u64,
    episode: u64,
) -> Result<(Trace, crate::environments::VarianceProfile)> {
    let mut env = env_spec.build(horizon, master_seed, episode)?;
    let mut boxed = build_learner(learner, env.domain.clone(), env.family.clone(), horizon)?;
    let trace = drive_episode(&mut *boxed, &mut env, learner.name(), master_seed, episode)?;
    Ok((trace, env.variance_profile()))
}

/// Drive a caller-constructed learner (used by tests that need access to the
/// learner's internal round logs).
pub fn drive_episode(
    learner: &mut dyn Learner,
    env: &mut SeaEnvironment,
    learner_name: &str,
    master_seed: u64,
    episode: u64,
) -> Result<Trace> {
    let horizon = env.horizon;
    let wants_extra = learner.wants_extra_sample();
    let wrap = |round: usize| {
        move |e: Error| Error::Episode {
            seed: master_seed,
            round,
            source: Box::new(e),
        }
    };
    let mut rows = Vec::with_capacity(horizon);
    let mut prev: Option<Sample> = None;
    for t in 1..=horizon {
        let extra = if wants_extra && t >= 2 {
            Some(env.extra_sample(t).map_err(wrap(t))?)
        } else {
            None
        };
        let x = learner
            .play(t, prev.as_ref(), extra.as_ref())
            .map_err(wrap(t))?;
        if !env.domain.contains(&x) {
            return Err(Error::Episode {
                seed: master_seed,
                round: t,
                source: Box::new(Error::Config("learner played an infeasible point".into())),
            });
        }
        let (opt_point, optimism) = learner.optimism();
        let step_size = learner.step_size();
        let out = env.step(t, &x).map_err(wrap(t))?;
        let grad = env.family.grad(&x, &out.xi).map_err(wrap(t))?;
        let loss = env.family.eval(&x, &out.xi).map_err(wrap(t))?;
        let risk_minimizer = out.mean_grad.risk_minimizer(&env.domain);
        learner.observe(t, &x, &out.xi).map_err(wrap(t))?;
        rows.push(RoundRecord {
            t,
            x,
            optimism_point: opt_point,
            optimism,
            xi: out.xi,
            grad,
            step_size,
            loss,
            sigma_sq: out.sigma_sq,
            cap_sigma_sq: out.cap_sigma_sq,
            risk_minimizer,
        });
        prev = Some(rows.last().expect("just pushed").xi.clone());
    }
    Ok(Trace {
        rows,
        domain: env.domain.clone(),
        family: env.family.clone(),
        learner: learner_name.to_string(),
        env: env.kind_name().to_string(),
        seed: master_seed,
        episode,
    })
}

/// The gradient-space offset of one realized loss: `grad f_t(x) = A x + o_t`
/// with a family-constant `A`. Defined for the families whose per-round
/// gradients are affine in x with a shared linear part.
fn grad_offset(trace: &Trace, r: &RoundRecord) -> Result<Vec<f64>> {
    match (&trace.family.kind, &r.xi) {
        (LossKind::Linear, Sample::Point { v, .. }) => Ok(v.clone()),
        (LossKind::Linear, Sample::Corrupted { base, shift, .. }) => Ok(linalg::add(base, shift)),
        (LossKind::QuadraticTracking { scale }, Sample::Point { v, .. }) => {
            Ok(linalg::scale(v, -scale))
        }
        (LossKind::QuadraticTracking { scale }, Sample::Corrupted { base, shift, .. }) => {
            let mut o = linalg::scale(base, -scale);
            linalg::axpy(&mut o, 1.0, shift);
            Ok(o)
        }
        _ => Err(Error::IncompatibleSetup(
            "no affine gradient decomposition for this family".into(),
        )),
    }
}

/// `argmin_u sum_t f(u, xi_t)`: closed form for linear, quadratic, and the
/// lower-bound oracle; projected gradient descent otherwise.
pub fn best_fixed_comparator(trace: &Trace) -> Result<Vec<f64>> {
    let t_f = trace.rows.len() as f64;
    let dim = trace.domain.dim();
    match &trace.family.kind {
        LossKind::QuadraticTracking { scale } => {
            // sum (a/2)||u - b_t||^2 + <v_t, u> minimized at
            // project(mean(b) - sum(v) / (a T))
            let mut mean = linalg::zeros(dim);
            let mut shift_sum = linalg::zeros(dim);
            for r in &trace.rows {
                match &r.xi {
                    Sample::Point { v, .. } => linalg::axpy(&mut mean, 1.0 / t_f, v),
                    Sample::Corrupted { base, shift, .. } => {
                        linalg::axpy(&mut mean, 1.0 / t_f, base);
                        linalg::axpy(&mut shift_sum, 1.0, shift);
                    }
                    Sample::Coin { .. } => {
                        return Err(Error::IncompatibleSetup(
                            "coin samples under a quadratic family".into(),
                        ))
                    }
                }
            }
            let target: Vec<f64> = mean
                .iter()
                .zip(&shift_sum)
                .map(|(m, s)| m - s / (scale * t_f))
                .collect();
            project(&trace.domain, &target)
        }
        LossKind::Linear => {
            let mut s = linalg::zeros(dim);
            for r in &trace.rows {
                linalg::axpy(&mut s, 1.0, &grad_offset(trace, r)?);
            }
            if linalg::norm(&s) == 0.0 {
                Ok(trace.domain.center())
            } else {
                linear_argmin(&trace.domain, &s, &trace.domain.center())
            }
        }
        LossKind::GradientOracle { .. } => {
            // cumulative comparator loss is (sum of coins) * cz(u) with cz
            // increasing on the positive interval
            let coin_sum: f64 = trace
                .rows
                .iter()
                .map(|r| match &r.xi {
                    Sample::Coin {
                        odd: true, sign, ..
                    } => *sign,
                    _ => 0.0,
                })
                .sum();
            let (a, b) = match &trace.domain {
                Domain::Box { lo, hi } => (lo[0], hi[0]),
                _ => return Err(Error::InvalidLowerBoundDomain("interval expected".into())),
            };
            Ok(if coin_sum > 0.0 {
                vec![a]
            } else if coin_sum < 0.0 {
                vec![b]
            } else {
                trace.domain.center()
            })
        }
        LossKind::LogSmooth => {
            // convex empirical risk: projected gradient descent to
            // first-order stationarity
            let grad_total = |u: &[f64]| -> Result<Vec<f64>> {
                let mut g = linalg::zeros(dim);
                for r in &trace.rows {
                    linalg::axpy(&mut g, 1.0, &trace.family.grad(u, &r.xi)?);
                }
                Ok(g)
            };
            // smoothness of the empirical sum bounds the safe step
            let l_emp: f64 = trace
                .rows
                .iter()
                .map(|r| match &r.xi {
                    Sample::Point { v, .. } => linalg::norm_sq(v) / 4.0,
                    _ => 0.0,
                })
                .sum();
            let step = 1.0 / l_emp.max(1e-12);
            let mut u = trace.domain.center();
            for _ in 0..1_000_000 {
                let g = grad_total(&u)?;
                let next = project(&trace.domain, &linalg::sub(&u, &linalg::scale(&g, step)))?;
                let move_norm = linalg::dist(&next, &u) / step;
                u = next;
                if move_norm <= 1e-9 {
                    return Ok(u);
                }
            }
            Err(Error::ComparatorSolveFailure(linalg::norm(&grad_total(
                &u,
            )?)))
        }
    }
}

/// Realized-loss regret at each prefix against that prefix's own best fixed
/// comparator. Exact closed forms only; no iterative solves.
pub fn prefix_regrets(trace: &Trace) -> Result<Vec<f64>> {
    let dim = trace.domain.dim();
    let mut out = Vec::with_capacity(trace.rows.len());
    match &trace.family.kind {
        LossKind::Linear => {
            let mut s = linalg::zeros(dim);
            let mut cum_loss = 0.0;
            for r in &trace.rows {
                linalg::axpy(&mut s, 1.0, &grad_offset(trace, r)?);
                cum_loss += r.loss;
                let best = if linalg::norm(&s) == 0.0 {
                    0.0
                } else {
                    let u = linear_argmin(&trace.domain, &s, &trace.domain.center())?;
                    linalg::dot(&s, &u)
                };
                out.push(cum_loss - best);
            }
        }
        LossKind::QuadraticTracking { scale } => {
            // comparator value at prefix t:
            //   (a/2)(t ||u||^2 - 2 <u, B_t> + S_t) + <V_t, u>
            let mut b_sum = linalg::zeros(dim);
            let mut v_sum = linalg::zeros(dim);
            let mut sq_sum = 0.0;
            let mut cum_loss = 0.0;
            for (i, r) in trace.rows.iter().enumerate() {
                let t = (i + 1) as f64;
                let (base, shift) = match &r.xi {
                    Sample::Point { v, .. } => (v, None),
                    Sample::Corrupted { base, shift, .. } => (base, Some(shift)),
                    Sample::Coin { .. } => {
                        return Err(Error::IncompatibleSetup(
                            "coin samples under a quadratic family".into(),
                        ))
                    }
                };
                linalg::axpy(&mut b_sum, 1.0, base);
                if let Some(sh) = shift {
                    linalg::axpy(&mut v_sum, 1.0, sh);
                }
                sq_sum += linalg::norm_sq(base);
                cum_loss += r.loss;
                let target: Vec<f64> = b_sum
                    .iter()
                    .zip(&v_sum)
                    .map(|(b, v)| (b - v / scale) / t)
                    .collect();
                let u = project(&trace.domain, &target)?;
                let best = 0.5
                    * scale
                    * (t * linalg::norm_sq(&u) - 2.0 * linalg::dot(&u, &b_sum) + sq_sum)
                    + linalg::dot(&v_sum, &u);
                out.push(cum_loss - best);
            }
        }
        LossKind::GradientOracle { g, b } => {
            let (a_lo, b_hi) = match &trace.domain {
                Domain::Box { lo, hi } => (lo[0], hi[0]),
                _ => return Err(Error::InvalidLowerBoundDomain("interval expected".into())),
            };
            let cz = |u: f64| g * u * u / (4.0 * b);
            let mut coin_sum = 0.0;
            let mut cum_loss = 0.0;
            for r in &trace.rows {
                if let Sample::Coin {
                    odd: true, sign, ..
                } = &r.xi
                {
                    coin_sum += sign;
                }
                cum_loss += r.loss;
                let best = (coin_sum * cz(a_lo)).min(coin_sum * cz(b_hi));
                out.push(cum_loss - best);
            }
        }
        LossKind::LogSmooth => {
            return Err(Error::IncompatibleSetup(
                "prefix regrets are only materialized for closed-form families".into(),
            ))
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExpectedRegret {
    pub stats: Stats,
    pub per_seed: Vec<f64>,
}

/// Mean realized regret versus the hindsight-best fixed comparator across
/// independent seeded episodes.
pub fn expected_regret(
    learner: LearnerSpec,
    env_spec: &EnvSpec,
    horizon: usize,
    n_seeds: usize,
    master_seed: u64,
) -> Result<ExpectedRegret> {
    if n_seeds < 2 {
        return Err(Error::Config("expected_regret needs n_seeds >= 2".into()));
    }
    let per_seed = episode_values(n_seeds, |episode| {
        let trace = run_episode(learner, env_spec, horizon, master_seed, episode)?;
        let u = best_fixed_comparator(&trace)?;
        trace.regret(&u)
    })?;
    Ok(ExpectedRegret {
        stats: mean_ci(&per_seed),
        per_seed,
    })
}

/// Map episodes 0..n in parallel and return values ordered by episode, so
/// aggregation never depends on thread scheduling.
pub fn episode_values<F>(n: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(f)
        .collect::<Result<Vec<f64>>>()
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct VariationDiagnostics {
    /// `max_x sum_t ||grad f_t(x) - mean_s grad f_s(x)||^2`
    pub var_t: f64,
    /// `sum_{t>=2} sup_x ||grad f_t(x) - grad f_{t-1}(x)||^2`
    pub d2: f64,
    pub sigma_cum: f64,
    pub cap_sigma_cum: f64,
}

/// Empirical gradual-variation quantities compared against the oracle
/// cumulative variance/variation. Exact for families whose gradient
/// deviations are x-independent; grid-maximized for log-smooth losses.
pub fn variation_diagnostics(trace: &Trace) -> Result<VariationDiagnostics> {
    let sigma_cum: f64 = kahan_sum(trace.rows.iter().map(|r| r.sigma_sq));
    let cap_sigma_cum: f64 = kahan_sum(trace.rows.iter().skip(1).map(|r| r.cap_sigma_sq));
    let (var_t, d2) = match &trace.family.kind {
        LossKind::Linear | LossKind::QuadraticTracking { .. } => {
            let offsets: Vec<Vec<f64>> = trace
                .rows
                .iter()
                .map(|r| grad_offset(trace, r))
                .collect::<Result<_>>()?;
            let dim = trace.domain.dim();
            let mut mean = linalg::zeros(dim);
            for o in &offsets {
                linalg::axpy(&mut mean, 1.0 / offsets.len() as f64, o);
            }
            let var_t = kahan_sum(offsets.iter().map(|o| linalg::dist_sq(o, &mean)));
            let d2 = kahan_sum(offsets.windows(2).map(|w| linalg::dist_sq(&w[1], &w[0])));
            (var_t, d2)
        }
        LossKind::GradientOracle { g, b } => {
            // per-round gradient slope s_t = coin_t g/(2b), x in [a, b]
            let slopes: Vec<f64> = trace
                .rows
                .iter()
                .map(|r| match &r.xi {
                    Sample::Coin {
                        odd: true, sign, ..
                    } => sign * g / (2.0 * b),
                    _ => 0.0,
                })
                .collect();
            let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
            let var_t = slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() * b * b;
            let d2 = slopes
                .windows(2)
                .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
                .sum::<f64>()
                * b
                * b;
            (var_t, d2)
        }
        LossKind::LogSmooth => {
            if trace.domain.dim() > 2 {
                return Err(Error::IncompatibleSetup(
                    "grid diagnostics need dim <= 2".into(),
                ));
            }
            let grid = trace.domain.grid(100);
            let mut var_t = 0.0f64;
            for x in &grid {
                let grads: Vec<Vec<f64>> = trace
                    .rows
                    .iter()
                    .map(|r| trace.family.grad(x, &r.xi))
                    .collect::<Result<_>>()?;
                let mut mean = linalg::zeros(x.len());
                for gr in &grads {
                    linalg::axpy(&mut mean, 1.0 / grads.len() as f64, gr);
                }
                let v = kahan_sum(grads.iter().map(|gr| linalg::dist_sq(gr, &mean)));
                var_t = var_t.max(v);
            }
            let mut d2 = 0.0;
            for w in trace.rows.windows(2) {
                let mut sup = 0.0f64;
                for x in &grid {
                    let a = trace.family.grad(x, &w[1].xi)?;
                    let b = trace.family.grad(x, &w[0].xi)?;
                    sup = sup.max(linalg::dist_sq(&a, &b));
                }
                d2 += sup;
            }
            (var_t, d2)
        }
    };
    Ok(VariationDiagnostics {
        var_t,
        d2,
        sigma_cum,
        cap_sigma_cum,
    })
}

/// Paired-gradient inequality residual for one trace:
///
/// ```text
/// sum_t ||g_t - m_t||^2  <=  8 sum sigma_t^2 + 4 sum Sigma_t^2
///                            + 4 L^2 sum ||x_t - y_t||^2 + 4 L^2 D^2
/// ```
///
/// where `(y_t, m_t)` is the optimism pair the learner actually used and the
/// `Sigma` sum keeps its t = 1 boundary term. Returns `rhs - lhs`; the
/// inequality holds in expectation over episodes.
pub fn prop_b6_check(trace: &Trace) -> f64 {
    let lhs = kahan_sum(
        trace
            .rows
            .iter()
            .map(|r| linalg::dist_sq(&r.grad, &r.optimism)),
    );
    let l = trace.family.smoothness;
    let d = trace.domain.diameter();
    let sigma_cum: f64 = kahan_sum(trace.rows.iter().map(|r| r.sigma_sq));
    let cap_sigma_cum_full: f64 = kahan_sum(trace.rows.iter().map(|r| r.cap_sigma_sq));
    let path: f64 = kahan_sum(
        trace
            .rows
            .iter()
            .map(|r| linalg::dist_sq(&r.x, &r.optimism_point)),
    );
    let rhs = 8.0 * sigma_cum + 4.0 * cap_sigma_cum_full + 4.0 * l * l * path + 4.0 * l * l * d * d;
    rhs - lhs
}
