//! Statistical checks of the environment zoo: declared variance oracles are
//! honest upper bounds, gradient bounds hold almost surely, and the
//! independent-sample channel reproduces the previous round's law.

use optimistic_oco::environments::{EnvKindSpec, EnvSpec, FamilySpec, SeaEnvironment};
use optimistic_oco::geometry::Domain;
use optimistic_oco::harness::{run_episode, variation_diagnostics, LearnerSpec};
use optimistic_oco::linalg;
use optimistic_oco::losses::Sample;
use optimistic_oco::oracles::{chi_square_q99, chi_square_uniform};
use optimistic_oco::rng::{stream, StreamRole};

fn ball2() -> Domain {
    Domain::ball(vec![0.0, 0.0], 1.0).unwrap()
}

fn all_kinds(t: usize) -> Vec<(&'static str, EnvSpec)> {
    vec![
        (
            "iid",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Quadratic { scale: 1.0 },
                env: EnvKindSpec::Iid {
                    mean: vec![0.3, -0.2],
                    sigma: 0.2,
                },
            },
        ),
        (
            "adversarial",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Linear,
                env: EnvKindSpec::Adversarial { magnitude: 1.0 },
            },
        ),
        (
            "corrupted",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Quadratic { scale: 1.0 },
                env: EnvKindSpec::CorruptedIid {
                    mean: vec![0.3, -0.2],
                    sigma: 0.15,
                    budget: 16.0,
                },
            },
        ),
        (
            "rom",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Quadratic { scale: 1.0 },
                env: EnvKindSpec::Rom { n: t, passes: 1 },
            },
        ),
        (
            "drifting",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Quadratic { scale: 1.0 },
                env: EnvKindSpec::Drifting {
                    eps: 0.01,
                    sigma: 0.1,
                },
            },
        ),
        (
            "switching",
            EnvSpec {
                domain: ball2(),
                family: FamilySpec::Quadratic { scale: 1.0 },
                env: EnvKindSpec::Switching {
                    switches: 4,
                    sigma: 0.1,
                },
            },
        ),
        (
            "rademacher_lb",
            EnvSpec {
                domain: Domain::interval(1.0, 2.0).unwrap(),
                family: FamilySpec::Linear,
                env: EnvKindSpec::RademacherLb { g: 1.0 },
            },
        ),
        (
            "iid_log_smooth",
            EnvSpec {
                domain: Domain::interval(-1.0, 1.0).unwrap(),
                family: FamilySpec::LogSmooth,
                env: EnvKindSpec::Iid {
                    mean: vec![0.4],
                    sigma: 0.3,
                },
            },
        ),
    ]
}

/// Monte-Carlo estimate of `sup_x E||grad f(x, xi) - grad F_t(x)||^2` on a
/// 100-point grid stays within 5% of the declared per-round value.
#[test]
fn declared_sigma_is_an_upper_bound() {
    let t_max = 64usize;
    for (name, spec) in all_kinds(t_max) {
        let mut env = spec.build(t_max, 17, 0).unwrap();
        let domain = env.domain.clone();
        let family = env.family.clone();
        let grid = domain.grid(10); // 100 points in 2-D, 10 in 1-D
        let mut mc_rng = stream(99, 0, StreamRole::Setup);
        let x_play = domain.center();
        for t in 1..=t_max {
            let out = env.step(t, &x_play).unwrap();
            // spot-check three rounds per environment
            if !(t == 1 || t == t_max / 2 || t == t_max) {
                continue;
            }
            let n = 10_000usize;
            let pool = env.pool_points().to_vec();
            let draws: Vec<Sample> = (0..n)
                .map(|i| out.dist.sample(&mut mc_rng, &pool, i as u64))
                .collect();
            let mut worst = 0.0f64;
            for x in &grid {
                let grads: Vec<Vec<f64>> =
                    draws.iter().map(|xi| family.grad(x, xi).unwrap()).collect();
                let mean = match out.mean_grad.at(x) {
                    Some(m) => m,
                    None => {
                        let mut m = linalg::zeros(x.len());
                        for g in &grads {
                            linalg::axpy(&mut m, 1.0 / n as f64, g);
                        }
                        m
                    }
                };
                let var = grads.iter().map(|g| linalg::dist_sq(g, &mean)).sum::<f64>() / n as f64;
                worst = worst.max(var);
            }
            assert!(
                worst <= out.sigma_sq * 1.05 + 1e-12,
                "{name} t={t}: MC variance {worst} exceeds declared {}",
                out.sigma_sq
            );
        }
    }
}

/// A1: gradients stay below the declared almost-sure bound over 10^4 random
/// feasible points and fresh samples.
#[test]
fn gradient_bound_holds_almost_surely() {
    use rand::SeedableRng;
    let t_max = 100usize;
    for (name, spec) in all_kinds(t_max) {
        let mut env = spec.build(t_max, 23, 1).unwrap();
        let domain = env.domain.clone();
        let family = env.family.clone();
        let g_bound = family.g_bound;
        let mut point_rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x_play = domain.center();
        let mut checks = 0usize;
        for t in 1..=t_max {
            let out = env.step(t, &x_play).unwrap();
            for _ in 0..100 {
                let x = domain.random_point(&mut point_rng);
                let g = family.grad(&x, &out.xi).unwrap();
                assert!(
                    linalg::norm(&g) <= g_bound * (1.0 + 1e-12),
                    "{name}: ||grad|| {} > declared {g_bound}",
                    linalg::norm(&g)
                );
                checks += 1;
            }
        }
        assert_eq!(checks, 10_000);
    }
}

/// The independent-sample channel of a random-order environment draws
/// uniformly from the previous round's support (chi-square at p > 0.01).
#[test]
fn rom_extra_sample_law_matches_support() {
    let n = 12usize;
    let spec = EnvSpec {
        domain: ball2(),
        family: FamilySpec::Quadratic { scale: 1.0 },
        env: EnvKindSpec::Rom { n, passes: 1 },
    };
    let mut env = spec.build(n, 31, 0).unwrap();
    let x = env.domain.center();
    let drawn = env.step(1, &x).unwrap().xi.id() as usize;
    let support = env.rom_support().unwrap();
    assert_eq!(support.len(), n - 1);
    // law of the round-1 distribution: uniform over all n indices
    let mut counts = vec![0usize; n];
    for _ in 0..100_000 {
        let s = env.extra_sample(2).unwrap();
        counts[s.id() as usize] += 1;
    }
    let stat = chi_square_uniform(&counts);
    assert!(
        stat <= chi_square_q99(n - 1),
        "chi-square {stat} too large for uniformity over the support"
    );
    let _ = drawn;
}

/// For i.i.d. environments the independent sample has the same law as the
/// main stream: compare first and second moments.
#[test]
fn iid_extra_sample_matches_main_law() {
    let spec = EnvSpec {
        domain: ball2(),
        family: FamilySpec::Quadratic { scale: 1.0 },
        env: EnvKindSpec::Iid {
            mean: vec![0.3, -0.2],
            sigma: 0.25,
        },
    };
    let t_max = 40_000usize;
    let mut env = spec.build(t_max, 41, 0).unwrap();
    let x = env.domain.center();
    let mut main_mean = vec![0.0; 2];
    let mut main_sq = 0.0;
    let mut extra_mean = vec![0.0; 2];
    let mut extra_sq = 0.0;
    let n = t_max - 1;
    env.step(1, &x).unwrap();
    for t in 2..=t_max {
        let e = env.extra_sample(t).unwrap();
        if let Sample::Point { v, .. } = &e {
            linalg::axpy(&mut extra_mean, 1.0 / n as f64, v);
            extra_sq += linalg::dist_sq(v, &[0.3, -0.2]) / n as f64;
        }
        let o = env.step(t, &x).unwrap();
        if let Sample::Point { v, .. } = &o.xi {
            linalg::axpy(&mut main_mean, 1.0 / n as f64, v);
            main_sq += linalg::dist_sq(v, &[0.3, -0.2]) / n as f64;
        }
    }
    assert!(linalg::dist(&main_mean, &extra_mean) < 0.01);
    assert!((main_sq - extra_sq).abs() / main_sq < 0.05);
}

/// A Dirac environment's independent sample is the previous point itself.
#[test]
fn adversarial_extra_sample_is_previous_point() {
    let spec = EnvSpec {
        domain: ball2(),
        family: FamilySpec::Linear,
        env: EnvKindSpec::Adversarial { magnitude: 1.0 },
    };
    let mut env = spec.build(8, 3, 0).unwrap();
    let x = env.domain.center();
    let mut prev: Option<Sample> = None;
    for t in 1..=8 {
        if t >= 2 {
            let e = env.extra_sample(t).unwrap();
            match (&e, prev.as_ref().unwrap()) {
                (Sample::Point { v: a, .. }, Sample::Point { v: b, .. }) => {
                    assert_eq!(a, b);
                }
                _ => panic!("unexpected sample kinds"),
            }
        }
        prev = Some(env.step(t, &x).unwrap().xi);
    }
}

/// Gradual-variation diagnostics on a distribution switch: the empirical
/// quantities dominate the oracle cumulative variance/variation by the
/// documented factors, and by a wide margin on the switch construction.
#[test]
fn variation_diagnostics_switch_ordering() {
    // two i.i.d. phases with opposite means, glued into one trace
    let t_half = 128usize;
    let mk = |mean: Vec<f64>| EnvSpec {
        domain: ball2(),
        family: FamilySpec::Linear,
        env: EnvKindSpec::Iid { mean, sigma: 0.1 },
    };
    let a = run_episode(LearnerSpec::Oftrl, &mk(vec![-0.6, 0.0]), t_half, 7, 0).unwrap();
    let b = run_episode(LearnerSpec::Oftrl, &mk(vec![0.6, 0.0]), t_half, 7, 1).unwrap();
    let mut glued = a.clone();
    let mut tail = b.rows.clone();
    // the switch round's variation oracle: ||mean_b - mean_a||^2
    tail[0].cap_sigma_sq = linalg::dist_sq(&[0.6, 0.0], &[-0.6, 0.0]);
    glued.rows.extend(tail);
    for (i, r) in glued.rows.iter_mut().enumerate() {
        r.t = i + 1;
    }
    let d = variation_diagnostics(&glued).unwrap();
    let oracle = d.sigma_cum + d.cap_sigma_cum;
    assert!(
        d.var_t >= oracle / 5.0,
        "Var_T {} vs oracle {}",
        d.var_t,
        oracle
    );
    assert!(d.d2 >= oracle / 2.0, "D2 {} vs oracle {}", d.d2, oracle);
    // the switch construction makes Var_T much larger than the oracle pair
    assert!(
        d.var_t > 2.0 * oracle,
        "switch construction should separate Var_T ({}) from the oracle ({oracle})",
        d.var_t
    );
}

/// Rounds must be played in order and within the horizon.
#[test]
fn protocol_violations_are_reported() {
    let spec = EnvSpec {
        domain: ball2(),
        family: FamilySpec::Quadratic { scale: 1.0 },
        env: EnvKindSpec::Iid {
            mean: vec![0.0, 0.0],
            sigma: 0.1,
        },
    };
    let mut env: SeaEnvironment = spec.build(4, 1, 0).unwrap();
    let x = env.domain.center();
    for t in 1..=4 {
        env.step(t, &x).unwrap();
    }
    assert!(env.step(5, &x).is_err(), "stepping past the horizon");
}
