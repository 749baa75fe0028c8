//! One learner across the whole difficulty dial: the adaptive optimistic
//! learner is run unchanged against every environment kind, and its regret
//! tracks the environment's stochastic variance and adversarial variation
//! rather than the worst-case gradient bound.
//!
//! ```bash
//! cargo run --release --example interpolation_sweep
//! ```

use optimistic_oco::environments::{EnvKindSpec, EnvSpec, FamilySpec};
use optimistic_oco::geometry::Domain;
use optimistic_oco::harness::{best_fixed_comparator, run_episode};
use optimistic_oco::harness::{episode_values, run_episode_with_profile, LearnerSpec};
use optimistic_oco::stats::mean_ci;

fn main() {
    let ball = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
    let quad = FamilySpec::Quadratic { scale: 1.0 };
    let t = 512usize;
    let kinds: Vec<(&str, EnvSpec)> = vec![
        (
            "iid sigma=0",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::Iid {
                    mean: vec![0.3, -0.2],
                    sigma: 0.0,
                },
            },
        ),
        (
            "iid sigma=0.2",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::Iid {
                    mean: vec![0.3, -0.2],
                    sigma: 0.2,
                },
            },
        ),
        (
            "corrupted C=32",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::CorruptedIid {
                    mean: vec![0.3, -0.2],
                    sigma: 0.2,
                    budget: 32.0,
                },
            },
        ),
        (
            "rom n=512",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::Rom { n: t, passes: 1 },
            },
        ),
        (
            "drifting eps=0.01",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::Drifting {
                    eps: 0.01,
                    sigma: 0.2,
                },
            },
        ),
        (
            "switching c=5",
            EnvSpec {
                domain: ball.clone(),
                family: quad.clone(),
                env: EnvKindSpec::Switching {
                    switches: 5,
                    sigma: 0.2,
                },
            },
        ),
        (
            "adversarial",
            EnvSpec {
                domain: ball,
                family: FamilySpec::Linear,
                env: EnvKindSpec::Adversarial { magnitude: 1.0 },
            },
        ),
    ];

    println!("adaptive OFTRL, T = {t}, 60 seeds per environment");
    println!(
        "{:<18} {:>12} {:>12} {:>12}",
        "environment", "mean regret", "sigma_bar", "Sigma_bar"
    );
    for (name, spec) in kinds {
        let regrets = episode_values(60, |ep| {
            let trace = run_episode(LearnerSpec::Oftrl, &spec, t, 2, ep)?;
            let u = best_fixed_comparator(&trace)?;
            trace.regret(&u)
        })
        .unwrap();
        let (_, prof) = run_episode_with_profile(LearnerSpec::Oftrl, &spec, t, 2, 0).unwrap();
        println!(
            "{:<18} {:>12.3} {:>12.4} {:>12.4}",
            name,
            mean_ci(&regrets).mean,
            prof.sigma_bar,
            prof.cap_sigma_bar
        );
    }
}
