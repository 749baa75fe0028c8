//! Optimistic follow-the-leader on quadratic surrogate losses: with a known
//! strong-convexity parameter the regret grows logarithmically, with the
//! noise variance (not the gradient bound) as the leading factor.
//!
//! ```bash
//! cargo run --release --example strongly_convex
//! ```

use optimistic_oco::bounds::{bound_value, BoundParams, TheoremTag};
use optimistic_oco::environments::{EnvKindSpec, EnvSpec, FamilySpec};
use optimistic_oco::geometry::Domain;
use optimistic_oco::harness::{expected_regret, LearnerSpec};
use optimistic_oco::stats::linfit;

fn main() {
    let spec = EnvSpec {
        domain: Domain::ball(vec![0.0, 0.0], 1.0).unwrap(),
        family: FamilySpec::Quadratic { scale: 1.0 }, // mu = L = 1
        env: EnvKindSpec::Iid {
            mean: vec![0.3, -0.2],
            sigma: 0.3,
        },
    };
    let env = spec.build(1, 0, 0).unwrap();
    let sig_sq = env.declared_sigma_sq();
    let g = env.family.g_bound;
    println!("i.i.d. quadratic, mu = L = 1, sigma^2 = {sig_sq:.4}, G = {g:.3}");
    println!("{:>8} {:>14} {:>14}", "T", "mean regret", "log-T bound");

    let mut ln_t = Vec::new();
    let mut means = Vec::new();
    for k in 6..=13u32 {
        let t = 1usize << k;
        let er = expected_regret(LearnerSpec::OftlSc { mu: 1.0 }, &spec, t, 200, 0).unwrap();
        let p = BoundParams {
            d: 2.0,
            g,
            l: 1.0,
            mu: 1.0,
            horizon: t as f64,
            sigma_max_sq: sig_sq,
            ..Default::default()
        };
        println!(
            "{:>8} {:>14.4} {:>14.3}",
            t,
            er.stats.mean,
            bound_value(TheoremTag::Thm4, &p).unwrap()
        );
        ln_t.push((t as f64).ln());
        means.push(er.stats.mean);
    }
    let fit = linfit(&ln_t, &means);
    println!(
        "\nmean regret vs ln T: slope {:.4} per nat, R^2 {:.4} (log growth)",
        fit.slope, fit.r2
    );
}
