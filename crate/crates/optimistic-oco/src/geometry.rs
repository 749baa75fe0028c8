//! Feasible sets and the shared proximal-step primitive.
//!
//! Only axis-aligned boxes and Euclidean balls are supported: both admit
//! closed-form projections, which keeps every learner update exact. The
//! diameter `D` that step-size rules consume comes from here.

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance for boundary classification.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !linalg::all_finite(&center) || !radius.is_finite() {
            return Err(Error::NonFinite("domain::ball"));
        }
        if radius <= 0.0 {
            return Err(Error::Config("ball radius must be positive".into()));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn rect(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if !linalg::all_finite(&lo) || !linalg::all_finite(&hi) {
            return Err(Error::NonFinite("domain::rect"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Err(Error::Config("box requires lo[i] < hi[i] for all i".into()));
        }
        Ok(Domain::Box { lo, hi })
    }

    /// 1-D interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::rect(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { center, .. } => center.len(),
        }
    }

    /// `sup_{x,y} ||x - y||`: `2r` for a ball, `||hi - lo||` for a box.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Box { lo, hi } => linalg::dist(hi, lo),
            Domain::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            Domain::Ball { center, .. } => center.clone(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Box { lo, hi } => p.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| {
                let tol = BOUNDARY_TOL * (1.0 + l.abs().max(h.abs()));
                *x >= l - tol && *x <= h + tol
            }),
            Domain::Ball { center, radius } => {
                linalg::dist(p, center) <= radius * (1.0 + BOUNDARY_TOL)
            }
        }
    }

    /// `sup_{x in domain} ||x - p||`, exact for both kinds.
    pub fn max_dist(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Box { lo, hi } => {
                let mut s = 0.0;
                for ((l, h), x) in lo.iter().zip(hi).zip(p) {
                    let d = (x - l).abs().max((x - h).abs());
                    s += d * d;
                }
                s.sqrt()
            }
            Domain::Ball { center, radius } => linalg::dist(center, p) + radius,
        }
    }

    /// Uniform-ish feasible point, used by diagnostics and tests.
    pub fn random_point<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| rng.random_range(*l..=*h))
                .collect(),
            Domain::Ball { center, radius } => {
                // Rejection from the bounding box.
                loop {
                    let p: Vec<f64> = center
                        .iter()
                        .map(|c| rng.random_range(c - radius..=c + radius))
                        .collect();
                    if linalg::dist(&p, center) <= *radius {
                        return p;
                    }
                }
            }
        }
    }

    /// Regular grid with `per_axis` points per axis (diagnostics; dim <= 2).
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        assert!(self.dim() <= 2, "grids are only materialized for dim <= 2");
        let (lo, hi) = match self {
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        };
        let axis = |i: usize| -> Vec<f64> {
            (0..per_axis)
                .map(|k| lo[i] + (hi[i] - lo[i]) * k as f64 / (per_axis - 1) as f64)
                .collect()
        };
        let mut pts = Vec::new();
        if self.dim() == 1 {
            for x in axis(0) {
                pts.push(vec![x]);
            }
        } else {
            for x in axis(0) {
                for y in axis(1) {
                    pts.push(vec![x, y]);
                }
            }
        }
        match self {
            Domain::Ball { .. } => pts
                .into_iter()
                .map(|p| project(self, &p).expect("finite grid point"))
                .collect(),
            Domain::Box { .. } => pts,
        }
    }
}

/// Euclidean projection onto the domain. Idempotent and non-expansive.
pub fn project(domain: &Domain, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: p.len(),
        });
    }
    if !linalg::all_finite(p) {
        return Err(Error::NonFinite("project"));
    }
    Ok(match domain {
        Domain::Box { lo, hi } => p
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (l, h))| x.clamp(*l, *h))
            .collect(),
        Domain::Ball { center, radius } => {
            let d = linalg::dist(p, center);
            if d <= *radius {
                p.to_vec()
            } else {
                let s = radius / d;
                center.iter().zip(p).map(|(c, x)| c + s * (x - c)).collect()
            }
        }
    })
}

/// `argmin_{x in domain} <x, theta> + (weight/2) ||x - center||^2`,
/// realized as `project(center - theta / weight)`.
///
/// `weight == 0` with a nonzero linear term has no bounded-objective
/// minimizer in the unconstrained sense and signals [`Error::UnboundedObjective`];
/// callers that run with an infinite step size handle that case themselves.
pub fn prox_step(domain: &Domain, theta: &[f64], weight: f64, center: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != domain.dim() || center.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: theta.len().max(center.len()),
        });
    }
    if !linalg::all_finite(theta) || !linalg::all_finite(center) || !weight.is_finite() {
        return Err(Error::NonFinite("prox_step"));
    }
    if weight < 0.0 {
        return Err(Error::Config("prox_step weight must be nonnegative".into()));
    }
    if weight == 0.0 {
        if linalg::norm(theta) == 0.0 {
            return project(domain, center);
        }
        return Err(Error::UnboundedObjective);
    }
    let target: Vec<f64> = center
        .iter()
        .zip(theta)
        .map(|(c, t)| c - t / weight)
        .collect();
    project(domain, &target)
}

/// `argmin_{x in domain} <x, lin>` for a nonzero `lin`; free coordinates of a
/// box (where `lin` vanishes) snap to the clamped `tie` point.
pub fn linear_argmin(domain: &Domain, lin: &[f64], tie: &[f64]) -> Result<Vec<f64>> {
    if lin.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: lin.len(),
        });
    }
    Ok(match domain {
        Domain::Box { lo, hi } => lin
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if *g > 0.0 {
                    lo[i]
                } else if *g < 0.0 {
                    hi[i]
                } else {
                    tie[i].clamp(lo[i], hi[i])
                }
            })
            .collect(),
        Domain::Ball { center, radius } => {
            let n = linalg::norm(lin);
            if n == 0.0 {
                project(domain, tie)?
            } else {
                center
                    .iter()
                    .zip(lin)
                    .map(|(c, g)| c - radius * g / n)
                    .collect()
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_ball() -> Domain {
        Domain::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    fn unit_box() -> Domain {
        Domain::rect(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn project_ball_radial_scaling() {
        let p = project(&unit_ball(), &[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15);
        assert!((p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn project_box_coordinate_clamp() {
        let p = project(&unit_box(), &[2.0, -0.5]).unwrap();
        assert_eq!(p, vec![1.0, -0.5]);
    }

    #[test]
    fn project_inside_is_identity() {
        let p = vec![0.3, -0.4];
        assert_eq!(project(&unit_ball(), &p).unwrap(), p);
        assert_eq!(project(&unit_box(), &p).unwrap(), p);
    }

    #[test]
    fn project_rejects_bad_input() {
        assert!(matches!(
            project(&unit_ball(), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            project(&unit_ball(), &[f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn prox_step_boundary_case() {
        let x = prox_step(&unit_ball(), &[2.0, 0.0], 2.0, &[0.0, 0.0]).unwrap();
        assert!(linalg::dist(&x, &[-1.0, 0.0]) < 1e-15);
    }

    #[test]
    fn prox_step_zero_theta_returns_center() {
        let c = vec![0.2, 0.1];
        let x = prox_step(&unit_ball(), &[0.0, 0.0], 5.0, &c).unwrap();
        assert_eq!(x, c);
        // weight = 0 with zero theta degrades to projection of the center
        let x = prox_step(&unit_ball(), &[0.0, 0.0], 0.0, &[3.0, 4.0]).unwrap();
        assert!(linalg::dist(&x, &[0.6, 0.8]) < 1e-15);
    }

    #[test]
    fn prox_step_zero_weight_nonzero_theta_errors() {
        assert!(matches!(
            prox_step(&unit_ball(), &[1.0, 0.0], 0.0, &[0.0, 0.0]),
            Err(Error::UnboundedObjective)
        ));
    }

    /// Brute-force grid oracle for
    /// `argmin_{x in box} <x, theta> + (w/2)||x - c||^2` at resolution 1e-3.
    fn grid_argmin_box(lo: &[f64], hi: &[f64], theta: &[f64], w: f64, c: &[f64]) -> Vec<f64> {
        let steps = 2000usize;
        let mut best = (f64::INFINITY, vec![0.0; 2]);
        for i in 0..=steps {
            for j in 0..=steps {
                let x = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                ];
                let val = linalg::dot(&x, theta) + 0.5 * w * linalg::dist_sq(&x, c);
                if val < best.0 {
                    best = (val, x.to_vec());
                }
            }
        }
        best.1
    }

    #[test]
    fn prox_step_matches_grid_oracle_on_box() {
        let d = unit_box();
        let x = prox_step(&d, &[4.0, 0.0], 1.0, &[0.0, 0.0]).unwrap();
        let oracle = grid_argmin_box(&[-1.0, -1.0], &[1.0, 1.0], &[4.0, 0.0], 1.0, &[0.0, 0.0]);
        assert!(
            linalg::dist(&x, &oracle) < 2e-3,
            "prox {x:?} vs grid {oracle:?}"
        );
        assert!(linalg::dist(&x, &[-1.0, 0.0]) < 1e-12);
    }

    #[test]
    fn linear_argmin_tie_breaks_toward_tie_point() {
        let d = unit_box();
        let x = linear_argmin(&d, &[1.0, 0.0], &[0.0, 0.25]).unwrap();
        assert_eq!(x, vec![-1.0, 0.25]);
        let b = unit_ball();
        let x = linear_argmin(&b, &[2.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(linalg::dist(&x, &[-1.0, 0.0]) < 1e-15);
    }

    #[test]
    fn diameter_and_center() {
        assert_eq!(unit_ball().diameter(), 2.0);
        assert!((unit_box().diameter() - 8.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::interval(1.0, 2.0).unwrap().center(), vec![1.5]);
    }

    proptest! {
        #[test]
        fn projection_idempotent_box(x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let d = unit_box();
            let p1 = project(&d, &[x, y]).unwrap();
            let p2 = project(&d, &p1).unwrap();
            // bitwise for box
            prop_assert_eq!(p1, p2);
        }

        #[test]
        fn projection_idempotent_ball(x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let d = unit_ball();
            let p1 = project(&d, &[x, y]).unwrap();
            let p2 = project(&d, &p1).unwrap();
            prop_assert!(linalg::dist(&p1, &p2) <= 1e-12);
        }

        #[test]
        fn projection_nonexpansive(
            px in -5.0f64..5.0, py in -5.0f64..5.0,
            qx in -5.0f64..5.0, qy in -5.0f64..5.0,
        ) {
            for d in [unit_ball(), unit_box()] {
                let p = project(&d, &[px, py]).unwrap();
                let q = project(&d, &[qx, qy]).unwrap();
                prop_assert!(linalg::dist(&p, &q) <= linalg::dist(&[px, py], &[qx, qy]) + 1e-12);
            }
        }

        #[test]
        fn prox_first_order_optimality(
            tx in -3.0f64..3.0, ty in -3.0f64..3.0,
            w in 0.01f64..10.0,
            cx in -1.0f64..1.0, cy in -1.0f64..1.0,
            seed in 0u64..1000,
        ) {
            use rand::SeedableRng;
            let theta = [tx, ty];
            let c = [cx, cy];
            for d in [unit_ball(), unit_box()] {
                let xs = prox_step(&d, &theta, w, &c).unwrap();
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..100 {
                    let y = d.random_point(&mut rng);
                    let gap: f64 = (0..2)
                        .map(|i| (theta[i] + w * (xs[i] - c[i])) * (y[i] - xs[i]))
                        .sum();
                    prop_assert!(gap >= -1e-8, "optimality violated: gap {gap}");
                }
            }
        }
    }
}
