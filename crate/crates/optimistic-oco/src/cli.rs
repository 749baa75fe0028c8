//! Config-driven experiment runner behind the `ocosim` binary.
//!
//! A single TOML file declares the learner, domain, loss family, environment,
//! horizons, and seed count. `run` executes the sweep and writes one trace
//! CSV per seed plus a JSON report per horizon:
//!
//! ```text
//! out/<experiment>/<seed>.csv          single-horizon layout
//! out/<experiment>/report.json
//! out/<experiment>/T<t>/<seed>.csv     multi-horizon sweeps
//! out/<experiment>/report.json         includes the fitted rate slope
//! ```
//!
//! `verify <suite>` runs the named verification suite at its canonical
//! parameters and prints one pass/fail line per criterion.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bounds::{bound_value, BoundParams, TheoremTag};
use crate::environments::{EnvKindSpec, EnvSpec, FamilySpec};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::harness::{best_fixed_comparator, run_episode_with_profile, LearnerSpec};
use crate::stats::{mean_ci, rate_fit};
use crate::trace::{Comparator, RegretReport};
use crate::verify::{run_suite, Suite, VERIFY_SEED};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentCfg,
    pub learner: LearnerSpec,
    pub domain: Domain,
    pub family: FamilySpec,
    pub env: EnvKindSpec,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentCfg {
    pub name: String,
    pub seeds: usize,
    pub horizons: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.experiment.name.is_empty() || self.experiment.name.contains(['/', '\\']) {
            return Err(Error::Config("experiment name must be a plain name".into()));
        }
        if self.experiment.seeds == 0 {
            return Err(Error::Config("seeds must be >= 1".into()));
        }
        if self.experiment.horizons.is_empty() || self.experiment.horizons.contains(&0) {
            return Err(Error::Config(
                "horizons must be nonempty and positive".into(),
            ));
        }
        // rebuild the domain through its validating constructors
        match &self.domain {
            Domain::Ball { center, radius } => {
                Domain::ball(center.clone(), *radius)?;
            }
            Domain::Box { lo, hi } => {
                Domain::rect(lo.clone(), hi.clone())?;
            }
        }
        // surface environment configuration errors before any episode runs
        self.env_spec().build(
            *self.experiment.horizons.iter().max().expect("nonempty"),
            0,
            0,
        )?;
        Ok(())
    }

    pub fn env_spec(&self) -> EnvSpec {
        EnvSpec {
            domain: self.domain.clone(),
            family: self.family.clone(),
            env: self.env.clone(),
        }
    }
}

#[derive(Debug, serde::Serialize)]
pub struct HorizonReport {
    pub horizon: usize,
    pub seeds: usize,
    pub mean_regret: f64,
    pub stderr: f64,
    pub ci95: f64,
    pub report: RegretReport,
}

#[derive(Debug, serde::Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub learner: String,
    pub master_seed: u64,
    pub horizons: Vec<HorizonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_fit_slope: Option<f64>,
}

/// Execute the sweep declared in `config_path`. Returns the output root.
pub fn run(config_path: &Path, out_override: Option<PathBuf>, master_seed: u64) -> Result<PathBuf> {
    let cfg = Config::load(config_path)?;
    let out_root = out_override
        .or_else(|| cfg.experiment.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
        .join(&cfg.experiment.name);
    fs::create_dir_all(&out_root)?;

    let spec = cfg.env_spec();
    let multi = cfg.experiment.horizons.len() > 1;
    let mut horizon_reports = Vec::new();
    for &t in &cfg.experiment.horizons {
        let dir = if multi {
            out_root.join(format!("T{t}"))
        } else {
            out_root.clone()
        };
        fs::create_dir_all(&dir)?;
        type Cell = (
            f64,
            f64,
            Option<f64>,
            Vec<f64>,
            crate::environments::VarianceProfile,
        );
        let cells: Vec<Cell> = (0..cfg.experiment.seeds as u64)
            .into_par_iter()
            .map(|episode| {
                let (trace, profile) =
                    run_episode_with_profile(cfg.learner, &spec, t, master_seed, episode)?;
                let u = best_fixed_comparator(&trace)?;
                let static_regret = trace.regret(&u)?;
                let linearized = trace.linearized_regret(&u)?;
                let dynamic = match trace.risk_minimizer_path() {
                    Some(path) => Some(trace.dynamic_regret(&path)?),
                    None => None,
                };
                let mut csv = Vec::new();
                trace.to_csv(&mut csv)?;
                fs::write(dir.join(format!("{episode}.csv")), csv)?;
                Ok((static_regret, linearized, dynamic, u, profile))
            })
            .collect::<Result<Vec<_>>>()?;

        let statics: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let linearized: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let dynamics: Vec<f64> = cells.iter().filter_map(|c| c.2).collect();
        let stats = mean_ci(&statics);
        let profile = &cells[0].4;
        let sigma_cum_sq: f64 =
            cells.iter().map(|c| c.4.sigma_cum_sq()).sum::<f64>() / cells.len() as f64;
        let cap_sigma_cum_sq: f64 =
            cells.iter().map(|c| c.4.cap_sigma_cum_sq()).sum::<f64>() / cells.len() as f64;
        let family = spec.build(1, master_seed, 0)?.family;
        let theorem = cfg.experiment.theorem.unwrap_or(TheoremTag::WorstCase);
        let params = BoundParams {
            d: cfg.domain.diameter(),
            g: family.g_bound,
            l: family.smoothness,
            mu: match cfg.learner {
                LearnerSpec::OftlSc { mu } => mu,
                _ => family.strong_convexity,
            },
            horizon: t as f64,
            sigma_cum_sq,
            cap_sigma_cum_sq,
            sigma_max_sq: profile.sigma_max * profile.sigma_max,
            cap_sigma_max_sq: profile.cap_sigma_max * profile.cap_sigma_max,
            corruption: match &cfg.env {
                EnvKindSpec::CorruptedIid { budget, .. } => *budget,
                _ => 0.0,
            },
            rom_sigma1_sq: 1.0,
            rom_sigma1_tilde_sq: 1.0,
        };
        let bound = bound_value(theorem, &params)?;
        let report = RegretReport {
            static_regret: stats.mean,
            linearized_regret: mean_ci(&linearized).mean,
            dynamic_regret: if dynamics.len() == cells.len() {
                Some(mean_ci(&dynamics).mean)
            } else {
                None
            },
            comparator: Comparator::Fixed(cells[0].3.clone()),
            bound_value: bound,
            bound_margin: bound - stats.mean,
            sigma_bar: profile.sigma_bar,
            cap_sigma_bar: profile.cap_sigma_bar,
            sigma_max: profile.sigma_max,
            cap_sigma_max: profile.cap_sigma_max,
        };
        let hr = HorizonReport {
            horizon: t,
            seeds: cfg.experiment.seeds,
            mean_regret: stats.mean,
            stderr: stats.stderr,
            ci95: stats.ci95,
            report,
        };
        if !multi {
            fs::write(
                dir.join("report.json"),
                serde_json::to_string_pretty(&hr).expect("report serializes"),
            )?;
        }
        horizon_reports.push(hr);
    }

    if multi {
        let pts: Vec<(f64, f64)> = horizon_reports
            .iter()
            .map(|h| (h.horizon as f64, h.mean_regret))
            .collect();
        let full = ExperimentReport {
            experiment: cfg.experiment.name.clone(),
            learner: cfg.learner.name().to_string(),
            master_seed,
            rate_fit_slope: rate_fit(&pts).ok(),
            horizons: horizon_reports,
        };
        fs::write(
            out_root.join("report.json"),
            serde_json::to_string_pretty(&full).expect("report serializes"),
        )?;
    }
    Ok(out_root)
}

/// Run a verification suite; returns true iff every criterion passed.
pub fn verify(suite_name: &str, seed: Option<u64>) -> Result<bool> {
    let suite: Suite = suite_name.parse()?;
    let results = run_suite(suite, seed.unwrap_or(VERIFY_SEED))?;
    println!("suite {suite_name}: {} criteria", results.len());
    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        if !r.passed {
            println!("       detail: {}", r.detail);
        }
        all_pass &= r.passed;
    }
    println!(
        "suite {suite_name}: {}",
        if all_pass { "all passed" } else { "FAILURES" }
    );
    Ok(all_pass)
}

/// Install the global thread pool. Thread count changes wall time only; all
/// reported numbers are seed-indexed and order-independent.
pub fn set_threads(n: usize) {
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
