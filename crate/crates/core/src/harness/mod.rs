//! Experiment drivers: convergence against the continuum prediction, annulus
//! decay, exhaustive identity suites and MC/exact cross-validation.

mod convergence;
mod corpus;
mod crossval;
mod exact_suite;
mod output;
mod rsw;
mod shapes;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use convergence::{run_convergence, ConvergenceReport, ConvergenceRow};
pub use corpus::{canonical, corpus, random_domain};
pub use crossval::{crossval_domains, run_crossval, CrossvalReport, CrossvalRow};
pub use exact_suite::{run_exact_suite, CheckLine, ExactSuiteOptions, ExactSuiteReport};
pub use output::{content_hash, write_csv, write_sidecar, Sidecar};
pub use rsw::{fit_power_law, run_rsw, RswReport, RswRow};
pub use shapes::{shapes, PolygonShape, Rectangle, Rhombus, Shape, ShapeParams, Triangle};

use crate::error::{Error, Result};

pub const WORKERS_ENV: &str = "CARDYLAB_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub shape: String,
    #[serde(default)]
    pub params: ShapeParams,
    pub mesh_list: Vec<f64>,
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_detector")]
    pub detector: String,
    /// Pass if |p̂ − prediction| ≤ tolerance at the finest mesh.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Pass if |p̂ − prediction| ≤ sigmas · Wilson σ at every mesh.
    #[serde(default)]
    pub sigmas: Option<f64>,
}

fn default_seed() -> u64 {
    1
}

fn default_detector() -> String {
    "union-find".into()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh_list.is_empty() {
            return Err(Error::InvalidParameter("mesh_list is empty".into()));
        }
        if self.mesh_list.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter(
                "mesh values must be positive".into(),
            ));
        }
        if self.mesh_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "mesh_list must be strictly decreasing".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Worker count: the environment variable wins over the configured value;
/// `None` leaves rayon's default.
pub fn resolve_workers(configured: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidParameter(format!(
                "{WORKERS_ENV}={v} is not a positive integer"
            ))),
        },
        Err(_) => Ok(configured),
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (or the global pool).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_validation() {
        let text = r#"
shape = "triangle"
mesh_list = [0.1, 0.05]
trials = 1000
seed = 7
tolerance = 0.02

[params]
t = 0.25
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.params.t, 0.25);
        assert_eq!(cfg.params.size, 1.0);
        assert_eq!(cfg.detector, "union-find");
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let bad = text.replace("[0.1, 0.05]", "[0.05, 0.1]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = text.replace("trials = 1000", "trials = 0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        assert!(ExperimentConfig::from_toml("shape = 1").is_err());
    }

    #[test]
    fn pool_sizes() {
        let n = with_workers(Some(3), rayon::current_num_threads).unwrap();
        assert_eq!(n, 3);
    }
}
