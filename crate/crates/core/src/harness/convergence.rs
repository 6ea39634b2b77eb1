use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::output::{content_hash, write_csv, write_sidecar, Sidecar};
use super::shapes::shapes;
use super::{resolve_workers, with_workers, ExperimentConfig};
use crate::error::Result;
use crate::hexlattice::DomainFile;
use crate::percolation::{crossing_detectors, crossing_probability_mc_with};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub mesh: f64,
    pub faces: usize,
    pub samples: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub prediction: f64,
    pub abs_error: f64,
    /// Kept out of the CSV so tables are byte-identical across runs.
    #[serde(skip)]
    pub wall_time_s: f64,
    #[serde(skip)]
    pub sigma: f64,
    #[serde(skip)]
    pub domain_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub shape: String,
    pub corners: String,
    pub rows: Vec<ConvergenceRow>,
    /// abs_error never increases from one mesh to the next (reported only).
    pub error_monotone: bool,
    pub passed: bool,
    pub check: String,
}

/// For each mesh in order: discretize, estimate, compare with the prediction.
/// Mesh `i` samples with seed `seed + i`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let registry = shapes();
    let shape = registry.get(&cfg.shape)?;
    let detectors = crossing_detectors();
    let detector = detectors.get(&cfg.detector)?;
    let prediction = shape.prediction(&cfg.params)?;
    let workers = resolve_workers(cfg.workers)?;
    let mut rows = Vec::with_capacity(cfg.mesh_list.len());
    for (i, &mesh) in cfg.mesh_list.iter().enumerate() {
        let start = Instant::now();
        let md = shape.build(&cfg.params, mesh)?;
        let seed = cfg.seed.wrapping_add(i as u64);
        let est = with_workers(workers, || {
            crossing_probability_mc_with(&md, cfg.trials, seed, detector)
        })??;
        let domain_hash = content_hash(DomainFile::from_marked(&md).to_json().as_bytes());
        rows.push(ConvergenceRow {
            mesh,
            faces: md.domain().num_faces(),
            samples: est.trials,
            successes: est.successes,
            p_hat: est.p_hat,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            prediction,
            abs_error: (est.p_hat - prediction).abs(),
            wall_time_s: start.elapsed().as_secs_f64(),
            sigma: est.sigma(),
            domain_hash,
        });
    }
    let error_monotone = rows.windows(2).all(|w| w[1].abs_error <= w[0].abs_error);
    let mut checks = Vec::new();
    let mut passed = true;
    if let Some(tol) = cfg.tolerance {
        let last = rows.last().expect("mesh_list is non-empty");
        let ok = last.abs_error <= tol;
        passed &= ok;
        checks.push(format!(
            "|p - prediction| = {:.5} at mesh {} {} tolerance {tol}",
            last.abs_error,
            last.mesh,
            if ok { "<=" } else { ">" }
        ));
    }
    if let Some(k) = cfg.sigmas {
        let worst = rows
            .iter()
            .map(|r| r.abs_error / r.sigma.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let ok = worst <= k;
        passed &= ok;
        checks.push(format!("largest deviation {worst:.2} sigma, limit {k}"));
    }
    Ok(ConvergenceReport {
        shape: cfg.shape.clone(),
        corners: shape.corners().to_string(),
        rows,
        error_monotone,
        passed,
        check: if checks.is_empty() {
            "none".into()
        } else {
            checks.join("; ")
        },
    })
}

#[derive(Serialize)]
struct ConvergenceMeta<'a> {
    config: &'a ExperimentConfig,
    shape: &'a str,
    corners: &'a str,
    mesh_seeds: Vec<u64>,
    domain_hashes: Vec<&'a str>,
    row_wall_time_s: Vec<f64>,
    error_monotone: bool,
    passed: bool,
    check: &'a str,
    tolerance_note: &'static str,
}

impl ConvergenceReport {
    /// CSV table plus JSON sidecar (hashes, seeds, timings).
    pub fn write(&self, cfg: &ExperimentConfig, path: &Path, wall_time_s: f64) -> Result<()> {
        write_csv(path, &self.rows)?;
        let table = std::fs::read(path)?;
        let meta = ConvergenceMeta {
            config: cfg,
            shape: &self.shape,
            corners: &self.corners,
            mesh_seeds: (0..self.rows.len() as u64)
                .map(|i| cfg.seed.wrapping_add(i))
                .collect(),
            domain_hashes: self.rows.iter().map(|r| r.domain_hash.as_str()).collect(),
            row_wall_time_s: self.rows.iter().map(|r| r.wall_time_s).collect(),
            error_monotone: self.error_monotone,
            passed: self.passed,
            check: &self.check,
            tolerance_note:
                "finite-mesh tolerances are regression constants; no convergence rate is known",
        };
        write_sidecar(
            path,
            &Sidecar {
                kind: "convergence",
                table: path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                table_hash: content_hash(&table),
                config_hash: content_hash(cfg.to_toml().as_bytes()),
                seed: cfg.seed,
                workers: resolve_workers(cfg.workers)?,
                wall_time_s,
                meta,
            },
        )?;
        Ok(())
    }
}
