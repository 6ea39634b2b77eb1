use std::path::Path;

use serde::Serialize;

use super::output::{content_hash, write_csv, write_sidecar, Sidecar};
use crate::error::{Error, Result};
use crate::percolation::annulus_profile_mc;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RswRow {
    pub r: f64,
    pub outer: f64,
    pub ratio: f64,
    pub samples: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RswReport {
    pub mesh: f64,
    pub seed: u64,
    pub rows: Vec<RswRow>,
    /// Slope of log p against log(r/R).
    pub eta: f64,
    pub r_squared: f64,
    /// Consecutive estimates never increase beyond their joint 95% intervals.
    pub monotone: bool,
    pub passed: bool,
    /// External cross-check against the one-arm exponent 5/48; not gating.
    pub advisory_in_range: bool,
}

/// Least-squares slope and R² of y against x.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

pub fn run_rsw(r: f64, outers: &[f64], mesh: f64, trials: u64, seed: u64) -> Result<RswReport> {
    if outers.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two outer radii to fit".into(),
        ));
    }
    if let Some(&o) = outers.iter().find(|&&o| o <= r) {
        return Err(Error::DegenerateAnnulus { r, outer: o });
    }
    let est = annulus_profile_mc(r, outers, mesh, trials, seed)?;
    let rows: Vec<RswRow> = outers
        .iter()
        .zip(&est)
        .map(|(&o, e)| RswRow {
            r,
            outer: o,
            ratio: o / r,
            samples: e.trials,
            successes: e.successes,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
        })
        .collect();
    let mut order: Vec<&RswRow> = rows.iter().collect();
    order.sort_by(|a, b| a.outer.total_cmp(&b.outer));
    let monotone = order.windows(2).all(|w| w[1].ci_low <= w[0].ci_high);
    let (eta, r_squared) = if rows.iter().any(|row| row.successes == 0) {
        (f64::NAN, f64::NAN)
    } else {
        let x: Vec<f64> = rows.iter().map(|row| (r / row.outer).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|row| row.p_hat.ln()).collect();
        fit_power_law(&x, &y)
    };
    Ok(RswReport {
        mesh,
        seed,
        rows,
        eta,
        r_squared,
        monotone,
        passed: eta > 0.0 && r_squared >= 0.98,
        advisory_in_range: (0.07..=0.14).contains(&eta),
    })
}

#[derive(Serialize)]
struct RswMeta {
    mesh: f64,
    eta: f64,
    r_squared: f64,
    monotone: bool,
    passed: bool,
    advisory_in_range: bool,
    inner_boundary: &'static str,
}

impl RswReport {
    pub fn write(
        &self,
        path: &Path,
        config_text: &str,
        workers: Option<usize>,
        wall_time_s: f64,
    ) -> Result<()> {
        write_csv(path, &self.rows)?;
        let table = std::fs::read(path)?;
        write_sidecar(
            path,
            &Sidecar {
                kind: "rsw",
                table: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
                table_hash: content_hash(&table),
                config_hash: content_hash(config_text.as_bytes()),
                seed: self.seed,
                workers,
                wall_time_s,
                meta: RswMeta {
                    mesh: self.mesh,
                    eta: self.eta,
                    r_squared: self.r_squared,
                    monotone: self.monotone,
                    passed: self.passed,
                    advisory_in_range: self.advisory_in_range,
                    inner_boundary: "faces meeting the circle of radius r; success if the cluster reaches a face meeting radius R",
                },
            },
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fits() {
        let x: Vec<f64> = [2.0f64, 4.0, 8.0].iter().map(|v| (1.0 / v).ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.1 * v - 0.3).collect();
        let (s, r2) = fit_power_law(&x, &y);
        assert!((s - 0.1).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_annulus_decays() {
        let rep = run_rsw(2.0, &[4.0, 8.0], 0.5, 3000, 5).unwrap();
        assert!(rep.monotone);
        assert!(rep.rows[0].p_hat > rep.rows[1].p_hat);
        assert!(rep.eta > 0.0);
        assert!(run_rsw(2.0, &[2.0, 4.0], 0.5, 10, 1).is_err());
    }
}
