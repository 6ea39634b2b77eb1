use std::sync::Arc;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::corpus::{corpus, random_domain};
use crate::error::Result;
use crate::hexlattice::{HexDomain, MarkedDomain, MidEdgeId};
use crate::observable::{field_mid_edges, observable_exact, observable_mc};

/// The cross-validation set: the whole corpus up to 4 faces plus three
/// seeded random domains of each size 5..=10. Marks sit at boundary
/// positions 0, ⌊L/3⌋, ⌊2L/3⌋.
pub fn crossval_domains() -> Result<Vec<MarkedDomain>> {
    let mut ds: Vec<HexDomain> = corpus(4)?;
    for n in 5..=10 {
        for k in 0..3 {
            ds.push(random_domain(n, 1000 + k)?);
        }
    }
    ds.into_iter()
        .map(|d| {
            let cyc = d.boundary_cycle().to_vec();
            let l = cyc.len();
            let marks = vec![cyc[0], cyc[l / 3], cyc[2 * l / 3]];
            MarkedDomain::new(Arc::new(d), marks)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossvalRow {
    pub domain: usize,
    pub faces: usize,
    pub z: MidEdgeId,
    pub j: usize,
    pub exact: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossvalReport {
    pub trials: u64,
    pub seed: u64,
    pub threshold: f64,
    pub comparisons: usize,
    /// Union bound on the chance that some comparison exceeds the threshold
    /// by sampling noise alone.
    pub expected_false_failures: f64,
    pub worst: Option<CrossvalRow>,
    pub failures: Vec<CrossvalRow>,
}

impl CrossvalReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares every MC H-value with the exact one in units of the exact
/// binomial σ = √(p(1−p)/N). Where p ∈ {0, 1} the estimate must match exactly.
pub fn run_crossval(
    domains: &[MarkedDomain],
    trials: u64,
    seed: u64,
    threshold: f64,
) -> Result<CrossvalReport> {
    let mut failures = Vec::new();
    let mut worst: Option<CrossvalRow> = None;
    let mut comparisons = 0;
    for (i, md) in domains.iter().enumerate() {
        let exact = observable_exact(md, 24)?;
        let zs = field_mid_edges(md);
        let mc = observable_mc(md, &zs, trials, seed.wrapping_add(i as u64))?;
        for &z in &zs {
            let e = exact.get(z)?.h();
            let m = mc.get(z)?.h();
            for j in 0..3 {
                comparisons += 1;
                let sigma = (e[j] * (1.0 - e[j]) / trials as f64).sqrt();
                let diff = (m[j] - e[j]).abs();
                let deviation = if sigma > 0.0 {
                    diff / sigma
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                let row = CrossvalRow {
                    domain: i,
                    faces: md.domain().num_faces(),
                    z,
                    j: j + 1,
                    exact: e[j],
                    estimate: m[j],
                    sigma,
                    deviation,
                };
                if deviation > threshold {
                    failures.push(row.clone());
                }
                if worst.as_ref().map_or(true, |w| deviation > w.deviation) {
                    worst = Some(row);
                }
            }
        }
    }
    let tail = 2.0 * (1.0 - Normal::standard().cdf(threshold));
    Ok(CrossvalReport {
        trials,
        seed,
        threshold,
        comparisons,
        expected_false_failures: comparisons as f64 * tail,
        worst,
        failures,
    })
}
