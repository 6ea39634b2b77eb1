use rayon::prelude::*;

use super::exact::ObservableEngine;
use super::{check_z, HValue, ObservableField};
use crate::error::{Error, Result};
use crate::hexlattice::{FaceId, MarkedDomain, MidEdgeId};
use crate::loops::{bit, xor_into};
use crate::rng::SampleRng;
use crate::unionfind::UnionFind;

const STREAM_SWEEP: u64 = 3;
const STREAM_TRACE: u64 = 1 << 32;
const BLOCK: u64 = 1024;

struct ArcSweep {
    /// 0-based index j of the arc ∂_j, which runs from u_{j+1} to u_{j-1}.
    j: usize,
    mids: Vec<MidEdgeId>,
    faces: Vec<u32>,
    /// Faces on ∂_{u_{j-1} u_j}.
    lambda_target: Vec<u32>,
    /// Faces on ∂_{u_j u_{j+1}}.
    mu_target: Vec<u32>,
}

/// For every boundary z ∈ ∂_j, the two blue crossing events
/// λ: ∂_{u_{j+1} z} ↔ ∂_{u_{j-1} u_j} and μ: ∂_{u_j u_{j+1}} ↔ ∂_{z u_{j-1}},
/// read off one cluster labelling of the coloring by sweeping along the arc.
pub struct BoundarySweep {
    n: usize,
    forward: Vec<u32>,
    forward_start: Vec<u32>,
    arcs: Vec<ArcSweep>,
}

#[derive(Default)]
pub struct SweepScratch {
    uf: UnionFind,
    stamp: Vec<u32>,
    epoch: u32,
    lambda: Vec<bool>,
}

impl BoundarySweep {
    pub fn new(md: &MarkedDomain) -> Result<Self> {
        md.expect_marks(3)?;
        let d = md.domain();
        let n = d.num_faces();
        let mut forward = Vec::new();
        let mut forward_start = vec![0u32];
        for f in 0..n {
            forward.extend(
                d.face_neighbors(f)
                    .iter()
                    .flatten()
                    .filter(|&&g| g > f)
                    .map(|&g| g as u32),
            );
            forward_start.push(forward.len() as u32);
        }
        let to_u32 = |v: Vec<FaceId>| v.into_iter().map(|f| f as u32).collect::<Vec<_>>();
        let mut arcs = Vec::new();
        for j in 0..3isize {
            let arc = md.boundary_arc(j + 1, j - 1)?;
            arcs.push(ArcSweep {
                j: j as usize,
                faces: arc
                    .mid_edges
                    .iter()
                    .map(|&m| d.edge(m).left as u32)
                    .collect(),
                mids: arc.mid_edges,
                lambda_target: to_u32(md.boundary_arc(j - 1, j)?.faces),
                mu_target: to_u32(md.boundary_arc(j, j + 1)?.faces),
            });
        }
        Ok(Self {
            n,
            forward,
            forward_start,
            arcs,
        })
    }

    /// Calls `record(z, j, λ, μ)` for every boundary z that is not a mark.
    pub fn run(
        &self,
        blue: &[u64],
        s: &mut SweepScratch,
        mut record: impl FnMut(MidEdgeId, usize, bool, bool),
    ) {
        let n = self.n;
        s.uf.reset(n);
        if s.stamp.len() < n {
            s.stamp.resize(n, 0);
        }
        for f in 0..n {
            if !bit(blue, f) {
                continue;
            }
            let nb =
                &self.forward[self.forward_start[f] as usize..self.forward_start[f + 1] as usize];
            for &g in nb {
                if bit(blue, g as usize) {
                    s.uf.union(f, g as usize);
                }
            }
        }
        for arc in &self.arcs {
            let len = arc.mids.len();
            let epoch = s.next_epoch();
            for &f in &arc.lambda_target {
                if bit(blue, f as usize) {
                    let r = s.uf.find(f as usize);
                    s.stamp[r] = epoch;
                }
            }
            s.lambda.clear();
            let mut hit = false;
            for &f in &arc.faces {
                hit |= bit(blue, f as usize) && s.stamp[s.uf.find(f as usize)] == epoch;
                s.lambda.push(hit);
            }
            let epoch = s.next_epoch();
            for &f in &arc.mu_target {
                if bit(blue, f as usize) {
                    let r = s.uf.find(f as usize);
                    s.stamp[r] = epoch;
                }
            }
            let mut hit = false;
            for i in (0..len).rev() {
                let f = arc.faces[i] as usize;
                hit |= bit(blue, f) && s.stamp[s.uf.find(f)] == epoch;
                if i > 0 && i + 1 < len {
                    record(arc.mids[i], arc.j, s.lambda[i], hit);
                }
            }
        }
    }
}

impl SweepScratch {
    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        self.epoch
    }
}

fn sum_counts(mut a: Vec<[u64; 3]>, b: Vec<[u64; 3]>) -> Vec<[u64; 3]> {
    for (x, y) in a.iter_mut().zip(b) {
        for j in 0..3 {
            x[j] += y[j];
        }
    }
    a
}

/// Monte Carlo H-values. Boundary z share one sample stream: in each
/// coloring z is linked to u_{j-1} exactly when the λ crossing occurs and to
/// u_{j+1} otherwise. Interior z are traced on their own samples.
pub fn observable_mc(
    md: &MarkedDomain,
    zs: &[MidEdgeId],
    trials: u64,
    seed: u64,
) -> Result<ObservableField> {
    validate(md, zs, trials)?;
    let d = md.domain();
    let (boundary, interior): (Vec<MidEdgeId>, Vec<MidEdgeId>) =
        zs.iter().partition(|&&z| d.is_boundary_mid_edge(z));
    let mut field = observable_mc_naive(md, &interior, trials, seed)?;
    field.backend = "mc".into();
    if boundary.is_empty() {
        return Ok(field);
    }
    let sweep = BoundarySweep::new(md)?;
    let (nf, nm) = (d.num_faces(), d.num_mid_edges());
    let counts = (0..trials.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut scratch = SweepScratch::default();
            let mut words = vec![0u64; nf.div_ceil(64)];
            let mut counts = vec![[0u64; 3]; nm];
            for i in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                SampleRng::new(seed, STREAM_SWEEP, i).fill_bits(&mut words, nf);
                sweep.run(&words, &mut scratch, |z, j, lambda, _| {
                    let k = if lambda { (j + 2) % 3 } else { (j + 1) % 3 };
                    counts[z][k] += 1;
                });
            }
            counts
        })
        .reduce(|| vec![[0u64; 3]; nm], sum_counts);
    for z in boundary {
        field.insert(
            z,
            HValue::Sampled {
                counts: counts[z],
                trials,
            },
        )?;
    }
    Ok(field)
}

/// Monte Carlo H-values, each z from its own samples: a uniform
/// configuration of W_Ω(u₁, u₂, u₃, z) is drawn as reference ⊕ D(σ) and
/// the path from z is traced.
pub fn observable_mc_naive(
    md: &MarkedDomain,
    zs: &[MidEdgeId],
    trials: u64,
    seed: u64,
) -> Result<ObservableField> {
    validate(md, zs, trials)?;
    let engine = ObservableEngine::new(md)?;
    let basis = engine.basis();
    let nf = md.domain().num_faces();
    let mut field = ObservableField::new(md.clone(), "mc-naive")?;
    for &z in zs {
        let reference = engine.reference(z)?;
        let counts = (0..trials.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| -> Result<[u64; 3]> {
                let mut colors = vec![0u64; nf.div_ceil(64)];
                let mut xi = vec![0u64; reference.len()];
                let mut counts = [0u64; 3];
                for i in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                    SampleRng::new(seed, STREAM_TRACE + z as u64, i).fill_bits(&mut colors, nf);
                    xi.copy_from_slice(&reference);
                    for f in 0..nf {
                        if bit(&colors, f) {
                            xor_into(&mut xi, basis.face_mask(f));
                        }
                    }
                    counts[engine.link_index(&xi, z)?] += 1;
                }
                Ok(counts)
            })
            .try_reduce(
                || [0; 3],
                |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]),
            )?;
        field.insert(z, HValue::Sampled { counts, trials })?;
    }
    Ok(field)
}

fn validate(md: &MarkedDomain, zs: &[MidEdgeId], trials: u64) -> Result<()> {
    md.expect_marks(3)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    zs.iter().try_for_each(|&z| check_z(md, z))
}
