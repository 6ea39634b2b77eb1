//! Site percolation on the faces of a hexagonal domain at p = 1/2 and
//! detection of blue crossings between boundary arcs.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexlattice::{point_segment_distance, FaceCoord, FaceId, HexDomain, MarkedDomain};
use crate::registry::{Named, Registry};
use crate::rng::SampleRng;
use crate::stats::wilson_interval;
use crate::unionfind::UnionFind;

pub(crate) const STREAM_CROSSING: u64 = 1;
pub(crate) const STREAM_ANNULUS: u64 = 2;
const BLOCK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Yellow,
    Blue,
}

/// Colors of the virtual faces outside the domain, used when a coloring is
/// converted to a loop configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum OuterConvention {
    /// Blue along ∂₁₂, ∂₃₄, …; yellow along ∂₂₃, ∂₄₁, ….
    #[default]
    Alternating,
    Uniform(Color),
}

/// One bit per face, 1 = blue.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    bits: Vec<u64>,
    len: usize,
    convention: OuterConvention,
}

impl Coloring {
    pub fn uniform(len: usize, color: Color) -> Self {
        let mut c = Self {
            bits: vec![0; len.div_ceil(64)],
            len,
            convention: OuterConvention::default(),
        };
        if color == Color::Blue {
            c.fill_ones();
        }
        c
    }

    /// The coloring whose face `f` is blue iff bit `f` of `index` is set.
    pub fn from_index(len: usize, index: u64) -> Self {
        assert!(len <= 64, "index colorings need at most 64 faces");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            bits: vec![index & mask; len.div_ceil(64)],
            len,
            convention: OuterConvention::default(),
        }
    }

    pub fn from_words(bits: Vec<u64>, len: usize) -> Self {
        assert_eq!(bits.len(), len.div_ceil(64));
        let mut c = Self {
            bits,
            len,
            convention: OuterConvention::default(),
        };
        c.clear_tail();
        c
    }

    pub fn with_convention(mut self, convention: OuterConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> OuterConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn is_blue(&self, f: FaceId) -> bool {
        self.bits[f / 64] >> (f % 64) & 1 == 1
    }

    pub fn color(&self, f: FaceId) -> Color {
        if self.is_blue(f) {
            Color::Blue
        } else {
            Color::Yellow
        }
    }

    pub fn set(&mut self, f: FaceId, color: Color) {
        let bit = 1u64 << (f % 64);
        match color {
            Color::Blue => self.bits[f / 64] |= bit,
            Color::Yellow => self.bits[f / 64] &= !bit,
        }
    }

    pub fn complement(&self) -> Self {
        let mut c = self.clone();
        for w in &mut c.bits {
            *w = !*w;
        }
        c.clear_tail();
        c
    }

    pub fn count_blue(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn fill_ones(&mut self) {
        for w in &mut self.bits {
            *w = u64::MAX;
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << rem) - 1;
        }
    }
}

/// Independent fair coin per face, determined entirely by `rng`.
pub fn sample_coloring(d: &HexDomain, rng: &mut SampleRng) -> Coloring {
    let n = d.num_faces();
    let mut bits = vec![0; n.div_ceil(64)];
    rng.fill_bits(&mut bits, n);
    Coloring::from_words(bits, n)
}

/// Result of a crossing-probability measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl CrossingEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64, wall_time_s: f64) -> Self {
        assert!(successes <= trials);
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        Self {
            successes,
            trials,
            p_hat: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_low,
            ci_high,
            seed,
            wall_time_s,
        }
    }

    pub fn sigma(&self) -> f64 {
        crate::stats::wilson_sigma(self.successes, self.trials)
    }
}

/// Face adjacency plus the two face sets to be connected.
#[derive(Clone, Debug)]
pub struct CrossingProblem {
    n: usize,
    forward: Vec<u32>,
    forward_start: Vec<u32>,
    all: Vec<[u32; 6]>,
    source: Vec<u32>,
    target: Vec<bool>,
}

impl CrossingProblem {
    pub fn new(d: &HexDomain, source: &[FaceId], target: &[FaceId]) -> Self {
        let n = d.num_faces();
        let mut forward = Vec::with_capacity(3 * n);
        let mut forward_start = Vec::with_capacity(n + 1);
        let mut all = Vec::with_capacity(n);
        for f in 0..n {
            forward_start.push(forward.len() as u32);
            let nb = d.face_neighbors(f);
            forward.extend(nb.iter().flatten().filter(|&&g| g > f).map(|&g| g as u32));
            all.push(nb.map(|g| g.map_or(u32::MAX, |g| g as u32)));
        }
        forward_start.push(forward.len() as u32);
        let mut tgt = vec![false; n];
        for &f in target {
            tgt[f] = true;
        }
        Self {
            n,
            forward,
            forward_start,
            all,
            source: source.iter().map(|&f| f as u32).collect(),
            target: tgt,
        }
    }

    /// Crossing from arc ∂_{AB} to arc ∂_{CD} of a 4-marked domain.
    pub fn arcs(md: &MarkedDomain) -> Result<Self> {
        md.expect_marks(4)?;
        let ab = md.boundary_arc(0, 1)?;
        let cd = md.boundary_arc(2, 3)?;
        Ok(Self::new(md.domain(), &ab.faces, &cd.faces))
    }

    pub fn num_faces(&self) -> usize {
        self.n
    }

    fn forward(&self, f: usize) -> &[u32] {
        &self.forward[self.forward_start[f] as usize..self.forward_start[f + 1] as usize]
    }
}

#[inline]
fn blue(words: &[u64], f: usize) -> bool {
    words[f >> 6] >> (f & 63) & 1 == 1
}

/// Reusable buffers for crossing detection.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    uf: UnionFind,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl Scratch {
    fn next_epoch(&mut self, n: usize) -> u32 {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }
}

/// Decides whether blue faces connect the problem's source and target sets.
pub trait CrossingDetector: Named + Send + Sync {
    fn crosses(&self, problem: &CrossingProblem, blue_words: &[u64], scratch: &mut Scratch)
        -> bool;
}

/// Union-find over blue faces with one virtual node per arc.
pub struct UnionFindDetector;

impl Named for UnionFindDetector {
    fn name(&self) -> &'static str {
        "union-find"
    }
}

impl CrossingDetector for UnionFindDetector {
    fn crosses(&self, p: &CrossingProblem, words: &[u64], scratch: &mut Scratch) -> bool {
        let n = p.n;
        let (src, dst) = (n, n + 1);
        let uf = &mut scratch.uf;
        uf.reset(n + 2);
        for f in 0..n {
            if !blue(words, f) {
                continue;
            }
            for &g in p.forward(f) {
                if blue(words, g as usize) {
                    uf.union(f, g as usize);
                }
            }
            if p.target[f] {
                uf.union(f, dst);
            }
        }
        for &f in &p.source {
            if blue(words, f as usize) {
                uf.union(f as usize, src);
            }
        }
        uf.same(src, dst)
    }
}

/// Breadth-first exploration of blue faces from the source arc, stopping at
/// the first target face.
pub struct BfsDetector;

impl Named for BfsDetector {
    fn name(&self) -> &'static str {
        "bfs"
    }
}

impl CrossingDetector for BfsDetector {
    fn crosses(&self, p: &CrossingProblem, words: &[u64], scratch: &mut Scratch) -> bool {
        let epoch = scratch.next_epoch(p.n);
        let Scratch { stamp, queue, .. } = scratch;
        queue.clear();
        for &f in &p.source {
            if blue(words, f as usize) && stamp[f as usize] != epoch {
                if p.target[f as usize] {
                    return true;
                }
                stamp[f as usize] = epoch;
                queue.push(f);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let f = queue[head] as usize;
            head += 1;
            for &g in &p.all[f] {
                if g == u32::MAX || stamp[g as usize] == epoch || !blue(words, g as usize) {
                    continue;
                }
                if p.target[g as usize] {
                    return true;
                }
                stamp[g as usize] = epoch;
                queue.push(g);
            }
        }
        false
    }
}

pub fn crossing_detectors() -> Registry<dyn CrossingDetector> {
    let mut r: Registry<dyn CrossingDetector> = Registry::new("crossing detector");
    r.register(Box::new(UnionFindDetector));
    r.register(Box::new(BfsDetector));
    r
}

/// True iff a blue face path joins a face on ∂_{AB} to a face on ∂_{CD}.
pub fn crosses(md: &MarkedDomain, c: &Coloring) -> Result<bool> {
    let p = CrossingProblem::arcs(md)?;
    if c.len() != md.domain().num_faces() {
        return Err(Error::InvalidParameter(format!(
            "coloring has {} faces, domain has {}",
            c.len(),
            md.domain().num_faces()
        )));
    }
    Ok(UnionFindDetector.crosses(&p, c.words(), &mut Scratch::default()))
}

pub fn crossing_probability_mc(
    md: &MarkedDomain,
    trials: u64,
    seed: u64,
) -> Result<CrossingEstimate> {
    crossing_probability_mc_with(md, trials, seed, &UnionFindDetector)
}

pub fn crossing_probability_mc_with(
    md: &MarkedDomain,
    trials: u64,
    seed: u64,
    detector: &dyn CrossingDetector,
) -> Result<CrossingEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let p = CrossingProblem::arcs(md)?;
    let nwords = p.n.div_ceil(64);
    let blocks = trials.div_ceil(BLOCK);
    let successes: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut scratch = Scratch::default();
            let mut words = vec![0u64; nwords];
            let mut hits = 0;
            for i in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                SampleRng::new(seed, STREAM_CROSSING, i).fill_bits(&mut words, p.n);
                hits += u64::from(detector.crosses(&p, &words, &mut scratch));
            }
            hits
        })
        .sum();
    Ok(CrossingEstimate::from_counts(
        successes,
        trials,
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// Faces of a disk of hexagons centred on face (0, 0), with each face's
/// distance range from the centre.
#[derive(Clone, Debug)]
pub struct AnnulusLattice {
    inner: f64,
    outers: Vec<f64>,
    neighbors: Vec<[u32; 6]>,
    dmax: Vec<f64>,
    start: Vec<u32>,
}

impl AnnulusLattice {
    /// Materialises all faces meeting the closed disk of the largest outer radius.
    pub fn new(inner: f64, outers: &[f64], mesh: f64) -> Result<Self> {
        if !(mesh > 0.0) || !(inner > mesh) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < mesh < r, got mesh {mesh}, r {inner}"
            )));
        }
        if outers.is_empty() {
            return Err(Error::InvalidParameter("no outer radii".into()));
        }
        if let Some(&bad) = outers.iter().find(|&&o| o < inner) {
            return Err(Error::DegenerateAnnulus {
                r: inner,
                outer: bad,
            });
        }
        let rmax = outers.iter().copied().fold(inner, f64::max);
        let span = (rmax / (1.5 * mesh)).ceil() as i32 + 2;
        let mut faces = Vec::new();
        let mut dmax = Vec::new();
        let mut dmin = Vec::new();
        for r in -2 * span..=2 * span {
            for q in -2 * span..=2 * span {
                let f = FaceCoord::new(q, r);
                let (lo, hi) = distance_range(f, mesh);
                if lo <= rmax {
                    faces.push(f);
                    dmin.push(lo);
                    dmax.push(hi);
                }
            }
        }
        let index: HashMap<FaceCoord, u32> = faces
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, i as u32))
            .collect();
        let neighbors = faces
            .iter()
            .map(|f| {
                f.neighbors()
                    .map(|g| index.get(&g).copied().unwrap_or(u32::MAX))
            })
            .collect();
        let start = (0..faces.len())
            .filter(|&i| dmin[i] <= inner && inner <= dmax[i])
            .map(|i| i as u32)
            .collect();
        Ok(Self {
            inner,
            outers: outers.to_vec(),
            neighbors,
            dmax,
            start,
        })
    }

    pub fn num_faces(&self) -> usize {
        self.neighbors.len()
    }

    /// Largest face distance reached by blue clusters touching the inner
    /// circle, capped once it passes the largest outer radius.
    fn reach(&self, words: &[u64], scratch: &mut Scratch) -> f64 {
        let cap = self.outers.iter().copied().fold(self.inner, f64::max);
        let epoch = scratch.next_epoch(self.neighbors.len());
        let Scratch { stamp, queue, .. } = scratch;
        queue.clear();
        let mut best = f64::MIN;
        for &f in &self.start {
            if blue(words, f as usize) {
                stamp[f as usize] = epoch;
                queue.push(f);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let f = queue[head] as usize;
            head += 1;
            best = best.max(self.dmax[f]);
            if best >= cap {
                return best;
            }
            for &g in &self.neighbors[f] {
                if g != u32::MAX && stamp[g as usize] != epoch && blue(words, g as usize) {
                    stamp[g as usize] = epoch;
                    queue.push(g);
                }
            }
        }
        best
    }
}

/// Distance from the origin to the closest and farthest points of a hexagon.
fn distance_range(f: FaceCoord, mesh: f64) -> (f64, f64) {
    let hex = f.hexagon(mesh);
    let hi = hex.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    let lo = if f == FaceCoord::new(0, 0) {
        0.0
    } else {
        (0..6)
            .map(|k| point_segment_distance([0.0, 0.0], hex[k], hex[(k + 1) % 6]))
            .fold(f64::MAX, f64::min)
    };
    (lo, hi)
}

/// Probability that blue faces connect the faces meeting the circle of
/// radius `r` to those meeting the circle of radius `outer`.
pub fn annulus_crossing_mc(
    r: f64,
    outer: f64,
    mesh: f64,
    trials: u64,
    seed: u64,
) -> Result<CrossingEstimate> {
    Ok(annulus_profile_mc(r, &[outer], mesh, trials, seed)?.remove(0))
}

/// Annulus crossing estimates for several outer radii from the same samples.
///
/// A blue cluster touching the inner circle reaches the circle of radius
/// `R` iff it contains a face whose farthest point is at distance ≥ `R`, so
/// one exploration per sample answers every radius. `outer == r` is
/// reported as probability 1.
pub fn annulus_profile_mc(
    r: f64,
    outers: &[f64],
    mesh: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<CrossingEstimate>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let lattice = AnnulusLattice::new(r, outers, mesh)?;
    let n = lattice.num_faces();
    let nwords = n.div_ceil(64);
    let blocks = trials.div_ceil(BLOCK);
    let counts: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut scratch = Scratch::default();
            let mut words = vec![0u64; nwords];
            let mut hits = vec![0u64; outers.len()];
            for i in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                SampleRng::new(seed, STREAM_ANNULUS, i).fill_bits(&mut words, n);
                let reach = lattice.reach(&words, &mut scratch);
                for (h, &o) in hits.iter_mut().zip(outers) {
                    *h += u64::from(o == r || reach >= o);
                }
            }
            hits
        })
        .reduce(
            || vec![0; outers.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let wall = start.elapsed().as_secs_f64();
    Ok(counts
        .into_iter()
        .map(|s| CrossingEstimate::from_counts(s, trials, seed, wall))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn hexagon_md() -> MarkedDomain {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        MarkedDomain::new(Arc::new(d), vec![0, 1, 3, 5]).unwrap()
    }

    fn line_md(n: i32) -> MarkedDomain {
        let d = HexDomain::new((0..n).map(|q| FaceCoord::new(q, 0)), 1.0).unwrap();
        let cyc = d.boundary_cycle().to_vec();
        let k = cyc.len();
        MarkedDomain::new(
            Arc::new(d),
            vec![cyc[0], cyc[k / 4], cyc[k / 2], cyc[3 * k / 4]],
        )
        .unwrap()
    }

    #[test]
    fn monochromatic_colorings() {
        let md = line_md(5);
        let n = md.domain().num_faces();
        assert!(crosses(&md, &Coloring::uniform(n, Color::Blue)).unwrap());
        assert!(!crosses(&md, &Coloring::uniform(n, Color::Yellow)).unwrap());
    }

    #[test]
    fn single_hexagon_is_exactly_one_half() {
        let md = hexagon_md();
        let hits: usize = (0..2)
            .filter(|&i| crosses(&md, &Coloring::from_index(1, i)).unwrap())
            .count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn wrong_mark_count() {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        let md = MarkedDomain::new(Arc::new(d), vec![0, 2, 4]).unwrap();
        assert_eq!(
            crosses(&md, &Coloring::uniform(1, Color::Blue)).unwrap_err(),
            Error::WrongMarkCount {
                expected: 4,
                got: 3
            }
        );
    }

    #[test]
    fn sample_coloring_is_deterministic_and_fair() {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        let a = sample_coloring(&d, &mut SampleRng::new(5, 0, 9));
        let b = sample_coloring(&d, &mut SampleRng::new(5, 0, 9));
        assert_eq!(a, b);
        let n = 100_000;
        let blue = (0..n)
            .filter(|&i| sample_coloring(&d, &mut SampleRng::new(11, 0, i)).is_blue(0))
            .count();
        let p = blue as f64 / n as f64;
        assert!((0.49..=0.51).contains(&p), "p = {p}");
    }

    #[test]
    fn three_face_colorings_are_uniform() {
        let d = HexDomain::new(
            [
                FaceCoord::new(0, 0),
                FaceCoord::new(1, 0),
                FaceCoord::new(0, 1),
            ],
            1.0,
        )
        .unwrap();
        let mut counts = [0u64; 8];
        for i in 0..100_000 {
            let c = sample_coloring(&d, &mut SampleRng::new(2, 0, i));
            counts[c.words()[0] as usize] += 1;
        }
        let stat = crate::stats::chi_square_uniform(&counts);
        assert!(
            stat < crate::stats::chi_square_critical(7, 0.99),
            "chi2 = {stat}"
        );
    }

    #[test]
    fn detectors_agree() {
        let md = line_md(7);
        let p = CrossingProblem::arcs(&md).unwrap();
        let mut s = Scratch::default();
        for i in 0..128u64 {
            let c = Coloring::from_index(7, i);
            assert_eq!(
                UnionFindDetector.crosses(&p, c.words(), &mut s),
                BfsDetector.crosses(&p, c.words(), &mut s)
            );
        }
    }

    #[test]
    fn single_trial_is_zero_or_one() {
        let est = crossing_probability_mc(&line_md(4), 1, 3).unwrap();
        assert!(est.p_hat == 0.0 || est.p_hat == 1.0);
        assert!(est.ci_low <= est.p_hat && est.p_hat <= est.ci_high);
    }

    #[test]
    fn mc_is_reproducible() {
        let md = line_md(6);
        let a = crossing_probability_mc(&md, 5000, 99).unwrap();
        let b = crossing_probability_mc(&md, 5000, 99).unwrap();
        assert_eq!(a.successes, b.successes);
    }

    #[test]
    fn annulus_degenerate_cases() {
        assert!(matches!(
            annulus_crossing_mc(4.0, 3.0, 0.5, 10, 1),
            Err(Error::DegenerateAnnulus { .. })
        ));
        let est = annulus_crossing_mc(4.0, 4.0, 0.5, 100, 1).unwrap();
        assert_eq!(est.successes, 100);
    }

    #[test]
    fn annulus_profile_is_monotone() {
        let ests = annulus_profile_mc(2.0, &[3.0, 4.0, 6.0, 8.0], 0.25, 2000, 5).unwrap();
        for w in ests.windows(2) {
            assert!(w[1].successes <= w[0].successes);
        }
        // a smaller disk indexes faces differently, so only agreement in law
        let single = annulus_crossing_mc(2.0, 6.0, 0.25, 2000, 5).unwrap();
        let tol = 5.0 * (single.sigma().hypot(ests[2].sigma()));
        assert!((single.p_hat - ests[2].p_hat).abs() < tol);
    }
}
