//! Loop representation: half-edge configurations with prescribed
//! disorders, the coloring ↔ loop bijection, link patterns and exact
//! enumeration.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hexlattice::{FaceId, HalfEdgeId, HexDomain, MarkedDomain, MidEdgeId, VertexId};
use crate::percolation::{
    sample_coloring, Color, Coloring, CrossingDetector, CrossingProblem, OuterConvention, Scratch,
    UnionFindDetector,
};
use crate::rng::SampleRng;
use crate::stats::{chi_square_critical, chi_square_uniform};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A set of half-edges stored as a bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdgeSet {
    words: Vec<u64>,
    len: usize,
}

impl HalfEdgeSet {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_ids(len: usize, ids: impl IntoIterator<Item = HalfEdgeId>) -> Self {
        let mut s = Self::new(len);
        for h in ids {
            s.toggle(h);
        }
        s
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert_eq!(words.len(), len.div_ceil(64));
        Self { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, h: HalfEdgeId) -> bool {
        bit(&self.words, h)
    }

    pub fn toggle(&mut self, h: HalfEdgeId) {
        self.words[h >> 6] ^= 1 << (h & 63);
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        let mut out = self.clone();
        xor_into(&mut out.words, &other.words);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = HalfEdgeId> + '_ {
        (0..self.len).filter(|&h| self.contains(h))
    }
}

#[inline]
pub(crate) fn bit(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Vertices and mid-edges adjacent to an odd number of half-edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct LoopBoundary {
    pub vertices: Vec<VertexId>,
    pub mid_edges: Vec<MidEdgeId>,
}

impl LoopBoundary {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.mid_edges.is_empty()
    }
}

pub fn loop_boundary(d: &HexDomain, xi: &HalfEdgeSet) -> LoopBoundary {
    let mut vpar = vec![false; d.num_vertices()];
    let mut mpar = vec![false; d.num_mid_edges()];
    for h in xi.iter() {
        vpar[d.half_edge_vertex(h)] ^= true;
        mpar[d.half_edge_mid(h)] ^= true;
    }
    LoopBoundary {
        vertices: (0..vpar.len()).filter(|&v| vpar[v]).collect(),
        mid_edges: (0..mpar.len()).filter(|&m| mpar[m]).collect(),
    }
}

/// A half-edge configuration together with its boundary ∂ξ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LoopConfig {
    half_edges: HalfEdgeSet,
    boundary: LoopBoundary,
}

impl LoopConfig {
    pub fn new(d: &HexDomain, half_edges: HalfEdgeSet) -> Self {
        assert_eq!(half_edges.len(), d.num_half_edges());
        let boundary = loop_boundary(d, &half_edges);
        Self {
            half_edges,
            boundary,
        }
    }

    pub fn half_edges(&self) -> &HalfEdgeSet {
        &self.half_edges
    }

    pub fn boundary(&self) -> &LoopBoundary {
        &self.boundary
    }

    pub fn xor(&self, d: &HexDomain, other: &Self) -> Self {
        Self::new(d, self.half_edges.xor(&other.half_edges))
    }
}

/// A perfect matching of marked points, each pair stored as `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct LinkPattern {
    pairs: Vec<(MidEdgeId, MidEdgeId)>,
}

impl LinkPattern {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (MidEdgeId, MidEdgeId)>) -> Self {
        let mut pairs: Vec<_> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(MidEdgeId, MidEdgeId)] {
        &self.pairs
    }

    pub fn partner(&self, m: MidEdgeId) -> Option<MidEdgeId> {
        self.pairs.iter().find_map(|&(a, b)| match m {
            _ if m == a => Some(b),
            _ if m == b => Some(a),
            _ => None,
        })
    }

    pub fn links(&self, a: MidEdgeId, b: MidEdgeId) -> bool {
        self.partner(a) == Some(b)
    }

    /// No two pairs interleave along the boundary. Pairs with an interior
    /// endpoint are ignored.
    pub fn is_planar(&self, d: &HexDomain) -> bool {
        let pos: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .filter_map(|&(a, b)| {
                let (pa, pb) = (d.boundary_position(a)?, d.boundary_position(b)?);
                Some((pa.min(pb), pa.max(pb)))
            })
            .collect();
        pos.iter().all(|&(a, b)| {
            pos.iter().all(|&(c, e)| {
                let inside = |x: usize| a < x && x < b;
                inside(c) == inside(e)
            })
        })
    }
}

/// Per-domain tables shared by every loop computation: face masks, the
/// two other half-edges at each half-edge's vertex, and an optional fault.
#[derive(Clone, Debug)]
pub struct LoopBasis {
    domain: Arc<HexDomain>,
    nwords: usize,
    masks: Vec<u64>,
    partners: Vec<[u32; 2]>,
    fault: Option<HalfEdgeId>,
}

impl LoopBasis {
    pub fn new(domain: Arc<HexDomain>) -> Self {
        let d = &*domain;
        let nh = d.num_half_edges();
        let nwords = nh.div_ceil(64);
        let mut masks = vec![0u64; d.num_faces() * nwords];
        for f in 0..d.num_faces() {
            let row = &mut masks[f * nwords..(f + 1) * nwords];
            for &e in d.face_edges(f) {
                for h in [2 * e, 2 * e + 1] {
                    row[h >> 6] ^= 1 << (h & 63);
                }
            }
        }
        let partners = (0..nh)
            .map(|h| {
                let mut out = [u32::MAX; 2];
                let others = d
                    .vertex_half_edges(d.half_edge_vertex(h))
                    .iter()
                    .filter(|&&g| g as usize != h);
                for (slot, &g) in out.iter_mut().zip(others) {
                    *slot = g;
                }
                out
            })
            .collect();
        Self {
            domain,
            nwords,
            masks,
            partners,
            fault: None,
        }
    }

    /// Flips one half-edge in every configuration produced from this basis.
    /// Used to check that the verification suites detect corruption.
    pub fn with_fault(mut self, h: HalfEdgeId) -> Self {
        self.fault = Some(h);
        self
    }

    pub fn domain(&self) -> &HexDomain {
        &self.domain
    }

    pub fn shared_domain(&self) -> &Arc<HexDomain> {
        &self.domain
    }

    pub fn nwords(&self) -> usize {
        self.nwords
    }

    pub fn face_mask(&self, f: FaceId) -> &[u64] {
        &self.masks[f * self.nwords..(f + 1) * self.nwords]
    }

    /// ξ₀: boundary half-edges on the arcs leaving even-indexed marks,
    /// which are the arcs with a blue outer face.
    pub fn reference(&self, marks: &[MidEdgeId]) -> Result<Vec<u64>> {
        if marks.len() % 2 == 1 {
            return Err(Error::OddMarkCount(marks.len()));
        }
        let d = &*self.domain;
        let mut words = vec![0u64; self.nwords];
        for j in (0..marks.len()).step_by(2) {
            for h in arc_half_edges(d, marks[j], marks[j + 1])? {
                words[h >> 6] ^= 1 << (h & 63);
            }
        }
        self.apply_fault(&mut words);
        Ok(words)
    }

    /// All boundary half-edges (outer face blue everywhere).
    pub fn full_boundary(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.nwords];
        for h in self.domain.boundary_half_edge_cycle() {
            words[h >> 6] ^= 1 << (h & 63);
        }
        words
    }

    pub(crate) fn apply_fault(&self, words: &mut [u64]) {
        if let Some(h) = self.fault {
            words[h >> 6] ^= 1 << (h & 63);
        }
    }

    /// ξ₀ ⊕ D(σ) for the blue faces of `coloring`.
    pub fn add_coloring(&self, words: &mut [u64], coloring: &Coloring) {
        for f in 0..coloring.len() {
            if coloring.is_blue(f) {
                xor_into(words, self.face_mask(f));
            }
        }
    }

    /// Follows the path of ξ that starts at mark `start` and returns the
    /// mid-edge where it ends. Requires every vertex to have ξ-degree 0 or
    /// 2 and `start` to have exactly one ξ half-edge.
    pub fn trace(&self, xi: &[u64], start: MidEdgeId) -> Result<MidEdgeId> {
        let mismatch = |what: String| Error::BoundaryMismatch(what);
        let (a, b) = (bit(xi, 2 * start), bit(xi, 2 * start + 1));
        if a == b {
            return Err(mismatch(format!("mid-edge {start} is not an endpoint")));
        }
        let mut h = if a { 2 * start } else { 2 * start + 1 };
        for _ in 0..=self.partners.len() {
            let [p, q] = self.partners[h];
            let pin = p != u32::MAX && bit(xi, p as usize);
            let qin = q != u32::MAX && bit(xi, q as usize);
            let next = match (pin, qin) {
                (true, false) => p as usize,
                (false, true) => q as usize,
                _ => {
                    let v = self.domain.half_edge_vertex(h);
                    return Err(mismatch(format!("vertex {v} has odd or excess ξ-degree")));
                }
            };
            let other = next ^ 1;
            if bit(xi, other) {
                h = other;
            } else {
                return Ok(next / 2);
            }
        }
        Err(mismatch("trace did not terminate".into()))
    }
}

/// Boundary half-edges strictly between the two mid-edges on the
/// counterclockwise arc from `a` to `b`, plus the halves touching `a` and `b`.
fn arc_half_edges(d: &HexDomain, a: MidEdgeId, b: MidEdgeId) -> Result<Vec<HalfEdgeId>> {
    let cycle = d.boundary_cycle();
    let n = cycle.len();
    let pa = d.boundary_position(a).ok_or(Error::NotOnBoundary(a))?;
    let pb = d.boundary_position(b).ok_or(Error::NotOnBoundary(b))?;
    let mut out = vec![2 * a + 1];
    let mut p = (pa + 1) % n;
    while p != pb {
        out.extend([2 * cycle[p], 2 * cycle[p] + 1]);
        p = (p + 1) % n;
    }
    out.push(2 * b);
    Ok(out)
}

fn check_cap(d: &HexDomain, cap: usize) -> Result<()> {
    if d.num_faces() > cap.min(62) {
        Err(Error::TooLarge {
            faces: d.num_faces(),
            cap: cap.min(62),
        })
    } else {
        Ok(())
    }
}

/// Visits ξ₀ ⊕ D(σ) for every coloring σ of the faces in Gray-code order.
/// The callback gets the configuration, the coloring bits and the face
/// flipped since the previous call.
pub(crate) fn gray_walk(
    basis: &LoopBasis,
    start: Vec<u64>,
    mut visit: impl FnMut(&[u64], u64, Option<FaceId>) -> Result<()>,
) -> Result<()> {
    let nf = basis.domain.num_faces();
    assert!(nf < 64);
    let mut xi = start;
    let mut color = 0u64;
    visit(&xi, color, None)?;
    for i in 1u64..(1u64 << nf) {
        let f = i.trailing_zeros() as usize;
        xor_into(&mut xi, basis.face_mask(f));
        color ^= 1 << f;
        visit(&xi, color, Some(f))?;
    }
    Ok(())
}

fn outer_words(
    basis: &LoopBasis,
    md: &MarkedDomain,
    convention: OuterConvention,
) -> Result<Vec<u64>> {
    match convention {
        OuterConvention::Alternating => basis.reference(md.marks()),
        OuterConvention::Uniform(_) if md.num_marks() > 0 => Err(Error::InvalidParameter(
            "a uniform outer color admits no disorders".into(),
        )),
        OuterConvention::Uniform(Color::Yellow) => Ok(vec![0; basis.nwords]),
        OuterConvention::Uniform(Color::Blue) => Ok(basis.full_boundary()),
    }
}

/// ξ(σ): half-edges whose two sides carry different colors, with the outer
/// colors given by the coloring's convention.
pub fn coloring_to_loops(md: &MarkedDomain, c: &Coloring) -> Result<LoopConfig> {
    coloring_to_loops_with(&LoopBasis::new(md.shared_domain().clone()), md, c)
}

pub fn coloring_to_loops_with(
    basis: &LoopBasis,
    md: &MarkedDomain,
    c: &Coloring,
) -> Result<LoopConfig> {
    let d = md.domain();
    if c.len() != d.num_faces() {
        return Err(Error::InvalidParameter(format!(
            "coloring has {} faces, domain has {}",
            c.len(),
            d.num_faces()
        )));
    }
    let mut words = outer_words(basis, md, c.convention())?;
    basis.add_coloring(&mut words, c);
    Ok(LoopConfig::new(
        d,
        HalfEdgeSet::from_words(words, d.num_half_edges()),
    ))
}

/// Traces every interface path of ξ and returns the induced pairing.
pub fn link_pattern(d: &HexDomain, xi: &LoopConfig, marks: &[MidEdgeId]) -> Result<LinkPattern> {
    if marks.len() % 2 == 1 {
        return Err(Error::OddMarkCount(marks.len()));
    }
    let mut expected = marks.to_vec();
    expected.sort_unstable();
    let b = xi.boundary();
    if !b.vertices.is_empty() || b.mid_edges != expected {
        return Err(Error::BoundaryMismatch(format!(
            "∂ξ has vertices {:?} and mid-edges {:?}, marks are {:?}",
            b.vertices, b.mid_edges, expected
        )));
    }
    let basis = LoopBasis::new(Arc::new(d.clone()));
    let mut pairs = Vec::new();
    let mut done = Vec::new();
    for &m in marks {
        if done.contains(&m) {
            continue;
        }
        let end = basis.trace(xi.half_edges().words(), m)?;
        done.extend([m, end]);
        pairs.push((m, end));
    }
    Ok(LinkPattern::from_pairs(pairs))
}

/// Every element of W_Ω(U), U = the marks, in Gray-code order of σ.
pub fn enumerate_loop_configs(md: &MarkedDomain, cap: usize) -> Result<Vec<LoopConfig>> {
    let d = md.domain();
    check_cap(d, cap)?;
    let basis = LoopBasis::new(md.shared_domain().clone());
    let mut out = Vec::with_capacity(1 << d.num_faces());
    gray_walk(&basis, basis.reference(md.marks())?, |xi, _, _| {
        out.push(LoopConfig::new(
            d,
            HalfEdgeSet::from_words(xi.to_vec(), d.num_half_edges()),
        ));
        Ok(())
    })?;
    Ok(out)
}

/// A uniform element of W_Ω(U) obtained from a uniform coloring.
pub fn sample_loop_config(md: &MarkedDomain, rng: &mut SampleRng) -> Result<LoopConfig> {
    let c = sample_coloring(md.domain(), rng);
    coloring_to_loops(md, &c)
}

/// Counts and per-configuration checks of the coloring ↔ loop map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoopCheckReport {
    pub faces: usize,
    pub marks: Vec<MidEdgeId>,
    pub colorings: u64,
    /// Distinct configurations produced.
    pub distinct: u64,
    /// Configurations whose boundary is exactly the marks.
    pub boundary_ok: u64,
    /// Colorings with a blue crossing ∂_{u₁u₂} ↔ ∂_{u₃u₄} (4 marks only).
    pub crossing: u64,
    /// Configurations pairing u₁–u₄ and u₂–u₃ (4 marks only).
    pub linked_14: u64,
    /// Colorings where the two events above disagree, or tracing failed.
    pub mismatches: u64,
    /// How often the path from u₁ ends at u₂, u₃, u₄ (4 marks only).
    pub partners: [u64; 3],
}

impl LoopCheckReport {
    pub fn expected(&self) -> u64 {
        1 << self.faces
    }

    pub fn count_ok(&self) -> bool {
        self.distinct == self.expected() && self.boundary_ok == self.expected()
    }

    pub fn equivalence_ok(&self) -> bool {
        self.mismatches == 0 && self.crossing == self.linked_14
    }
}

/// Runs the counting, injectivity, boundary and (with 4 marks) crossing
/// equivalence checks in one pass over all colorings.
pub fn loop_checks(basis: &LoopBasis, md: &MarkedDomain, cap: usize) -> Result<LoopCheckReport> {
    let d = md.domain();
    check_cap(d, cap)?;
    let marks = md.marks();
    let four = marks.len() == 4;
    let problem = if four {
        Some(CrossingProblem::arcs(md)?)
    } else {
        None
    };
    let mut scratch = Scratch::default();

    // node parities: vertices first, then mid-edges
    let nv = d.num_vertices();
    let mut target = vec![false; nv + d.num_mid_edges()];
    for &m in marks {
        target[nv + m] = true;
    }
    let mut parity = vec![false; target.len()];
    let mut wrong = target.iter().filter(|&&t| t).count();
    let toggle = |h: usize, parity: &mut [bool], wrong: &mut usize| {
        for node in [d.half_edge_vertex(h), nv + d.half_edge_mid(h)] {
            parity[node] ^= true;
            if parity[node] == target[node] {
                *wrong -= 1;
            } else {
                *wrong += 1;
            }
        }
    };
    let start = basis.reference(marks)?;
    for h in 0..d.num_half_edges() {
        if bit(&start, h) {
            toggle(h, &mut parity, &mut wrong);
        }
    }

    let mut report = LoopCheckReport {
        faces: d.num_faces(),
        marks: marks.to_vec(),
        ..Default::default()
    };
    let nwords = basis.nwords();
    let mut seen: Vec<u64> = Vec::with_capacity(nwords << d.num_faces());
    let mut prev: Vec<u64> = start.clone();
    gray_walk(basis, start, |xi, color, flipped| {
        if flipped.is_some() {
            for (w, (&a, &b)) in prev.iter().zip(xi).enumerate() {
                let mut diff = a ^ b;
                while diff != 0 {
                    let h = 64 * w + diff.trailing_zeros() as usize;
                    diff &= diff - 1;
                    toggle(h, &mut parity, &mut wrong);
                }
            }
            prev.copy_from_slice(xi);
        }
        report.colorings += 1;
        report.boundary_ok += u64::from(wrong == 0);
        seen.extend_from_slice(xi);
        if let Some(p) = &problem {
            let crossing = UnionFindDetector.crosses(p, &[color], &mut scratch);
            report.crossing += u64::from(crossing);
            let end = basis.trace(xi, marks[0]);
            if let Ok(e) = end {
                if let Some(k) = marks[1..].iter().position(|&m| m == e) {
                    report.partners[k] += 1;
                }
            }
            let linked = end.map(|e| e == marks[3]);
            match linked {
                Ok(l) => {
                    report.linked_14 += u64::from(l);
                    report.mismatches += u64::from(l != crossing);
                }
                Err(_) => report.mismatches += 1,
            }
        }
        Ok(())
    })?;
    report.distinct = if nwords == 1 {
        seen.sort_unstable();
        seen.dedup();
        seen.len() as u64
    } else {
        let mut rows: Vec<&[u64]> = seen.chunks_exact(nwords).collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len() as u64
    };
    Ok(report)
}

/// Exhaustive check that σ crosses iff ξ(σ) pairs u₁–u₄ and u₂–u₃.
pub fn crossing_equivalence_check(md: &MarkedDomain, cap: usize) -> Result<LoopCheckReport> {
    md.expect_marks(4)?;
    loop_checks(&LoopBasis::new(md.shared_domain().clone()), md, cap)
}

/// Exhaustive count of W_Ω(U) with injectivity and boundary checks.
pub fn count_check(md: &MarkedDomain, cap: usize) -> Result<LoopCheckReport> {
    loop_checks(&LoopBasis::new(md.shared_domain().clone()), md, cap)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub configs: usize,
    pub samples: u64,
    pub statistic: f64,
    pub dof: usize,
    pub critical_99: f64,
    pub pass: bool,
}

/// χ² test of `sample_loop_config` against the enumerated set W_Ω(U).
pub fn uniformity_check(
    md: &MarkedDomain,
    samples: u64,
    seed: u64,
    cap: usize,
) -> Result<UniformityReport> {
    let all = enumerate_loop_configs(md, cap)?;
    let index: HashMap<&HalfEdgeSet, usize> = all
        .iter()
        .enumerate()
        .map(|(i, c)| (c.half_edges(), i))
        .collect();
    let mut counts = vec![0u64; all.len()];
    for i in 0..samples {
        let xi = sample_loop_config(md, &mut SampleRng::new(seed, 0, i))?;
        let k = index.get(xi.half_edges()).ok_or_else(|| {
            Error::BoundaryMismatch("sampled configuration is not in the enumerated set".into())
        })?;
        counts[*k] += 1;
    }
    let statistic = chi_square_uniform(&counts);
    let dof = all.len() - 1;
    let critical_99 = chi_square_critical(dof, 0.99);
    Ok(UniformityReport {
        configs: all.len(),
        samples,
        statistic,
        dof,
        critical_99,
        pass: statistic < critical_99,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexlattice::FaceCoord;

    fn hexagon() -> Arc<HexDomain> {
        Arc::new(HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap())
    }

    fn tri() -> Arc<HexDomain> {
        Arc::new(
            HexDomain::new(
                [
                    FaceCoord::new(0, 0),
                    FaceCoord::new(1, 0),
                    FaceCoord::new(0, 1),
                ],
                1.0,
            )
            .unwrap(),
        )
    }

    #[test]
    fn single_hexagon_two_configs_xor_to_the_boundary_loop() {
        let md = MarkedDomain::new(hexagon(), vec![0, 1, 3, 5]).unwrap();
        let blue = coloring_to_loops(&md, &Coloring::uniform(1, Color::Blue)).unwrap();
        let yellow = coloring_to_loops(&md, &Coloring::uniform(1, Color::Yellow)).unwrap();
        assert_eq!(blue.boundary().mid_edges, vec![0, 1, 3, 5]);
        assert_eq!(yellow.boundary().mid_edges, vec![0, 1, 3, 5]);
        let x = blue.half_edges().xor(yellow.half_edges());
        assert_eq!(x.count(), 12);
    }

    #[test]
    fn hexagon_link_patterns() {
        let d = hexagon();
        let md = MarkedDomain::new(d.clone(), vec![0, 1, 3, 5]).unwrap();
        let yellow = coloring_to_loops(&md, &Coloring::uniform(1, Color::Yellow)).unwrap();
        // outer blue on m0→m1 and m3→m5: the configuration is those two arcs
        assert_eq!(
            link_pattern(&d, &yellow, md.marks()).unwrap(),
            LinkPattern::from_pairs([(0, 1), (3, 5)])
        );
        let blue = coloring_to_loops(&md, &Coloring::uniform(1, Color::Blue)).unwrap();
        let lp = link_pattern(&d, &blue, md.marks()).unwrap();
        assert_eq!(lp, LinkPattern::from_pairs([(0, 5), (1, 3)]));
        assert!(lp.is_planar(&d));
        let empty = LoopConfig::new(&d, HalfEdgeSet::new(12));
        assert_eq!(
            link_pattern(&d, &empty, &[]).unwrap(),
            LinkPattern::default()
        );
        assert!(matches!(
            link_pattern(&d, &empty, &[0, 1]),
            Err(Error::BoundaryMismatch(_))
        ));
    }

    #[test]
    fn hexagon_without_marks() {
        let md = MarkedDomain::new(hexagon(), vec![]).unwrap();
        let all = enumerate_loop_configs(&md, 24).unwrap();
        let mut counts: Vec<usize> = all.iter().map(|c| c.half_edges().count()).collect();
        counts.sort();
        assert_eq!(counts, vec![0, 12]);
    }

    #[test]
    fn three_faces_eight_closed_configs() {
        let md = MarkedDomain::new(tri(), vec![]).unwrap();
        let all = enumerate_loop_configs(&md, 24).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|c| c.boundary().is_empty()));
        let r = count_check(&md, 24).unwrap();
        assert!(r.count_ok(), "{r:?}");
    }

    #[test]
    fn complement_differs_by_closed_loops() {
        let d = tri();
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(d.clone(), vec![cyc[0], cyc[3], cyc[7], cyc[10]]).unwrap();
        for i in 0..8 {
            let c = Coloring::from_index(3, i);
            let a = coloring_to_loops(&md, &c).unwrap();
            let b = coloring_to_loops(&md, &c.complement()).unwrap();
            assert!(a.xor(&d, &b).boundary().is_empty());
            assert_eq!(a.boundary().mid_edges.len(), 4);
        }
    }

    #[test]
    fn equivalence_on_small_domains() {
        let d = tri();
        let cyc = d.boundary_cycle().to_vec();
        let n = cyc.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let md = MarkedDomain::new(d.clone(), vec![cyc[a], cyc[b], cyc[c], cyc[e]])
                            .unwrap();
                        let r = crossing_equivalence_check(&md, 24).unwrap();
                        assert!(r.equivalence_ok() && r.count_ok(), "{r:?}");
                    }
                }
            }
        }
        let md = MarkedDomain::new(hexagon(), vec![0, 1, 3, 5]).unwrap();
        let r = crossing_equivalence_check(&md, 24).unwrap();
        assert_eq!((r.crossing, r.linked_14, r.colorings), (1, 1, 2));
    }

    #[test]
    fn fault_is_detected() {
        let d = tri();
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(d.clone(), vec![cyc[0], cyc[3], cyc[7], cyc[10]]).unwrap();
        let basis = LoopBasis::new(d).with_fault(5);
        let r = loop_checks(&basis, &md, 24).unwrap();
        assert!(!r.count_ok() || !r.equivalence_ok());
    }

    #[test]
    fn too_large() {
        let d = Arc::new(HexDomain::new((0..5).map(|q| FaceCoord::new(q, 0)), 1.0).unwrap());
        let md = MarkedDomain::new(d, vec![]).unwrap();
        assert_eq!(
            count_check(&md, 4).unwrap_err(),
            Error::TooLarge { faces: 5, cap: 4 }
        );
    }

    #[test]
    fn sampling_is_uniform() {
        let md = MarkedDomain::new(hexagon(), vec![0, 1, 3, 5]).unwrap();
        let blue = coloring_to_loops(&md, &Coloring::uniform(1, Color::Blue)).unwrap();
        let n = 100_000;
        let hits = (0..n)
            .filter(|&i| sample_loop_config(&md, &mut SampleRng::new(4, 0, i)).unwrap() == blue)
            .count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 0.01);

        let d = tri();
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(d, vec![cyc[0], cyc[3], cyc[7], cyc[10]]).unwrap();
        let r = uniformity_check(&md, 40_000, 8, 24).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
