//! Double covers ramified at marked mid-edges and spinor colorings.
//!
//! The cover is encoded by a cut: a half-edge set whose odd-adjacency set is
//! the branch set. Crossing a half-edge of the cut swaps sheets, so a spinor
//! coloring's difference set is the cut XOR the base difference set.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hexlattice::{HalfEdgeId, HexDomain, MarkedDomain, MidEdgeId};
use crate::loops::{
    enumerate_loop_configs, gray_walk, loop_boundary, xor_into, HalfEdgeSet, LoopBasis, LoopConfig,
};
use crate::percolation::{Color, Coloring};
use crate::registry::{Named, Registry};

/// A cut and, when the branch set is odd, the boundary mid-edge that was
/// added to close it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub half_edges: HalfEdgeSet,
    pub absorbed: Option<MidEdgeId>,
}

/// Builds a cut with odd-adjacency set equal to the branch set (plus at most
/// one absorbed boundary mid-edge).
pub trait CutStrategy: Named + Send + Sync {
    fn cut(&self, d: &HexDomain, branch: &[MidEdgeId]) -> Result<Cut>;
}

/// Breadth-first search in the graph whose nodes are vertices and mid-edges
/// and whose edges are half-edges. Neighbours are visited in increasing
/// half-edge order, so ties resolve to the smallest indices. Returns the
/// half-edges of a shortest path from `from` to the first mid-edge
/// accepted by `is_target`.
fn shortest_path(
    d: &HexDomain,
    from: MidEdgeId,
    is_target: impl Fn(MidEdgeId) -> bool,
) -> Option<(Vec<HalfEdgeId>, MidEdgeId)> {
    let nv = d.num_vertices();
    // node ids: vertices 0..nv, mid-edges nv..
    let mut via: Vec<Option<HalfEdgeId>> = vec![None; nv + d.num_mid_edges()];
    let mut seen = vec![false; via.len()];
    let mut queue = VecDeque::from([nv + from]);
    seen[nv + from] = true;
    while let Some(node) = queue.pop_front() {
        let steps: Vec<(HalfEdgeId, usize)> = if node >= nv {
            let m = node - nv;
            if m != from && is_target(m) {
                let mut path = Vec::new();
                let mut cur = node;
                while let Some(h) = via[cur] {
                    path.push(h);
                    cur = if cur >= nv {
                        d.half_edge_vertex(h)
                    } else {
                        nv + d.half_edge_mid(h)
                    };
                }
                path.reverse();
                return Some((path, m));
            }
            [2 * m, 2 * m + 1]
                .into_iter()
                .map(|h| (h, d.half_edge_vertex(h)))
                .collect()
        } else {
            let mut hs: Vec<HalfEdgeId> = d
                .vertex_half_edges(node)
                .iter()
                .map(|&h| h as usize)
                .collect();
            hs.sort_unstable();
            hs.into_iter()
                .map(|h| (h, nv + d.half_edge_mid(h)))
                .collect()
        };
        for (h, next) in steps {
            if !seen[next] {
                seen[next] = true;
                via[next] = Some(h);
                queue.push_back(next);
            }
        }
    }
    None
}

fn validate(d: &HexDomain, branch: &[MidEdgeId]) -> Result<Vec<MidEdgeId>> {
    let mut sorted = branch.to_vec();
    sorted.sort_unstable();
    if let Some(&m) = sorted.iter().find(|&&m| m >= d.num_mid_edges()) {
        return Err(Error::InvalidBranchSet(format!(
            "mid-edge {m} does not exist"
        )));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidBranchSet("repeated branch point".into()));
    }
    Ok(sorted)
}

fn path_between(d: &HexDomain, a: MidEdgeId, b: MidEdgeId) -> Result<Vec<HalfEdgeId>> {
    shortest_path(d, a, |m| m == b)
        .map(|(p, _)| p)
        .ok_or_else(|| Error::InvalidBranchSet(format!("no path from {a} to {b}")))
}

/// Path from `a` to the nearest boundary mid-edge outside `avoid`.
fn path_to_boundary(
    d: &HexDomain,
    a: MidEdgeId,
    avoid: &[MidEdgeId],
) -> Result<(Vec<HalfEdgeId>, MidEdgeId)> {
    shortest_path(d, a, |m| d.is_boundary_mid_edge(m) && !avoid.contains(&m)).ok_or_else(|| {
        Error::InvalidBranchSet(format!("no free boundary mid-edge reachable from {a}"))
    })
}

fn pair_cut(
    d: &HexDomain,
    sorted: &[MidEdgeId],
    pairs: &[(usize, usize)],
    leftover: Option<usize>,
) -> Result<Cut> {
    let mut cut = HalfEdgeSet::new(d.num_half_edges());
    for &(i, j) in pairs {
        for h in path_between(d, sorted[i], sorted[j])? {
            cut.toggle(h);
        }
    }
    let mut absorbed = None;
    if let Some(i) = leftover {
        let (path, end) = path_to_boundary(d, sorted[i], sorted)?;
        for h in path {
            cut.toggle(h);
        }
        absorbed = Some(end);
    }
    Ok(Cut {
        half_edges: cut,
        absorbed,
    })
}

/// Consecutive branch points (by index) joined by shortest paths.
pub struct ShortestPairs;

impl Named for ShortestPairs {
    fn name(&self) -> &'static str {
        "shortest-pairs"
    }
}

impl CutStrategy for ShortestPairs {
    fn cut(&self, d: &HexDomain, branch: &[MidEdgeId]) -> Result<Cut> {
        let sorted = validate(d, branch)?;
        let k = sorted.len();
        let pairs: Vec<(usize, usize)> = (0..k / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        pair_cut(d, &sorted, &pairs, (k % 2 == 1).then(|| k - 1))
    }
}

/// First with last, second with second-to-last, and so on.
pub struct NestedPairs;

impl Named for NestedPairs {
    fn name(&self) -> &'static str {
        "nested-pairs"
    }
}

impl CutStrategy for NestedPairs {
    fn cut(&self, d: &HexDomain, branch: &[MidEdgeId]) -> Result<Cut> {
        let sorted = validate(d, branch)?;
        let k = sorted.len();
        let pairs: Vec<(usize, usize)> = (0..k / 2).map(|i| (i, k - 1 - i)).collect();
        pair_cut(d, &sorted, &pairs, (k % 2 == 1).then_some(k / 2))
    }
}

/// Every branch point joined to the first boundary vertex: interior points
/// through their nearest boundary mid-edge, then along the boundary.
/// Needs an even branch set.
pub struct BoundaryArcs;

impl Named for BoundaryArcs {
    fn name(&self) -> &'static str {
        "boundary-arcs"
    }
}

impl CutStrategy for BoundaryArcs {
    fn cut(&self, d: &HexDomain, branch: &[MidEdgeId]) -> Result<Cut> {
        let sorted = validate(d, branch)?;
        if sorted.len() % 2 == 1 {
            return Err(Error::InvalidBranchSet(
                "boundary-arcs cuts need an even branch set".into(),
            ));
        }
        let cycle = d.boundary_cycle();
        let mut cut = HalfEdgeSet::new(d.num_half_edges());
        let along = |cut: &mut HalfEdgeSet, m: MidEdgeId| {
            let p = d.boundary_position(m).expect("boundary mid-edge");
            for &e in &cycle[..p] {
                cut.toggle(2 * e);
                cut.toggle(2 * e + 1);
            }
            cut.toggle(2 * m);
        };
        for &b in &sorted {
            if d.is_boundary_mid_edge(b) {
                along(&mut cut, b);
            } else {
                let (path, end) = path_to_boundary(d, b, &[])?;
                for h in path {
                    cut.toggle(h);
                }
                along(&mut cut, end);
            }
        }
        Ok(Cut {
            half_edges: cut,
            absorbed: None,
        })
    }
}

pub fn cut_strategies() -> Registry<dyn CutStrategy> {
    let mut r: Registry<dyn CutStrategy> = Registry::new("cut strategy");
    r.register(Box::new(ShortestPairs));
    r.register(Box::new(NestedPairs));
    r.register(Box::new(BoundaryArcs));
    r
}

/// The double cover of a domain ramified at the branch points.
#[derive(Clone, Debug)]
pub struct DoubleCover {
    basis: LoopBasis,
    branch_points: Vec<MidEdgeId>,
    cut: Cut,
    strategy: &'static str,
}

impl DoubleCover {
    pub fn domain(&self) -> &HexDomain {
        self.basis.domain()
    }

    pub fn basis(&self) -> &LoopBasis {
        &self.basis
    }

    pub fn branch_points(&self) -> &[MidEdgeId] {
        &self.branch_points
    }

    pub fn cut(&self) -> &HalfEdgeSet {
        &self.cut.half_edges
    }

    /// Boundary mid-edge added to an odd branch set, if any.
    pub fn absorbed(&self) -> Option<MidEdgeId> {
        self.cut.absorbed
    }

    pub fn strategy(&self) -> &'static str {
        self.strategy
    }

    /// Sorted disorder set of every induced loop configuration.
    pub fn disorders(&self) -> Vec<MidEdgeId> {
        let mut out = self.branch_points.clone();
        out.extend(self.cut.absorbed);
        out.sort_unstable();
        out
    }

    /// Whether crossing half-edge `h` swaps sheets.
    pub fn flips(&self, h: HalfEdgeId) -> bool {
        self.cut.half_edges.contains(h)
    }

    /// Sheet swap picked up by a small loop around mid-edge `m`.
    pub fn monodromy(&self, m: MidEdgeId) -> bool {
        self.flips(2 * m) != self.flips(2 * m + 1)
    }

    /// Connected components of the face graph of the cover. Two preimages
    /// of adjacent faces are joined through each half-edge of the shared
    /// edge, with the sheet swapped when that half-edge is in the cut.
    pub fn sheets(&self) -> SheetReport {
        let d = self.domain();
        let n = d.num_faces();
        let mut label = vec![usize::MAX; 2 * n];
        let mut components = 0;
        for s0 in 0..2 * n {
            if label[s0] != usize::MAX {
                continue;
            }
            label[s0] = components;
            let mut queue = VecDeque::from([s0]);
            while let Some(node) = queue.pop_front() {
                let (f, sheet) = (node / 2, node % 2);
                for k in 0..6 {
                    let Some(g) = d.face_neighbors(f)[k] else {
                        continue;
                    };
                    let e = d.face_edges(f)[k];
                    for h in [2 * e, 2 * e + 1] {
                        let next = 2 * g + (sheet ^ usize::from(self.flips(h)));
                        if label[next] == usize::MAX {
                            label[next] = components;
                            queue.push_back(next);
                        }
                    }
                }
            }
            components += 1;
        }
        // in a trivial cover each component holds exactly one preimage of every face
        let split = (0..n).all(|f| label[2 * f] != label[2 * f + 1]);
        SheetReport {
            components,
            split_into_copies: components == 2 && split,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheetReport {
    pub components: usize,
    /// Two components, each projecting bijectively onto the base faces.
    pub split_into_copies: bool,
}

pub fn build_cover(d: Arc<HexDomain>, branch_points: &[MidEdgeId]) -> Result<DoubleCover> {
    build_cover_with(d, branch_points, &ShortestPairs)
}

pub fn build_cover_with(
    d: Arc<HexDomain>,
    branch_points: &[MidEdgeId],
    strategy: &dyn CutStrategy,
) -> Result<DoubleCover> {
    let cut = strategy.cut(&d, branch_points)?;
    let mut branch = branch_points.to_vec();
    branch.sort_unstable();
    Ok(DoubleCover {
        basis: LoopBasis::new(d),
        branch_points: branch,
        cut,
        strategy: strategy.name(),
    })
}

/// One color per base face for the sheet-1 preimage, plus the color of the
/// sheet-1 preimage of the outer face (true = blue). Sheet 2 carries the
/// opposite colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinorColoring {
    pub base: Coloring,
    pub outer_blue: bool,
}

impl SpinorColoring {
    pub fn new(base: Coloring, outer_blue: bool) -> Self {
        Self { base, outer_blue }
    }

    /// Swaps the two sheets.
    pub fn complement(&self) -> Self {
        Self {
            base: self.base.complement(),
            outer_blue: !self.outer_blue,
        }
    }
}

fn spinor_words(cover: &DoubleCover, base: &Coloring, outer_blue: bool) -> Vec<u64> {
    let basis = &cover.basis;
    let mut words = cover.cut.half_edges.words().to_vec();
    basis.add_coloring(&mut words, base);
    if outer_blue {
        xor_into(&mut words, &basis.full_boundary());
    }
    basis.apply_fault(&mut words);
    words
}

/// ρ(ξ̃(σ)): half-edges whose two sides differ on the cover.
pub fn spinor_to_loops(cover: &DoubleCover, s: &SpinorColoring) -> LoopConfig {
    let d = cover.domain();
    assert_eq!(s.base.len(), d.num_faces());
    let words = spinor_words(cover, &s.base, s.outer_blue);
    LoopConfig::new(d, HalfEdgeSet::from_words(words, d.num_half_edges()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpinorCountReport {
    pub faces: usize,
    pub disorders: Vec<MidEdgeId>,
    pub spinor_colorings: u64,
    pub distinct: u64,
    pub expected: u64,
    pub boundary_ok: u64,
    /// Every induced configuration has exactly two spinor preimages.
    pub two_to_one: bool,
}

impl SpinorCountReport {
    pub fn ok(&self) -> bool {
        self.distinct == self.expected
            && self.boundary_ok == self.spinor_colorings
            && self.two_to_one
    }
}

/// All induced configurations, one entry per spinor coloring, sorted.
fn induced_configs(cover: &DoubleCover, cap: usize) -> Result<Vec<Vec<u64>>> {
    let d = cover.domain();
    let cap = cap.min(62);
    if d.num_faces() > cap {
        return Err(Error::TooLarge {
            faces: d.num_faces(),
            cap,
        });
    }
    let mut out = Vec::with_capacity(2 << d.num_faces());
    for outer in [false, true] {
        let start = spinor_words(
            cover,
            &Coloring::uniform(d.num_faces(), Color::Yellow),
            outer,
        );
        gray_walk(&cover.basis, start, |xi, _, _| {
            out.push(xi.to_vec());
            Ok(())
        })?;
    }
    out.sort_unstable();
    Ok(out)
}

/// Enumerates all 2^{#F+1} spinor colorings and checks that they induce
/// 2^{#F} distinct configurations, each twice, all with ∂ξ = disorders.
pub fn count_spinor_configs(cover: &DoubleCover, cap: usize) -> Result<SpinorCountReport> {
    let d = cover.domain();
    let all = induced_configs(cover, cap)?;
    let disorders = cover.disorders();
    let nh = d.num_half_edges();
    let boundary_ok = all
        .iter()
        .filter(|w| {
            let b = loop_boundary(d, &HalfEdgeSet::from_words(w.to_vec(), nh));
            b.vertices.is_empty() && b.mid_edges == disorders
        })
        .count() as u64;
    let mut distinct = 0u64;
    let mut two_to_one = true;
    let mut i = 0;
    while i < all.len() {
        let j = (i..all.len())
            .find(|&j| all[j] != all[i])
            .unwrap_or(all.len());
        distinct += 1;
        two_to_one &= j - i == 2;
        i = j;
    }
    Ok(SpinorCountReport {
        faces: d.num_faces(),
        disorders,
        spinor_colorings: all.len() as u64,
        distinct,
        expected: 1 << d.num_faces(),
        boundary_ok,
        two_to_one,
    })
}

/// The induced set W_Ω(disorders), sorted and deduplicated.
pub fn loop_config_set(cover: &DoubleCover, cap: usize) -> Result<Vec<HalfEdgeSet>> {
    let nh = cover.domain().num_half_edges();
    let mut all = induced_configs(cover, cap)?;
    all.dedup();
    Ok(all
        .into_iter()
        .map(|w| HalfEdgeSet::from_words(w, nh))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpinorEquivalenceReport {
    /// `(reference name, sets equal)` for each comparison made.
    pub comparisons: Vec<(String, bool)>,
}

impl SpinorEquivalenceReport {
    pub fn ok(&self) -> bool {
        !self.comparisons.is_empty() && self.comparisons.iter().all(|(_, eq)| *eq)
    }
}

/// Compares the induced configuration set with the sets from every other
/// cut strategy that accepts the same disorders and, when all disorders
/// are on the boundary, with the coloring bijection.
pub fn equivalence_check(cover: &DoubleCover, cap: usize) -> Result<SpinorEquivalenceReport> {
    let d = cover.shared_domain();
    let mine = loop_config_set(cover, cap)?;
    let disorders = cover.disorders();
    let mut comparisons = Vec::new();
    for strategy in cut_strategies().iter() {
        if strategy.name() == cover.strategy {
            continue;
        }
        let Ok(other) = build_cover_with(d.clone(), &disorders, strategy) else {
            continue;
        };
        if other.absorbed().is_some() {
            continue;
        }
        comparisons.push((
            strategy.name().to_string(),
            loop_config_set(&other, cap)? == mine,
        ));
    }
    if disorders.iter().all(|&m| d.is_boundary_mid_edge(m)) {
        let md = MarkedDomain::sorted(d.clone(), disorders)?;
        let mut theirs: Vec<HalfEdgeSet> = enumerate_loop_configs(&md, cap)?
            .into_iter()
            .map(|c| c.half_edges().clone())
            .collect();
        theirs.sort_unstable();
        comparisons.push(("coloring bijection".into(), theirs == mine));
    }
    Ok(SpinorEquivalenceReport { comparisons })
}

impl DoubleCover {
    fn shared_domain(&self) -> &Arc<HexDomain> {
        self.basis.shared_domain()
    }

    /// Whether every vertex has an even number of cut half-edges and the
    /// odd mid-edges are exactly the disorders.
    pub fn cut_is_consistent(&self) -> bool {
        let b = loop_boundary(self.domain(), self.cut());
        b.vertices.is_empty() && b.mid_edges == self.disorders()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexlattice::FaceCoord;
    use crate::loops::coloring_to_loops;

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

    fn interior_mids(d: &HexDomain) -> Vec<MidEdgeId> {
        (0..d.num_mid_edges())
            .filter(|&m| !d.is_boundary_mid_edge(m))
            .collect()
    }

    #[test]
    fn empty_branch_set_is_the_plain_difference_set() {
        let d = tri();
        let cover = build_cover(d.clone(), &[]).unwrap();
        assert!(cover.cut().is_empty());
        assert_eq!(cover.sheets().components, 2);
        let md = MarkedDomain::new(d, vec![]).unwrap();
        for i in 0..8 {
            let c = Coloring::from_index(3, i);
            assert_eq!(
                spinor_to_loops(&cover, &SpinorColoring::new(c.clone(), false)),
                coloring_to_loops(&md, &c).unwrap()
            );
        }
        let r = count_spinor_configs(&cover, 24).unwrap();
        assert!(r.ok() && r.distinct == 8, "{r:?}");
    }

    #[test]
    fn single_interior_point_absorbs_a_boundary_point() {
        let d = tri();
        let u = interior_mids(&d)[0];
        let cover = build_cover(d.clone(), &[u]).unwrap();
        let a = cover.absorbed().unwrap();
        assert!(d.is_boundary_mid_edge(a));
        assert!(cover.cut_is_consistent());
        assert!(cover.monodromy(u) && cover.monodromy(a));
        assert!(count_spinor_configs(&cover, 24).unwrap().ok());
    }

    #[test]
    fn two_interior_points() {
        let d = tri();
        let inner = interior_mids(&d);
        assert_eq!(inner.len(), 3);
        let cover = build_cover(d.clone(), &inner[..2]).unwrap();
        assert_eq!(cover.absorbed(), None);
        assert_eq!(cover.sheets().components, 1);
        let r = count_spinor_configs(&cover, 24).unwrap();
        assert!(r.ok() && r.distinct == 8, "{r:?}");
        assert!(equivalence_check(&cover, 24).unwrap().ok());
    }

    #[test]
    fn boundary_branch_points_split_into_two_copies() {
        let d = hexagon();
        let cover = build_cover(d.clone(), &[0, 1, 3, 5]).unwrap();
        let sheets = cover.sheets();
        assert!(sheets.split_into_copies, "{sheets:?}");
        let md = MarkedDomain::new(d, vec![0, 1, 3, 5]).unwrap();
        let mine = loop_config_set(&cover, 24).unwrap();
        assert_eq!(mine.len(), 2);
        for color in [Color::Blue, Color::Yellow] {
            let xi = coloring_to_loops(&md, &Coloring::uniform(1, color)).unwrap();
            assert!(mine.contains(xi.half_edges()));
        }
        assert!(equivalence_check(&cover, 24).unwrap().ok());
    }

    #[test]
    fn sheet_swap_gives_the_same_configuration() {
        let d = tri();
        let inner = interior_mids(&d);
        let cover = build_cover(d, &[inner[0], inner[2]]).unwrap();
        for i in 0..8 {
            for outer in [false, true] {
                let s = SpinorColoring::new(Coloring::from_index(3, i), outer);
                let a = spinor_to_loops(&cover, &s);
                assert_eq!(a, spinor_to_loops(&cover, &s.complement()));
                assert_eq!(a.boundary().mid_edges, cover.disorders());
            }
        }
    }

    #[test]
    fn strategies_agree_on_a_mixed_branch_set() {
        let d = Arc::new(
            HexDomain::new(
                [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)].map(|(q, r)| FaceCoord::new(q, r)),
                1.0,
            )
            .unwrap(),
        );
        let inner = interior_mids(&d);
        let branch = [
            inner[0],
            inner[3],
            d.boundary_cycle()[2],
            d.boundary_cycle()[7],
        ];
        for s in cut_strategies().iter() {
            let cover = build_cover_with(d.clone(), &branch, s).unwrap();
            assert!(cover.cut_is_consistent(), "{}", s.name());
            assert!(
                count_spinor_configs(&cover, 24).unwrap().ok(),
                "{}",
                s.name()
            );
            assert!(equivalence_check(&cover, 24).unwrap().ok(), "{}", s.name());
        }
    }

    #[test]
    fn invalid_branch_sets() {
        let d = tri();
        assert!(matches!(
            build_cover(d.clone(), &[1, 1]),
            Err(Error::InvalidBranchSet(_))
        ));
        assert!(matches!(
            build_cover(d.clone(), &[999]),
            Err(Error::InvalidBranchSet(_))
        ));
        assert!(matches!(
            build_cover_with(d, &[1], &BoundaryArcs),
            Err(Error::InvalidBranchSet(_))
        ));
    }
}
