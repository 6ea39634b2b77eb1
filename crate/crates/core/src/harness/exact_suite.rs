use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::corpus::corpus;
use crate::eisenstein::Rational;
use crate::error::{Error, Result};
use crate::hexlattice::{FaceId, HalfEdgeId, HexDomain, MarkedDomain, MidEdgeId};
use crate::loops::{loop_checks, LoopBasis, DEFAULT_ENUMERATION_CAP};
use crate::observable::{
    boundary_report, discrete_contour_integral, elementary_contour, exact_field,
    holomorphicity_sweep, simple_face_cycles, CrossingCounts, HValue, ObservableEngine,
    ObservableField,
};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSuiteOptions {
    pub max_faces: usize,
    /// Half-edge to flip in every configuration (taken modulo the domain's
    /// half-edge count). The suite must then fail.
    pub fault: Option<HalfEdgeId>,
    pub cap: usize,
}

impl Default for ExactSuiteOptions {
    fn default() -> Self {
        Self {
            max_faces: 6,
            fault: None,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

const MAX_EXAMPLES: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub examples: Vec<String>,
}

impl CheckLine {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(what());
            }
        }
    }

    fn merge(&mut self, other: CheckLine) {
        self.cases += other.cases;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

pub const CHECK_NAMES: [&str; 6] = [
    "holomorphicity",
    "contour-integrals",
    "counting",
    "crossing-equivalence",
    "boundary-values",
    "single-hexagon",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSuiteReport {
    pub options: ExactSuiteOptions,
    pub domains: usize,
    pub triples: u64,
    pub four_mark_sets: u64,
    pub vertices_checked: u64,
    pub contours_checked: u64,
    pub checks: Vec<CheckLine>,
}

impl ExactSuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckLine::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckLine> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Partial {
    lines: Vec<CheckLine>,
    triples: u64,
    four: u64,
    vertices: u64,
    contours: u64,
}

impl Partial {
    fn new() -> Self {
        Self {
            lines: CHECK_NAMES.iter().map(|n| CheckLine::new(n)).collect(),
            ..Default::default()
        }
    }

    fn line(&mut self, name: &str) -> &mut CheckLine {
        self.lines
            .iter_mut()
            .find(|l| l.name == name)
            .expect("known check")
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.lines.iter_mut().zip(other.lines) {
            a.merge(b);
        }
        self.triples += other.triples;
        self.four += other.four;
        self.vertices += other.vertices;
        self.contours += other.contours;
        self
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

fn label(d: &HexDomain, marks: &[MidEdgeId]) -> String {
    let faces: Vec<String> = d
        .faces()
        .iter()
        .map(|f| format!("({},{})", f.q, f.r))
        .collect();
    format!("faces [{}] marks {:?}", faces.join(" "), marks)
}

/// Blue clusters of every coloring as masks over boundary positions.
struct ClusterMasks {
    len: usize,
    offsets: Vec<u32>,
    masks: Vec<u128>,
}

impl ClusterMasks {
    fn new(d: &HexDomain) -> Result<Self> {
        let cycle = d.boundary_cycle();
        if cycle.len() > 128 {
            return Err(Error::TooLarge {
                faces: d.num_faces(),
                cap: 31,
            });
        }
        let nf = d.num_faces();
        let mut face_mask = vec![0u128; nf];
        for (p, &m) in cycle.iter().enumerate() {
            face_mask[d.edge(m).left] |= 1 << p;
        }
        let mut offsets = vec![0u32];
        let mut masks = Vec::new();
        let mut uf = UnionFind::default();
        let mut acc = vec![0u128; nf];
        for c in 0u64..(1 << nf) {
            uf.reset(nf);
            let blue = |f: usize| c >> f & 1 == 1;
            for f in (0..nf).filter(|&f| blue(f)) {
                for &g in d.face_neighbors(f).iter().flatten() {
                    if g > f && blue(g) {
                        uf.union(f, g);
                    }
                }
            }
            acc.iter_mut().for_each(|a| *a = 0);
            for f in (0..nf).filter(|&f| blue(f)) {
                acc[uf.find(f)] |= face_mask[f];
            }
            masks.extend(acc.iter().copied().filter(|&a| a != 0));
            offsets.push(masks.len() as u32);
        }
        Ok(Self {
            len: cycle.len(),
            offsets,
            masks,
        })
    }

    /// Positions from `a` counterclockwise to `b`, both included.
    fn range(&self, a: usize, b: usize) -> u128 {
        let upto = |k: usize| {
            if k >= 127 {
                u128::MAX
            } else {
                (1u128 << (k + 1)) - 1
            }
        };
        if a <= b {
            upto(b) & !(upto(a) >> 1)
        } else {
            (upto(self.len - 1) & !(upto(a) >> 1)) | upto(b)
        }
    }

    /// Number of colorings with a blue cluster meeting both position sets.
    fn count(&self, x: u128, y: u128) -> u64 {
        self.offsets
            .windows(2)
            .filter(|w| {
                self.masks[w[0] as usize..w[1] as usize]
                    .iter()
                    .any(|&m| m & x != 0 && m & y != 0)
            })
            .count() as u64
    }
}

fn check_domain(d: Arc<HexDomain>, opts: &ExactSuiteOptions) -> Result<Partial> {
    let mut part = Partial::new();
    let fault = opts.fault.map(|h| h % d.num_half_edges());
    let mut basis = LoopBasis::new(d.clone());
    if let Some(h) = fault {
        basis = basis.with_fault(h);
    }
    let cycle = d.boundary_cycle().to_vec();

    // counting and bijection, 0 and 4 marks; partner counts feed the fields below
    let mut partners: HashMap<[usize; 4], [u64; 3]> = HashMap::new();
    let mut mark_sets: Vec<Vec<usize>> = vec![Vec::new()];
    mark_sets.extend(subsets(cycle.len(), 4));
    for pos in mark_sets {
        let marks: Vec<MidEdgeId> = pos.iter().map(|&i| cycle[i]).collect();
        let md = MarkedDomain::new(d.clone(), marks.clone())?;
        let rep = loop_checks(&basis, &md, opts.cap);
        let four = marks.len() == 4;
        part.four += u64::from(four);
        match rep {
            Ok(rep) => {
                part.line("counting").record(rep.count_ok(), || {
                    format!(
                        "{}: {} distinct, {} with ∂ξ = U, expected {}",
                        label(&d, &marks),
                        rep.distinct,
                        rep.boundary_ok,
                        rep.expected()
                    )
                });
                if four {
                    part.line("crossing-equivalence")
                        .record(rep.equivalence_ok(), || {
                            format!("{}: {} mismatches", label(&d, &marks), rep.mismatches)
                        });
                    partners.insert([pos[0], pos[1], pos[2], pos[3]], rep.partners);
                }
            }
            Err(e) => {
                part.line("counting")
                    .record(false, || format!("{}: {e}", label(&d, &marks)));
                if four {
                    part.line("crossing-equivalence")
                        .record(false, || format!("{}: {e}", label(&d, &marks)));
                }
            }
        }
    }

    // observable identities over every triple
    let clusters = ClusterMasks::new(&d)?;
    let cycles = simple_face_cycles(&d, d.num_faces());
    let elementary: Vec<Vec<FaceId>> = d
        .interior_vertices()
        .map(|v| elementary_contour(&d, v))
        .collect::<Result<_>>()?;
    let interior: Vec<MidEdgeId> = (0..d.num_mid_edges())
        .filter(|&m| !d.is_boundary_mid_edge(m))
        .collect();
    for t in subsets(cycle.len(), 3) {
        let marks: Vec<MidEdgeId> = t.iter().map(|&i| cycle[i]).collect();
        let md = MarkedDomain::new(d.clone(), marks.clone())?;
        part.triples += 1;
        let field = match triple_field(&md, &t, &partners, &interior, fault, opts.cap) {
            Ok(f) => f,
            Err(e) => {
                for name in [
                    "holomorphicity",
                    "contour-integrals",
                    "boundary-values",
                    "single-hexagon",
                ] {
                    if name != "single-hexagon" || (d.num_faces() == 1 && marks == [1, 3, 5]) {
                        part.line(name)
                            .record(false, || format!("{}: {e}", label(&d, &marks)));
                    }
                }
                continue;
            }
        };
        let holo = holomorphicity_sweep(&field)?;
        part.vertices += holo.checked as u64;
        part.line("holomorphicity").record(holo.ok(), || {
            format!(
                "{}: nonzero residuals {:?}",
                label(&d, &marks),
                holo.nonzero
            )
        });

        let mut bad = Vec::new();
        for c in elementary.iter().chain(&cycles) {
            match discrete_contour_integral(&field, c) {
                Ok(v) => {
                    part.contours += 1;
                    if !v.is_zero() {
                        bad.push(format!("{c:?} -> {v}"));
                    }
                }
                Err(Error::MarkOnContour(_)) => {}
                Err(e) => return Err(e),
            }
        }
        part.line("contour-integrals").record(bad.is_empty(), || {
            format!("{}: {}", label(&d, &marks), bad.join(", "))
        });

        let perc = triple_crossings(&d, &t, &clusters);
        let bv = boundary_report(&field, &perc)?;
        part.line("boundary-values").record(bv.ok(), || {
            let rows: Vec<String> = bv
                .rows
                .iter()
                .filter(|r| !r.ok)
                .map(|r| format!("z={} arc {} λ={} μ={}", r.z, r.arc, r.lambda, r.mu))
                .collect();
            format!("{}: {}", label(&d, &marks), rows.join("; "))
        });

        if d.num_faces() == 1 && marks == [1, 3, 5] {
            single_hexagon(&field, &mut part);
        }
    }
    Ok(part)
}

/// The exact field of a triple. A boundary z joins the triple to a 4-mark
/// set whose configurations W(u₁, u₂, u₃, z) were already enumerated, with
/// the same reference, in the counting pass; the partner of z is read off
/// the pairing found there. Interior z are enumerated directly.
fn triple_field(
    md: &MarkedDomain,
    t: &[usize],
    partners: &HashMap<[usize; 4], [u64; 3]>,
    interior: &[MidEdgeId],
    fault: Option<HalfEdgeId>,
    cap: usize,
) -> Result<ObservableField> {
    let d = md.domain();
    let total = 1i64 << d.num_faces();
    let cycle = d.boundary_cycle();
    let mut engine = ObservableEngine::new(md)?;
    if let Some(h) = fault {
        engine = engine.with_fault(h);
    }
    let mut field = exact_field(&engine, interior, cap)?;
    // partner of position k in a sorted 4-set, for u₁ paired with u₂, u₃, u₄
    const PAIRING: [[usize; 4]; 3] = [[1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    for pz in (0..cycle.len()).filter(|p| !t.contains(p)) {
        let mut s = [t[0], t[1], t[2], pz];
        s.sort_unstable();
        let counts4 = partners.get(&s).ok_or_else(|| {
            Error::BoundaryMismatch(format!("no configurations recorded for {s:?}"))
        })?;
        let iz = s
            .iter()
            .position(|&p| p == pz)
            .expect("z is in its own set");
        let mut counts = [0u64; 3];
        for (k, &c) in counts4.iter().enumerate() {
            let partner = s[PAIRING[k][iz]];
            let j = t
                .iter()
                .position(|&p| p == partner)
                .expect("z pairs with a mark");
            counts[j] += c;
        }
        field.insert(
            cycle[pz],
            HValue::Exact(counts.map(|c| Rational::new(c as i64, total))),
        )?;
    }
    Ok(field)
}

/// λ and μ counts at every boundary z of a triple, from cluster masks.
fn triple_crossings(d: &HexDomain, t: &[usize], clusters: &ClusterMasks) -> CrossingCounts {
    let cycle = d.boundary_cycle();
    let mut out: CrossingCounts = vec![None; d.num_mid_edges()];
    for k in 0..3 {
        // z strictly between u_k and u_{k+1} lies on ∂_j with j = k − 1
        let j = (k + 2) % 3;
        let (a, b) = (t[k], t[(k + 1) % 3]);
        let u = |i: usize| t[(j + i) % 3];
        let mut pz = (a + 1) % cycle.len();
        while pz != b {
            let lambda = clusters.count(clusters.range(u(1), pz), clusters.range(u(2), u(0)));
            let mu = clusters.count(clusters.range(u(0), u(1)), clusters.range(pz, u(2)));
            out[cycle[pz]] = Some((j, lambda, mu));
            pz = (pz + 1) % cycle.len();
        }
    }
    out
}

/// (H₁, H₂, H₃) = (1/2, 0, 1/2) at mid-edge 0 of the lone hexagon.
fn single_hexagon(field: &ObservableField, part: &mut Partial) {
    let half = Rational::new(1, 2);
    let want = [half, Rational::from_integer(0), half];
    let got = field.get(0).ok().and_then(|v| v.exact().copied());
    part.line("single-hexagon")
        .record(got == Some(want), || format!("H(0) = {got:?}"));
}

/// Exhaustive identity checks over the corpus. Failures are report content.
pub fn run_exact_suite(opts: &ExactSuiteOptions) -> Result<ExactSuiteReport> {
    if opts.max_faces == 0 {
        return Err(Error::InvalidParameter(
            "max_faces must be at least 1".into(),
        ));
    }
    let domains: Vec<Arc<HexDomain>> = corpus(opts.max_faces)?.into_iter().map(Arc::new).collect();
    let parts: Vec<Partial> = domains
        .par_iter()
        .map(|d| check_domain(d.clone(), opts))
        .collect::<Result<_>>()?;
    let total = parts.into_iter().fold(Partial::new(), Partial::merge);
    Ok(ExactSuiteReport {
        options: opts.clone(),
        domains: domains.len(),
        triples: total.triples,
        four_mark_sets: total.four,
        vertices_checked: total.vertices,
        contours_checked: total.contours,
        checks: total.lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(6, 3).len(), 20);
        assert_eq!(subsets(6, 4).len(), 15);
        assert_eq!(subsets(3, 4).len(), 0);
    }

    #[test]
    fn single_hexagon_suite() {
        let rep = run_exact_suite(&ExactSuiteOptions {
            max_faces: 1,
            ..Default::default()
        })
        .unwrap();
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.domains, 1);
        assert_eq!(rep.triples, 20);
        assert_eq!(rep.check("single-hexagon").unwrap().cases, 1);
    }

    #[test]
    fn shortcuts_match_direct_computation() {
        use crate::observable::{boundary_values_check, field_mid_edges};
        let opts = ExactSuiteOptions::default();
        for d in corpus(4).unwrap().into_iter().map(Arc::new) {
            let basis = LoopBasis::new(d.clone());
            let cycle = d.boundary_cycle().to_vec();
            let mut partners = HashMap::new();
            for s in subsets(cycle.len(), 4) {
                let md =
                    MarkedDomain::new(d.clone(), s.iter().map(|&i| cycle[i]).collect()).unwrap();
                partners.insert(
                    [s[0], s[1], s[2], s[3]],
                    loop_checks(&basis, &md, 24).unwrap().partners,
                );
            }
            let interior: Vec<usize> = (0..d.num_mid_edges())
                .filter(|&m| !d.is_boundary_mid_edge(m))
                .collect();
            let clusters = ClusterMasks::new(&d).unwrap();
            for t in subsets(cycle.len(), 3).into_iter().step_by(7) {
                let md =
                    MarkedDomain::new(d.clone(), t.iter().map(|&i| cycle[i]).collect()).unwrap();
                let fast = triple_field(&md, &t, &partners, &interior, None, opts.cap).unwrap();
                let slow = crate::observable::observable_exact(&md, 24).unwrap();
                for z in field_mid_edges(&md) {
                    assert_eq!(fast.get(z).unwrap(), slow.get(z).unwrap(), "z = {z}");
                }
                let perc = triple_crossings(&d, &t, &clusters);
                assert_eq!(
                    boundary_report(&slow, &perc).unwrap(),
                    boundary_values_check(&slow).unwrap()
                );
            }
        }
    }

    #[test]
    fn fault_is_caught() {
        let rep = run_exact_suite(&ExactSuiteOptions {
            max_faces: 2,
            fault: Some(0),
            ..Default::default()
        })
        .unwrap();
        assert!(!rep.passed());
        assert!(rep.check("counting").unwrap().failures > 0);
    }
}
