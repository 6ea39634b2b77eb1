use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use super::mc::{BoundarySweep, SweepScratch};
use super::ObservableField;
use crate::eisenstein::{format_rational, Eisenstein, Rational};
use crate::error::{Error, Result};
use crate::hexlattice::{FaceId, HexDomain, MidEdgeId, VertexId};

/// Σ_{k=1}^{3} τᵏ F(z_k) over the mid-edges around `v` in counterclockwise order.
pub fn holomorphicity_residual(field: &ObservableField, v: VertexId) -> Result<Eisenstein> {
    let zs = vertex_mids(field, v)?;
    let mut acc = Eisenstein::zero();
    for (k, &z) in zs.iter().enumerate() {
        acc += Eisenstein::tau_pow(k as i64 + 1) * field.f_exact(z)?;
    }
    Ok(acc)
}

/// Floating-point residual modulus and the largest 95% half-width among
/// the nine H estimates entering it.
pub fn holomorphicity_residual_approx(field: &ObservableField, v: VertexId) -> Result<(f64, f64)> {
    let zs = vertex_mids(field, v)?;
    let (mut re, mut im) = (0.0, 0.0);
    let mut half = 0.0f64;
    for (k, &z) in zs.iter().enumerate() {
        let value = field.get(z)?;
        let (fr, fi) = value.f_complex();
        let (tr, ti) = Eisenstein::tau_pow(k as i64 + 1).to_complex();
        re += tr * fr - ti * fi;
        im += tr * fi + ti * fr;
        for (lo, hi) in value.ci() {
            half = half.max((hi - lo) / 2.0);
        }
    }
    Ok((re.hypot(im), half))
}

fn vertex_mids(field: &ObservableField, v: VertexId) -> Result<[MidEdgeId; 3]> {
    let md = field.marked_domain();
    let zs = md.domain().vertex_midedges(v)?;
    if let Some(&mark) = zs.iter().find(|z| md.marks().contains(z)) {
        return Err(Error::MarkAtVertex { vertex: v, mark });
    }
    Ok(zs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HolomorphicityReport {
    pub checked: usize,
    /// Vertices next to a mark, where the identity does not apply.
    pub skipped: usize,
    pub nonzero: Vec<(VertexId, String)>,
}

impl HolomorphicityReport {
    pub fn ok(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Exact residual at every vertex of degree three whose mid-edges avoid the marks.
pub fn holomorphicity_sweep(field: &ObservableField) -> Result<HolomorphicityReport> {
    let d = field.marked_domain().domain();
    let mut report = HolomorphicityReport::default();
    for v in 0..d.num_vertices() {
        if d.vertex_degree(v) != 3 {
            continue;
        }
        match holomorphicity_residual(field, v) {
            Ok(r) => {
                report.checked += 1;
                if !r.is_zero() {
                    report.nonzero.push((v, r.to_string()));
                }
            }
            Err(Error::MarkAtVertex { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// The three faces around an interior vertex, counterclockwise.
pub fn elementary_contour(d: &HexDomain, v: VertexId) -> Result<Vec<FaceId>> {
    Ok(d.vertex_faces(v)?.to_vec())
}

/// Σ_j F(e_j)(w°_{j+1} − w°_j) along a closed face sequence, with face
/// centres in exact lattice coordinates (the common factor δ·e^{iπ/6} is
/// dropped). A repeated first face at the end is accepted.
pub fn discrete_contour_integral(
    field: &ObservableField,
    contour: &[FaceId],
) -> Result<Eisenstein> {
    let md = field.marked_domain();
    let d = md.domain();
    let mut w = contour.to_vec();
    if w.len() > 1 && w.first() == w.last() {
        w.pop();
    }
    if w.len() < 3 {
        return Err(Error::NotAContour(format!("{} faces", w.len())));
    }
    if let Some(&f) = w.iter().find(|&&f| f >= d.num_faces()) {
        return Err(Error::NotAContour(format!("face {f} does not exist")));
    }
    let mut sorted = w.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::NotAContour("faces repeat".into()));
    }
    let mut acc = Eisenstein::zero();
    for j in 0..w.len() {
        let (a, b) = (w[j], w[(j + 1) % w.len()]);
        let e = d
            .shared_edge(a, b)
            .ok_or_else(|| Error::NotAContour(format!("faces {a} and {b} are not adjacent")))?;
        if md.marks().contains(&e) {
            return Err(Error::MarkOnContour(e));
        }
        let step = d.face(b).center_eisenstein() - d.face(a).center_eisenstein();
        acc += field.f_exact(e)? * step;
    }
    Ok(acc)
}

/// Simple cycles of length ≥ 3 in the face adjacency graph, each listed
/// once, starting at its smallest face.
pub fn simple_face_cycles(d: &HexDomain, max_len: usize) -> Vec<Vec<FaceId>> {
    fn extend(
        d: &HexDomain,
        path: &mut Vec<FaceId>,
        on: &mut [bool],
        max_len: usize,
        out: &mut Vec<Vec<FaceId>>,
    ) {
        let start = path[0];
        let last = *path.last().unwrap();
        for g in d.face_neighbors(last).iter().flatten().copied() {
            if g == start && path.len() >= 3 && path[1] < last {
                out.push(path.clone());
            }
            if g > start && !on[g] && path.len() < max_len {
                on[g] = true;
                path.push(g);
                extend(d, path, on, max_len, out);
                path.pop();
                on[g] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; d.num_faces()];
    for s in 0..d.num_faces() {
        on[s] = true;
        extend(d, &mut vec![s], &mut on, max_len, &mut out);
        on[s] = false;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryValueRow {
    pub z: MidEdgeId,
    /// Arc index j (1-based) with z ∈ ∂_j.
    pub arc: usize,
    #[serde(serialize_with = "as_text")]
    pub h_j: Rational,
    #[serde(serialize_with = "as_text")]
    pub lambda: Rational,
    #[serde(serialize_with = "as_text")]
    pub mu: Rational,
    #[serde(serialize_with = "as_text")]
    pub lambda_percolation: Rational,
    #[serde(serialize_with = "as_text")]
    pub mu_percolation: Rational,
    pub ok: bool,
}

fn as_text<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryValueRow>,
    pub violations: usize,
}

impl BoundaryReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// At every evaluated boundary z ∈ ∂_j: H_j = 0, F = λτ^{j−1} + μτ^{j+1}
/// with λ = H_{j−1}, μ = H_{j+1} nonnegative and λ + μ ≤ 1, and λ, μ equal
/// to the two blue crossing probabilities computed by enumerating colorings.
pub fn boundary_values_check(field: &ObservableField) -> Result<BoundaryReport> {
    let md = field.marked_domain();
    let d = md.domain();
    let nf = d.num_faces();
    if nf > super::EXACT_FACE_LIMIT {
        return Err(Error::TooLarge {
            faces: nf,
            cap: super::EXACT_FACE_LIMIT,
        });
    }
    let sweep = BoundarySweep::new(md)?;
    let mut scratch = SweepScratch::default();
    // per mid-edge: (arc, λ count, μ count)
    let mut perc: CrossingCounts = vec![None; d.num_mid_edges()];
    for c in 0u64..(1 << nf) {
        sweep.run(&[c], &mut scratch, |z, j, lambda, mu| {
            let e = perc[z].get_or_insert((j, 0, 0));
            e.1 += u64::from(lambda);
            e.2 += u64::from(mu);
        });
    }
    boundary_report(field, &perc)
}

/// Per boundary mid-edge: (arc index j, λ count, μ count) over all 2^{#F} colorings.
pub(crate) type CrossingCounts = Vec<Option<(usize, u64, u64)>>;

pub(crate) fn boundary_report(
    field: &ObservableField,
    perc: &CrossingCounts,
) -> Result<BoundaryReport> {
    let nf = field.marked_domain().domain().num_faces();
    let total = 1i64 << nf;
    let mut report = BoundaryReport::default();
    for (z, value) in field.entries() {
        let Some((j, lc, mc)) = perc[z] else { continue };
        let h = value
            .exact()
            .ok_or_else(|| Error::InvalidParameter("field is not exact".into()))?;
        let (lambda, mu, hj) = (h[(j + 2) % 3], h[(j + 1) % 3], h[j]);
        let (lp, mp) = (Ratio::new(lc as i64, total), Ratio::new(mc as i64, total));
        let f = value.f_exact().expect("exact");
        let decomposed = Eisenstein::tau_pow(j as i64).scale(lambda)
            + Eisenstein::tau_pow(j as i64 + 2).scale(mu);
        let zero = Rational::zero();
        let ok = hj.is_zero()
            && lambda >= zero
            && mu >= zero
            && lambda + mu <= Rational::one()
            && f == decomposed
            && lambda == lp
            && mu == mp;
        report.violations += usize::from(!ok);
        report.rows.push(BoundaryValueRow {
            z,
            arc: j + 1,
            h_j: hj,
            lambda,
            mu,
            lambda_percolation: lp,
            mu_percolation: mp,
            ok,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hexlattice::{FaceCoord, MarkedDomain};
    use crate::observable::observable_exact;

    fn three_face_field() -> ObservableField {
        let d = HexDomain::new(
            [(0, 0), (1, 0), (0, 1)].map(|(q, r)| FaceCoord::new(q, r)),
            1.0,
        )
        .unwrap();
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(Arc::new(d), vec![cyc[0], cyc[5], cyc[10]]).unwrap();
        observable_exact(&md, 24).unwrap()
    }

    #[test]
    fn central_vertex_residual_is_zero() {
        let field = three_face_field();
        let d = field.marked_domain().domain();
        let v = d.interior_vertices().next().unwrap();
        assert!(holomorphicity_residual(&field, v).unwrap().is_zero());
        let rep = holomorphicity_sweep(&field).unwrap();
        assert!(rep.ok() && rep.checked >= 1, "{rep:?}");
    }

    #[test]
    fn contours_vanish() {
        let field = three_face_field();
        let d = field.marked_domain().domain();
        let v = d.interior_vertices().next().unwrap();
        let c = elementary_contour(d, v).unwrap();
        assert!(discrete_contour_integral(&field, &c).unwrap().is_zero());
        let rev: Vec<_> = c.iter().rev().copied().collect();
        assert!(discrete_contour_integral(&field, &rev).unwrap().is_zero());
        assert_eq!(simple_face_cycles(d, 6).len(), 1);
        assert!(matches!(
            discrete_contour_integral(&field, &[0, 1]),
            Err(Error::NotAContour(_))
        ));
    }

    #[test]
    fn hexagon_boundary_values() {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        let md = MarkedDomain::new(Arc::new(d), vec![1, 3, 5]).unwrap();
        let field = observable_exact(&md, 24).unwrap();
        let rep = boundary_values_check(&field).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.rows.len(), 3);
        let row = rep.rows.iter().find(|r| r.z == 0).unwrap();
        let half = Rational::new(1, 2);
        assert_eq!((row.arc, row.lambda, row.mu), (2, half, half));
    }

    #[test]
    fn boundary_values_on_three_faces() {
        let rep = boundary_values_check(&three_face_field()).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn mark_at_vertex_is_refused() {
        let d = HexDomain::new(
            [(0, 0), (1, 0), (0, 1)].map(|(q, r)| FaceCoord::new(q, r)),
            1.0,
        )
        .unwrap();
        let v = d.interior_vertices().next().unwrap();
        let z = d.vertex_midedges(v).unwrap()[0];
        // any three boundary marks; pick a vertex touching the first mark instead
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(Arc::new(d), vec![cyc[0], cyc[5], cyc[10]]).unwrap();
        let field = observable_exact(&md, 24).unwrap();
        let dd = md.domain();
        let e = dd.edge(cyc[0]);
        let w = e.ends[0];
        assert_eq!(
            holomorphicity_residual(&field, w).unwrap_err(),
            Error::MarkAtVertex {
                vertex: w,
                mark: cyc[0]
            }
        );
        assert!(!md.marks().contains(&z));
    }
}
