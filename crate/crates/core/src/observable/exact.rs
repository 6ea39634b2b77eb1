use num_rational::Ratio;

use super::{check_z, field_mid_edges, HValue, ObservableField};
use crate::error::{Error, Result};
use crate::hexlattice::{HalfEdgeId, MarkedDomain, MidEdgeId};
use crate::loops::{gray_walk, LoopBasis};
use crate::spinor::{CutStrategy, ShortestPairs};

/// Reference configurations and link classification for a domain with
/// three boundary marks and a fourth disorder z.
#[derive(Clone, Debug)]
pub struct ObservableEngine {
    basis: LoopBasis,
    md: MarkedDomain,
    mark_index: Vec<u8>,
}

impl ObservableEngine {
    pub fn new(md: &MarkedDomain) -> Result<Self> {
        md.expect_marks(3)?;
        let d = md.domain();
        let mut mark_index = vec![u8::MAX; d.num_mid_edges()];
        for (j, &u) in md.marks().iter().enumerate() {
            mark_index[u] = j as u8;
        }
        Ok(Self {
            basis: LoopBasis::new(md.shared_domain().clone()),
            md: md.clone(),
            mark_index,
        })
    }

    pub fn with_fault(mut self, h: HalfEdgeId) -> Self {
        self.basis = self.basis.with_fault(h);
        self
    }

    pub fn basis(&self) -> &LoopBasis {
        &self.basis
    }

    pub fn marked_domain(&self) -> &MarkedDomain {
        &self.md
    }

    /// A configuration with disorders {u₁, u₂, u₃, z}: the 4-mark coloring
    /// reference when z is on the boundary, a spinor cut otherwise.
    pub fn reference(&self, z: MidEdgeId) -> Result<Vec<u64>> {
        check_z(&self.md, z)?;
        let d = self.md.domain();
        let mut disorders = self.md.marks().to_vec();
        disorders.push(z);
        if d.is_boundary_mid_edge(z) {
            disorders.sort_by_key(|&m| d.boundary_position(m));
            self.basis.reference(&disorders)
        } else {
            let cut = ShortestPairs.cut(d, &disorders)?;
            let mut words = cut.half_edges.words().to_vec();
            self.basis.apply_fault(&mut words);
            Ok(words)
        }
    }

    /// Index j ∈ {0, 1, 2} of the mark that z is linked to.
    #[inline]
    pub fn link_index(&self, xi: &[u64], z: MidEdgeId) -> Result<usize> {
        let end = self.basis.trace(xi, z)?;
        match self.mark_index[end] {
            u8::MAX => Err(Error::BoundaryMismatch(format!(
                "path from {z} ends at unmarked mid-edge {end}"
            ))),
            j => Ok(j as usize),
        }
    }

    /// Number of configurations in W_Ω(u₁, u₂, u₃, z) linking z to each mark.
    pub fn exact_counts(&self, z: MidEdgeId) -> Result<[u64; 3]> {
        let mut counts = [0u64; 3];
        gray_walk(&self.basis, self.reference(z)?, |xi, _, _| {
            counts[self.link_index(xi, z)?] += 1;
            Ok(())
        })?;
        Ok(counts)
    }
}

/// Exact H-values at every mid-edge except the marks.
pub fn observable_exact(md: &MarkedDomain, cap: usize) -> Result<ObservableField> {
    observable_exact_at(md, &field_mid_edges(md), cap)
}

pub fn observable_exact_at(
    md: &MarkedDomain,
    zs: &[MidEdgeId],
    cap: usize,
) -> Result<ObservableField> {
    let engine = ObservableEngine::new(md)?;
    exact_field(&engine, zs, cap)
}

pub(crate) fn exact_field(
    engine: &ObservableEngine,
    zs: &[MidEdgeId],
    cap: usize,
) -> Result<ObservableField> {
    let md = engine.marked_domain();
    let faces = md.domain().num_faces();
    let cap = cap.min(super::EXACT_FACE_LIMIT);
    if faces > cap {
        return Err(Error::TooLarge { faces, cap });
    }
    let total = 1i64 << faces;
    let mut field = ObservableField::new(md.clone(), "exact")?;
    for &z in zs {
        let counts = engine.exact_counts(z)?;
        let h = counts.map(|c| Ratio::new(c as i64, total));
        field.insert(z, HValue::Exact(h))?;
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::eisenstein::{Eisenstein, Rational};
    use crate::hexlattice::{FaceCoord, HexDomain};

    fn hexagon_md() -> MarkedDomain {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        MarkedDomain::new(Arc::new(d), vec![1, 3, 5]).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_hexagon_values() {
        let field = observable_exact(&hexagon_md(), 24).unwrap();
        let half = r(1, 2);
        assert_eq!(
            field.get(0).unwrap().exact().unwrap(),
            &[half, r(0, 1), half]
        );
        assert_eq!(
            field.get(2).unwrap().exact().unwrap(),
            &[half, half, r(0, 1)]
        );
        let f = field.f_exact(0).unwrap();
        assert_eq!(f, Eisenstein::new(half, half));
        assert_eq!(field.get(1).unwrap_err(), Error::NotDefined(1));
    }

    #[test]
    fn h_sums_to_one() {
        let d = HexDomain::new(
            [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(q, r)| FaceCoord::new(q, r)),
            1.0,
        )
        .unwrap();
        let cyc = d.boundary_cycle().to_vec();
        let md = MarkedDomain::new(Arc::new(d), vec![cyc[0], cyc[4], cyc[9]]).unwrap();
        let field = observable_exact(&md, 24).unwrap();
        for (_, v) in field.entries() {
            let h = v.exact().unwrap();
            assert_eq!(h[0] + h[1] + h[2], r(1, 1));
            assert!(h.iter().all(|x| *x >= r(0, 1) && *x <= r(1, 1)));
        }
    }
}
