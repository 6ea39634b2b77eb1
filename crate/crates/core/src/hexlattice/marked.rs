use std::sync::Arc;

use super::domain::{FaceId, HexDomain, MidEdgeId};
use crate::error::{Error, Result};

/// A domain with marked boundary mid-edges `u₁ … u_k` in counterclockwise
/// order. Mark indices are 0-based and cyclic.
#[derive(Clone, Debug)]
pub struct MarkedDomain {
    domain: Arc<HexDomain>,
    marks: Vec<MidEdgeId>,
}

/// A counterclockwise boundary arc between two marks, endpoints included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryArc {
    pub mid_edges: Vec<MidEdgeId>,
    /// Faces owning at least one mid-edge of the arc, in first-seen order.
    pub faces: Vec<FaceId>,
}

impl MarkedDomain {
    pub fn new(domain: Arc<HexDomain>, marks: Vec<MidEdgeId>) -> Result<Self> {
        let mut positions = Vec::with_capacity(marks.len());
        for (i, &m) in marks.iter().enumerate() {
            if marks[..i].contains(&m) {
                return Err(Error::DuplicateMark(m));
            }
            positions.push(domain.boundary_position(m).ok_or(Error::NotOnBoundary(m))?);
        }
        if !is_cyclically_increasing(&positions) {
            return Err(Error::MarksOutOfOrder);
        }
        Ok(Self { domain, marks })
    }

    /// Sorts the given boundary mid-edges into counterclockwise order,
    /// starting from the one with the smallest boundary position.
    pub fn sorted(domain: Arc<HexDomain>, mut marks: Vec<MidEdgeId>) -> Result<Self> {
        for &m in &marks {
            domain.boundary_position(m).ok_or(Error::NotOnBoundary(m))?;
        }
        marks.sort_by_key(|&m| domain.boundary_position(m));
        Self::new(domain, marks)
    }

    pub fn domain(&self) -> &HexDomain {
        &self.domain
    }

    pub fn shared_domain(&self) -> &Arc<HexDomain> {
        &self.domain
    }

    pub fn marks(&self) -> &[MidEdgeId] {
        &self.marks
    }

    pub fn num_marks(&self) -> usize {
        self.marks.len()
    }

    /// `u_j` with cyclic indexing.
    pub fn mark(&self, j: isize) -> MidEdgeId {
        let k = self.marks.len() as isize;
        self.marks[j.rem_euclid(k) as usize]
    }

    pub fn expect_marks(&self, expected: usize) -> Result<()> {
        if self.marks.len() == expected {
            Ok(())
        } else {
            Err(Error::WrongMarkCount {
                expected,
                got: self.marks.len(),
            })
        }
    }

    /// Boundary positions of the mid-edges on the counterclockwise arc from
    /// `u_j` to `u_{j'}`, endpoints included.
    pub fn arc_positions(&self, j: isize, j2: isize) -> Result<Vec<usize>> {
        let k = self.marks.len() as isize;
        if k == 0 {
            return Err(Error::WrongMarkCount {
                expected: 2,
                got: 0,
            });
        }
        if j.rem_euclid(k) == j2.rem_euclid(k) {
            return Err(Error::SameMark(
                j.rem_euclid(k) as usize,
                j2.rem_euclid(k) as usize,
            ));
        }
        let n = self.domain.boundary_cycle().len();
        let start = self
            .domain
            .boundary_position(self.mark(j))
            .expect("marks are on the boundary");
        let end = self
            .domain
            .boundary_position(self.mark(j2))
            .expect("marks are on the boundary");
        let len = (end + n - start) % n + 1;
        Ok((0..len).map(|i| (start + i) % n).collect())
    }

    pub fn boundary_arc(&self, j: isize, j2: isize) -> Result<BoundaryArc> {
        let positions = self.arc_positions(j, j2)?;
        let cycle = self.domain.boundary_cycle();
        let mid_edges: Vec<MidEdgeId> = positions.iter().map(|&p| cycle[p]).collect();
        let mut faces = Vec::new();
        for &m in &mid_edges {
            let f = self.domain.edge(m).left;
            if !faces.contains(&f) {
                faces.push(f);
            }
        }
        Ok(BoundaryArc { mid_edges, faces })
    }
}

/// True if the sequence increases except for at most one wrap-around.
fn is_cyclically_increasing(p: &[usize]) -> bool {
    if p.len() < 3 {
        return true;
    }
    let descents = (0..p.len())
        .filter(|&i| p[(i + 1) % p.len()] < p[i])
        .count();
    descents == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexlattice::FaceCoord;

    fn hexagon(marks: Vec<usize>) -> MarkedDomain {
        let d = HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap();
        MarkedDomain::new(Arc::new(d), marks).unwrap()
    }

    #[test]
    fn arc_reads_off_the_six_cycle() {
        let md = hexagon(vec![0, 1, 3, 5]);
        assert_eq!(md.boundary_arc(1, 2).unwrap().mid_edges, vec![1, 2, 3]);
        assert_eq!(md.boundary_arc(3, 0).unwrap().mid_edges, vec![5, 0]);
        assert_eq!(md.boundary_arc(1, 1).unwrap_err(), Error::SameMark(1, 1));
    }

    #[test]
    fn consecutive_arcs_partition_the_boundary() {
        let md = hexagon(vec![0, 1, 3, 5]);
        let mut all = Vec::new();
        for j in 0..4 {
            let arc = md.boundary_arc(j, j + 1).unwrap().mid_edges;
            all.extend_from_slice(&arc[..arc.len() - 1]);
        }
        assert_eq!(all, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn rejects_out_of_order_marks() {
        let d = Arc::new(HexDomain::new([FaceCoord::new(0, 0)], 1.0).unwrap());
        assert_eq!(
            MarkedDomain::new(d.clone(), vec![0, 3, 1]).unwrap_err(),
            Error::MarksOutOfOrder
        );
        assert!(MarkedDomain::new(d.clone(), vec![3, 5, 1]).is_ok());
        assert_eq!(
            MarkedDomain::new(d.clone(), vec![2, 2]).unwrap_err(),
            Error::DuplicateMark(2)
        );
        let sorted = MarkedDomain::sorted(d, vec![5, 1, 3]).unwrap();
        assert_eq!(sorted.marks(), &[1, 3, 5]);
    }
}
