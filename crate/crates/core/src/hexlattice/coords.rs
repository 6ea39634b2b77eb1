use serde::{Deserialize, Serialize};

use crate::eisenstein::Eisenstein;

/// Axial coordinate of a hexagonal face.
///
/// Centres sit at `x = δ√3(q + r/2)`, `y = 1.5δr`; hexagons are pointy-top
/// with vertex `k` at angle `30° + 60°k` and edge `k` joining vertices `k`
/// and `k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceCoord {
    pub q: i32,
    pub r: i32,
}

/// Axial offset of the face across edge `k`.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 6] = [(0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0)];

// Offsets in quarter units (x in √3δ/4, y in δ/4).
const VERTEX_OFFSETS: [(i64, i64); 6] = [(2, 2), (0, 4), (-2, 2), (-2, -2), (0, -4), (2, -2)];
const MID_OFFSETS: [(i64, i64); 6] = [(1, 3), (-1, 3), (-2, 0), (-1, -3), (1, -3), (2, 0)];

/// A lattice point (face centre, vertex or mid-edge) in integer quarter units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub fn to_xy(self, mesh: f64) -> [f64; 2] {
        [
            self.x as f64 * 3f64.sqrt() * mesh / 4.0,
            self.y as f64 * mesh / 4.0,
        ]
    }
}

impl FaceCoord {
    pub const fn new(q: i32, r: i32) -> Self {
        Self { q, r }
    }

    pub fn neighbor(self, k: usize) -> FaceCoord {
        let (dq, dr) = NEIGHBOR_OFFSETS[k % 6];
        FaceCoord::new(self.q + dq, self.r + dr)
    }

    pub fn neighbors(self) -> [FaceCoord; 6] {
        std::array::from_fn(|k| self.neighbor(k))
    }

    pub fn center_point(self) -> LatticePoint {
        LatticePoint {
            x: 4 * self.q as i64 + 2 * self.r as i64,
            y: 6 * self.r as i64,
        }
    }

    pub fn vertex_point(self, k: usize) -> LatticePoint {
        let c = self.center_point();
        let (dx, dy) = VERTEX_OFFSETS[k % 6];
        LatticePoint {
            x: c.x + dx,
            y: c.y + dy,
        }
    }

    pub fn mid_point(self, k: usize) -> LatticePoint {
        let c = self.center_point();
        let (dx, dy) = MID_OFFSETS[k % 6];
        LatticePoint {
            x: c.x + dx,
            y: c.y + dy,
        }
    }

    pub fn center(self, mesh: f64) -> [f64; 2] {
        self.center_point().to_xy(mesh)
    }

    pub fn hexagon(self, mesh: f64) -> [[f64; 2]; 6] {
        std::array::from_fn(|k| self.vertex_point(k).to_xy(mesh))
    }

    /// Exact centre as an Eisenstein integer; the Euclidean centre is this
    /// value times `δ·exp(iπ/6)`.
    pub fn center_eisenstein(self) -> Eisenstein {
        let (q, r) = (self.q as i64, self.r as i64);
        Eisenstein::from_ints(q + 2 * r, r - q)
    }

    /// Rotation by 60° about the origin face.
    pub fn rotate60(self) -> FaceCoord {
        FaceCoord::new(-self.r, self.q + self.r)
    }

    /// Reflection across the 30° axis through the origin face.
    pub fn reflect(self) -> FaceCoord {
        FaceCoord::new(self.r, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbors_are_symmetric_and_at_distance_sqrt3() {
        let f = FaceCoord::new(2, -3);
        for k in 0..6 {
            let g = f.neighbor(k);
            assert_eq!(g.neighbor(k + 3), f);
            let [x0, y0] = f.center(1.0);
            let [x1, y1] = g.center(1.0);
            assert!(((x1 - x0).hypot(y1 - y0) - 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_k_faces_neighbor_k() {
        let f = FaceCoord::new(1, 1);
        for k in 0..6 {
            let m = f.mid_point(k);
            let c = f.center_point();
            let g = f.neighbor(k).center_point();
            assert_eq!((2 * m.x, 2 * m.y), (c.x + g.x, c.y + g.y));
            let a = f.vertex_point(k);
            let b = f.vertex_point(k + 1);
            assert_eq!((a.x + b.x, a.y + b.y), (2 * m.x, 2 * m.y));
        }
    }

    #[test]
    fn eisenstein_center_matches_float_center() {
        let (c, s) = (
            (std::f64::consts::PI / 6.0).cos(),
            (std::f64::consts::PI / 6.0).sin(),
        );
        for q in -3..4 {
            for r in -3..4 {
                let f = FaceCoord::new(q, r);
                let (ex, ey) = f.center_eisenstein().to_complex();
                let rot = (ex * c - ey * s, ex * s + ey * c);
                let [x, y] = f.center(1.0);
                assert!((rot.0 - x).abs() < 1e-12 && (rot.1 - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn center_map_is_injective() {
        let mut seen = std::collections::HashSet::new();
        for q in -10..10 {
            for r in -10..10 {
                assert!(seen.insert(FaceCoord::new(q, r).center_point()));
            }
        }
    }

    #[test]
    fn symmetries_preserve_adjacency() {
        let f = FaceCoord::new(3, -1);
        let mut rot = f;
        for _ in 0..6 {
            rot = rot.rotate60();
        }
        assert_eq!(rot, f);
        assert_eq!(f.reflect().reflect(), f);
        for k in 0..6 {
            let g = f.neighbor(k);
            assert!(f.rotate60().neighbors().contains(&g.rotate60()));
            assert!(f.reflect().neighbors().contains(&g.reflect()));
        }
    }
}
