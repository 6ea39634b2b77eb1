use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::coords::{FaceCoord, LatticePoint};
use crate::error::{Error, Result};

pub type FaceId = usize;
pub type VertexId = usize;
/// Edges and their mid-edges share one index space.
pub type MidEdgeId = usize;
/// Half-edge `2e` joins `ends[0]` of edge `e` to its mid-edge, `2e + 1` joins `ends[1]`.
pub type HalfEdgeId = usize;

#[derive(Clone, Debug)]
pub struct Edge {
    pub ends: [VertexId; 2],
    /// Face on the left of `ends[0] → ends[1]`.
    pub left: FaceId,
    /// Face on the right; `None` on the boundary.
    pub right: Option<FaceId>,
    pub mid: LatticePoint,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// An immutable simply connected domain glued from hexagonal faces.
///
/// Vertices, edges and half-edges get dense indices in scan order: faces
/// sorted by `(q, r)`, then each face's local counterclockwise order.
/// Boundary edges are oriented so the domain lies on their left, which makes
/// `boundary_cycle` a counterclockwise traversal.
#[derive(Clone, Debug)]
pub struct HexDomain {
    mesh: f64,
    faces: Vec<FaceCoord>,
    face_lookup: HashMap<FaceCoord, FaceId>,
    vertex_points: Vec<LatticePoint>,
    vertex_face_count: Vec<u8>,
    vertex_half_edges: Vec<[u32; 3]>,
    vertex_degree: Vec<u8>,
    edges: Vec<Edge>,
    face_edges: Vec<[MidEdgeId; 6]>,
    face_vertices: Vec<[VertexId; 6]>,
    face_neighbors: Vec<[Option<FaceId>; 6]>,
    boundary_cycle: Vec<MidEdgeId>,
    boundary_position: Vec<Option<usize>>,
}

impl HexDomain {
    pub fn new(faces: impl IntoIterator<Item = FaceCoord>, mesh: f64) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mesh must be positive, got {mesh}"
            )));
        }
        let mut faces: Vec<FaceCoord> = faces.into_iter().collect();
        faces.sort();
        faces.dedup();
        if faces.is_empty() {
            return Err(Error::EmptyFaceSet);
        }
        let face_lookup: HashMap<FaceCoord, FaceId> =
            faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();

        let face_neighbors: Vec<[Option<FaceId>; 6]> = faces
            .iter()
            .map(|f| std::array::from_fn(|k| face_lookup.get(&f.neighbor(k)).copied()))
            .collect();
        if !faces_connected(&face_neighbors) {
            return Err(Error::NotConnected);
        }

        let mut vertex_ids: HashMap<LatticePoint, VertexId> = HashMap::new();
        let mut vertex_points = Vec::new();
        let mut vertex_face_count = Vec::new();
        let mut edge_ids: HashMap<LatticePoint, MidEdgeId> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut face_vertices = Vec::with_capacity(faces.len());

        for (fi, f) in faces.iter().enumerate() {
            let mut fv = [0; 6];
            for (k, slot) in fv.iter_mut().enumerate() {
                let p = f.vertex_point(k);
                let id = *vertex_ids.entry(p).or_insert_with(|| {
                    vertex_points.push(p);
                    vertex_face_count.push(0u8);
                    vertex_points.len() - 1
                });
                vertex_face_count[id] += 1;
                *slot = id;
            }
            let mut fe = [0; 6];
            for (k, slot) in fe.iter_mut().enumerate() {
                let m = f.mid_point(k);
                let id = match edge_ids.get(&m) {
                    Some(&id) => {
                        edges[id].right = Some(fi);
                        id
                    }
                    None => {
                        edges.push(Edge {
                            ends: [fv[k], fv[(k + 1) % 6]],
                            left: fi,
                            right: None,
                            mid: m,
                        });
                        edge_ids.insert(m, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                *slot = id;
            }
            face_vertices.push(fv);
            face_edges.push(fe);
        }

        let mut vertex_half_edges = vec![[u32::MAX; 3]; vertex_points.len()];
        let mut vertex_degree = vec![0u8; vertex_points.len()];
        for (e, edge) in edges.iter().enumerate() {
            for side in 0..2 {
                let v = edge.ends[side];
                let d = vertex_degree[v] as usize;
                vertex_half_edges[v][d] = (2 * e + side) as u32;
                vertex_degree[v] += 1;
            }
        }

        // Boundary edges, oriented with the domain on the left, chain head to tail.
        let mut outgoing: HashMap<VertexId, MidEdgeId> = HashMap::new();
        let mut boundary_count = 0;
        for (e, edge) in edges.iter().enumerate() {
            if edge.is_boundary() {
                boundary_count += 1;
                outgoing.insert(edge.ends[0], e);
            }
        }
        let start = edges
            .iter()
            .position(Edge::is_boundary)
            .expect("a finite face set has boundary edges");
        let mut boundary_cycle = Vec::with_capacity(boundary_count);
        let mut e = start;
        loop {
            boundary_cycle.push(e);
            e = outgoing[&edges[e].ends[1]];
            if e == start {
                break;
            }
        }
        if boundary_cycle.len() != boundary_count {
            let cycles = count_boundary_cycles(&edges, &outgoing);
            return Err(Error::NotSimplyConnected { cycles });
        }
        let mut boundary_position = vec![None; edges.len()];
        for (i, &e) in boundary_cycle.iter().enumerate() {
            boundary_position[e] = Some(i);
        }

        let domain = HexDomain {
            mesh,
            faces,
            face_lookup,
            vertex_points,
            vertex_face_count,
            vertex_half_edges,
            vertex_degree,
            edges,
            face_edges,
            face_vertices,
            face_neighbors,
            boundary_cycle,
            boundary_position,
        };
        debug_assert!(domain.boundary_signed_area() > 0);
        Ok(domain)
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn faces(&self) -> &[FaceCoord] {
        &self.faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_points.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_mid_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn face_id(&self, f: FaceCoord) -> Option<FaceId> {
        self.face_lookup.get(&f).copied()
    }

    pub fn face(&self, id: FaceId) -> FaceCoord {
        self.faces[id]
    }

    pub fn edge(&self, e: MidEdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn face_edges(&self, f: FaceId) -> &[MidEdgeId; 6] {
        &self.face_edges[f]
    }

    pub fn face_vertices(&self, f: FaceId) -> &[VertexId; 6] {
        &self.face_vertices[f]
    }

    pub fn face_neighbors(&self, f: FaceId) -> &[Option<FaceId>; 6] {
        &self.face_neighbors[f]
    }

    pub fn vertex_point(&self, v: VertexId) -> LatticePoint {
        self.vertex_points[v]
    }

    pub fn vertex_xy(&self, v: VertexId) -> [f64; 2] {
        self.vertex_points[v].to_xy(self.mesh)
    }

    pub fn mid_edge_xy(&self, m: MidEdgeId) -> [f64; 2] {
        self.edges[m].mid.to_xy(self.mesh)
    }

    /// Half-edges incident to `v`.
    pub fn vertex_half_edges(&self, v: VertexId) -> &[u32] {
        &self.vertex_half_edges[v][..self.vertex_degree[v] as usize]
    }

    pub fn vertex_degree(&self, v: VertexId) -> usize {
        self.vertex_degree[v] as usize
    }

    /// A vertex surrounded by three faces of the domain.
    pub fn is_interior_vertex(&self, v: VertexId) -> bool {
        self.vertex_face_count[v] == 3
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices()).filter(|&v| self.is_interior_vertex(v))
    }

    pub fn half_edge_vertex(&self, h: HalfEdgeId) -> VertexId {
        self.edges[h / 2].ends[h % 2]
    }

    pub fn half_edge_mid(&self, h: HalfEdgeId) -> MidEdgeId {
        h / 2
    }

    /// Boundary mid-edges in counterclockwise order.
    pub fn boundary_cycle(&self) -> &[MidEdgeId] {
        &self.boundary_cycle
    }

    /// Boundary half-edges in counterclockwise order (two per boundary edge).
    pub fn boundary_half_edge_cycle(&self) -> Vec<HalfEdgeId> {
        self.boundary_cycle
            .iter()
            .flat_map(|&e| [2 * e, 2 * e + 1])
            .collect()
    }

    pub fn boundary_position(&self, m: MidEdgeId) -> Option<usize> {
        self.boundary_position.get(m).copied().flatten()
    }

    pub fn is_boundary_mid_edge(&self, m: MidEdgeId) -> bool {
        self.boundary_position(m).is_some()
    }

    /// Twice the signed area enclosed by the boundary, in quarter-unit coordinates.
    pub fn boundary_signed_area(&self) -> i64 {
        let pts: Vec<LatticePoint> = self
            .boundary_cycle
            .iter()
            .map(|&e| self.vertex_points[self.edges[e].ends[0]])
            .collect();
        (0..pts.len())
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                a.x * b.y - b.x * a.y
            })
            .sum()
    }

    /// Winding number of the boundary cycle around a point, using the
    /// polygon through boundary vertices.
    pub fn winding_number(&self, p: [f64; 2]) -> i32 {
        let pts: Vec<[f64; 2]> = self
            .boundary_cycle
            .iter()
            .map(|&e| self.vertex_xy(self.edges[e].ends[0]))
            .collect();
        let mut wn = 0;
        for i in 0..pts.len() {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
            if a[1] <= p[1] {
                if b[1] > p[1] && cross > 0.0 {
                    wn += 1;
                }
            } else if b[1] <= p[1] && cross < 0.0 {
                wn -= 1;
            }
        }
        wn
    }

    /// Total area of the faces, δ² · (3√3/2) per hexagon.
    pub fn area(&self) -> f64 {
        self.faces.len() as f64 * 1.5 * 3f64.sqrt() * self.mesh * self.mesh
    }

    /// The three mid-edges around `v` in counterclockwise order, starting
    /// from the smallest direction angle in `[0, 2π)`.
    pub fn vertex_midedges(&self, v: VertexId) -> Result<[MidEdgeId; 3]> {
        if self.vertex_degree(v) != 3 {
            return Err(Error::BoundaryVertex(v));
        }
        let vp = self.vertex_points[v];
        let mut mids: Vec<(f64, MidEdgeId)> = self
            .vertex_half_edges(v)
            .iter()
            .map(|&h| {
                let m = h as usize / 2;
                let mp = self.edges[m].mid;
                let dx = (mp.x - vp.x) as f64 * 3f64.sqrt();
                let dy = (mp.y - vp.y) as f64;
                (dy.atan2(dx).rem_euclid(std::f64::consts::TAU), m)
            })
            .collect();
        mids.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok([mids[0].1, mids[1].1, mids[2].1])
    }

    /// The three faces around an interior vertex in counterclockwise order,
    /// face `i` lying between mid-edges `i` and `i + 1` of [`Self::vertex_midedges`].
    pub fn vertex_faces(&self, v: VertexId) -> Result<[FaceId; 3]> {
        if !self.is_interior_vertex(v) {
            return Err(Error::BoundaryVertex(v));
        }
        let mids = self.vertex_midedges(v)?;
        let mut out = [0; 3];
        for i in 0..3 {
            let (a, b) = (&self.edges[mids[i]], &self.edges[mids[(i + 1) % 3]]);
            let fa = [Some(a.left), a.right];
            let shared = [Some(b.left), b.right]
                .into_iter()
                .flatten()
                .find(|f| fa.contains(&Some(*f)))
                .expect("consecutive edges at an interior vertex share a face");
            out[i] = shared;
        }
        Ok(out)
    }

    /// The edge shared by two faces, if they are adjacent.
    pub fn shared_edge(&self, f: FaceId, g: FaceId) -> Option<MidEdgeId> {
        (0..6)
            .find(|&k| self.face_neighbors[f][k] == Some(g))
            .map(|k| self.face_edges[f][k])
    }
}

fn faces_connected(neighbors: &[[Option<FaceId>; 6]]) -> bool {
    let mut seen = vec![false; neighbors.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(f) = queue.pop_front() {
        for g in neighbors[f].iter().flatten() {
            if !seen[*g] {
                seen[*g] = true;
                count += 1;
                queue.push_back(*g);
            }
        }
    }
    count == neighbors.len()
}

fn count_boundary_cycles(edges: &[Edge], outgoing: &HashMap<VertexId, MidEdgeId>) -> usize {
    let mut seen = vec![false; edges.len()];
    let mut cycles = 0;
    for start in 0..edges.len() {
        if !edges[start].is_boundary() || seen[start] {
            continue;
        }
        cycles += 1;
        let mut e = start;
        while !seen[e] {
            seen[e] = true;
            e = outgoing[&edges[e].ends[1]];
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(q: i32, r: i32) -> FaceCoord {
        FaceCoord::new(q, r)
    }

    #[test]
    fn single_hexagon_counts() {
        let d = HexDomain::new([fc(0, 0)], 1.0).unwrap();
        assert_eq!(d.num_faces(), 1);
        assert_eq!(d.num_vertices(), 6);
        assert_eq!(d.num_edges(), 6);
        assert_eq!(d.num_half_edges(), 12);
        assert_eq!(d.boundary_cycle(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(d.interior_vertices().count(), 0);
    }

    #[test]
    fn three_mutually_adjacent_faces_have_one_interior_vertex() {
        let d = HexDomain::new([fc(0, 0), fc(1, 0), fc(0, 1)], 1.0).unwrap();
        let interior: Vec<_> = d.interior_vertices().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(d.num_faces() + d.num_vertices(), d.num_edges() + 1);
    }

    #[test]
    fn disconnected_and_empty_inputs() {
        assert_eq!(
            HexDomain::new([fc(0, 0), fc(2, 0)], 1.0).unwrap_err(),
            Error::NotConnected
        );
        assert_eq!(
            HexDomain::new(Vec::new(), 1.0).unwrap_err(),
            Error::EmptyFaceSet
        );
    }

    #[test]
    fn ring_is_not_simply_connected() {
        let ring = fc(0, 0).neighbors();
        assert_eq!(
            HexDomain::new(ring, 1.0).unwrap_err(),
            Error::NotSimplyConnected { cycles: 2 }
        );
    }

    #[test]
    fn vertex_midedges_rejects_degree_two() {
        let d = HexDomain::new([fc(0, 0)], 1.0).unwrap();
        assert_eq!(d.vertex_midedges(0).unwrap_err(), Error::BoundaryVertex(0));
    }

    #[test]
    fn central_vertex_midedges_are_ccw_and_centered() {
        let d = HexDomain::new([fc(0, 0), fc(1, 0), fc(0, 1)], 1.0).unwrap();
        let v = d.interior_vertices().next().unwrap();
        let [a, b, c] = d.vertex_midedges(v).unwrap().map(|m| d.mid_edge_xy(m));
        let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        assert!(cross > 0.0);
        let p = d.vertex_xy(v);
        assert!(((a[0] + b[0] + c[0]) / 3.0 - p[0]).abs() < 1e-12);
        assert!(((a[1] + b[1] + c[1]) / 3.0 - p[1]).abs() < 1e-12);
        let faces = d.vertex_faces(v).unwrap();
        let mut sorted = faces;
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2]);
    }
}
