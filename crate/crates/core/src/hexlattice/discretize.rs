use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::coords::FaceCoord;
use super::domain::HexDomain;
use super::marked::MarkedDomain;
use crate::error::{Error, Result};

/// A simple polygon given by its vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

const EPS: f64 = 1e-9;

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidParameter(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        let p = Self { vertices };
        if p.signed_area() <= 0.0 {
            return Err(Error::InvalidParameter(
                "polygon must be non-degenerate and counterclockwise".into(),
            ));
        }
        Ok(p)
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        0.5 * (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let v = &self.vertices;
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let w = a[0] * b[1] - b[0] * a[1];
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        let a6 = 6.0 * self.signed_area();
        [cx / a6, cy / a6]
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed point-in-polygon test; points within `tol` of an edge count as inside.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        if self
            .edges()
            .any(|(a, b)| point_segment_distance(p, a, b) <= tol)
        {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Whether the closed convex polygon `hex` lies inside this polygon.
    fn contains_convex(&self, hex: &[[f64; 2]], tol: f64) -> bool {
        if !hex.iter().all(|&p| self.contains(p, tol)) {
            return false;
        }
        let n = hex.len();
        for &v in &self.vertices {
            if strictly_inside_convex(hex, v, tol) {
                return false;
            }
        }
        for (a, b) in self.edges() {
            for i in 0..n {
                if segments_cross(a, b, hex[i], hex[(i + 1) % n], tol) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn strictly_inside_convex(ccw: &[[f64; 2]], p: [f64; 2], tol: f64) -> bool {
    let n = ccw.len();
    (0..n).all(|i| {
        let (a, b) = (ccw[i], ccw[(i + 1) % n]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        orient(a, b, p) > tol * len
    })
}

/// Proper crossing: the segments intersect at a single interior point of both.
fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2], tol: f64) -> bool {
    let lab = (b[0] - a[0]).hypot(b[1] - a[1]);
    let lcd = (d[0] - c[0]).hypot(d[1] - c[1]);
    let d1 = orient(a, b, c) / lab;
    let d2 = orient(a, b, d) / lab;
    let d3 = orient(c, d, a) / lcd;
    let d4 = orient(c, d, b) / lcd;
    ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
}

/// All faces whose closed hexagons lie inside the polygon.
pub fn faces_inside(polygon: &Polygon, mesh: f64) -> Vec<FaceCoord> {
    let tol = EPS * mesh;
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in &polygon.vertices {
        xmin = xmin.min(v[0]);
        xmax = xmax.max(v[0]);
        ymin = ymin.min(v[1]);
        ymax = ymax.max(v[1]);
    }
    let rmin = (ymin / (1.5 * mesh)).floor() as i32 - 1;
    let rmax = (ymax / (1.5 * mesh)).ceil() as i32 + 1;
    let w = 3f64.sqrt() * mesh;
    let mut out = Vec::new();
    for r in rmin..=rmax {
        let qmin = (xmin / w - r as f64 / 2.0).floor() as i32 - 1;
        let qmax = (xmax / w - r as f64 / 2.0).ceil() as i32 + 1;
        for q in qmin..=qmax {
            let f = FaceCoord::new(q, r);
            if polygon.contains_convex(&f.hexagon(mesh), tol) {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// Approximates a polygon with marked prime ends by the maximal-area
/// hexagonal domain inside it, marking the boundary mid-edges nearest to
/// each prime end (ties go to the smallest boundary-cycle position).
pub fn discretize(polygon: &Polygon, prime_ends: &[[f64; 2]], mesh: f64) -> Result<MarkedDomain> {
    let inside = faces_inside(polygon, mesh);
    if inside.is_empty() {
        return Err(Error::MeshTooCoarse {
            mesh,
            reason: "no closed hexagon fits inside the polygon".into(),
        });
    }
    let component = largest_component(&inside, polygon.centroid(), mesh);
    let domain = match HexDomain::new(component, mesh) {
        Ok(d) => d,
        Err(Error::NotSimplyConnected { cycles }) => {
            return Err(Error::MeshTooCoarse {
                mesh,
                reason: format!("maximal-area face set has {} holes", cycles - 1),
            })
        }
        Err(e) => return Err(e),
    };
    let marks = nearest_boundary_marks(&domain, prime_ends)?;
    MarkedDomain::new(Arc::new(domain), marks)
}

pub(crate) fn nearest_boundary_marks(
    domain: &HexDomain,
    points: &[[f64; 2]],
) -> Result<Vec<usize>> {
    let tol = EPS * domain.mesh();
    let mut marks: Vec<usize> = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for &m in domain.boundary_cycle() {
            let q = domain.mid_edge_xy(m);
            let dist = (q[0] - p[0]).hypot(q[1] - p[1]);
            if best.map_or(true, |(bd, _)| dist < bd - tol) {
                best = Some((dist, m));
            }
        }
        let m = best.expect("domains have a boundary").1;
        if let Some(j) = marks.iter().position(|&x| x == m) {
            return Err(Error::MarksCollide(j, i));
        }
        marks.push(m);
    }
    Ok(marks)
}

fn largest_component(faces: &[FaceCoord], centroid: [f64; 2], mesh: f64) -> Vec<FaceCoord> {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let mut label: HashMap<FaceCoord, usize> = HashMap::new();
    let mut components: Vec<Vec<FaceCoord>> = Vec::new();
    for &f in faces {
        if label.contains_key(&f) {
            continue;
        }
        let id = components.len();
        let mut comp = vec![f];
        label.insert(f, id);
        let mut queue = VecDeque::from([f]);
        while let Some(g) = queue.pop_front() {
            for h in g.neighbors() {
                if set.contains(&h) && !label.contains_key(&h) {
                    label.insert(h, id);
                    comp.push(h);
                    queue.push_back(h);
                }
            }
        }
        components.push(comp);
    }
    let nearest = *faces
        .iter()
        .min_by(|a, b| {
            let da = dist2(a.center(mesh), centroid);
            let db = dist2(b.center(mesh), centroid);
            da.total_cmp(&db).then(a.cmp(b))
        })
        .expect("non-empty");
    let best_size = components.iter().map(Vec::len).max().unwrap_or(0);
    let pick = components
        .iter()
        .position(|c| c.len() == best_size && label[&nearest] == label[&c[0]])
        .or_else(|| components.iter().position(|c| c.len() == best_size))
        .expect("non-empty");
    components.swap_remove(pick)
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(side: f64) -> Polygon {
        Polygon::new(vec![
            [0.0, 0.0],
            [side, 0.0],
            [side / 2.0, side * 3f64.sqrt() / 2.0],
        ])
        .unwrap()
    }

    fn square(side: f64) -> Polygon {
        Polygon::new(vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]]).unwrap()
    }

    #[test]
    fn triangle_with_four_prime_ends() {
        let side = 30.0;
        let t = triangle(side);
        let ends = [
            [0.0, 0.0],
            [side, 0.0],
            [side / 2.0, side * 3f64.sqrt() / 2.0],
            [side / 4.0, side * 3f64.sqrt() / 4.0],
        ];
        let md = discretize(&t, &ends, 1.0).unwrap();
        assert_eq!(md.num_marks(), 4);
        let all_inside = md
            .domain()
            .faces()
            .iter()
            .all(|f| f.hexagon(1.0).iter().all(|&p| t.contains(p, 1e-9)));
        assert!(all_inside);
    }

    #[test]
    fn unit_square_at_mesh_one_is_too_coarse() {
        // Oracle: a closed hexagon of circumradius 1 has width √3 > 1, so none fits.
        let err = discretize(&square(1.0), &[[0.0, 0.0]], 1.0).unwrap_err();
        assert!(matches!(err, Error::MeshTooCoarse { .. }));
    }

    #[test]
    fn square_marks_land_near_corners() {
        let mesh = 1.0 / 40.0;
        let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let md = discretize(&square(1.0), &corners, mesh).unwrap();
        let d = md.domain();
        for (m, c) in md.marks().iter().zip(corners) {
            let p = d.mid_edge_xy(*m);
            // brute-force nearest mid-edge over the whole boundary
            let best = d
                .boundary_cycle()
                .iter()
                .map(|&b| {
                    let q = d.mid_edge_xy(b);
                    (q[0] - c[0]).hypot(q[1] - c[1])
                })
                .fold(f64::MAX, f64::min);
            let dist = (p[0] - c[0]).hypot(p[1] - c[1]);
            assert!((dist - best).abs() < 1e-12);
            assert!(dist <= 2.0 * mesh, "mark {m} at distance {dist}");
        }
    }

    #[test]
    fn colliding_prime_ends() {
        let err = discretize(&square(1.0), &[[0.0, 0.0], [0.001, 0.0]], 0.1).unwrap_err();
        assert_eq!(err, Error::MarksCollide(0, 1));
    }

    #[test]
    fn refinement_never_shrinks_area() {
        for poly in [triangle(1.0), square(1.0)] {
            let mut prev = 0.0;
            let mut mesh = 0.1;
            for _ in 0..4 {
                let faces = faces_inside(&poly, mesh);
                let d = HexDomain::new(faces, mesh).unwrap();
                assert!(d.area() >= prev);
                prev = d.area();
                mesh /= 2.0;
            }
        }
    }

    #[test]
    fn notched_polygon_excludes_cut_hexagons() {
        // A thin slit from the top reaching down to y = 0.3 cuts through hexagons
        // whose vertices all lie inside the polygon.
        let poly = Polygon::new(vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.5005, 1.0],
            [0.5005, 0.3],
            [0.4995, 0.3],
            [0.4995, 1.0],
            [0.0, 1.0],
        ])
        .unwrap();
        let mesh = 0.05;
        for f in faces_inside(&poly, mesh) {
            let hex = f.hexagon(mesh);
            let xs = hex.iter().map(|p| p[0]);
            let (lo, hi) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
            let ys = hex.iter().map(|p| p[1]).fold(f64::MIN, f64::max);
            assert!(
                !(lo < 0.4995 && hi > 0.5005 && ys > 0.3),
                "{f:?} straddles the slit"
            );
        }
    }
}
