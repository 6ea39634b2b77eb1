//! Experiment shapes: how a continuum quad becomes a marked lattice domain.
//!
//! Every shape marks four prime ends A, B, C, D counterclockwise; the
//! measured event joins ∂_{AB} to ∂_{CD}.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cardy::{rectangle_prediction, triangle_prediction, TrianglePosition};
use crate::error::{Error, Result};
use crate::hexlattice::{
    discretize, nearest_boundary_marks, FaceCoord, HexDomain, MarkedDomain, Polygon,
};
use crate::registry::{Named, Registry};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeParams {
    /// Triangle: position of D on the side from C to A.
    pub t: f64,
    /// Rectangle: width / height.
    pub aspect: f64,
    /// Triangle side, rectangle height, or rhombus side.
    pub size: f64,
    /// Polygon shape: JSON file with `vertices`, `prime_ends`, `prediction`.
    pub polygon: Option<PathBuf>,
}

impl Default for ShapeParams {
    fn default() -> Self {
        Self {
            t: 0.5,
            aspect: 1.0,
            size: 1.0,
            polygon: None,
        }
    }
}

pub trait Shape: Named + Send + Sync {
    fn build(&self, p: &ShapeParams, mesh: f64) -> Result<MarkedDomain>;
    fn prediction(&self, p: &ShapeParams) -> Result<f64>;
    /// Where A, B, C, D sit, for output metadata.
    fn corners(&self) -> &'static str;
}

fn check_size(p: &ShapeParams) -> Result<()> {
    if p.size > 0.0 && p.size.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "shape size {} must be positive",
            p.size
        )))
    }
}

pub struct Triangle;

impl Triangle {
    fn geometry(p: &ShapeParams) -> Result<(Polygon, [[f64; 2]; 4])> {
        check_size(p)?;
        let t = TrianglePosition::new(p.t)?.t();
        let s = p.size;
        let a = [s, 0.0];
        let b = [s / 2.0, s * 3f64.sqrt() / 2.0];
        let c = [0.0, 0.0];
        let d = [c[0] + t * (a[0] - c[0]), c[1] + t * (a[1] - c[1])];
        Ok((Polygon::new(vec![c, a, b])?, [a, b, c, d]))
    }
}

impl Named for Triangle {
    fn name(&self) -> &'static str {
        "triangle"
    }
}

impl Shape for Triangle {
    fn build(&self, p: &ShapeParams, mesh: f64) -> Result<MarkedDomain> {
        let (poly, ends) = Self::geometry(p)?;
        discretize(&poly, &ends, mesh)
    }

    fn prediction(&self, p: &ShapeParams) -> Result<f64> {
        Ok(triangle_prediction(TrianglePosition::new(p.t)?))
    }

    fn corners(&self) -> &'static str {
        "equilateral: A bottom-right, B apex, C bottom-left, D on CA at C + t(A - C)"
    }
}

pub struct Rectangle;

impl Named for Rectangle {
    fn name(&self) -> &'static str {
        "rectangle"
    }
}

impl Shape for Rectangle {
    fn build(&self, p: &ShapeParams, mesh: f64) -> Result<MarkedDomain> {
        check_size(p)?;
        if !(p.aspect > 0.0) {
            return Err(Error::NonPositiveAspect(p.aspect));
        }
        let (w, h) = (p.aspect * p.size, p.size);
        let a = [w, 0.0];
        let b = [w, h];
        let c = [0.0, h];
        let d = [0.0, 0.0];
        discretize(&Polygon::new(vec![d, a, b, c])?, &[a, b, c, d], mesh)
    }

    fn prediction(&self, p: &ShapeParams) -> Result<f64> {
        rectangle_prediction(p.aspect)
    }

    fn corners(&self) -> &'static str {
        "width = aspect * size: A bottom-right, B top-right, C top-left, D bottom-left"
    }
}

/// The n × n Hex board. Reflection in the lattice diagonal maps it onto
/// itself and swaps the two crossing directions, so the crossing
/// probability is exactly 1/2 at every mesh. Stands in for the square.
pub struct Rhombus;

impl Named for Rhombus {
    fn name(&self) -> &'static str {
        "rhombus"
    }
}

impl Rhombus {
    pub fn side_faces(p: &ShapeParams, mesh: f64) -> Result<i32> {
        check_size(p)?;
        if p.aspect != 1.0 {
            return Err(Error::InvalidParameter(
                "the rhombus is only symmetric at aspect 1".into(),
            ));
        }
        let n = (p.size / (3f64.sqrt() * mesh)).round();
        if n < 1.0 {
            return Err(Error::MeshTooCoarse {
                mesh,
                reason: "rhombus side is shorter than one face".into(),
            });
        }
        Ok(n as i32)
    }
}

impl Shape for Rhombus {
    fn build(&self, p: &ShapeParams, mesh: f64) -> Result<MarkedDomain> {
        let n = Self::side_faces(p, mesh)?;
        if n < 2 {
            return Err(Error::MeshTooCoarse {
                mesh,
                reason: "a 1 × 1 board has no room for four marks".into(),
            });
        }
        let faces: Vec<FaceCoord> = (0..n)
            .flat_map(|q| (0..n).map(move |r| FaceCoord::new(q, r)))
            .collect();
        let d = HexDomain::new(faces, mesh)?;
        let corners = [(n - 1, 0), (n - 1, n - 1), (0, n - 1), (0, 0)]
            .map(|(q, r)| FaceCoord::new(q, r).center(mesh));
        let marks = nearest_boundary_marks(&d, &corners)?;
        MarkedDomain::new(Arc::new(d), marks)
    }

    fn prediction(&self, _: &ShapeParams) -> Result<f64> {
        Ok(0.5)
    }

    fn corners(&self) -> &'static str {
        "Hex board, axial q, r in [0, n): A = (n-1, 0), B = (n-1, n-1), C = (0, n-1), D = (0, 0)"
    }
}

#[derive(Clone, Debug, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
    prime_ends: [[f64; 2]; 4],
    prediction: f64,
}

/// A user polygon read from JSON; the prediction is supplied in the file.
pub struct PolygonShape;

impl PolygonShape {
    fn load(p: &ShapeParams) -> Result<PolygonFile> {
        let path = p.polygon.as_ref().ok_or_else(|| {
            Error::InvalidParameter("polygon shape needs a `polygon` file".into())
        })?;
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

impl Named for PolygonShape {
    fn name(&self) -> &'static str {
        "polygon"
    }
}

impl Shape for PolygonShape {
    fn build(&self, p: &ShapeParams, mesh: f64) -> Result<MarkedDomain> {
        let f = Self::load(p)?;
        discretize(&Polygon::new(f.vertices)?, &f.prime_ends, mesh)
    }

    fn prediction(&self, p: &ShapeParams) -> Result<f64> {
        Ok(Self::load(p)?.prediction)
    }

    fn corners(&self) -> &'static str {
        "prime ends A, B, C, D as listed in the polygon file"
    }
}

pub fn shapes() -> Registry<dyn Shape> {
    let mut r: Registry<dyn Shape> = Registry::new("shape");
    r.register(Box::new(Triangle));
    r.register(Box::new(Rectangle));
    r.register(Box::new(Rhombus));
    r.register(Box::new(PolygonShape));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::CrossingProblem;

    #[test]
    fn rhombus_arcs_are_the_side_columns() {
        let p = ShapeParams::default();
        let mesh = 1.0 / (6.0 * 3f64.sqrt());
        let md = Rhombus.build(&p, mesh).unwrap();
        let d = md.domain();
        assert_eq!(d.num_faces(), 36);
        let col = |arc: Vec<usize>| {
            let mut qs: Vec<i32> = arc.iter().map(|&f| d.face(f).q).collect();
            qs.dedup();
            qs
        };
        assert_eq!(col(md.boundary_arc(0, 1).unwrap().faces), vec![5]);
        assert_eq!(col(md.boundary_arc(2, 3).unwrap().faces), vec![0]);
        assert!(CrossingProblem::arcs(&md).is_ok());
    }

    #[test]
    fn triangle_and_rectangle_build() {
        let reg = shapes();
        let p = ShapeParams {
            t: 0.25,
            ..Default::default()
        };
        let md = reg.get("triangle").unwrap().build(&p, 0.05).unwrap();
        assert_eq!(md.num_marks(), 4);
        assert_eq!(reg.get("triangle").unwrap().prediction(&p).unwrap(), 0.25);
        let p = ShapeParams {
            aspect: 2.0,
            ..Default::default()
        };
        let md = reg.get("rectangle").unwrap().build(&p, 0.05).unwrap();
        assert_eq!(md.num_marks(), 4);
        assert!(reg.get("rhombus").unwrap().build(&p, 0.05).is_err());
        assert!(reg.get("disk").is_err());
    }
}
