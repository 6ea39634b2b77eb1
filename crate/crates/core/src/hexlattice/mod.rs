//! Geometry of the mesh-δ hexagonal lattice and of hexagonal domains.

mod coords;
mod discretize;
mod domain;
mod io;
mod marked;

pub use coords::{FaceCoord, LatticePoint, NEIGHBOR_OFFSETS};
pub(crate) use discretize::nearest_boundary_marks;
pub use discretize::{discretize, faces_inside, point_segment_distance, Polygon};
pub use domain::{Edge, FaceId, HalfEdgeId, HexDomain, MidEdgeId, VertexId};
pub use io::DomainFile;
pub use marked::{BoundaryArc, MarkedDomain};
