use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("face set is empty")]
    EmptyFaceSet,
    #[error("face set is not connected")]
    NotConnected,
    #[error("face set is not simply connected ({cycles} boundary cycles)")]
    NotSimplyConnected { cycles: usize },
    #[error("mesh {mesh} is too coarse for the polygon: {reason}")]
    MeshTooCoarse { mesh: f64, reason: String },
    #[error("prime ends {0} and {1} map to the same boundary mid-edge")]
    MarksCollide(usize, usize),
    #[error("marks are not in counterclockwise boundary order")]
    MarksOutOfOrder,
    #[error("mid-edge {0} is not a boundary mid-edge")]
    NotOnBoundary(usize),
    #[error("mark {0} appears twice")]
    DuplicateMark(usize),
    #[error("marks {0} and {1} coincide modulo the mark count")]
    SameMark(usize, usize),
    #[error("vertex {0} has fewer than three incident half-edges")]
    BoundaryVertex(usize),
    #[error("expected {expected} marks, got {got}")]
    WrongMarkCount { expected: usize, got: usize },
    #[error("odd number of marks ({0}); disorder sets must be even")]
    OddMarkCount(usize),
    #[error("domain has {faces} faces, above the enumeration cap {cap}")]
    TooLarge { faces: usize, cap: usize },
    #[error("loop configuration boundary does not match the marks: {0}")]
    BoundaryMismatch(String),
    #[error("invalid branch set: {0}")]
    InvalidBranchSet(String),
    #[error("mid-edge {0} is a mark; the observable is not defined there")]
    NotDefined(usize),
    #[error("vertex {vertex} is incident to marked mid-edge {mark}")]
    MarkAtVertex { vertex: usize, mark: usize },
    #[error("not a contour: {0}")]
    NotAContour(String),
    #[error("contour crosses marked mid-edge {0}")]
    MarkOnContour(usize),
    #[error("degenerate annulus: inner radius {r} >= outer radius {outer}")]
    DegenerateAnnulus { r: f64, outer: f64 },
    #[error("aspect ratio must be positive, got {0}")]
    NonPositiveAspect(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
