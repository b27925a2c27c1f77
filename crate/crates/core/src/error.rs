use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {face} is not a triangle ({count} vertices)")]
    NonTriangleFace { face: usize, count: usize },
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("vertex index {index} out of range in face {face}")]
    IndexOutOfRange { face: usize, index: usize },
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("non-manifold edge ({0}, {1})")]
    NonManifoldEdge(usize, usize),
    #[error("non-manifold vertex {0}")]
    NonManifoldVertex(usize),
    #[error("vertex {0} is not referenced by any triangle")]
    IsolatedVertex(usize),
    #[error("mesh is not connected")]
    Disconnected,
    #[error("mesh has no boundary")]
    NoBoundary,
    #[error("mesh has no interior vertices")]
    NoInterior,
    #[error("zero-length boundary edge at vertex {0}")]
    ZeroLengthEdge(usize),
    #[error("invalid corner override: {0}")]
    InvalidOverride(String),
    #[error("boundary values at vertices {0} and {1} are antipodal; winding is ambiguous")]
    AmbiguousWinding(usize, usize),
    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },
    #[error("singularity degrees sum to {config} but the boundary condition requires {boundary}")]
    DegreeMismatch { config: i64, boundary: i64 },
    #[error("invalid singularity configuration: {0}")]
    InvalidConfig(String),
    #[error("point lies outside the mesh")]
    OutsideMesh,
    #[error("cross field is undefined near a singularity")]
    NearSingularity,
    #[error("face {0} carries no winding")]
    NotSingular(usize),
    #[error("no separatrices for representation degree {0}")]
    DegenerateDegree(i32),
    #[error("initial direction is ambiguous between two cross branches")]
    AmbiguousBranch,
    #[error("partition failed: {0}")]
    Partition(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
