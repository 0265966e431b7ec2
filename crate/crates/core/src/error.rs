use thiserror::Error;

/// Errors raised across the library. Variants carry enough context to be
/// printed as a single machine-parseable line by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-manifold edge ({0}, {1}) has more than two incident faces")]
    NonManifoldEdge(usize, usize),
    #[error("non-manifold vertex {0}: its faces do not form a single fan")]
    NonManifoldVertex(usize),
    #[error("inconsistent face orientation on edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),
    #[error("isolated vertex {0}")]
    IsolatedVertex(usize),
    #[error("face {0} references invalid vertex index {1}")]
    InvalidVertexIndex(usize, usize),
    #[error("degenerate face {0}")]
    DegenerateFace(usize),
    #[error("zero normal at vertex {0}")]
    ZeroNormal(usize),
    #[error("boundary loop {loop_index} is not planar (deviation {deviation:e})")]
    NonPlanarBoundary { loop_index: usize, deviation: f64 },
    #[error("mesh has more than one connected component")]
    DisconnectedComponent,
    #[error("protein density {value} at vertex {vertex} is outside [0, 1]")]
    OutOfRangePhi { vertex: usize, value: f64 },
    #[error("protein density left (0, 1) at vertex {vertex}")]
    PhiOutOfBounds { vertex: usize },
    #[error("preferred area is required but missing or non-positive")]
    MissingPreferredArea,
    #[error("non-positive volume {0:e}")]
    NonPositiveVolume(f64),
    #[error("regularization reference is missing or does not match the mesh")]
    MissingReference,
    #[error("boundary loop {0} has no boundary condition assigned")]
    UnassignedLoop(usize),
    #[error("line search failed: step size underflow after {0} backtracks")]
    LineSearchFailed(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key '{key}' at line {line}")]
    UnknownKey { line: usize, key: String },
    #[error("type error at line {line}: {message}")]
    Type { line: usize, message: String },
    #[error("missing required key '{0}'")]
    MissingRequired(String),
    #[error("mutation would break manifoldness: {0}")]
    WouldBreakManifold(String),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short stable identifier, used for CLI diagnostics and FFI error codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonManifoldEdge(..) => "NonManifoldEdge",
            Error::NonManifoldVertex(..) => "NonManifoldVertex",
            Error::InconsistentOrientation(..) => "InconsistentOrientation",
            Error::IsolatedVertex(..) => "IsolatedVertex",
            Error::InvalidVertexIndex(..) => "InvalidVertexIndex",
            Error::DegenerateFace(..) => "DegenerateFace",
            Error::ZeroNormal(..) => "ZeroNormal",
            Error::NonPlanarBoundary { .. } => "NonPlanarBoundary",
            Error::DisconnectedComponent => "DisconnectedComponent",
            Error::OutOfRangePhi { .. } => "OutOfRangePhi",
            Error::PhiOutOfBounds { .. } => "PhiOutOfBounds",
            Error::MissingPreferredArea => "MissingPreferredArea",
            Error::NonPositiveVolume(..) => "NonPositiveVolume",
            Error::MissingReference => "MissingReference",
            Error::UnassignedLoop(..) => "UnassignedLoop",
            Error::LineSearchFailed(..) => "LineSearchFailed",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::InvalidParams(..) => "InvalidParams",
            Error::UnknownPreset(..) => "UnknownPreset",
            Error::Parse { .. } => "ParseError",
            Error::UnknownKey { .. } => "UnknownKey",
            Error::Type { .. } => "TypeError",
            Error::MissingRequired(..) => "MissingRequired",
            Error::WouldBreakManifold(..) => "WouldBreakManifold",
            Error::Solve(..) => "SolveError",
            Error::Io(..) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
