use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `|tr(g)| ≥ 2 − 1e−12`: the element is (numerically) ±identity and has no
    /// circle subgroup attached to it.
    #[error("central element: trace {trace} is within 1e-12 of ±2")]
    CentralElement { trace: f64 },

    #[error("unsupported surface (g = {genus}, n = {boundary}): {reason}")]
    UnsupportedSurface {
        genus: u32,
        boundary: u32,
        reason: String,
    },

    #[error("letter {letter} is outside the alphabet of size {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },

    #[error("cannot parse word `{input}`: {reason}")]
    WordSyntax { input: String, reason: String },

    #[error("invalid index set {0:?}")]
    InvalidIndexSet(Vec<u32>),

    #[error("polynomial variable {0} has no value")]
    MissingVariable(String),

    #[error("boundary condition value {value} at position {position} is outside [-2, 2]")]
    BoundaryOutOfRange { position: usize, value: f64 },

    #[error("boundary condition has {got} values, surface has {expected} boundary components")]
    BoundaryArity { expected: usize, got: usize },

    #[error("no fiber point accepted after {proposals} proposals (fiber empty or epsilon {epsilon} too small)")]
    FiberEmptyOrThin { proposals: u64, epsilon: f64 },

    #[error("character points live on different surfaces: {left:?} vs {right:?}")]
    SurfaceMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("the walk group of this surface is trivial (every catalog curve is peripheral)")]
    TrivialWalkGroup,

    #[error("empty sample")]
    EmptySample,

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
