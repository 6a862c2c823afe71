use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty interval: lower {lower} exceeds upper {upper}")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid expression: {0}")]
    InvalidExpression(String),

    #[error("infinite bound where a finite one is required (coordinate {coordinate})")]
    InfiniteBound { coordinate: usize },

    #[error("bound {coordinate} is unbounded on the working box")]
    Unbounded { coordinate: usize },

    #[error("inconsistent bounds at coordinate {coordinate}: lower {lower} > upper {upper}")]
    InconsistentBounds {
        coordinate: usize,
        lower: f64,
        upper: f64,
    },

    #[error("Lipschitz bound {lambda} is not below 1; the cyclic iteration is not certified")]
    NotContracting { lambda: f64 },

    #[error("Lipschitz bound {lambda} exceeds 1")]
    NotNonexpansive { lambda: f64 },

    #[error("no convergence after {sweeps} sweeps (last block max displacement {last})")]
    MaxSweepsExceeded { sweeps: usize, last: f64 },

    #[error("iteration stalled: displacement did not decay over a window of {window} steps")]
    Stalled { window: usize },

    #[error("point is not in the set (violation {violation})")]
    NotInSet { violation: f64 },

    #[error("map is not 1-Lipschitz: points {first} and {second} exceed by {excess}")]
    NotLipschitz {
        first: usize,
        second: usize,
        excess: f64,
    },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("function is not admissible: f({first}) + f({second}) < d({first},{second})")]
    NotAdmissible { first: usize, second: usize },

    #[error("function is not extremal at point {0}")]
    NotExtremal(usize),

    #[error("extremal function vanishes at {0} but is not the distance function of that point")]
    ZeroNotDistanceRow(usize),

    #[error("grid of {candidates} candidates exceeds the cap of {cap}")]
    GridTooLarge { candidates: f64, cap: f64 },

    #[error("point lies in the set; it has no positive margin")]
    InsideSet,

    #[error("cone of exterior sample {exterior} contains inside sample {inside}")]
    ConeMeetsSet { exterior: usize, inside: usize },

    #[error("exterior sample {0} is reported inside by the membership oracle")]
    ExteriorInside(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
