use thiserror::Error;

use crate::wallsys::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("wall index {0} out of range")]
    UnknownWall(usize),

    #[error("invalid wall system: {0}")]
    InvalidWallSystem(ValidationReport),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph is not median: triple ({}, {}, {}) has {medians} medians", .witness[0], .witness[1], .witness[2])]
    NotMedian { witness: [String; 3], medians: usize },

    #[error("vertex set is not convex")]
    NotConvex,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("walls {0} and {1} cross")]
    CrossingWalls(usize, usize),

    #[error("path step {0} joins non-adjacent vertices")]
    InvalidPath(usize),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("metric form is not in the form cone: f({0}) + f({1}) < d({0}, {1})")]
    NotInDelta(String, String),

    #[error("metric form is not extremal at `{0}`")]
    NotExtremal(String),

    #[error("form has {got} coordinates, metric has {expected} points")]
    FormLength { expected: usize, got: usize },

    #[error("{points} points exceeds the enumeration bound of {bound}")]
    TooLarge { points: usize, bound: usize },

    #[error("retraction did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A structural invariant failed. Indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }

    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownPoint(_) => "unknown_point",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::UnknownWall(_) => "unknown_wall",
            Error::InvalidWallSystem(_) => "invalid_wall_system",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Disconnected => "disconnected",
            Error::NotMedian { .. } => "not_median",
            Error::NotConvex => "not_convex",
            Error::Empty(_) => "empty",
            Error::CrossingWalls(..) => "crossing_walls",
            Error::InvalidPath(_) => "invalid_path",
            Error::InvalidMetric(_) => "invalid_metric",
            Error::NotInDelta(..) => "not_in_delta",
            Error::NotExtremal(_) => "not_extremal",
            Error::FormLength { .. } => "form_length",
            Error::TooLarge { .. } => "too_large",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Parameter(_) => "parameter",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal",
        }
    }
}
