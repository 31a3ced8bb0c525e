use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("point {index} has a non-finite coordinate on axis {axis}")]
    NonFinite { index: usize, axis: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("projection is constant; operation needs min < max")]
    ConstantProjection,

    #[error("every axis of the bounding box has zero length")]
    DegenerateBox,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is not in the tree")]
    PointNotFound(usize),

    #[error("node {0} is not in the tree")]
    NodeNotFound(usize),

    #[error("tree invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
