use thiserror::Error;

use crate::space::PointId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("grid cell {0} has no feature vector")]
    MissingPoint(PointId),

    #[error("grid cell {0} was given more than once")]
    DuplicatePoint(PointId),

    #[error("feature vector for {point} has length {found}, expected {expected}")]
    LengthMismatch {
        point: PointId,
        expected: usize,
        found: usize,
    },

    #[error("point {0} is outside the space")]
    PointOutOfRange(PointId),

    #[error("invalid space shape: {0}")]
    InvalidShape(String),

    #[error("regions belong to different spaces")]
    SpaceMismatch,

    #[error("operation undefined for ({left}, {right}): {reason}")]
    OpDomain {
        left: PointId,
        right: PointId,
        reason: String,
    },

    #[error("candidate region is not a subset of the group region")]
    NotSubset,

    #[error("group region classifies as {0}, not a group")]
    GNotGroup(String),

    #[error("region must be nonempty")]
    EmptyRegion,

    #[error("space has {points} points, the limit for this check is {limit}")]
    SpaceTooLarge { points: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
