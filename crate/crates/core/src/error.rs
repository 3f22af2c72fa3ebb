use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point set is empty")]
    Empty,

    #[error("duplicate point {0}")]
    DuplicatePoint(Box<Point>),

    #[error("points {0} and {1} share an x-coordinate (apply a shear first)")]
    SharedX(Box<Point>, Box<Point>),

    #[error("points {0}, {1} and {2} are collinear")]
    Collinear(Box<Point>, Box<Point>, Box<Point>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("split {split} is out of range for {len} points")]
    InvalidSplit { split: usize, len: usize },

    #[error("polygon is not convex and counterclockwise")]
    NotConvex,

    #[error("part A is in convex position and has no inner point")]
    NoInnerPoint,

    #[error("wedge {0} contains no point of B")]
    EmptyWedge(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("corpus: {0}")]
    Corpus(String),

    #[error("signature: {0}")]
    Signature(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
