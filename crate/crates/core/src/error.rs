use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the unit square [0,1)^2")]
    PointOutside { x: f64, y: f64 },

    #[error("level-0 square has no parent")]
    NoParent,

    #[error("level {level} exceeds the maximum supported level {max}")]
    LevelTooDeep { level: u32, max: u32 },

    #[error("lattice index ({ix}, {iy}) out of range at level {level}")]
    IndexOutOfRange { level: u32, ix: u64, iy: u64 },

    #[error("invalid bounding box: {0}")]
    InvalidBox(String),

    #[error("invalid fractal spec: {0}")]
    InvalidSpec(String),

    #[error("depth {depth} needs dyadic level {level}, above the cap of {max}")]
    DepthOverflow { depth: u32, level: u32, max: u32 },

    #[error("{count} squares exceed the generation cap of {cap}")]
    TooManySquares { count: u128, cap: usize },

    #[error("angle {0} outside [-pi/2, pi/2]")]
    InvalidAngle(f64),

    #[error("theta grid needs at least {min} nodes, got {count}")]
    InvalidGrid { count: usize, min: usize },

    #[error("coincident centers: use the exact overlap measure (pi) instead of the transversality bound")]
    CoincidentCenters,

    #[error(
        "pair sum over {count} squares exceeds the cap of {cap}; lower the depth or raise the pair cap"
    )]
    PairCapExceeded { count: usize, cap: usize },

    #[error("window half-width {eps} is smaller than the cover diameter {diameter}")]
    EpsBelowDiameter { eps: f64, diameter: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the command-line front end: 2 for bad input,
    /// 3 for resource caps, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PairCapExceeded { .. }
            | Error::TooManySquares { .. }
            | Error::DepthOverflow { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
