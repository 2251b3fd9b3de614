use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid horizontal field of view {0} degrees, expected (0, 180)")]
    InvalidHfov(f64),

    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },

    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),

    #[error("invalid depth value {value} at pixel index {index}")]
    InvalidDepth { index: usize, value: f64 },

    #[error("instance id {id} out of range (0..={max})")]
    InstanceIdOutOfRange { id: u8, max: u8 },

    #[error("too few points for outlier scoring: {points} points with k = {k}")]
    TooFewPoints { points: usize, k: usize },

    #[error("cannot summarize an empty cluster")]
    EmptyCluster,

    #[error("distance metrics need at least one pair")]
    EmptyInput,

    #[error("ground-truth distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),

    #[error("unknown preset `{0}` (expected near, far-small, mixed-static or multi-speed)")]
    UnknownPreset(String),

    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("frame count mismatch in {root}: {detail}")]
    CountMismatch { root: PathBuf, detail: String },

    #[error("resolution mismatch in {path}: expected {expected:?}, got {actual:?}")]
    ResolutionMismatch {
        path: PathBuf,
        expected: (u32, u32),
        actual: (u32, u32),
    },

    #[error("{path}: instance id {id} out of range (0..=6)")]
    IdOutOfRange { path: PathBuf, id: u8 },

    #[error("{path}: depth value {value} mm exceeds {max} mm")]
    DepthOutOfRange { path: PathBuf, value: u16, max: u16 },

    #[error("refusing to write an empty sequence")]
    EmptySequence,

    #[error("malformed file {path}: {detail}")]
    Malformed { path: PathBuf, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_frame(self, index: usize) -> Self {
        Error::Frame {
            index,
            source: Box::new(self),
        }
    }
}
