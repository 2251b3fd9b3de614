//! Dynamic object position and distance estimation from depth images and
//! instance masks.
//!
//! Each frame's masked depth is back-projected through the pinhole model,
//! binned into a robot-centered top-down occupancy map, cleaned with a Local
//! Outlier Factor filter and split into objects with DBSCAN. Cluster centroids
//! give robot-frame `(x, y)` positions and distances.
//!
//! The crate also ships the evaluation protocol (mask IoU/precision/recall,
//! cluster matching, distance error metrics, per-distance brackets), a
//! deterministic ray-cast scene generator, and an on-disk sequence format.

pub mod camera;
pub mod cli;
pub mod clustering;
pub mod dataset_io;
pub mod egomap;
pub mod error;
pub mod evaluation;
pub mod outlier;
pub mod pipeline;
mod spatial;
pub mod synthgen;

pub use camera::{CameraIntrinsics, DepthFrame, InstanceIds, MaskFrame, Point3};
pub use clustering::{Cluster, DbscanParams};
pub use egomap::{Cell, EgoMap, MapConfig, PointSet2D};
pub use error::{Error, Result};
pub use outlier::{LofParams, NeighborRule};
pub use pipeline::{estimate_frame, FrameResult, ObjectEstimate, PipelineConfig};
pub use synthgen::{simulate, spec_presets, SceneSpec};
