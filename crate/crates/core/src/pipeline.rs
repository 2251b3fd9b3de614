//! Per-frame estimation: masked depth to robot-frame object positions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{backproject, mask_depth, CameraIntrinsics, DepthFrame, InstanceIds, MaskFrame};
use crate::clustering::{dbscan, distance_of, summarize_cluster, Cluster, DbscanParams};
use crate::egomap::{build_ego_map, extract_points, EgoMap, MapConfig, PointSet2D};
use crate::error::{Error, Result};
use crate::outlier::{filter_outliers, LofParams};

/// DBSCAN settings.
///
/// Without an explicit `min_pts`, the LOF neighbor rule applied to the whole
/// point set gives the value, clamped to `2..=min_pts_cap`. Uncapped, the rule
/// grows with the total cell count of every object in view and soon exceeds
/// what one thin object surface can put inside `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanRule {
    /// Neighborhood radius in cells.
    pub eps: f64,
    pub min_pts: Option<usize>,
    pub min_pts_cap: usize,
}

impl Default for DbscanRule {
    fn default() -> Self {
        Self {
            eps: 12.0,
            min_pts: None,
            min_pts_cap: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub intrinsics: CameraIntrinsics,
    pub map: MapConfig,
    pub lof: LofParams,
    pub dbscan: DbscanRule,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.intrinsics.validate()?;
        self.map.validate()?;
        self.lof.validate()?;
        DbscanParams {
            eps: self.dbscan.eps,
            min_pts: self.dbscan.min_pts.unwrap_or(2),
        }
        .validate()
    }

    /// DBSCAN parameters for a point set of `n` cells.
    pub fn dbscan_params(&self, n: usize) -> DbscanParams {
        let min_pts = self
            .dbscan
            .min_pts
            .unwrap_or_else(|| self.lof.neighbors.neighbors_for(n).clamp(2, self.dbscan.min_pts_cap.max(2)));
        DbscanParams {
            eps: self.dbscan.eps,
            min_pts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectEstimate {
    pub cluster: Cluster,
    /// Meters from the robot to the cluster centroid.
    pub distance: f64,
    pub frame_index: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_index: usize,
    pub estimates: Vec<ObjectEstimate>,
    /// Back-projected points that fell outside the map.
    pub dropped_points: usize,
    /// Cells removed by the outlier filter.
    pub filtered_outliers: usize,
    /// Filtered cells DBSCAN left unassigned.
    pub noise_cells: usize,
}

impl FrameResult {
    pub fn with_frame_index(mut self, index: usize) -> Self {
        self.frame_index = index;
        for e in &mut self.estimates {
            e.frame_index = index;
        }
        self
    }
}

/// Masks depth to `ids`, back-projects it and bins it into an ego map.
pub fn project_masked(
    depth: &DepthFrame,
    mask: &MaskFrame,
    ids: InstanceIds,
    cfg: &PipelineConfig,
) -> Result<EgoMap> {
    if depth.dims() != cfg.intrinsics.dims() {
        return Err(Error::DimensionMismatch {
            expected: cfg.intrinsics.dims(),
            actual: depth.dims(),
        });
    }
    let masked = mask_depth(depth, mask, ids)?;
    let points = backproject(&masked, &cfg.intrinsics)?;
    Ok(build_ego_map(&points, cfg.map))
}

/// Runs outlier filtering, clustering and summarization on a set of cells.
pub fn estimate_points(points: &PointSet2D, cfg: &PipelineConfig) -> FrameResult {
    let lof = filter_outliers(points, &cfg.lof);
    let params = cfg.dbscan_params(points.len());
    let clustered = dbscan(&lof.inliers, &params);
    let estimates = clustered
        .clusters
        .iter()
        .map(|members| {
            let cluster = summarize_cluster(members, &cfg.map).expect("dbscan clusters are nonempty");
            ObjectEstimate {
                distance: distance_of(&cluster),
                cluster,
                frame_index: 0,
            }
        })
        .collect();
    FrameResult {
        frame_index: 0,
        estimates,
        dropped_points: 0,
        filtered_outliers: lof.outliers.len(),
        noise_cells: clustered.noise.len(),
    }
}

/// Estimates robot-frame positions of the objects selected by `ids`.
pub fn estimate_frame(
    depth: &DepthFrame,
    mask: &MaskFrame,
    ids: InstanceIds,
    cfg: &PipelineConfig,
) -> Result<FrameResult> {
    let map = project_masked(depth, mask, ids, cfg)?;
    let points = extract_points(&map);
    let mut result = estimate_points(&points, cfg);
    result.dropped_points = map.dropped();
    Ok(result)
}

/// Runs [`estimate_frame`] over a sequence, keeping input order.
///
/// Frames are independent, so they are processed in parallel batches on the
/// current rayon pool; the output does not depend on the pool size.
pub fn estimate_sequence<I>(frames: I, ids: InstanceIds, cfg: &PipelineConfig) -> Result<Vec<FrameResult>>
where
    I: IntoIterator<Item = Result<(DepthFrame, MaskFrame)>>,
{
    const BATCH: usize = 16;
    let mut results = Vec::new();
    let mut batch = Vec::with_capacity(BATCH);
    let mut frames = frames.into_iter().enumerate();
    loop {
        batch.clear();
        for (i, frame) in frames.by_ref().take(BATCH) {
            batch.push((i, frame.map_err(|e| e.at_frame(i))?));
        }
        if batch.is_empty() {
            break;
        }
        let done: Vec<Result<FrameResult>> = batch
            .par_iter()
            .map(|(i, (depth, mask))| {
                estimate_frame(depth, mask, ids, cfg)
                    .map(|r| r.with_frame_index(*i))
                    .map_err(|e| e.at_frame(*i))
            })
            .collect();
        for r in done {
            results.push(r?);
        }
    }
    Ok(results)
}
