//! DBSCAN over map cells and per-cluster position summaries.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::egomap::{cell_to_robot_frame, MapConfig, PointSet2D};
use crate::error::{Error, Result};
use crate::spatial::GridIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    /// Neighborhood radius in cells.
    pub eps: f64,
    /// Points (self included) within `eps` needed for a core point.
    pub min_pts: usize,
}

impl DbscanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps {} must be positive", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(Error::InvalidParameter("min_pts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Core(usize),
    Border(usize),
    Noise,
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Core(c) | Label::Border(c) => Some(c),
            Label::Noise => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DbscanResult {
    /// One label per input cell, in [`PointSet2D`] order.
    pub labels: Vec<Label>,
    /// Cluster members, numbered by their lexicographically smallest core cell.
    pub clusters: Vec<PointSet2D>,
    pub noise: PointSet2D,
}

/// Density-based clustering with Euclidean distance on cell coordinates.
///
/// Cells are scanned in lexicographic order, so cluster numbering and the
/// assignment of border cells reachable from two clusters do not depend on
/// the order the cells were collected in. A border cell joins the earliest
/// cluster that reaches it.
pub fn dbscan(points: &PointSet2D, params: &DbscanParams) -> DbscanResult {
    let coords = points.to_f64();
    let n = coords.len();
    let index = GridIndex::new(&coords, params.eps);
    let hoods: Vec<Vec<usize>> = coords.iter().map(|&p| index.within(p, params.eps)).collect();
    let is_core: Vec<bool> = hoods.iter().map(|h| h.len() >= params.min_pts).collect();

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !is_core[seed] || labels[seed].is_some() {
            continue;
        }
        let id = next;
        next += 1;
        labels[seed] = Some(Label::Core(id));
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            for &q in &hoods[p] {
                if labels[q].is_some() {
                    continue;
                }
                if is_core[q] {
                    labels[q] = Some(Label::Core(id));
                    queue.push_back(q);
                } else {
                    labels[q] = Some(Label::Border(id));
                }
            }
        }
    }

    let labels: Vec<Label> = labels.into_iter().map(|l| l.unwrap_or(Label::Noise)).collect();
    let mut members = vec![Vec::new(); next];
    let mut noise = Vec::new();
    for (cell, label) in points.iter().zip(&labels) {
        match label.cluster() {
            Some(c) => members[c].push(*cell),
            None => noise.push(*cell),
        }
    }
    DbscanResult {
        labels,
        clusters: members.into_iter().map(PointSet2D::from_iter).collect(),
        noise: noise.into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: PointSet2D,
    /// Mean member coordinate, in fractional cells.
    pub centroid_cell: (f64, f64),
    /// Centroid in the robot frame: lateral `x`, forward `y`, meters.
    pub centroid_robot: (f64, f64),
    /// Largest distance from a member's cell center to the centroid, meters.
    pub radius: f64,
}

pub fn summarize_cluster(members: &PointSet2D, config: &MapConfig) -> Result<Cluster> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let n = members.len() as f64;
    let (sc, sr) = members
        .iter()
        .fold((0.0, 0.0), |(c, r), cell| (c + cell.col as f64, r + cell.row as f64));
    let centroid_cell = (sc / n, sr / n);
    let (cx, cy) = cell_to_robot_frame(centroid_cell.0, centroid_cell.1, config);
    let radius = members
        .iter()
        .map(|cell| {
            let (x, y) = cell_to_robot_frame(cell.col as f64, cell.row as f64, config);
            (x - cx).hypot(y - cy)
        })
        .fold(0.0, f64::max);
    Ok(Cluster {
        members: members.clone(),
        centroid_cell,
        centroid_robot: (cx, cy),
        radius,
    })
}

/// Euclidean distance from the robot to the cluster centroid.
pub fn distance_of(cluster: &Cluster) -> f64 {
    let (x, y) = cluster.centroid_robot;
    (x * x + y * y).sqrt()
}
