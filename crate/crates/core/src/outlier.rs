//! Local Outlier Factor scoring and contamination-based filtering of map cells.
//!
//! Neighborhoods follow the original LOF definition: the k-distance
//! neighborhood of a point holds every other point no farther than its k-th
//! nearest neighbor, so it can be larger than `k` when distances tie.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::egomap::{Cell, PointSet2D};
use crate::error::{Error, Result};
use crate::spatial::GridIndex;

/// Added to the mean reachability distance so coincident points keep a
/// finite local reachability density.
pub const LRD_EPSILON: f64 = 1e-10;

/// How the neighborhood size is derived from the number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborRule {
    /// `floor(n / divisor) + 1`
    Divisor(usize),
    Fixed(usize),
}

impl Default for NeighborRule {
    fn default() -> Self {
        NeighborRule::Divisor(30)
    }
}

impl NeighborRule {
    /// Neighborhood size for `n` points, before any clamping.
    pub fn neighbors_for(self, n: usize) -> usize {
        match self {
            NeighborRule::Divisor(d) => n / d.max(1) + 1,
            NeighborRule::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LofParams {
    pub neighbors: NeighborRule,
    /// Fraction of points removed as outliers, in `(0, 0.5]`.
    pub contamination: f64,
}

impl Default for LofParams {
    fn default() -> Self {
        Self {
            neighbors: NeighborRule::default(),
            contamination: 0.3,
        }
    }
}

impl LofParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.contamination > 0.0 && self.contamination <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "contamination {} must be in (0, 0.5]",
                self.contamination
            )));
        }
        match self.neighbors {
            NeighborRule::Divisor(0) => Err(Error::InvalidParameter(
                "neighbors divisor must be at least 1".into(),
            )),
            NeighborRule::Fixed(0) => Err(Error::InvalidParameter(
                "neighbor count must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Number of points flagged as outliers out of `n`.
    pub fn outlier_count(&self, n: usize) -> usize {
        // the epsilon keeps e.g. 0.3 * 90 from flooring to 26
        (self.contamination * n as f64 + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LofResult {
    /// One score per input point, in input order. Empty when filtering was skipped.
    pub scores: Vec<f64>,
    pub inliers: PointSet2D,
    pub outliers: PointSet2D,
    pub n_neighbors: usize,
    /// True when the input was too small to score.
    pub skipped: bool,
}

/// LOF score of every point for neighborhood size `k`.
pub fn lof_scores(points: &[[f64; 2]], k: usize) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 2 || k >= n {
        return Err(Error::TooFewPoints { points: n, k });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("LOF needs k >= 1".into()));
    }
    let index = GridIndex::new(points, bucket_size(points, k));
    let hoods: Vec<(f64, Vec<(usize, f64)>)> = (0..n)
        .into_par_iter()
        .map(|i| index.knn_with_ties(i, k))
        .collect();

    let lrd: Vec<f64> = hoods
        .par_iter()
        .map(|(_, nb)| {
            let reach: f64 = nb.iter().map(|&(j, d)| d.max(hoods[j].0)).sum();
            1.0 / (reach / nb.len() as f64 + LRD_EPSILON)
        })
        .collect();

    Ok(hoods
        .par_iter()
        .enumerate()
        .map(|(i, (_, nb))| {
            let sum: f64 = nb.iter().map(|&(j, _)| lrd[j] / lrd[i]).sum();
            sum / nb.len() as f64
        })
        .collect())
}

/// Bucket edge aiming for about `k` points per bucket.
fn bucket_size(points: &[[f64; 2]], k: usize) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(1.0);
    (area * k as f64 / points.len() as f64).sqrt().max(1.0)
}

/// Relative gap below which two scores count as equal. Symmetric points can
/// come out a few ulps apart depending on neighbor summation order.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-12;

/// Indices of the `m` highest-scoring points. Equal scores are removed in
/// ascending index order, which for a [`PointSet2D`] is lexicographic order.
/// A run of scores within [`SCORE_TIE_TOLERANCE`] of its highest member is
/// treated as one tie.
pub fn top_scored(scores: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut start = 0;
    while start < m.min(order.len()) {
        let top = scores[order[start]];
        let floor = top - SCORE_TIE_TOLERANCE * top.abs().max(1.0);
        let end = start + order[start..].iter().take_while(|&&i| scores[i] >= floor).count();
        order[start..end].sort_unstable();
        start = end;
    }
    order.truncate(m);
    order.sort_unstable();
    order
}

/// Removes the `floor(contamination * N)` cells with the highest LOF scores.
///
/// Sets with `N <= max(2, k)` are returned whole, as are sets whose points
/// all coincide.
pub fn filter_outliers(points: &PointSet2D, params: &LofParams) -> LofResult {
    let n = points.len();
    let k = params.neighbors.neighbors_for(n).max(1);
    let keep_all = |k| LofResult {
        scores: Vec::new(),
        inliers: points.clone(),
        outliers: PointSet2D::new(),
        n_neighbors: k,
        skipped: true,
    };
    if n <= k.max(2) {
        return keep_all(k);
    }
    let coords = points.to_f64();
    if coords.iter().all(|c| *c == coords[0]) {
        return keep_all(k);
    }
    let scores = lof_scores(&coords, k).expect("k < n checked above");
    let flagged = top_scored(&scores, params.outlier_count(n));

    let cells = points.cells();
    let mut is_out = vec![false; n];
    for &i in &flagged {
        is_out[i] = true;
    }
    let (out, inl): (Vec<(usize, &Cell)>, Vec<(usize, &Cell)>) =
        cells.iter().enumerate().partition(|(i, _)| is_out[*i]);
    LofResult {
        scores,
        inliers: inl.into_iter().map(|(_, c)| *c).collect(),
        outliers: out.into_iter().map(|(_, c)| *c).collect(),
        n_neighbors: k,
        skipped: false,
    }
}
