//! Segmentation and distance-estimation metrics.
//!
//! Ground truth for distance evaluation is built by pushing each labelled
//! object's depth pixels through the same top-down projection as the
//! estimates ([`project_gt`]). Estimates are paired with ground-truth objects
//! greedily by largest cell intersection ([`match_clusters`]), and distance
//! errors are computed over the matched pairs.
//!
//! Aggregation uses plain count/sum accumulators that merge associatively,
//! so per-frame work can be spread across threads and folded in any grouping.

use serde::{Deserialize, Serialize};

use crate::camera::{DepthFrame, InstanceIds, MaskFrame};
use crate::clustering::{distance_of, summarize_cluster, Cluster};
use crate::egomap::{cell_to_robot_frame, extract_points, PointSet2D};
use crate::error::{Error, Result};
use crate::pipeline::{project_masked, ObjectEstimate, PipelineConfig};
use crate::synthgen::FrameTruth;

/// Pixel confusion counts between a predicted and a ground-truth mask.
/// Any nonzero id is foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SegCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl SegCounts {
    /// `|A ∩ B| / |A ∪ B|`; `None` when both masks are empty.
    pub fn iou(&self) -> Option<f64> {
        let union = self.tp + self.fp + self.fn_;
        (union > 0).then(|| self.tp as f64 / union as f64)
    }

    /// `TP / (TP + FP)`; `None` when nothing is predicted.
    pub fn precision(&self) -> Option<f64> {
        let p = self.tp + self.fp;
        (p > 0).then(|| self.tp as f64 / p as f64)
    }

    /// `TP / (TP + FN)`; `None` when the ground truth is empty.
    pub fn recall(&self) -> Option<f64> {
        let g = self.tp + self.fn_;
        (g > 0).then(|| self.tp as f64 / g as f64)
    }

    pub fn gt_empty(&self) -> bool {
        self.tp + self.fn_ == 0
    }

    pub fn pred_empty(&self) -> bool {
        self.tp + self.fp == 0
    }
}

pub fn seg_counts(pred: &MaskFrame, gt: &MaskFrame) -> Result<SegCounts> {
    if pred.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: pred.dims(),
        });
    }
    let mut c = SegCounts::default();
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p > 0, g > 0) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Per-frame `(iou, precision, recall)`.
pub fn seg_scores(
    pred: &MaskFrame,
    gt: &MaskFrame,
) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    let c = seg_counts(pred, gt)?;
    Ok((c.iou(), c.precision(), c.recall()))
}

/// Frame-averaged segmentation scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegScores {
    pub iou: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub frames_counted: usize,
    /// Frames without ground-truth foreground, left out of IoU and recall.
    pub frames_without_gt: usize,
    /// Frames without predicted foreground, left out of precision.
    pub frames_without_prediction: usize,
}

/// Macro-average over frames of per-frame IoU, precision and recall.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegAccumulator {
    iou_sum: f64,
    precision_sum: f64,
    recall_sum: f64,
    with_gt: usize,
    with_pred: usize,
    frames: usize,
}

impl SegAccumulator {
    pub fn add(&mut self, c: &SegCounts) {
        self.frames += 1;
        if !c.gt_empty() {
            self.with_gt += 1;
            self.iou_sum += c.iou().unwrap_or(0.0);
            self.recall_sum += c.recall().unwrap_or(0.0);
        }
        if !c.pred_empty() {
            self.with_pred += 1;
            self.precision_sum += c.precision().unwrap_or(0.0);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.iou_sum += other.iou_sum;
        self.precision_sum += other.precision_sum;
        self.recall_sum += other.recall_sum;
        self.with_gt += other.with_gt;
        self.with_pred += other.with_pred;
        self.frames += other.frames;
    }

    pub fn finish(&self) -> SegScores {
        let mean = |s: f64, n: usize| (n > 0).then(|| s / n as f64);
        SegScores {
            iou: mean(self.iou_sum, self.with_gt),
            precision: mean(self.precision_sum, self.with_pred),
            recall: mean(self.recall_sum, self.with_gt),
            frames_counted: self.frames,
            frames_without_gt: self.frames - self.with_gt,
            frames_without_prediction: self.frames - self.with_pred,
        }
    }
}

/// A labelled object projected into the ego map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtCluster {
    pub id: u8,
    pub cluster: Cluster,
    /// Robot-to-centroid distance of the projected cells, meters.
    pub distance: f64,
    /// Distance to the closest projected cell center, meters.
    pub nearest: f64,
}

impl GtCluster {
    pub fn cells(&self) -> &PointSet2D {
        &self.cluster.members
    }
}

/// Projects every labelled object of `gt_mask` into the ego map.
///
/// Objects with no cells inside the map, or whose projected centroid lies
/// beyond `max_range` meters, are left out. Results are ordered by id.
pub fn project_gt(
    depth: &DepthFrame,
    gt_mask: &MaskFrame,
    cfg: &PipelineConfig,
    max_range: f64,
) -> Result<Vec<GtCluster>> {
    if depth.dims() != gt_mask.dims() {
        return Err(Error::DimensionMismatch {
            expected: depth.dims(),
            actual: gt_mask.dims(),
        });
    }
    let mut out = Vec::new();
    for id in gt_mask.present_ids().iter() {
        let map = project_masked(depth, gt_mask, InstanceIds::single(id), cfg)?;
        let cells = extract_points(&map);
        if cells.is_empty() {
            continue;
        }
        let cluster = summarize_cluster(&cells, &cfg.map)?;
        let distance = distance_of(&cluster);
        if distance > max_range {
            continue;
        }
        let nearest = cells
            .iter()
            .map(|c| {
                let (x, y) = cell_to_robot_frame(c.col as f64, c.row as f64, &cfg.map);
                x.hypot(y)
            })
            .fold(f64::INFINITY, f64::min);
        out.push(GtCluster {
            id,
            cluster,
            distance,
            nearest,
        });
    }
    Ok(out)
}

/// Drops ground-truth objects whose recorded center is farther than `max_range`.
pub fn retain_within_range(gt: &mut Vec<GtCluster>, truth: &FrameTruth, max_range: f64) {
    gt.retain(|g| {
        truth
            .object(g.id)
            .is_none_or(|o| o.planar_distance() <= max_range)
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchPair {
    pub gt_id: u8,
    pub estimate: usize,
    pub intersection: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchPair>,
    /// Ground-truth objects without a matching estimate.
    pub misses: Vec<u8>,
    /// Estimates matching no ground-truth object.
    pub hallucinations: Vec<usize>,
}

/// Greedy matching on an intersection matrix `inter[g][e]`.
///
/// Repeatedly takes the remaining pair with the largest positive
/// intersection, breaking ties by smaller ground-truth id and then smaller
/// estimate index.
pub fn match_by_intersection(gt_ids: &[u8], inter: &[Vec<usize>], n_estimates: usize) -> MatchResult {
    let mut gt_free = vec![true; gt_ids.len()];
    let mut est_free = vec![true; n_estimates];
    let mut pairs = Vec::new();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (g, row) in inter.iter().enumerate() {
            if !gt_free[g] {
                continue;
            }
            for (e, &v) in row.iter().enumerate() {
                if !est_free[e] || v == 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bg, be, bv)) => {
                        v > bv || (v == bv && (gt_ids[g], e) < (gt_ids[bg], be))
                    }
                };
                if better {
                    best = Some((g, e, v));
                }
            }
        }
        let Some((g, e, v)) = best else { break };
        gt_free[g] = false;
        est_free[e] = false;
        pairs.push(MatchPair {
            gt_id: gt_ids[g],
            estimate: e,
            intersection: v,
        });
    }
    let mut misses: Vec<u8> = gt_ids
        .iter()
        .zip(&gt_free)
        .filter(|(_, &f)| f)
        .map(|(&id, _)| id)
        .collect();
    misses.sort_unstable();
    MatchResult {
        pairs,
        misses,
        hallucinations: (0..n_estimates).filter(|&e| est_free[e]).collect(),
    }
}

pub fn match_clusters(gt: &[GtCluster], estimates: &[ObjectEstimate]) -> MatchResult {
    let ids: Vec<u8> = gt.iter().map(|g| g.id).collect();
    let inter: Vec<Vec<usize>> = gt
        .iter()
        .map(|g| {
            estimates
                .iter()
                .map(|e| g.cells().intersection_len(&e.cluster.members))
                .collect()
        })
        .collect();
    match_by_intersection(&ids, &inter, estimates.len())
}

/// Threshold-accuracy bases: `δ < 1.25^k` for `k = 1, 2, 3`.
pub const DELTA_BASE: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceErrors {
    pub n: usize,
    pub mae: f64,
    pub squarel: f64,
    pub rmse: f64,
    pub rmsle: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

/// Streaming sums behind [`DistanceErrors`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistanceAccumulator {
    n: usize,
    abs: f64,
    sq_rel: f64,
    sq: f64,
    sq_log: f64,
    within: [usize; 3],
}

impl DistanceAccumulator {
    /// Adds a `(true, estimated)` pair. The true distance must be positive.
    pub fn add(&mut self, d_true: f64, d_est: f64) -> Result<()> {
        if !(d_true > 0.0) {
            return Err(Error::NonPositiveDistance(d_true));
        }
        let err = d_true - d_est;
        self.n += 1;
        self.abs += err.abs();
        self.sq_rel += (err / d_true).powi(2);
        self.sq += err * err;
        self.sq_log += ((1.0 + d_true).ln() - (1.0 + d_est).ln()).powi(2);
        let ratio = (d_est / d_true).max(d_true / d_est);
        for (k, count) in self.within.iter_mut().enumerate() {
            if ratio < DELTA_BASE.powi(k as i32 + 1) {
                *count += 1;
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.abs += o.abs;
        self.sq_rel += o.sq_rel;
        self.sq += o.sq;
        self.sq_log += o.sq_log;
        for k in 0..3 {
            self.within[k] += o.within[k];
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn finish(&self) -> Option<DistanceErrors> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        Some(DistanceErrors {
            n: self.n,
            mae: self.abs / n,
            squarel: self.sq_rel / n,
            rmse: (self.sq / n).sqrt(),
            rmsle: (self.sq_log / n).sqrt(),
            delta1: self.within[0] as f64 / n,
            delta2: self.within[1] as f64 / n,
            delta3: self.within[2] as f64 / n,
        })
    }
}

/// Error metrics over `(true, estimated)` distance pairs.
pub fn distance_errors(pairs: &[(f64, f64)]) -> Result<DistanceErrors> {
    let mut acc = DistanceAccumulator::default();
    for &(d, e) in pairs {
        acc.add(d, e)?;
    }
    acc.finish().ok_or(Error::EmptyInput)
}

/// Matched pairs over matched-plus-missed ground truth; `None` without any ground truth.
pub fn detection_rate<'a, I>(frames: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a MatchResult>,
{
    let (mut hit, mut miss) = (0usize, 0usize);
    for m in frames {
        hit += m.pairs.len();
        miss += m.misses.len();
    }
    (hit + miss > 0).then(|| hit as f64 / (hit + miss) as f64)
}

/// Ground-truth summary kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtObject {
    pub id: u8,
    /// Distance of the projected ground-truth centroid (the reference distance).
    pub distance: f64,
    /// Distance to the recorded object center, when known.
    pub center_distance: Option<f64>,
}

/// Everything the reports need from one evaluated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEval {
    pub frame_index: usize,
    pub gt: Vec<GtObject>,
    pub estimate_distances: Vec<f64>,
    pub matches: MatchResult,
}

impl FrameEval {
    /// `(true, estimated)` distances of every matched pair.
    pub fn matched_distances(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.matches.pairs.iter().map(|p| {
            let gt = self.gt.iter().find(|g| g.id == p.gt_id).expect("pair refers to a gt object");
            (gt.distance, self.estimate_distances[p.estimate])
        })
    }

    fn gt_distance(&self, id: u8) -> f64 {
        self.gt.iter().find(|g| g.id == id).map_or(f64::NAN, |g| g.distance)
    }
}

/// Builds ground truth for one frame and matches `estimates` against it.
pub fn evaluate_frame(
    frame_index: usize,
    depth: &DepthFrame,
    gt_mask: &MaskFrame,
    truth: Option<&FrameTruth>,
    estimates: &[ObjectEstimate],
    cfg: &PipelineConfig,
) -> Result<FrameEval> {
    let max_range = cfg.map.forward_extent();
    let mut gt = project_gt(depth, gt_mask, cfg, max_range)?;
    if let Some(t) = truth {
        retain_within_range(&mut gt, t, max_range);
    }
    let matches = match_clusters(&gt, estimates);
    Ok(FrameEval {
        frame_index,
        gt: gt
            .iter()
            .map(|g| GtObject {
                id: g.id,
                distance: g.distance,
                center_distance: truth.and_then(|t| t.object(g.id)).map(|o| o.planar_distance()),
            })
            .collect(),
        estimate_distances: estimates.iter().map(|e| e.distance).collect(),
        matches,
    })
}

/// Half-open distance range `(lo, hi]`, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, d: f64) -> bool {
        d > self.lo && d <= self.hi
    }

    pub fn label(&self) -> String {
        format!("({}, {}]", self.lo, self.hi)
    }
}

pub const DEFAULT_BRACKETS: [Bracket; 3] = [
    Bracket::new(0.0, 3.0),
    Bracket::new(3.0, 6.0),
    Bracket::new(6.0, 10.0),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRow {
    pub bracket: Bracket,
    pub matched: usize,
    pub missed: usize,
    pub detection_rate: Option<f64>,
    pub errors: Option<DistanceErrors>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub rows: Vec<BracketRow>,
}

fn validate_brackets(brackets: &[Bracket]) -> Result<()> {
    for b in brackets {
        if !(b.lo < b.hi) {
            return Err(Error::InvalidParameter(format!("empty bracket {}", b.label())));
        }
    }
    for w in brackets.windows(2) {
        if w[1].lo < w[0].hi {
            return Err(Error::InvalidParameter(format!(
                "brackets {} and {} overlap or are unordered",
                w[0].label(),
                w[1].label()
            )));
        }
    }
    Ok(())
}

/// Detection rate and distance errors per reference-distance bracket.
pub fn bracket_report(frames: &[FrameEval], brackets: &[Bracket]) -> Result<BracketReport> {
    validate_brackets(brackets)?;
    let mut rows: Vec<(usize, usize, DistanceAccumulator)> =
        vec![(0, 0, DistanceAccumulator::default()); brackets.len()];
    for f in frames {
        for p in &f.matches.pairs {
            let d = f.gt_distance(p.gt_id);
            if let Some(i) = brackets.iter().position(|b| b.contains(d)) {
                rows[i].0 += 1;
                rows[i].2.add(d, f.estimate_distances[p.estimate])?;
            }
        }
        for &id in &f.matches.misses {
            let d = f.gt_distance(id);
            if let Some(i) = brackets.iter().position(|b| b.contains(d)) {
                rows[i].1 += 1;
            }
        }
    }
    Ok(BracketReport {
        rows: brackets
            .iter()
            .zip(rows)
            .map(|(b, (matched, missed, acc))| BracketRow {
                bracket: *b,
                matched,
                missed,
                detection_rate: (matched + missed > 0)
                    .then(|| matched as f64 / (matched + missed) as f64),
                errors: acc.finish(),
            })
            .collect(),
    })
}

/// Whole-run summary: the overall row plus the bracket breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub frames: usize,
    pub overall: BracketRow,
    pub hallucinations: usize,
    pub brackets: BracketReport,
    pub segmentation: Option<SegScores>,
}

pub fn eval_report(
    frames: &[FrameEval],
    brackets: &[Bracket],
    max_range: f64,
    segmentation: Option<SegScores>,
) -> Result<EvalReport> {
    let all = bracket_report(frames, &[Bracket::new(0.0, max_range)])?;
    Ok(EvalReport {
        frames: frames.len(),
        overall: all.rows.into_iter().next().expect("one bracket"),
        hallucinations: frames.iter().map(|f| f.matches.hallucinations.len()).sum(),
        brackets: bracket_report(frames, brackets)?,
        segmentation,
    })
}

pub const TABLE_COLUMNS: [&str; 8] = ["Det Rate", "MAE", "SquaRel", "RMSE", "RMSLE", "δ", "δ²", "δ³"];

fn row_cells(row: &BracketRow, pct: bool) -> Vec<String> {
    let rate = |x: Option<f64>| match x {
        Some(v) if pct => format!("{:.2}%", v * 100.0),
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    };
    let num = |x: Option<f64>| x.map(|v| if pct { format!("{v:.3}") } else { format!("{v:.6}") }).unwrap_or_default();
    let e = row.errors;
    vec![
        rate(row.detection_rate),
        num(e.map(|e| e.mae)),
        num(e.map(|e| e.squarel)),
        num(e.map(|e| e.rmse)),
        num(e.map(|e| e.rmsle)),
        rate(e.map(|e| e.delta1)),
        rate(e.map(|e| e.delta2)),
        rate(e.map(|e| e.delta3)),
    ]
}

/// Writes the report as CSV: one overall row, then one row per bracket.
pub fn write_report_csv<W: std::io::Write>(report: &EvalReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["Distance(m)"];
    header.extend(TABLE_COLUMNS);
    header.extend(["Matched", "Missed"]);
    w.write_record(&header)?;
    let rows = std::iter::once(("all".to_string(), &report.overall))
        .chain(report.brackets.rows.iter().map(|r| (r.bracket.label(), r)));
    for (label, row) in rows {
        let mut rec = vec![label];
        rec.extend(row_cells(row, false));
        rec.push(row.matched.to_string());
        rec.push(row.missed.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table in the same column layout as the CSV.
pub fn format_report_table(report: &EvalReport) -> String {
    let mut lines = Vec::new();
    let mut header = vec!["Distance(m)".to_string()];
    header.extend(TABLE_COLUMNS.iter().map(|s| s.to_string()));
    let mut body = vec![header];
    body.push({
        let mut r = vec!["all".to_string()];
        r.extend(row_cells(&report.overall, true));
        r
    });
    for row in &report.brackets.rows {
        let mut r = vec![row.bracket.label()];
        r.extend(row_cells(row, true));
        body.push(r);
    }
    let widths: Vec<usize> = (0..body[0].len())
        .map(|c| body.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    for (i, r) in body.iter().enumerate() {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}", w = *w))
            .collect();
        lines.push(format!("| {} |", cells.join(" | ")));
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            lines.push(format!("|-{}-|", rule.join("-|-")));
        }
    }
    lines.push(format!(
        "frames: {}  hallucinated clusters: {}",
        report.frames, report.hallucinations
    ));
    if let Some(s) = report.segmentation {
        let f = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{:.2}%", v * 100.0));
        lines.push(format!(
            "segmentation: IOU {}  Precision {}  Recall {}  ({} frames, {} without ground truth, {} without prediction)",
            f(s.iou),
            f(s.precision),
            f(s.recall),
            s.frames_counted,
            s.frames_without_gt,
            s.frames_without_prediction
        ));
    }
    lines.join("\n") + "\n"
}
