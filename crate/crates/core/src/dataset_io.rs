//! On-disk sequences, estimation results and top-down visualizations.
//!
//! A sequence directory looks like
//!
//! ```text
//! root/
//!   meta.json        intrinsics, fps, objects, per-frame truth
//!   depth/00000.png  16-bit grayscale, millimeters, 0 = no return
//!   mask/00000.png   8-bit grayscale, instance id 0..=6
//!   rgb/00000.png    optional flat-shaded preview
//! ```
//!
//! Frames are read lazily, one at a time, so memory use does not grow with
//! sequence length.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{ImageBuffer, ImageReader, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, DepthFrame, MaskFrame, MAX_INSTANCE_ID};
use crate::clustering::summarize_cluster;
use crate::egomap::{Cell, EgoMap, MapConfig, PointSet2D};
use crate::error::{Error, Result};
use crate::pipeline::{FrameResult, ObjectEstimate};
use crate::synthgen::{FrameTruth, ObjectSpec, SceneSpec, SimFrame};

pub const FORMAT_VERSION: u32 = 1;
pub const DEPTH_DIR: &str = "depth";
pub const MASK_DIR: &str = "mask";
pub const RGB_DIR: &str = "rgb";
pub const META_FILE: &str = "meta.json";

/// File name of frame `index`, e.g. `00042.png`.
pub fn frame_file_name(index: usize) -> String {
    format!("{index:05}.png")
}

/// Per-object metadata recorded alongside a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectMeta {
    pub id: u8,
    pub max_speed: f64,
    pub is_static: bool,
    /// The generating object, when the sequence is synthetic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ObjectSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub format_version: u32,
    pub intrinsics: CameraIntrinsics,
    pub fps: f64,
    pub frame_count: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sensor_height: Option<f64>,
    pub objects: Vec<ObjectMeta>,
    /// One entry per frame: camera pose and object positions.
    pub frames: Vec<FrameTruth>,
}

impl SequenceMeta {
    /// Metadata for a synthetic sequence; `frames` is filled in while writing.
    pub fn from_spec(spec: &SceneSpec) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            intrinsics: spec.intrinsics,
            fps: spec.fps,
            frame_count: 0,
            seed: Some(spec.seed),
            sensor_height: Some(spec.sensor_height),
            objects: spec
                .objects
                .iter()
                .map(|o| ObjectMeta {
                    id: o.id,
                    max_speed: o.max_speed,
                    is_static: o.is_static,
                    spec: Some(o.clone()),
                })
                .collect(),
            frames: Vec::new(),
        }
    }

    /// Largest depth a valid frame may store, in millimeters.
    pub fn max_depth_mm(&self) -> u16 {
        (self.intrinsics.max_depth * 1000.0).round().min(u16::MAX as f64) as u16
    }
}

/// Converts meters to stored millimeters.
pub fn depth_to_mm(depth: f64) -> Option<u16> {
    let mm = (depth * 1000.0).round();
    (0.0..=u16::MAX as f64).contains(&mm).then_some(mm as u16)
}

fn write_depth_png(path: &Path, depth: &DepthFrame) -> Result<()> {
    let mut data = Vec::with_capacity(depth.data().len());
    for (i, &d) in depth.data().iter().enumerate() {
        data.push(depth_to_mm(d).ok_or(Error::InvalidDepth { index: i, value: d })?);
    }
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(depth.width(), depth.height(), data).expect("buffer sized from frame");
    img.save(path)?;
    Ok(())
}

fn write_mask_png(path: &Path, mask: &MaskFrame) -> Result<()> {
    let img: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(mask.width(), mask.height(), mask.data().to_vec()).expect("buffer sized from frame");
    img.save(path)?;
    Ok(())
}

fn open_image(path: &Path) -> Result<image::DynamicImage> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(ImageReader::open(path)?.with_guessed_format()?.decode()?)
}

fn check_dims(path: &Path, expected: (u32, u32), actual: (u32, u32)) -> Result<()> {
    if expected != actual {
        return Err(Error::ResolutionMismatch {
            path: path.to_path_buf(),
            expected,
            actual,
        });
    }
    Ok(())
}

/// Reads a millimeter depth PNG, rejecting values above `max_mm`.
pub fn read_depth_png(path: &Path, dims: (u32, u32), max_mm: u16) -> Result<DepthFrame> {
    let img = match open_image(path)? {
        image::DynamicImage::ImageLuma16(img) => img,
        other => {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                detail: format!("expected 16-bit grayscale, got {:?}", other.color()),
            })
        }
    };
    check_dims(path, dims, img.dimensions())?;
    if let Some(&value) = img.as_raw().iter().find(|&&v| v > max_mm) {
        return Err(Error::DepthOutOfRange {
            path: path.to_path_buf(),
            value,
            max: max_mm,
        });
    }
    let data = img.as_raw().iter().map(|&mm| mm as f64 / 1000.0).collect();
    DepthFrame::new(dims.0, dims.1, data)
}

/// Reads an 8-bit instance-id PNG.
pub fn read_mask_png(path: &Path, dims: (u32, u32)) -> Result<MaskFrame> {
    let img = match open_image(path)? {
        image::DynamicImage::ImageLuma8(img) => img,
        other => {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                detail: format!("expected 8-bit grayscale, got {:?}", other.color()),
            })
        }
    };
    check_dims(path, dims, img.dimensions())?;
    if let Some(&id) = img.as_raw().iter().find(|&&v| v > MAX_INSTANCE_ID) {
        return Err(Error::IdOutOfRange {
            path: path.to_path_buf(),
            id,
        });
    }
    MaskFrame::new(dims.0, dims.1, img.into_raw())
}

const PALETTE: [[u8; 3]; 8] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 160, 20],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [128, 128, 0],
    [0, 128, 128],
];

/// Flat-shaded preview: objects in palette colors, background gray, both
/// darkening with depth.
pub fn shade_frame(depth: &DepthFrame, mask: &MaskFrame, max_depth: f64) -> RgbImage {
    RgbImage::from_fn(depth.width(), depth.height(), |u, v| {
        let shade = 1.0 - 0.7 * (depth.get(u, v) / max_depth).clamp(0.0, 1.0);
        let base = match mask.get(u, v) {
            0 => [200, 200, 200],
            id => PALETTE[(id as usize - 1) % PALETTE.len()],
        };
        Rgb(base.map(|c| (c as f64 * shade).round() as u8))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteOptions {
    /// Also write `rgb/` previews.
    pub rgb: bool,
}

/// Writes frames into `root`, creating the directory layout.
///
/// `meta.frames` and `meta.frame_count` are replaced with what was written.
pub fn write_sequence<I>(frames: I, mut meta: SequenceMeta, root: &Path, opts: WriteOptions) -> Result<SequenceMeta>
where
    I: IntoIterator<Item = SimFrame>,
{
    let mut frames = frames.into_iter().peekable();
    if frames.peek().is_none() {
        return Err(Error::EmptySequence);
    }
    for dir in [DEPTH_DIR, MASK_DIR] {
        fs::create_dir_all(root.join(dir))?;
    }
    if opts.rgb {
        fs::create_dir_all(root.join(RGB_DIR))?;
    }
    meta.frames.clear();
    let dims = meta.intrinsics.dims();
    for (i, f) in frames.enumerate() {
        if f.depth.dims() != dims || f.mask.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: f.depth.dims(),
            }
            .at_frame(i));
        }
        let name = frame_file_name(i);
        write_depth_png(&root.join(DEPTH_DIR).join(&name), &f.depth).map_err(|e| e.at_frame(i))?;
        write_mask_png(&root.join(MASK_DIR).join(&name), &f.mask)?;
        if opts.rgb {
            shade_frame(&f.depth, &f.mask, meta.intrinsics.max_depth).save(root.join(RGB_DIR).join(&name))?;
        }
        let mut truth = f.truth;
        truth.frame_index = i;
        meta.frames.push(truth);
    }
    meta.frame_count = meta.frames.len();
    let file = BufWriter::new(File::create(root.join(META_FILE))?);
    serde_json::to_writer_pretty(file, &meta)?;
    Ok(meta)
}

/// Names of the `.png` files in `dir`, sorted.
fn png_names(dir: &Path) -> Result<Vec<String>> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".png"))
        .collect();
    names.sort();
    Ok(names)
}

/// Checks that `dir` holds exactly `00000.png ..` for `count` frames.
fn check_frame_files(root: &Path, dir: &Path, count: usize) -> Result<()> {
    let names = png_names(dir)?;
    for i in 0..count {
        let expected = frame_file_name(i);
        if !names.contains(&expected) {
            return Err(Error::MissingFile(dir.join(expected)));
        }
    }
    if names.len() != count {
        return Err(Error::CountMismatch {
            root: root.to_path_buf(),
            detail: format!("{} has {} frames, expected {count}", dir.display(), names.len()),
        });
    }
    Ok(())
}

/// One frame read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFrame {
    pub index: usize,
    pub depth: DepthFrame,
    pub mask: MaskFrame,
    pub truth: FrameTruth,
}

/// An opened sequence directory. Frame files are only read on iteration.
#[derive(Debug, Clone)]
pub struct Sequence {
    root: PathBuf,
    meta: SequenceMeta,
}

impl Sequence {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn meta(&self) -> &SequenceMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.meta.frame_count
    }

    pub fn is_empty(&self) -> bool {
        self.meta.frame_count == 0
    }

    pub fn dims(&self) -> (u32, u32) {
        self.meta.intrinsics.dims()
    }

    pub fn depth_path(&self, index: usize) -> PathBuf {
        self.root.join(DEPTH_DIR).join(frame_file_name(index))
    }

    pub fn mask_path(&self, index: usize) -> PathBuf {
        self.root.join(MASK_DIR).join(frame_file_name(index))
    }

    pub fn read_depth(&self, index: usize) -> Result<DepthFrame> {
        read_depth_png(&self.depth_path(index), self.dims(), self.meta.max_depth_mm())
    }

    pub fn read_mask(&self, index: usize) -> Result<MaskFrame> {
        read_mask_png(&self.mask_path(index), self.dims())
    }

    pub fn read_frame(&self, index: usize) -> Result<SequenceFrame> {
        Ok(SequenceFrame {
            index,
            depth: self.read_depth(index)?,
            mask: self.read_mask(index)?,
            truth: self.meta.frames[index].clone(),
        })
    }

    /// Lazily reads frames in index order.
    pub fn frames(&self) -> impl Iterator<Item = Result<SequenceFrame>> + '_ {
        (0..self.len()).map(move |i| self.read_frame(i))
    }

    /// Reads every frame once, returning the first problem found.
    pub fn validate(&self) -> Result<()> {
        for f in self.frames() {
            f?;
        }
        Ok(())
    }
}

/// Opens a sequence, checking metadata and the file listing.
///
/// Per-frame content (resolution, ids, depth range) is checked as frames
/// are read; [`Sequence::validate`] reads them all.
pub fn read_sequence(root: &Path) -> Result<Sequence> {
    let meta_path = root.join(META_FILE);
    if !meta_path.is_file() {
        return Err(Error::MissingFile(meta_path));
    }
    let meta: SequenceMeta = serde_json::from_reader(BufReader::new(File::open(&meta_path)?))?;
    let malformed = |detail: String| Error::Malformed {
        path: meta_path.clone(),
        detail,
    };
    if meta.format_version != FORMAT_VERSION {
        return Err(malformed(format!(
            "format_version {} is not supported (expected {FORMAT_VERSION})",
            meta.format_version
        )));
    }
    meta.intrinsics
        .validate()
        .map_err(|e| malformed(e.to_string()))?;
    if meta.frames.len() != meta.frame_count {
        return Err(Error::CountMismatch {
            root: root.to_path_buf(),
            detail: format!(
                "meta.json lists {} frames but frame_count is {}",
                meta.frames.len(),
                meta.frame_count
            ),
        });
    }
    check_frame_files(root, &root.join(DEPTH_DIR), meta.frame_count)?;
    check_frame_files(root, &root.join(MASK_DIR), meta.frame_count)?;
    Ok(Sequence {
        root: root.to_path_buf(),
        meta,
    })
}

/// Masks produced elsewhere, one `NNNNN.png` per frame.
#[derive(Debug, Clone)]
pub struct MaskDir {
    dir: PathBuf,
    dims: (u32, u32),
}

impl MaskDir {
    pub fn open(dir: &Path, frame_count: usize, dims: (u32, u32)) -> Result<Self> {
        check_frame_files(dir, dir, frame_count)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            dims,
        })
    }

    pub fn read(&self, index: usize) -> Result<MaskFrame> {
        read_mask_png(&self.dir.join(frame_file_name(index)), self.dims)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub x: f64,
    pub y: f64,
    pub distance: f64,
    pub radius: f64,
    pub n_cells: usize,
    /// Member cells as `[col, row]`.
    pub cells: Vec<[i32; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub dropped_points: usize,
    pub filtered_outliers: usize,
    pub noise_cells: usize,
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub frame_index: usize,
    pub estimates: Vec<EstimateRecord>,
    pub diagnostics: Diagnostics,
}

impl From<&FrameResult> for ResultRecord {
    fn from(r: &FrameResult) -> Self {
        Self {
            frame_index: r.frame_index,
            estimates: r
                .estimates
                .iter()
                .map(|e| EstimateRecord {
                    x: e.cluster.centroid_robot.0,
                    y: e.cluster.centroid_robot.1,
                    distance: e.distance,
                    radius: e.cluster.radius,
                    n_cells: e.cluster.members.len(),
                    cells: e.cluster.members.iter().map(|c| [c.col, c.row]).collect(),
                })
                .collect(),
            diagnostics: Diagnostics {
                dropped_points: r.dropped_points,
                filtered_outliers: r.filtered_outliers,
                noise_cells: r.noise_cells,
            },
        }
    }
}

impl ResultRecord {
    /// Rebuilds the estimates; cluster summaries are recomputed from the cells.
    pub fn to_estimates(&self, map: &MapConfig) -> Result<Vec<ObjectEstimate>> {
        self.estimates
            .iter()
            .map(|e| {
                let cells: PointSet2D = e.cells.iter().map(|&[c, r]| Cell::new(c, r)).collect();
                let cluster = summarize_cluster(&cells, map)?;
                Ok(ObjectEstimate {
                    cluster,
                    distance: e.distance,
                    frame_index: self.frame_index,
                })
            })
            .collect()
    }
}

/// Writes one JSON line per frame.
pub fn write_results<W: Write>(results: &[FrameResult], out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    for r in results {
        serde_json::to_writer(&mut out, &ResultRecord::from(r))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a results file, requiring strictly increasing frame indices.
pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut out: Vec<ResultRecord> = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            detail: format!("line {}: {e}", n + 1),
        })?;
        if out.last().is_some_and(|p| p.frame_index >= rec.frame_index) {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                detail: format!("line {}: frame_index {} out of order", n + 1, rec.frame_index),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub const ROBOT_COLOR: [u8; 3] = [220, 0, 0];
pub const GT_COLOR: [u8; 3] = [0, 60, 255];
pub const MAP_COLOR: [u8; 3] = [190, 190, 190];
/// Cluster colors, cycled by cluster index.
pub const CLUSTER_PALETTE: [[u8; 3]; 6] = [
    [0, 170, 80],
    [255, 140, 0],
    [150, 40, 200],
    [0, 170, 190],
    [200, 160, 0],
    [230, 60, 170],
];
const ROBOT_MARKER_RADIUS: i64 = 6;

/// Cluster circle radius in map pixels.
pub fn circle_radius_px(radius_m: f64, map: &MapConfig) -> i64 {
    (radius_m / map.resolution).round() as i64
}

/// Top-down picture of one frame at one pixel per map cell, far side up.
///
/// Occupied cells are light gray, ground-truth cells blue, estimated
/// clusters in palette colors with an enclosing circle, robot in red.
pub fn render_topdown(map: &EgoMap, estimates: &[ObjectEstimate], gt: &[PointSet2D]) -> RgbImage {
    let cfg = *map.config();
    let (w, h) = (cfg.width, cfg.height);
    let mut img = RgbImage::from_pixel(w, h, Rgb([255, 255, 255]));
    let put = |img: &mut RgbImage, col: i64, row: i64, color: [u8; 3]| {
        if (0..w as i64).contains(&col) && (0..h as i64).contains(&row) {
            img.put_pixel(col as u32, (h as i64 - 1 - row) as u32, Rgb(color));
        }
    };
    for row in 0..h {
        for col in 0..w {
            let cell = Cell::new(col as i32, row as i32);
            if map.count(cell) > 0 {
                put(&mut img, col as i64, row as i64, MAP_COLOR);
            }
        }
    }
    for set in gt {
        for c in set.iter() {
            put(&mut img, c.col as i64, c.row as i64, GT_COLOR);
        }
    }
    for (i, e) in estimates.iter().enumerate() {
        let color = CLUSTER_PALETTE[i % CLUSTER_PALETTE.len()];
        for c in e.cluster.members.iter() {
            put(&mut img, c.col as i64, c.row as i64, color);
        }
        let (cc, cr) = e.cluster.centroid_cell;
        let r = circle_radius_px(e.cluster.radius, &cfg);
        for (dx, dy) in circle_points(r) {
            put(&mut img, cc.round() as i64 + dx, cr.round() as i64 + dy, color);
        }
    }
    let robot = cfg.robot_cell();
    for dy in -ROBOT_MARKER_RADIUS..=ROBOT_MARKER_RADIUS {
        for dx in -ROBOT_MARKER_RADIUS..=ROBOT_MARKER_RADIUS {
            if dx * dx + dy * dy <= ROBOT_MARKER_RADIUS * ROBOT_MARKER_RADIUS {
                put(&mut img, robot.col as i64 + dx, robot.row as i64 + dy, ROBOT_COLOR);
            }
        }
    }
    img
}

/// Integer offsets on a circle of radius `r` (midpoint algorithm).
pub fn circle_points(r: i64) -> Vec<(i64, i64)> {
    if r <= 0 {
        return vec![(0, 0)];
    }
    let mut pts = Vec::new();
    let (mut x, mut y, mut err) = (r, 0, 1 - r);
    while x >= y {
        for (a, b) in [(x, y), (y, x), (-y, x), (-x, y), (-x, -y), (-y, -x), (y, -x), (x, -y)] {
            pts.push((a, b));
        }
        y += 1;
        if err < 0 {
            err += 2 * y + 1;
        } else {
            x -= 1;
            err += 2 * (y - x) + 1;
        }
    }
    pts.sort_unstable();
    pts.dedup();
    pts
}
