//! Command-line front end: `generate`, `estimate`, `evaluate` and `render`.
//!
//! Exit status is 0 on success, 2 for invalid configuration, 3 for bad or
//! missing input data and 4 for internal failures.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::camera::{InstanceIds, MaskFrame};
use crate::dataset_io::{
    frame_file_name, read_results, read_sequence, render_topdown, write_results, write_sequence, MaskDir,
    Sequence, SequenceMeta, WriteOptions,
};
use crate::egomap::MapConfig;
use crate::error::{Error, Result};
use crate::evaluation::{
    eval_report, evaluate_frame, format_report_table, seg_counts, write_report_csv, Bracket, FrameEval,
    SegAccumulator, DEFAULT_BRACKETS,
};
use crate::outlier::{LofParams, NeighborRule};
use crate::pipeline::{estimate_sequence, project_masked, DbscanRule, PipelineConfig};
use crate::synthgen::{frame_rng, perturb_mask, simulate, spec_presets, SceneSpec, PRESETS};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "egodyn", version, about = "Distance estimation of moving objects from depth and instance masks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic sequence from a preset or a scene file.
    Generate(GenerateArgs),
    /// Estimate object positions for every frame of a sequence.
    Estimate(EstimateArgs),
    /// Score a results file against the sequence's ground truth.
    Evaluate(EvaluateArgs),
    /// Draw per-frame top-down maps with estimates and ground truth.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Scene preset.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS), conflicts_with = "spec", required_unless_present = "spec")]
    pub preset: Option<String>,
    /// Scene description as JSON.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Seed for presets; overrides the seed of a scene file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write only the first N frames.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Also write flat-shaded rgb/ previews.
    #[arg(long)]
    pub rgb: bool,
    /// Output sequence directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sequence directory.
    #[arg(long)]
    pub input: PathBuf,
    /// Results file (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub masks: MaskArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Sequence directory holding the ground truth.
    #[arg(long)]
    pub input: PathBuf,
    /// Results file written by `estimate`.
    #[arg(long)]
    pub results: PathBuf,
    /// Metrics CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the text table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Bracket edges in meters, e.g. `0,3,6,10`.
    #[arg(long, default_value = "0,3,6,10", value_parser = parse_brackets)]
    pub brackets: Brackets,
    /// Predicted masks to score for segmentation; `gt` skips the scores.
    #[command(flatten)]
    pub masks: MaskArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Sequence directory.
    #[arg(long)]
    pub input: PathBuf,
    /// Results file written by `estimate`.
    #[arg(long)]
    pub results: PathBuf,
    /// Output directory for the PNGs.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Render every Nth frame.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
    #[command(flatten)]
    pub masks: MaskArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// Worker threads; 0 uses every core. Outputs do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    /// Mask source: `gt`, `external:<dir>` or `perturbed:<pixels>`.
    #[arg(long, default_value = "gt")]
    pub masks: MaskSource,
    /// Seed for `perturbed:` masks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskSource {
    Gt,
    External(PathBuf),
    /// Ground truth randomly dilated or eroded by up to this many pixels.
    Perturbed(u32),
}

impl FromStr for MaskSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "gt" {
            return Ok(MaskSource::Gt);
        }
        if let Some(dir) = s.strip_prefix("external:") {
            if dir.is_empty() {
                return Err("external: needs a directory".into());
            }
            return Ok(MaskSource::External(PathBuf::from(dir)));
        }
        if let Some(px) = s.strip_prefix("perturbed:") {
            return px
                .parse()
                .map(MaskSource::Perturbed)
                .map_err(|_| format!("invalid pixel count `{px}`"));
        }
        Err(format!("unknown mask source `{s}` (expected gt, external:<dir> or perturbed:<pixels>)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Brackets(pub Vec<Bracket>);

fn parse_brackets(s: &str) -> std::result::Result<Brackets, String> {
    let edges: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid bracket edge `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err("bracket edges must be at least two increasing numbers".into());
    }
    Ok(Brackets(edges.windows(2).map(|w| Bracket::new(w[0], w[1])).collect()))
}

impl Default for Brackets {
    fn default() -> Self {
        Brackets(DEFAULT_BRACKETS.to_vec())
    }
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Map cell size in meters.
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
    /// Map width and height in cells.
    #[arg(long, default_value_t = 1000)]
    pub map_size: u32,
    /// DBSCAN radius in cells.
    #[arg(long, default_value_t = 12.0)]
    pub eps_cells: f64,
    /// Fixed DBSCAN min_pts instead of the neighbor rule.
    #[arg(long)]
    pub min_pts: Option<usize>,
    /// Upper bound on the rule-derived DBSCAN min_pts.
    #[arg(long, default_value_t = 5)]
    pub min_pts_cap: usize,
    /// Fraction of cells the outlier filter removes.
    #[arg(long, default_value_t = 0.3)]
    pub contamination: f64,
    /// LOF neighbors are floor(N / divisor) + 1.
    #[arg(long, default_value_t = 30)]
    pub neighbors_divisor: usize,
    /// Depth beyond this many meters is ignored.
    #[arg(long, default_value_t = 10.0)]
    pub max_depth: f64,
}

impl PipelineArgs {
    /// Pipeline settings for a sequence recorded with `meta`'s camera.
    pub fn config(&self, meta: &SequenceMeta) -> Result<PipelineConfig> {
        let mut intrinsics = meta.intrinsics;
        intrinsics.max_depth = self.max_depth;
        let cfg = PipelineConfig {
            intrinsics,
            map: MapConfig::new(self.map_size, self.map_size, self.resolution)?,
            lof: LofParams {
                neighbors: NeighborRule::Divisor(self.neighbors_divisor),
                contamination: self.contamination,
            },
            dbscan: DbscanRule {
                eps: self.eps_cells,
                min_pts: self.min_pts,
                min_pts_cap: self.min_pts_cap,
            },
        };
        cfg.validate()?;
        if self.min_pts == Some(0) || self.min_pts_cap == 0 {
            return Err(Error::InvalidParameter("min_pts must be at least 1".into()));
        }
        Ok(cfg)
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Frame { source, .. } => exit_code(source),
        Error::InvalidHfov(_)
        | Error::InvalidIntrinsics(_)
        | Error::InvalidParameter(_)
        | Error::InvalidSpec(_)
        | Error::UnknownPreset(_) => EXIT_CONFIG,
        Error::DimensionMismatch { .. }
        | Error::InvalidDepth { .. }
        | Error::InstanceIdOutOfRange { .. }
        | Error::MissingFile(_)
        | Error::CountMismatch { .. }
        | Error::ResolutionMismatch { .. }
        | Error::IdOutOfRange { .. }
        | Error::DepthOutOfRange { .. }
        | Error::EmptySequence
        | Error::Malformed { .. }
        | Error::Io(_)
        | Error::Image(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_DATA,
        Error::BehindCamera(_)
        | Error::TooFewPoints { .. }
        | Error::EmptyCluster
        | Error::EmptyInput
        | Error::NonPositiveDistance(_) => EXIT_INTERNAL,
    }
}

fn with_pool<T: Send>(jobs: &JobArgs, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {} worker threads: {e}", jobs.jobs)))?;
    pool.install(f)
}

/// Masks for frame `index` from the selected source.
struct Masks<'a> {
    seq: &'a Sequence,
    source: &'a MaskSource,
    external: Option<MaskDir>,
    seed: u64,
}

impl<'a> Masks<'a> {
    fn new(seq: &'a Sequence, args: &'a MaskArgs) -> Result<Self> {
        let external = match &args.masks {
            MaskSource::External(dir) => Some(MaskDir::open(dir, seq.len(), seq.dims())?),
            _ => None,
        };
        Ok(Self {
            seq,
            source: &args.masks,
            external,
            seed: args.seed,
        })
    }

    fn is_gt(&self) -> bool {
        *self.source == MaskSource::Gt
    }

    fn get(&self, index: usize, gt: &MaskFrame) -> Result<MaskFrame> {
        match self.source {
            MaskSource::Gt => Ok(gt.clone()),
            MaskSource::External(_) => self.external.as_ref().expect("opened in new").read(index),
            MaskSource::Perturbed(px) => Ok(perturb_mask(gt, *px, &mut frame_rng(self.seed, index))),
        }
    }

    fn read(&self, index: usize) -> Result<MaskFrame> {
        let gt = self.seq.read_mask(index)?;
        self.get(index, &gt)
    }
}

fn scene_spec(args: &GenerateArgs) -> Result<SceneSpec> {
    match (&args.preset, &args.spec) {
        (Some(name), _) => spec_presets(name, args.seed.unwrap_or(0)),
        (None, Some(path)) => {
            if !path.is_file() {
                return Err(Error::MissingFile(path.clone()));
            }
            let mut spec: SceneSpec = serde_json::from_reader(File::open(path)?)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            Ok(spec)
        }
        (None, None) => Err(Error::InvalidParameter("either --preset or --spec is required".into())),
    }
}

pub fn generate(args: &GenerateArgs) -> Result<SequenceMeta> {
    let spec = scene_spec(args)?;
    let meta = SequenceMeta::from_spec(&spec);
    let limit = args.frames.unwrap_or(usize::MAX);
    if limit == 0 {
        return Err(Error::InvalidParameter("--frames must be at least 1".into()));
    }
    let sim = simulate(spec)?;
    with_pool(&args.jobs, || {
        write_sequence(sim.take(limit), meta, &args.out, WriteOptions { rgb: args.rgb })
    })
}

pub fn estimate(args: &EstimateArgs) -> Result<usize> {
    let seq = read_sequence(&args.input)?;
    let cfg = args.pipeline.config(seq.meta())?;
    let masks = Masks::new(&seq, &args.masks)?;
    let results = with_pool(&args.jobs, || {
        let frames = (0..seq.len()).map(|i| Ok((seq.read_depth(i)?, masks.read(i)?)));
        estimate_sequence(frames, InstanceIds::all_objects(), &cfg)
    })?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_results(&results, File::create(&args.out)?)?;
    Ok(results.len())
}

fn check_results_cover(seq: &Sequence, results: &[crate::dataset_io::ResultRecord], path: &Path) -> Result<()> {
    if let Some(r) = results.iter().find(|r| r.frame_index >= seq.len()) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            detail: format!("frame_index {} beyond the {}-frame sequence", r.frame_index, seq.len()),
        });
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<String> {
    let seq = read_sequence(&args.input)?;
    let cfg = args.pipeline.config(seq.meta())?;
    let results = read_results(&args.results)?;
    check_results_cover(&seq, &results, &args.results)?;
    let masks = Masks::new(&seq, &args.masks)?;
    let (evals, seg) = with_pool(&args.jobs, || {
        let per_frame: Vec<Result<(FrameEval, SegAccumulator)>> = results
            .par_iter()
            .map(|rec| {
                let i = rec.frame_index;
                let frame = seq.read_frame(i)?;
                let estimates = rec.to_estimates(&cfg.map)?;
                let eval = evaluate_frame(i, &frame.depth, &frame.mask, Some(&frame.truth), &estimates, &cfg)?;
                let mut seg = SegAccumulator::default();
                if !masks.is_gt() {
                    seg.add(&seg_counts(&masks.get(i, &frame.mask)?, &frame.mask)?);
                }
                Ok((eval, seg))
            })
            .collect();
        let mut evals = Vec::with_capacity(per_frame.len());
        let mut seg = SegAccumulator::default();
        for r in per_frame {
            let (e, s) = r?;
            evals.push(e);
            seg.merge(&s);
        }
        Ok((evals, seg))
    })?;
    let segmentation = (!masks.is_gt()).then(|| seg.finish());
    let report = eval_report(&evals, &args.brackets.0, cfg.map.forward_extent(), segmentation)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_report_csv(&report, File::create(&args.out)?)?;
    let table = format_report_table(&report);
    if let Some(path) = &args.table {
        fs::write(path, &table)?;
    }
    Ok(table)
}

pub fn render(args: &RenderArgs) -> Result<usize> {
    let seq = read_sequence(&args.input)?;
    let cfg = args.pipeline.config(seq.meta())?;
    let results = read_results(&args.results)?;
    check_results_cover(&seq, &results, &args.results)?;
    let masks = Masks::new(&seq, &args.masks)?;
    fs::create_dir_all(&args.out_dir)?;
    let chosen: Vec<_> = results
        .iter()
        .filter(|r| (r.frame_index as u64).is_multiple_of(args.every))
        .collect();
    with_pool(&args.jobs, || {
        chosen
            .par_iter()
            .map(|rec| {
                let i = rec.frame_index;
                let frame = seq.read_frame(i)?;
                let mask = masks.get(i, &frame.mask)?;
                let map = project_masked(&frame.depth, &mask, InstanceIds::all_objects(), &cfg)?;
                let max_range = cfg.map.forward_extent();
                let gt: Vec<_> = crate::evaluation::project_gt(&frame.depth, &frame.mask, &cfg, max_range)?
                    .into_iter()
                    .map(|g| g.cluster.members)
                    .collect();
                let img = render_topdown(&map, &rec.to_estimates(&cfg.map)?, &gt);
                img.save(args.out_dir.join(frame_file_name(i)))?;
                Ok(())
            })
            .collect::<Result<Vec<()>>>()
    })?;
    Ok(chosen.len())
}

/// Runs one parsed command, printing progress to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => {
            let meta = generate(a)?;
            writeln!(out, "wrote {} frames to {}", meta.frame_count, a.out.display())?;
        }
        Command::Estimate(a) => {
            let n = estimate(a)?;
            writeln!(out, "estimated {n} frames into {}", a.out.display())?;
        }
        Command::Evaluate(a) => {
            let table = evaluate(a)?;
            write!(out, "{table}")?;
        }
        Command::Render(a) => {
            let n = render(a)?;
            writeln!(out, "rendered {n} frames into {}", a.out_dir.display())?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
