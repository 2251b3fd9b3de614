//! Draws the top-down map of one frame with estimates and ground truth.
//!
//! ```text
//! cargo run --release --example render_topdown -- topdown.png
//! ```

use egodyn::dataset_io::render_topdown;
use egodyn::evaluation::project_gt;
use egodyn::pipeline::project_masked;
use egodyn::synthgen::render_frame;
use egodyn::{estimate_frame, spec_presets, InstanceIds, PipelineConfig};

fn main() -> egodyn::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "topdown.png".into());
    let spec = spec_presets("mixed-static", 7)?;
    let cfg = PipelineConfig {
        intrinsics: spec.intrinsics,
        ..PipelineConfig::default()
    };
    let frame = render_frame(&spec, 60);
    let ids = InstanceIds::all_objects();
    let map = project_masked(&frame.depth, &frame.mask, ids, &cfg)?;
    let result = estimate_frame(&frame.depth, &frame.mask, ids, &cfg)?;
    let gt: Vec<_> = project_gt(&frame.depth, &frame.mask, &cfg, cfg.map.forward_extent())?
        .into_iter()
        .map(|g| g.cluster.members)
        .collect();

    render_topdown(&map, &result.estimates, &gt).save(&out)?;
    println!("{} estimates, {} ground-truth objects, saved {out}", result.estimates.len(), gt.len());
    Ok(())
}
