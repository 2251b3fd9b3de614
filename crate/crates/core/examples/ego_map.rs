//! Projects one object of a rendered frame into the top-down ego map.

use egodyn::egomap::extract_points;
use egodyn::pipeline::project_masked;
use egodyn::synthgen::render_frame;
use egodyn::{spec_presets, InstanceIds, PipelineConfig};

fn main() -> egodyn::Result<()> {
    let spec = spec_presets("near", 7)?;
    let cfg = PipelineConfig {
        intrinsics: spec.intrinsics,
        ..PipelineConfig::default()
    };
    let frame = render_frame(&spec, 100);
    println!(
        "map {}x{} cells of {} m, robot at cell {:?}",
        cfg.map.width,
        cfg.map.height,
        cfg.map.resolution,
        cfg.map.robot_cell()
    );

    for id in frame.mask.present_ids().iter() {
        let map = project_masked(&frame.depth, &frame.mask, InstanceIds::single(id), &cfg)?;
        let cells = extract_points(&map);
        let (lo, hi) = cells.iter().fold(((i32::MAX, i32::MAX), (i32::MIN, i32::MIN)), |(lo, hi), c| {
            ((lo.0.min(c.col), lo.1.min(c.row)), (hi.0.max(c.col), hi.1.max(c.row)))
        });
        println!(
            "object {id}: {} points in bounds, {} dropped, {} distinct cells, cols {}..={} rows {}..={}",
            map.in_bounds(),
            map.dropped(),
            cells.len(),
            lo.0,
            hi.0,
            lo.1,
            hi.1
        );
    }
    Ok(())
}
