//! Renders a synthetic preset, estimates every frame with ground-truth masks
//! and prints the distance-bracket report.
//!
//! ```text
//! cargo run --release --example evaluate_preset -- near 7
//! ```

use std::time::Instant;

use egodyn::evaluation::{eval_report, evaluate_frame, format_report_table, DEFAULT_BRACKETS};
use egodyn::{estimate_frame, simulate, spec_presets, InstanceIds, PipelineConfig};

fn main() -> egodyn::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "near".into());
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let spec = spec_presets(&preset, seed)?;
    let cfg = PipelineConfig {
        intrinsics: spec.intrinsics,
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let mut evals = Vec::new();
    for frame in simulate(spec)? {
        let k = frame.truth.frame_index;
        let result = estimate_frame(&frame.depth, &frame.mask, InstanceIds::all_objects(), &cfg)?;
        evals.push(evaluate_frame(
            k,
            &frame.depth,
            &frame.mask,
            Some(&frame.truth),
            &result.estimates,
            &cfg,
        )?);
    }
    let report = eval_report(&evals, &DEFAULT_BRACKETS, cfg.map.forward_extent(), None)?;
    println!("preset {preset}, seed {seed}, {:.1?}", start.elapsed());
    print!("{}", format_report_table(&report));
    Ok(())
}
