//! Scores randomly dilated and eroded masks against the rendered ground truth.

use egodyn::evaluation::{seg_counts, SegAccumulator};
use egodyn::synthgen::{frame_rng, perturb_mask};
use egodyn::{simulate, spec_presets};

fn main() -> egodyn::Result<()> {
    let spec = spec_presets("near", 7)?;
    for px in [1, 3, 6] {
        let mut acc = SegAccumulator::default();
        for frame in simulate(spec.clone())?.step_by(8) {
            let noisy = perturb_mask(&frame.mask, px, &mut frame_rng(0, frame.truth.frame_index));
            acc.add(&seg_counts(&noisy, &frame.mask)?);
        }
        let s = acc.finish();
        let pct = |x: Option<f64>| x.map_or("-".into(), |v| format!("{:.2}%", v * 100.0));
        println!(
            "up to {px} px: IOU {}  precision {}  recall {}  over {} frames",
            pct(s.iou),
            pct(s.precision),
            pct(s.recall),
            s.frames_counted
        );
    }
    Ok(())
}
