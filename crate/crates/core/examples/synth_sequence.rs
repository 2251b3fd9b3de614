//! Writes a short preset sequence to disk and reads it back.
//!
//! ```text
//! cargo run --release --example synth_sequence -- /tmp/multi-speed
//! ```

use std::path::PathBuf;

use egodyn::dataset_io::{read_sequence, write_sequence, SequenceMeta, WriteOptions};
use egodyn::{simulate, spec_presets};

fn main() -> egodyn::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("egodyn-multi-speed"));
    let spec = spec_presets("multi-speed", 3)?;
    for o in &spec.objects {
        println!("object {}: {:?}, {:.2} m/s, {} waypoints", o.id, o.shape, o.max_speed, o.path.len());
    }

    let meta = SequenceMeta::from_spec(&spec);
    let written = write_sequence(simulate(spec)?.take(24), meta, &out, WriteOptions { rgb: true })?;
    println!("wrote {} frames to {}", written.frame_count, out.display());

    let seq = read_sequence(&out)?;
    seq.validate()?;
    let last = seq.read_frame(seq.len() - 1)?;
    let labelled = last.mask.data().iter().filter(|&&m| m > 0).count();
    println!("frame {}: {labelled} labelled pixels, camera at {:?}", last.index, last.truth.camera.position);
    Ok(())
}
