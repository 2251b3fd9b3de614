//! Back-projects a depth image of a tilted plane and projects a few points back.

use egodyn::camera::{backproject, project};
use egodyn::{CameraIntrinsics, DepthFrame};

fn main() -> egodyn::Result<()> {
    let intr = CameraIntrinsics::from_hfov(64, 48, 90.0, 10.0)?;
    println!("fx = fy = {:.3}, principal point ({}, {})", intr.fx, intr.cx, intr.cy);

    // depth grows from 2 m on the left edge to 4 m on the right; the last
    // column is beyond range and gets dropped
    let (w, h) = intr.dims();
    let data = (0..h)
        .flat_map(|_| (0..w).map(move |u| if u == w - 1 { 12.0 } else { 2.0 + 2.0 * u as f64 / w as f64 }))
        .collect();
    let depth = DepthFrame::new(w, h, data)?;
    let points = backproject(&depth, &intr)?;
    println!("{} pixels, {} points", w * h, points.len());

    for p in points.iter().step_by(700) {
        let px = project(*p, &intr)?;
        println!(
            "({:+.3}, {:+.3}, {:.3}) m  ->  pixel ({:.1}, {:.1}) at z {:.3}",
            p.x, p.y, p.z, px.u, px.v, px.depth
        );
    }
    Ok(())
}
