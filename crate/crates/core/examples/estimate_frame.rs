//! Full per-frame estimate on a rendered scene with three upright objects.

use egodyn::synthgen::{render_frame, Aabb, CameraPath, ObjectSpec, Pose, Shape};
use egodyn::{estimate_frame, CameraIntrinsics, InstanceIds, PipelineConfig, SceneSpec};

fn object(id: u8, shape: Shape, x: f64, y: f64) -> ObjectSpec {
    ObjectSpec {
        id,
        shape,
        path: vec![[x, y]],
        max_speed: 0.0,
        is_static: true,
    }
}

fn main() -> egodyn::Result<()> {
    let spec = SceneSpec {
        room: Aabb {
            min: [-2.0, -8.0, 0.0],
            max: [14.0, 8.0, 3.0],
        },
        objects: vec![
            object(1, Shape::Cylinder { radius: 0.3, height: 1.5 }, 2.0, 0.6),
            object(2, Shape::Cylinder { radius: 0.25, height: 1.7 }, 3.5, -1.0),
            object(3, Shape::Box { size: [0.4, 0.4, 1.6] }, 3.0, 1.8),
        ],
        camera: CameraPath::Static {
            pose: Pose {
                position: [0.0, 0.0],
                yaw: 0.0,
            },
        },
        intrinsics: CameraIntrinsics::default(),
        sensor_height: 1.25,
        fps: 24.0,
        duration: 0.0,
        seed: 0,
    };
    let frame = render_frame(&spec, 0);
    let cfg = PipelineConfig::default();
    let result = estimate_frame(&frame.depth, &frame.mask, InstanceIds::all_objects(), &cfg)?;

    println!(
        "{} estimates ({} outlier cells removed, {} noise cells)",
        result.estimates.len(),
        result.filtered_outliers,
        result.noise_cells
    );
    for e in &result.estimates {
        let (x, y) = e.cluster.centroid_robot;
        println!("  lateral {x:+.3} m, forward {y:.3} m, distance {:.3} m", e.distance);
    }
    for t in &frame.truth.objects {
        println!("  object {} center: planar distance {:.3} m", t.id, t.planar_distance());
    }
    Ok(())
}
