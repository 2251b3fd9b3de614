use egodyn::camera::{backproject, mask_depth, project};
use egodyn::egomap::{build_ego_map, cell_to_robot_frame, extract_points};
use egodyn::{CameraIntrinsics, DepthFrame, InstanceIds, MapConfig, MaskFrame, Point3};
use proptest::prelude::*;

const W: u32 = 40;
const H: u32 = 30;

fn intr() -> CameraIntrinsics {
    CameraIntrinsics::from_hfov(W, H, 90.0, 10.0).unwrap()
}

fn depth_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01..12.0f64], (W * H) as usize)
}

fn mask_values() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=6, (W * H) as usize)
}

fn ids() -> impl Strategy<Value = InstanceIds> {
    prop::collection::vec(0u8..=6, 0..4).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #[test]
    fn project_inverts_backproject(u in 0..W, v in 0..H, z in 1e-3..=10.0f64) {
        let intr = intr();
        let p = intr.pixel_ray(u, v).scale(z);
        let px = project(p, &intr).unwrap();
        prop_assert!((px.u - u as f64).abs() < 1e-9);
        prop_assert!((px.v - v as f64).abs() < 1e-9);
        prop_assert!((px.depth - z).abs() < 1e-12);
    }

    #[test]
    fn backproject_counts_valid_pixels(d in depth_values()) {
        let frame = DepthFrame::new(W, H, d.clone()).unwrap();
        let pts = backproject(&frame, &intr()).unwrap();
        prop_assert_eq!(pts.len(), d.iter().filter(|&&x| x > 0.0 && x <= 10.0).count());
        prop_assert!(pts.iter().all(|p| p.z > 0.0));
    }

    #[test]
    fn masking_is_idempotent(d in depth_values(), m in mask_values(), ids in ids()) {
        let depth = DepthFrame::new(W, H, d).unwrap();
        let mask = MaskFrame::new(W, H, m).unwrap();
        let once = mask_depth(&depth, &mask, ids).unwrap();
        prop_assert_eq!(mask_depth(&once, &mask, ids).unwrap(), once);
    }

    #[test]
    fn depth_scaling_scales_points(d in prop::collection::vec(0.01..4.0f64, (W * H) as usize), s in 0.1..2.5f64) {
        let intr = intr();
        let frame = DepthFrame::new(W, H, d).unwrap();
        let a = backproject(&frame, &intr).unwrap();
        let b = backproject(&frame.scaled(s).unwrap(), &intr).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!(p.scale(s).distance(*q) < 1e-9);
        }
    }

    #[test]
    fn extracted_cells_lie_inside_the_map(
        pts in prop::collection::vec((-6.0..6.0f64, -1.0..1.0f64, 0.0..11.0f64), 0..300),
    ) {
        let cfg = MapConfig::default();
        let pts: Vec<Point3> = pts.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect();
        let cells = extract_points(&build_ego_map(&pts, cfg));
        let half = cfg.lateral_extent() / 2.0;
        for c in &cells {
            let (x, y) = cell_to_robot_frame(c.col as f64, c.row as f64, &cfg);
            prop_assert!((0.0..cfg.forward_extent()).contains(&y));
            prop_assert!((-half..half).contains(&x));
        }
    }

    #[test]
    fn cell_round_trip_error_is_bounded(x in -4.99..4.99f64, y in 0.0..9.99f64) {
        let cfg = MapConfig::default();
        let c = cfg.cell_of(x, y).unwrap();
        let (cx, cy) = cell_to_robot_frame(c.col as f64, c.row as f64, &cfg);
        prop_assert!((cx - x).hypot(cy - y) <= cfg.resolution / 2f64.sqrt() + 1e-12);
    }
}

#[test]
fn finer_grid_halves_quantization_error() {
    let coarse = MapConfig::new(500, 500, 0.02).unwrap();
    let fine = MapConfig::default();
    let worst = |cfg: &MapConfig| {
        let mut w: f64 = 0.0;
        for i in 0..200 {
            for j in 0..200 {
                let (x, y) = (-4.9 + i as f64 * 0.049_3, 0.01 + j as f64 * 0.049_7);
                let c = cfg.cell_of(x, y).unwrap();
                let (cx, cy) = cell_to_robot_frame(c.col as f64, c.row as f64, cfg);
                w = w.max((cx - x).hypot(cy - y));
            }
        }
        w
    };
    let (wc, wf) = (worst(&coarse), worst(&fine));
    assert!(wf <= wc / 2.0 * 1.05 && wf >= wc / 2.0 * 0.9, "{wc} vs {wf}");
}

#[test]
fn frustum_edge_projects_to_last_pixel_center() {
    let intr = CameraIntrinsics::default();
    let px = project(Point3::new(1.0, 0.0, 1.0), &intr).unwrap();
    assert!((px.u - 639.5).abs() < 1e-12);
    assert!(project(Point3::new(0.0, 0.0, 0.0), &intr).is_err());
}
