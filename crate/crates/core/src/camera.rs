//! Pinhole camera model, depth/mask frames and depth back-projection.
//!
//! Depth values are z-depth: the distance from the image plane along the
//! optical axis, not the length of the ray. Pixels are sampled at their
//! centers, so pixel `(u, v)` looks along `(u + 0.5, v + 0.5)`.
//!
//! Camera frame: `x` right, `y` down, `z` forward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest instance id a mask may carry. `0` is background.
pub const MAX_INSTANCE_ID: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Horizontal field of view in degrees.
    pub hfov: f64,
    /// Returns beyond this depth (meters) are ignored by back-projection.
    pub max_depth: f64,
}

impl CameraIntrinsics {
    /// Square-pixel intrinsics with the principal point at the image center.
    pub fn from_hfov(width: u32, height: u32, hfov: f64, max_depth: f64) -> Result<Self> {
        if !(hfov > 0.0 && hfov < 180.0) {
            return Err(Error::InvalidHfov(hfov));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidIntrinsics(format!(
                "image size {width}x{height} must be nonzero"
            )));
        }
        if !(max_depth > 0.0 && max_depth.is_finite()) {
            return Err(Error::InvalidIntrinsics(format!(
                "max depth {max_depth} must be positive"
            )));
        }
        let f = (width as f64 / 2.0) / (hfov.to_radians() / 2.0).tan();
        Ok(Self {
            width,
            height,
            fx: f,
            fy: f,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            hfov,
            max_depth,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.width > 0
            && self.height > 0
            && self.fx > 0.0
            && self.fy > 0.0
            && (0.0..=self.width as f64).contains(&self.cx)
            && (0.0..=self.height as f64).contains(&self.cy)
            && self.max_depth > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidIntrinsics(format!("{self:?}")))
        }
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Direction through the center of pixel `(u, v)`, scaled so that `z = 1`.
    pub fn pixel_ray(&self, u: u32, v: u32) -> Point3 {
        Point3 {
            x: (u as f64 + 0.5 - self.cx) / self.fx,
            y: (v as f64 + 0.5 - self.cy) / self.fy,
            z: 1.0,
        }
    }
}

impl Default for CameraIntrinsics {
    /// 640x480, 90 degree HFoV, 10 m max depth.
    fn default() -> Self {
        Self::from_hfov(640, 480, 90.0, 10.0).expect("default intrinsics are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(self, other: Point3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }
}

/// Sub-pixel image coordinates plus z-depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDepth {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

/// Row-major z-depth image in meters; `0` means no return.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl DepthFrame {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        if data.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "depth buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d >= 0.0))
        {
            return Err(Error::InvalidDepth { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, u: u32, v: u32) -> f64 {
        self.data[v as usize * self.width as usize + u as usize]
    }

    /// Multiplies every value by `s` (must be nonnegative).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|d| d * s).collect(),
        )
    }
}

/// Row-major instance-id image: `0` background, `1..=6` object ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskFrame {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl MaskFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if data.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "mask buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(&id) = data.iter().find(|&&id| id > MAX_INSTANCE_ID) {
            return Err(Error::InstanceIdOutOfRange {
                id,
                max: MAX_INSTANCE_ID,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, u: u32, v: u32) -> u8 {
        self.data[v as usize * self.width as usize + u as usize]
    }

    /// Ids present in the mask, excluding background.
    pub fn present_ids(&self) -> InstanceIds {
        self.data.iter().copied().filter(|&id| id > 0).collect()
    }

    /// Collapses all instance ids to a single foreground id `1`.
    pub fn binarized(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&id| u8::from(id > 0)).collect(),
        }
    }
}

/// A set of instance ids, stored as a bitmask over `0..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct InstanceIds(u8);

impl InstanceIds {
    pub const fn empty() -> Self {
        Self(0)
    }

    /// Every object id `1..=6`.
    pub const fn all_objects() -> Self {
        Self(0b0111_1110)
    }

    pub fn single(id: u8) -> Self {
        let mut s = Self::empty();
        s.insert(id);
        s
    }

    pub fn insert(&mut self, id: u8) {
        if id <= MAX_INSTANCE_ID {
            self.0 |= 1 << id;
        }
    }

    pub fn contains(self, id: u8) -> bool {
        id <= MAX_INSTANCE_ID && self.0 & (1 << id) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0..=MAX_INSTANCE_ID).filter(move |&id| self.contains(id))
    }
}

impl FromIterator<u8> for InstanceIds {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = Self::empty();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

fn check_dims(expected: (u32, u32), actual: (u32, u32)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Keeps depth where the mask id is in `ids`, zero elsewhere.
pub fn mask_depth(depth: &DepthFrame, mask: &MaskFrame, ids: InstanceIds) -> Result<DepthFrame> {
    check_dims(depth.dims(), mask.dims())?;
    let data = depth
        .data
        .iter()
        .zip(&mask.data)
        .map(|(&d, &id)| if ids.contains(id) { d } else { 0.0 })
        .collect();
    Ok(DepthFrame {
        width: depth.width,
        height: depth.height,
        data,
    })
}

/// Back-projects every pixel with depth in `(0, max_depth]` into the camera frame.
pub fn backproject(depth: &DepthFrame, intr: &CameraIntrinsics) -> Result<Vec<Point3>> {
    check_dims(intr.dims(), depth.dims())?;
    let mut points = Vec::new();
    for v in 0..depth.height {
        let row = &depth.data[v as usize * depth.width as usize..][..depth.width as usize];
        for (u, &d) in row.iter().enumerate() {
            if d > 0.0 && d <= intr.max_depth {
                points.push(intr.pixel_ray(u as u32, v).scale(d));
            }
        }
    }
    Ok(points)
}

/// Projects a camera-frame point to sub-pixel coordinates (inverse of [`backproject`]).
pub fn project(point: Point3, intr: &CameraIntrinsics) -> Result<PixelDepth> {
    if !(point.z > 0.0) {
        return Err(Error::BehindCamera(point.z));
    }
    Ok(PixelDepth {
        u: intr.fx * point.x / point.z + intr.cx - 0.5,
        v: intr.fy * point.y / point.z + intr.cy - 0.5,
        depth: point.z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(w: u32, h: u32, d: &[f64]) -> DepthFrame {
        DepthFrame::new(w, h, d.to_vec()).unwrap()
    }

    #[test]
    fn intrinsics_from_90_degree_hfov() {
        let intr = CameraIntrinsics::from_hfov(640, 480, 90.0, 10.0).unwrap();
        assert!((intr.fx - 320.0).abs() < 1e-12);
        assert_eq!(intr.fx, intr.fy);
        assert_eq!((intr.cx, intr.cy), (320.0, 240.0));

        let tiny = CameraIntrinsics::from_hfov(2, 2, 90.0, 10.0).unwrap();
        assert!((tiny.fx - 1.0).abs() < 1e-12);
        assert_eq!((tiny.cx, tiny.cy), (1.0, 1.0));
    }

    #[test]
    fn intrinsics_from_60_degree_hfov() {
        // 320 / tan(30 deg) = 320 * sqrt(3)
        let expected = 320.0 * 3f64.sqrt();
        let intr = CameraIntrinsics::from_hfov(640, 480, 60.0, 10.0).unwrap();
        assert!((intr.fx - expected).abs() < 1e-9);
        assert!((intr.fx - 554.2563).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_hfov() {
        for hfov in [0.0, 180.0, -5.0, 200.0, f64::NAN] {
            assert!(matches!(
                CameraIntrinsics::from_hfov(640, 480, hfov, 10.0),
                Err(Error::InvalidHfov(_))
            ));
        }
    }

    #[test]
    fn mask_depth_semantics() {
        let depth = frame(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let mask = MaskFrame::new(2, 2, vec![1, 0, 0, 2]).unwrap();
        let ids: InstanceIds = [1, 2].into_iter().collect();
        assert_eq!(mask_depth(&depth, &mask, ids).unwrap().data(), &[1.0, 0.0, 0.0, 4.0]);

        let zero = MaskFrame::zeros(2, 2);
        assert!(mask_depth(&depth, &zero, ids).unwrap().data().iter().all(|&d| d == 0.0));

        let ones = MaskFrame::new(2, 2, vec![1; 4]).unwrap();
        assert_eq!(mask_depth(&depth, &ones, InstanceIds::single(1)).unwrap(), depth);
    }

    #[test]
    fn mask_depth_dimension_mismatch() {
        let depth = DepthFrame::zeros(2, 2);
        let mask = MaskFrame::zeros(3, 2);
        assert!(matches!(
            mask_depth(&depth, &mask, InstanceIds::all_objects()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mask_rejects_ids_above_six() {
        assert!(matches!(
            MaskFrame::new(1, 1, vec![7]),
            Err(Error::InstanceIdOutOfRange { id: 7, .. })
        ));
    }

    #[test]
    fn backproject_center_and_corner() {
        let intr = CameraIntrinsics::default();
        let mut d = vec![0.0; 640 * 480];
        d[0] = 1.0;
        let pts = backproject(&DepthFrame::new(640, 480, d).unwrap(), &intr).unwrap();
        assert_eq!(pts.len(), 1);
        let p = pts[0];
        assert!((p.x - (0.5 - 320.0) / 320.0).abs() < 1e-12);
        assert!((p.y - (0.5 - 240.0) / 320.0).abs() < 1e-12);
        assert!((p.x + 0.9984).abs() < 1e-4 && (p.y + 0.7484).abs() < 1e-4);
        assert_eq!(p.z, 1.0);

        // odd-sized sensor: the middle pixel's center is the principal point
        let odd = CameraIntrinsics::from_hfov(3, 3, 90.0, 10.0).unwrap();
        let mut d = vec![0.0; 9];
        d[4] = 2.0;
        let pts = backproject(&DepthFrame::new(3, 3, d).unwrap(), &odd).unwrap();
        assert_eq!(pts, vec![Point3::new(0.0, 0.0, 2.0)]);
    }

    #[test]
    fn backproject_skips_empty_and_out_of_range() {
        let intr = CameraIntrinsics::from_hfov(2, 2, 90.0, 10.0).unwrap();
        assert!(backproject(&DepthFrame::zeros(2, 2), &intr).unwrap().is_empty());
        let pts = backproject(&frame(2, 2, &[0.0, 10.0, 10.5, 3.0]), &intr).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn project_examples() {
        let intr = CameraIntrinsics::default();
        let p = project(Point3::new(0.0, 0.0, 2.0), &intr).unwrap();
        assert_eq!((p.u, p.v, p.depth), (319.5, 239.5, 2.0));
        let edge = project(Point3::new(1.0, 0.0, 1.0), &intr).unwrap();
        assert!((edge.u - 639.5).abs() < 1e-12);
        assert!(matches!(
            project(Point3::new(0.0, 0.0, 0.0), &intr),
            Err(Error::BehindCamera(_))
        ));
    }

    #[test]
    fn instance_id_set() {
        let ids: InstanceIds = [3, 1, 3].into_iter().collect();
        assert_eq!(ids.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert!(!ids.contains(0));
        assert!(!InstanceIds::all_objects().contains(0));
        assert_eq!(InstanceIds::all_objects().iter().count(), 6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn project_backproject_round_trip(
                u in 0.0f64..640.0, v in 0.0f64..480.0, z in 0.01f64..10.0,
            ) {
                let intr = CameraIntrinsics::default();
                let ray = Point3::new(
                    (u + 0.5 - intr.cx) / intr.fx,
                    (v + 0.5 - intr.cy) / intr.fy,
                    1.0,
                );
                let p = ray.scale(z);
                let px = project(p, &intr).unwrap();
                prop_assert!((px.u - u).abs() < 1e-9 && (px.v - v).abs() < 1e-9);
                let back = Point3::new(
                    (px.u + 0.5 - intr.cx) * px.depth / intr.fx,
                    (px.v + 0.5 - intr.cy) * px.depth / intr.fy,
                    px.depth,
                );
                prop_assert!(back.distance(p) < 1e-9);
            }

            #[test]
            fn masking_is_idempotent(
                depth in proptest::collection::vec(0.0f64..10.0, 16),
                mask in proptest::collection::vec(0u8..=6, 16),
                ids in proptest::collection::vec(0u8..=6, 0..4),
            ) {
                let d = DepthFrame::new(4, 4, depth).unwrap();
                let m = MaskFrame::new(4, 4, mask).unwrap();
                let ids: InstanceIds = ids.into_iter().collect();
                let once = mask_depth(&d, &m, ids).unwrap();
                prop_assert_eq!(mask_depth(&once, &m, ids).unwrap(), once);
            }

            #[test]
            fn backprojection_count_and_homogeneity(
                depth in proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..12.0], 12),
                s in 0.1f64..2.0,
            ) {
                let intr = CameraIntrinsics::from_hfov(4, 3, 90.0, 10.0).unwrap();
                let d = DepthFrame::new(4, 3, depth.clone()).unwrap();
                let expected = depth.iter().filter(|&&x| x > 0.0 && x <= 10.0).count();
                let pts = backproject(&d, &intr).unwrap();
                prop_assert_eq!(pts.len(), expected);

                // scale only values that stay in range on both sides
                let tame: Vec<f64> = depth.iter().map(|&x| x.min(4.0)).collect();
                let a = backproject(&DepthFrame::new(4, 3, tame.clone()).unwrap(), &intr).unwrap();
                let b = backproject(&DepthFrame::new(4, 3, tame).unwrap().scaled(s).unwrap(), &intr)
                    .unwrap();
                prop_assert_eq!(a.len(), b.len());
                for (p, q) in a.iter().zip(&b) {
                    prop_assert!(p.scale(s).distance(*q) < 1e-12);
                }
            }
        }
    }
}
