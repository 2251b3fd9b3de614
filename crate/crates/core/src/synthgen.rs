//! Deterministic analytic ray-cast renderer for depth/mask sequences.
//!
//! World frame: `x`, `y` span the floor, `z` points up, the floor is `z = 0`.
//! A camera at yaw `θ` looks along `(cos θ, sin θ, 0)` from
//! [`SceneSpec::sensor_height`] with zero pitch. Embedded objects rest on the
//! floor and move along waypoint paths, reversing at the last waypoint.
//! Room surfaces render into depth but never into the mask.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, DepthFrame, MaskFrame, Point3, MAX_INSTANCE_ID};
use crate::error::{Error, Result};

/// Duration of the linear slow-down at the end of every path leg, seconds.
pub const TURNAROUND_RAMP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Sphere { radius: f64 },
    Cylinder { radius: f64, height: f64 },
    /// Axis-aligned box; `size` is the full `(x, y, z)` extent.
    Box { size: [f64; 3] },
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Sphere { radius } => radius > 0.0,
            Shape::Cylinder { radius, height } => radius > 0.0 && height > 0.0,
            Shape::Box { size } => size.iter().all(|&s| s > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("nonpositive size in {self:?}")))
        }
    }

    /// Height of the geometric center above the floor.
    pub fn center_height(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } => radius,
            Shape::Cylinder { height, .. } => height / 2.0,
            Shape::Box { size } => size[2] / 2.0,
        }
    }

    pub fn height(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } => 2.0 * radius,
            Shape::Cylinder { height, .. } => height,
            Shape::Box { size } => size[2],
        }
    }

    /// Largest horizontal distance from the center axis to the surface.
    pub fn footprint_radius(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } | Shape::Cylinder { radius, .. } => radius,
            Shape::Box { size } => size[0].hypot(size[1]) / 2.0,
        }
    }

    /// Largest horizontal extent, meters.
    pub fn size(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } | Shape::Cylinder { radius, .. } => 2.0 * radius,
            Shape::Box { size } => size[0].max(size[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: u8,
    pub shape: Shape,
    /// Floor-plane waypoints; the object walks them in order, then back.
    pub path: Vec<[f64; 2]>,
    /// Cruise speed, m/s.
    pub max_speed: f64,
    pub is_static: bool,
}

impl ObjectSpec {
    fn moves(&self) -> bool {
        !self.is_static && self.max_speed > 0.0 && self.path.len() > 1
    }

    /// Floor position at time `t` seconds.
    pub fn ground_position(&self, t: f64) -> [f64; 2] {
        if !self.moves() {
            return self.path[0];
        }
        let n = self.path.len();
        // forward legs then the same legs reversed
        let legs: Vec<([f64; 2], [f64; 2])> = (0..n - 1)
            .map(|i| (self.path[i], self.path[i + 1]))
            .chain((0..n - 1).rev().map(|i| (self.path[i + 1], self.path[i])))
            .collect();
        let durations: Vec<f64> = legs
            .iter()
            .map(|(a, b)| leg_duration(dist2(*a, *b), self.max_speed))
            .collect();
        let cycle: f64 = durations.iter().sum();
        if cycle <= 0.0 {
            return self.path[0];
        }
        let mut t = t.rem_euclid(cycle);
        for ((a, b), d) in legs.iter().zip(&durations) {
            if t <= *d {
                let len = dist2(*a, *b);
                if len == 0.0 {
                    return *a;
                }
                let s = leg_progress(len, self.max_speed, t) / len;
                return [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s];
            }
            t -= d;
        }
        self.path[0]
    }

    pub fn center(&self, t: f64) -> [f64; 3] {
        let [x, y] = self.ground_position(t);
        [x, y, self.shape.center_height()]
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Time to cover a leg of length `len`: cruise at `v`, then decelerate
/// linearly to rest over [`TURNAROUND_RAMP`] seconds. Legs shorter than the
/// ramp distance shorten the ramp instead.
pub fn leg_duration(len: f64, v: f64) -> f64 {
    let ramp_len = v * TURNAROUND_RAMP / 2.0;
    if len >= ramp_len {
        (len - ramp_len) / v + TURNAROUND_RAMP
    } else {
        2.0 * len / v
    }
}

/// Distance covered `t` seconds into a leg of length `len` (see [`leg_duration`]).
pub fn leg_progress(len: f64, v: f64, t: f64) -> f64 {
    let ramp_len = v * TURNAROUND_RAMP / 2.0;
    let (cruise, ramp) = if len >= ramp_len {
        ((len - ramp_len) / v, TURNAROUND_RAMP)
    } else {
        (0.0, 2.0 * len / v)
    };
    let t = t.clamp(0.0, cruise + ramp);
    if t <= cruise {
        v * t
    } else {
        let tau = t - cruise;
        v * cruise + v * tau - v * tau * tau / (2.0 * ramp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 2],
    /// Heading about the vertical axis, radians; 0 looks along +x.
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CameraPath {
    Static { pose: Pose },
    /// Constant-velocity translation with fixed heading.
    Linear { start: [f64; 2], velocity: [f64; 2], yaw: f64 },
    /// Circular drive, heading tangent to the circle.
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        /// Radians per second; positive is counter-clockwise.
        angular_speed: f64,
    },
    /// Explicit per-frame poses; the last pose holds afterwards.
    Poses { poses: Vec<Pose> },
}

impl CameraPath {
    pub fn pose(&self, frame_index: usize, fps: f64) -> Pose {
        let t = frame_index as f64 / fps;
        match self {
            CameraPath::Static { pose } => *pose,
            CameraPath::Linear {
                start,
                velocity,
                yaw,
            } => Pose {
                position: [start[0] + velocity[0] * t, start[1] + velocity[1] * t],
                yaw: *yaw,
            },
            CameraPath::Arc {
                center,
                radius,
                start_angle,
                angular_speed,
            } => {
                let a = start_angle + angular_speed * t;
                let heading = a + std::f64::consts::FRAC_PI_2 * angular_speed.signum();
                Pose {
                    position: [center[0] + radius * a.cos(), center[1] + radius * a.sin()],
                    yaw: heading,
                }
            }
            CameraPath::Poses { poses } => poses[frame_index.min(poses.len() - 1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub room: Aabb,
    pub objects: Vec<ObjectSpec>,
    pub camera: CameraPath,
    pub intrinsics: CameraIntrinsics,
    /// Camera height above the floor, meters.
    pub sensor_height: f64,
    pub fps: f64,
    /// Clip length in seconds; frames are sampled at both endpoints.
    pub duration: f64,
    pub seed: u64,
}

impl SceneSpec {
    /// `duration * fps + 1` frames, so a 10 s clip at 24 fps has 241.
    pub fn frame_count(&self) -> usize {
        (self.duration * self.fps + 1e-9).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad(format!("fps {} must be positive", self.fps));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return bad(format!("duration {} must be nonnegative", self.duration));
        }
        if (0..3).any(|a| self.room.min[a] >= self.room.max[a]) {
            return bad("room box is empty".into());
        }
        if !(self.sensor_height > self.room.min[2] && self.sensor_height < self.room.max[2]) {
            return bad(format!("sensor height {} outside the room", self.sensor_height));
        }
        self.intrinsics.validate()?;
        if let CameraPath::Poses { poses } = &self.camera {
            if poses.is_empty() {
                return bad("camera pose list is empty".into());
            }
        }
        let mut seen = [false; MAX_INSTANCE_ID as usize + 1];
        for o in &self.objects {
            if o.id == 0 || o.id > MAX_INSTANCE_ID {
                return bad(format!("object id {} outside 1..=6", o.id));
            }
            if std::mem::replace(&mut seen[o.id as usize], true) {
                return bad(format!("duplicate object id {}", o.id));
            }
            o.shape.validate()?;
            if !(o.max_speed >= 0.0 && o.max_speed.is_finite()) {
                return bad(format!("object {} has invalid speed {}", o.id, o.max_speed));
            }
            if o.path.is_empty() {
                return bad(format!("object {} has no waypoints", o.id));
            }
            let r = o.shape.footprint_radius();
            for w in &o.path {
                let inside = w[0] - r >= self.room.min[0]
                    && w[0] + r <= self.room.max[0]
                    && w[1] - r >= self.room.min[1]
                    && w[1] + r <= self.room.max[1]
                    && o.shape.height() <= self.room.max[2] - self.room.min[2];
                if !inside {
                    return bad(format!("object {} leaves the room at {:?}", o.id, w));
                }
            }
        }
        for k in [0, self.frame_count() - 1] {
            let p = self.camera.pose(k, self.fps).position;
            if !self.room.contains([p[0], p[1], self.sensor_height]) {
                return bad(format!("camera outside the room at frame {k}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectTruth {
    pub id: u8,
    /// Geometric center in the world frame.
    pub world: [f64; 3],
    /// Geometric center in the camera frame (x right, y down, z forward).
    pub camera: [f64; 3],
    /// Number of mask pixels carrying this id.
    pub pixels: usize,
    pub visible: bool,
}

impl ObjectTruth {
    /// Floor-plane distance from the camera to the object center.
    pub fn planar_distance(&self) -> f64 {
        self.camera[0].hypot(self.camera[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub frame_index: usize,
    pub time: f64,
    pub camera: Pose,
    pub objects: Vec<ObjectTruth>,
}

impl FrameTruth {
    pub fn object(&self, id: u8) -> Option<&ObjectTruth> {
        self.objects.iter().find(|o| o.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimFrame {
    pub depth: DepthFrame,
    pub mask: MaskFrame,
    pub truth: FrameTruth,
}

/// Camera basis in world coordinates.
struct CameraBasis {
    origin: [f64; 3],
    right: [f64; 3],
    down: [f64; 3],
    forward: [f64; 3],
}

impl CameraBasis {
    fn new(pose: Pose, height: f64) -> Self {
        let (s, c) = pose.yaw.sin_cos();
        Self {
            origin: [pose.position[0], pose.position[1], height],
            right: [s, -c, 0.0],
            down: [0.0, 0.0, -1.0],
            forward: [c, s, 0.0],
        }
    }

    fn to_camera(&self, p: [f64; 3]) -> [f64; 3] {
        let d = [p[0] - self.origin[0], p[1] - self.origin[1], p[2] - self.origin[2]];
        [dot(d, self.right), dot(d, self.down), dot(d, self.forward)]
    }

    fn direction(&self, ray: Point3) -> [f64; 3] {
        [0, 1, 2].map(|a| ray.x * self.right[a] + ray.y * self.down[a] + ray.z * self.forward[a])
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Distance from an origin inside the box to where the ray leaves it.
fn room_exit(o: [f64; 3], d: [f64; 3], room: &Aabb) -> f64 {
    let mut t = f64::INFINITY;
    for a in 0..3 {
        if d[a] > 0.0 {
            t = t.min((room.max[a] - o[a]) / d[a]);
        } else if d[a] < 0.0 {
            t = t.min((room.min[a] - o[a]) / d[a]);
        }
    }
    t
}

/// Nearest positive ray parameter hitting the shape placed at `center`.
pub fn intersect(shape: &Shape, center: [f64; 3], o: [f64; 3], d: [f64; 3]) -> Option<f64> {
    let oc = [o[0] - center[0], o[1] - center[1], o[2] - center[2]];
    match *shape {
        Shape::Sphere { radius } => {
            let a = dot(d, d);
            let b = dot(oc, d);
            let c = dot(oc, oc) - radius * radius;
            let disc = b * b - a * c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            [(-b - sq) / a, (-b + sq) / a].into_iter().find(|&t| t > 0.0)
        }
        Shape::Cylinder { radius, height } => {
            let (zlo, zhi) = (-height / 2.0, height / 2.0);
            let mut best: Option<f64> = None;
            let mut consider = |t: f64| {
                if t > 0.0 && best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            };
            let a = d[0] * d[0] + d[1] * d[1];
            if a > 0.0 {
                let b = oc[0] * d[0] + oc[1] * d[1];
                let c = oc[0] * oc[0] + oc[1] * oc[1] - radius * radius;
                let disc = b * b - a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    for t in [(-b - sq) / a, (-b + sq) / a] {
                        let z = oc[2] + t * d[2];
                        if z >= zlo && z <= zhi {
                            consider(t);
                        }
                    }
                }
            }
            if d[2] != 0.0 {
                for zc in [zlo, zhi] {
                    let t = (zc - oc[2]) / d[2];
                    let (x, y) = (oc[0] + t * d[0], oc[1] + t * d[1]);
                    if x * x + y * y <= radius * radius {
                        consider(t);
                    }
                }
            }
            best
        }
        Shape::Box { size } => {
            let (mut tmin, mut tmax) = (f64::NEG_INFINITY, f64::INFINITY);
            for a in 0..3 {
                let h = size[a] / 2.0;
                if d[a] == 0.0 {
                    if oc[a] < -h || oc[a] > h {
                        return None;
                    }
                } else {
                    let (t1, t2) = ((-h - oc[a]) / d[a], (h - oc[a]) / d[a]);
                    tmin = tmin.max(t1.min(t2));
                    tmax = tmax.min(t1.max(t2));
                }
            }
            if tmax < tmin || tmax <= 0.0 {
                None
            } else if tmin > 0.0 {
                Some(tmin)
            } else {
                Some(tmax)
            }
        }
    }
}

/// Renders frame `k` of the scene.
pub fn render_frame(spec: &SceneSpec, k: usize) -> SimFrame {
    let intr = &spec.intrinsics;
    let t = k as f64 / spec.fps;
    let pose = spec.camera.pose(k, spec.fps);
    let basis = CameraBasis::new(pose, spec.sensor_height);
    let centers: Vec<[f64; 3]> = spec.objects.iter().map(|o| o.center(t)).collect();

    let (w, h) = (intr.width as usize, intr.height as usize);
    let rows: Vec<(Vec<f64>, Vec<u8>)> = (0..h)
        .into_par_iter()
        .map(|v| {
            let mut depth = Vec::with_capacity(w);
            let mut mask = Vec::with_capacity(w);
            for u in 0..w {
                // forward component of the direction is 1, so t is z-depth
                let dir = basis.direction(intr.pixel_ray(u as u32, v as u32));
                let mut best = room_exit(basis.origin, dir, &spec.room);
                let mut id = 0;
                for (obj, c) in spec.objects.iter().zip(&centers) {
                    if let Some(t) = intersect(&obj.shape, *c, basis.origin, dir) {
                        if t < best {
                            best = t;
                            id = obj.id;
                        }
                    }
                }
                depth.push(best.min(intr.max_depth));
                mask.push(id);
            }
            (depth, mask)
        })
        .collect();
    let (mut depth, mut mask) = (Vec::with_capacity(w * h), Vec::with_capacity(w * h));
    for (d, m) in rows {
        depth.extend(d);
        mask.extend(m);
    }

    let objects = spec
        .objects
        .iter()
        .zip(&centers)
        .map(|(o, c)| {
            let pixels = mask.iter().filter(|&&m| m == o.id).count();
            ObjectTruth {
                id: o.id,
                world: *c,
                camera: basis.to_camera(*c),
                pixels,
                visible: pixels > 0,
            }
        })
        .collect();

    SimFrame {
        depth: DepthFrame::new(intr.width, intr.height, depth).expect("rendered depth is finite"),
        mask: MaskFrame::new(intr.width, intr.height, mask).expect("object ids validated"),
        truth: FrameTruth {
            frame_index: k,
            time: t,
            camera: pose,
            objects,
        },
    }
}

/// Lazily rendered frame sequence.
pub struct Simulation {
    spec: SceneSpec,
    next: usize,
    count: usize,
}

impl Simulation {
    pub fn spec(&self) -> &SceneSpec {
        &self.spec
    }

    pub fn frame_count(&self) -> usize {
        self.count
    }
}

impl Iterator for Simulation {
    type Item = SimFrame;

    fn next(&mut self) -> Option<SimFrame> {
        if self.next >= self.count {
            return None;
        }
        let f = render_frame(&self.spec, self.next);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Simulation {}

pub fn simulate(spec: SceneSpec) -> Result<Simulation> {
    spec.validate()?;
    let count = spec.frame_count();
    Ok(Simulation {
        spec,
        next: 0,
        count,
    })
}

/// Independent RNG stream for frame `k` of a run seeded with `seed`.
pub fn frame_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64 + 1);
    rng
}

/// Integral image of `mask == id`, `(w + 1) * (h + 1)` entries.
fn integral(mask: &MaskFrame, id: u8) -> Vec<u32> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut s = vec![0u32; (w + 1) * (h + 1)];
    for v in 0..h {
        let mut row = 0;
        for u in 0..w {
            row += u32::from(mask.data()[v * w + u] == id);
            s[(v + 1) * (w + 1) + u + 1] = s[v * (w + 1) + u + 1] + row;
        }
    }
    s
}

/// Grows (`radius > 0`) or shrinks (`radius < 0`) each object's mask by a
/// square structuring element, one signed radius per object id.
///
/// Erosions apply first; dilations then claim only background pixels, in
/// ascending id order.
pub fn morph_mask(mask: &MaskFrame, radii: &[(u8, i32)]) -> MaskFrame {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut out = mask.data().to_vec();
    let window = |s: &[u32], u: usize, v: usize, r: usize| {
        let (u0, v0) = (u.saturating_sub(r), v.saturating_sub(r));
        let (u1, v1) = ((u + r + 1).min(w), (v + r + 1).min(h));
        let at = |x: usize, y: usize| s[y * (w + 1) + x];
        let count = at(u1, v1) + at(u0, v0) - at(u0, v1) - at(u1, v0);
        (count, ((u1 - u0) * (v1 - v0)) as u32)
    };
    let mut ordered = radii.to_vec();
    ordered.sort_by_key(|&(id, r)| (r > 0, id));
    for (id, r) in ordered {
        if id == 0 || r == 0 {
            continue;
        }
        let s = integral(mask, id);
        let reach = r.unsigned_abs() as usize;
        for v in 0..h {
            for u in 0..w {
                let i = v * w + u;
                let (count, area) = window(&s, u, v, reach);
                if r < 0 && out[i] == id && count < area {
                    out[i] = 0;
                } else if r > 0 && out[i] == 0 && mask.data()[i] == 0 && count > 0 {
                    out[i] = id;
                }
            }
        }
    }
    MaskFrame::new(mask.width(), mask.height(), out).expect("ids come from a valid mask")
}

/// Dilates or erodes every object in `mask` by a radius drawn uniformly from
/// `-max_pixels..=max_pixels`. Emulates an imperfect segmentation model.
pub fn perturb_mask(mask: &MaskFrame, max_pixels: u32, rng: &mut impl Rng) -> MaskFrame {
    let m = max_pixels as i32;
    let radii: Vec<(u8, i32)> = mask
        .present_ids()
        .iter()
        .map(|id| (id, rng.random_range(-m..=m)))
        .collect();
    morph_mask(mask, &radii)
}

pub const PRESETS: [&str; 4] = ["near", "far-small", "mixed-static", "multi-speed"];

fn default_room() -> Aabb {
    Aabb {
        min: [-2.0, -8.0, 0.0],
        max: [14.0, 8.0, 3.0],
    }
}

fn base_spec(seed: u64) -> SceneSpec {
    SceneSpec {
        room: default_room(),
        objects: Vec::new(),
        camera: CameraPath::Static {
            pose: Pose {
                position: [0.0, 0.0],
                yaw: 0.0,
            },
        },
        intrinsics: CameraIntrinsics::default(),
        sensor_height: 1.25,
        fps: 24.0,
        duration: 10.0,
        seed,
    }
}

/// Point on the floor at `range` meters along bearing `bearing` (radians,
/// positive to the left) from a camera at the origin facing +x.
fn polar(range: f64, bearing: f64) -> [f64; 2] {
    [range * bearing.cos(), range * bearing.sin()]
}

fn random_shape(rng: &mut ChaCha8Rng, min_radius: f64, max_radius: f64) -> Shape {
    pick_shape(rng, min_radius, max_radius, 0)
}

/// Cylinder or box: vertical sides, like the people and animals in real clips.
fn random_upright(rng: &mut ChaCha8Rng, min_radius: f64, max_radius: f64) -> Shape {
    pick_shape(rng, min_radius, max_radius, 1)
}

fn pick_shape(rng: &mut ChaCha8Rng, min_radius: f64, max_radius: f64, first_kind: u32) -> Shape {
    let r = rng.random_range(min_radius..=max_radius);
    match rng.random_range(first_kind..3) {
        0 => Shape::Sphere { radius: r },
        1 => Shape::Cylinder {
            radius: r,
            height: rng.random_range(0.6..1.8),
        },
        _ => Shape::Box {
            size: [
                2.0 * r,
                2.0 * r,
                rng.random_range(0.5..1.6),
            ],
        },
    }
}

/// Named scene presets spanning distance, size, speed and static/dynamic mixes.
///
/// * `near`: three upright objects (cylinders, boxes) of radius >= 0.2 m
///   moving radially between 2 and 4.8 m in separate bearings; static
///   camera; 240 frames.
/// * `far-small`: distance tiers. Two large objects (radius 0.35 to 0.5 m)
///   cover 2.2 to 5.5 m, a medium one 3.5 to 8 m, and two small ones (no
///   larger than 0.2 m) 5.5 to 9.5 m.
/// * `mixed-static`: six objects, three of them static; slowly driving camera.
/// * `multi-speed`: three objects at 1, 2 and 3 m/s; camera on a gentle arc.
pub fn spec_presets(name: &str, seed: u64) -> Result<SceneSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = base_spec(seed);
    match name {
        "near" => {
            spec.duration = 239.0 / 24.0;
            let bearings = [0.55, 0.0, -0.55];
            for (i, b) in bearings.into_iter().enumerate() {
                let jitter = rng.random_range(-0.05..0.05);
                let shape = random_upright(&mut rng, 0.2, 0.3);
                let near = rng.random_range(2.0..2.4);
                let far = rng.random_range(4.2..4.8);
                spec.objects.push(ObjectSpec {
                    id: i as u8 + 1,
                    shape,
                    path: vec![polar(near, b + jitter), polar(far, b + jitter)],
                    max_speed: rng.random_range(1.0..=2.0),
                    is_static: false,
                });
            }
        }
        "far-small" => {
            // (bearing, radius range, near end range, far end range) per tier:
            // two large objects close by, one medium, two small far away
            let tiers = [
                (0.55, (0.35, 0.5), (2.2, 2.6), (4.5, 5.5)),
                (-0.55, (0.35, 0.5), (2.2, 2.6), (4.5, 5.5)),
                (0.0, (0.1, 0.15), (3.5, 4.0), (7.0, 8.0)),
                (0.25, (0.08, 0.1), (5.5, 6.0), (9.0, 9.5)),
                (-0.25, (0.08, 0.1), (5.5, 6.0), (9.0, 9.5)),
            ];
            for (i, (b, r, near, far)) in tiers.into_iter().enumerate() {
                let radius = rng.random_range(r.0..=r.1);
                let shape = match i % 3 {
                    0 => Shape::Cylinder {
                        radius,
                        height: rng.random_range(0.6..1.2),
                    },
                    1 => Shape::Box {
                        size: [2.0 * radius, 2.0 * radius, rng.random_range(0.4..1.0)],
                    },
                    _ => Shape::Sphere { radius },
                };
                spec.objects.push(ObjectSpec {
                    id: i as u8 + 1,
                    shape,
                    path: vec![
                        polar(rng.random_range(near.0..near.1), b),
                        polar(rng.random_range(far.0..far.1), b),
                    ],
                    max_speed: rng.random_range(1.0..=2.0),
                    is_static: false,
                });
            }
        }
        "mixed-static" => {
            spec.camera = CameraPath::Linear {
                start: [0.0, 0.0],
                velocity: [0.1, 0.0],
                yaw: 0.0,
            };
            let bearings = [0.6, 0.35, 0.1, -0.15, -0.4, -0.65];
            for (i, b) in bearings.into_iter().enumerate() {
                let shape = random_shape(&mut rng, 0.15, 0.3);
                let is_static = i % 2 == 1;
                let start = rng.random_range(3.0..4.0);
                let path = if is_static {
                    vec![polar(start, b)]
                } else {
                    vec![polar(start, b), polar(start + rng.random_range(2.0..4.0), b)]
                };
                spec.objects.push(ObjectSpec {
                    id: i as u8 + 1,
                    shape,
                    path,
                    max_speed: if is_static { 0.0 } else { 1.0 },
                    is_static,
                });
            }
        }
        "multi-speed" => {
            spec.camera = CameraPath::Arc {
                center: [0.0, 1.0],
                radius: 1.0,
                start_angle: -std::f64::consts::FRAC_PI_2,
                angular_speed: 0.02,
            };
            let bearings = [0.45, 0.0, -0.45];
            for (i, b) in bearings.into_iter().enumerate() {
                let shape = random_shape(&mut rng, 0.2, 0.3);
                spec.objects.push(ObjectSpec {
                    id: i as u8 + 1,
                    shape,
                    path: vec![
                        polar(rng.random_range(2.0..2.5), b),
                        polar(rng.random_range(6.0..7.0), b),
                    ],
                    max_speed: (i + 1) as f64,
                    is_static: false,
                });
            }
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    }
    spec.validate()?;
    Ok(spec)
}
