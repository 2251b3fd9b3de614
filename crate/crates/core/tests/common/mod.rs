//! Brute-force references and input generators shared by the integration
//! tests and the acceptance suite. Nothing here calls into the library's
//! scoring or clustering code.
#![allow(dead_code)]

use egodyn::synthgen::{Aabb, CameraPath, ObjectSpec, Pose, Shape};
use egodyn::{CameraIntrinsics, Cell, MaskFrame, PointSet2D, SceneSpec};
use rand::Rng;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---- segmentation and distance metrics ----

/// `(tp, fp, fn, tn)` by walking both masks pixel by pixel.
pub fn pixel_counts(pred: &MaskFrame, gt: &MaskFrame) -> (u64, u64, u64, u64) {
    let (w, h) = gt.dims();
    let mut c = (0, 0, 0, 0);
    for v in 0..h {
        for u in 0..w {
            let p = pred.get(u, v) != 0;
            let g = gt.get(u, v) != 0;
            if p && g {
                c.0 += 1;
            } else if p {
                c.1 += 1;
            } else if g {
                c.2 += 1;
            } else {
                c.3 += 1;
            }
        }
    }
    c
}

pub fn ratio(num: u64, den: u64) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// `[mae, squarel, rmse, rmsle, d1, d2, d3]`, each metric in its own pass.
pub fn distance_oracle(pairs: &[(f64, f64)]) -> [f64; 7] {
    let n = pairs.len() as f64;
    let mean = |f: &dyn Fn(f64, f64) -> f64| pairs.iter().map(|&(d, e)| f(d, e)).sum::<f64>() / n;
    let mae = mean(&|d, e| (e - d).abs());
    let squarel = mean(&|d, e| (e - d) * (e - d) / (d * d));
    let rmse = mean(&|d, e| (e - d) * (e - d)).sqrt();
    let rmsle = mean(&|d, e| {
        let l = (e + 1.0).ln() - (d + 1.0).ln();
        l * l
    })
    .sqrt();
    let frac = |t: f64| mean(&|d, e| if e / d < t && d / e < t { 1.0 } else { 0.0 });
    [mae, squarel, rmse, rmsle, frac(1.25), frac(1.5625), frac(1.953125)]
}

pub fn random_mask(rng: &mut impl Rng, w: u32, h: u32) -> MaskFrame {
    let density = match rng.random_range(0..5) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.0..1.0),
    };
    let data = (0..w * h)
        .map(|_| if rng.random_bool(density) { rng.random_range(1..=6) } else { 0 })
        .collect();
    MaskFrame::new(w, h, data).unwrap()
}

pub fn random_pairs(rng: &mut impl Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let d = rng.random_range(0.05..10.0);
            let e = if rng.random_bool(0.1) { d } else { d * rng.random_range(0.4..2.2) };
            (d, e)
        })
        .collect()
}

// ---- LOF ----

/// LOF scores from a full distance matrix.
pub fn lof_oracle(pts: &[[f64; 2]], k: usize) -> Vec<f64> {
    let n = pts.len();
    let d: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| (a[0] - b[0]).hypot(a[1] - b[1])).collect())
        .collect();
    let kdist: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d[i][j]).collect();
            row.sort_by(f64::total_cmp);
            row[k - 1]
        })
        .collect();
    let hood: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && d[i][j] <= kdist[i]).collect())
        .collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let reach: f64 = hood[i].iter().map(|&j| d[i][j].max(kdist[j])).sum();
            1.0 / (reach / hood[i].len() as f64 + 1e-10)
        })
        .collect();
    (0..n)
        .map(|i| hood[i].iter().map(|&j| lrd[j]).sum::<f64>() / hood[i].len() as f64 / lrd[i])
        .collect()
}

/// Indices of the `m` largest scores. Scores within `1e-12` relative of
/// each other count as tied and the smaller index is flagged first.
pub fn flagged_oracle(scores: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut start = 0;
    while start < order.len() {
        let top = scores[order[start]];
        let mut end = start + 1;
        while end < order.len() && top - scores[order[end]] <= 1e-12 * top.abs().max(1.0) {
            end += 1;
        }
        order[start..end].sort_unstable();
        start = end;
    }
    let mut out = order[..m].to_vec();
    out.sort_unstable();
    out
}

// ---- DBSCAN ----

/// Cluster label per point: cores are grouped into connected components of
/// the core graph; a border point goes to the component holding the
/// lowest-indexed core within reach. Components are numbered by their
/// lowest core index.
pub fn dbscan_oracle(pts: &[[f64; 2]], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = pts.len();
    let near = |i: usize, j: usize| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]) <= eps;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![None; n];
    for i in 0..n {
        if core[i] {
            label[i] = Some(find(&mut parent, i));
        }
    }
    for i in 0..n {
        if !core[i] {
            label[i] = (0..n).filter(|&j| core[j] && near(i, j)).filter_map(|j| label[j]).min();
        }
    }
    label
}

/// True when two labelings induce the same partition, noise included.
pub fn same_partition(a: &[Option<usize>], b: &[Option<usize>]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let (mut ab, mut ba) = (HashMap::new(), HashMap::new());
    for (x, y) in a.iter().zip(b) {
        match (x, y) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                if *ab.entry(*x).or_insert(*y) != *y || *ba.entry(*y).or_insert(*x) != *x {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

// ---- point sets ----

/// A few dense blobs of different spreads over a sprinkle of isolated cells.
pub fn random_cells(rng: &mut impl Rng, max_n: usize) -> PointSet2D {
    let target = rng.random_range(8..=max_n);
    let blobs = rng.random_range(1..=4);
    let mut cells = Vec::new();
    let centers: Vec<(i32, i32, i32)> = (0..blobs)
        .map(|_| (rng.random_range(0..120), rng.random_range(0..120), rng.random_range(2..12)))
        .collect();
    while cells.len() < target {
        if rng.random_bool(0.15) {
            cells.push(Cell::new(rng.random_range(-20..140), rng.random_range(-20..140)));
        } else {
            let (cx, cy, s) = centers[rng.random_range(0..blobs)];
            cells.push(Cell::new(cx + rng.random_range(-s..=s), cy + rng.random_range(-s..=s)));
        }
        cells.sort_unstable();
        cells.dedup();
    }
    cells.into_iter().collect()
}

// ---- scenes ----

pub fn static_sphere(id: u8, x: f64, y: f64, radius: f64) -> ObjectSpec {
    ObjectSpec {
        id,
        shape: Shape::Sphere { radius },
        path: vec![[x, y]],
        max_speed: 0.0,
        is_static: true,
    }
}

/// One-frame scene with the camera at the origin looking along +x.
pub fn still_scene(objects: Vec<ObjectSpec>, sensor_height: f64) -> SceneSpec {
    SceneSpec {
        room: Aabb {
            min: [-2.0, -8.0, 0.0],
            max: [14.0, 8.0, 3.0],
        },
        objects,
        camera: CameraPath::Static {
            pose: Pose {
                position: [0.0, 0.0],
                yaw: 0.0,
            },
        },
        intrinsics: CameraIntrinsics::default(),
        sensor_height,
        fps: 24.0,
        duration: 0.0,
        seed: 0,
    }
}
