//! Uniform bucket grid for exact radius and k-nearest-neighbor queries in 2D.

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) struct GridIndex<'a> {
    points: &'a [[f64; 2]],
    origin: [f64; 2],
    bucket: f64,
    nx: usize,
    ny: usize,
    // CSR layout: members of bucket b are order[start[b]..start[b + 1]]
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> GridIndex<'a> {
    /// Builds an index whose buckets are roughly `bucket` wide.
    pub(crate) fn new(points: &'a [[f64; 2]], bucket: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let mut bucket = if bucket.is_finite() && bucket > 0.0 { bucket } else { 1.0 };
        // keep the dense grid at most ~4 buckets per point
        let cap = (4 * points.len()).max(16) as f64;
        loop {
            let nx = ((hi[0] - lo[0]) / bucket).floor() + 1.0;
            let ny = ((hi[1] - lo[1]) / bucket).floor() + 1.0;
            if nx * ny <= cap {
                break;
            }
            bucket *= 2.0;
        }
        let nx = ((hi[0] - lo[0]) / bucket).floor() as usize + 1;
        let ny = ((hi[1] - lo[1]) / bucket).floor() as usize + 1;

        let mut index = Self {
            points,
            origin: lo,
            bucket,
            nx,
            ny,
            start: vec![0; nx * ny + 1],
            order: vec![0; points.len()],
        };
        let ids: Vec<usize> = points
            .iter()
            .map(|&p| {
                let (bx, by) = index.bucket_of(p);
                by * nx + bx
            })
            .collect();
        for &b in &ids {
            index.start[b + 1] += 1;
        }
        for b in 0..nx * ny {
            index.start[b + 1] += index.start[b];
        }
        let mut fill = index.start.clone();
        for (i, &b) in ids.iter().enumerate() {
            index.order[fill[b]] = i;
            fill[b] += 1;
        }
        index
    }

    fn bucket_of(&self, p: [f64; 2]) -> (usize, usize) {
        let bx = ((p[0] - self.origin[0]) / self.bucket).floor().max(0.0) as usize;
        let by = ((p[1] - self.origin[1]) / self.bucket).floor().max(0.0) as usize;
        (bx.min(self.nx - 1), by.min(self.ny - 1))
    }

    fn bucket_members(&self, bx: usize, by: usize) -> &[usize] {
        let b = by * self.nx + bx;
        &self.order[self.start[b]..self.start[b + 1]]
    }

    /// Calls `f` for every point in the buckets at Chebyshev bucket-distance
    /// exactly `ring` from `(bx, by)`. Returns false once the ring lies fully
    /// outside the grid.
    fn visit_ring(&self, bx: usize, by: usize, ring: usize, mut f: impl FnMut(usize)) -> bool {
        let (bx, by, r) = (bx as isize, by as isize, ring as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if bx - r < 0 && by - r < 0 && bx + r >= nx && by + r >= ny {
            return false;
        }
        let mut visit = |x: isize, y: isize| {
            if (0..nx).contains(&x) && (0..ny).contains(&y) {
                for &j in self.bucket_members(x as usize, y as usize) {
                    f(j);
                }
            }
        };
        if r == 0 {
            visit(bx, by);
            return true;
        }
        for x in (bx - r).max(0)..=(bx + r).min(nx - 1) {
            visit(x, by - r);
            visit(x, by + r);
        }
        for y in (by - r + 1).max(0)..=(by + r - 1).min(ny - 1) {
            visit(bx - r, y);
            visit(bx + r, y);
        }
        true
    }

    /// Indices of all points within `radius` of `p` (inclusive), ascending.
    pub(crate) fn within(&self, p: [f64; 2], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.points.is_empty() {
            return out;
        }
        let reach = (radius / self.bucket).ceil() as isize + 1;
        let (bx, by) = self.bucket_of(p);
        let (bx, by) = (bx as isize, by as isize);
        for y in (by - reach).max(0)..=(by + reach).min(self.ny as isize - 1) {
            for x in (bx - reach).max(0)..=(bx + reach).min(self.nx as isize - 1) {
                for &j in self.bucket_members(x as usize, y as usize) {
                    if dist(p, self.points[j]) <= radius {
                        out.push(j);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The k-distance of point `i` and its k-distance neighborhood: every
    /// other point at distance `<= k-distance`, so ties at the boundary are
    /// all included. Sorted by index. Requires `1 <= k < len`.
    pub(crate) fn knn_with_ties(&self, i: usize, k: usize) -> (f64, Vec<(usize, f64)>) {
        let p = self.points[i];
        let (bx, by) = self.bucket_of(p);
        let mut cand: Vec<(usize, f64)> = Vec::new();
        let mut scratch: Vec<f64> = Vec::new();
        let mut ring = 0;
        let kdist = loop {
            let inside = self.visit_ring(bx, by, ring, |j| {
                if j != i {
                    cand.push((j, dist(p, self.points[j])));
                }
            });
            if cand.len() >= k {
                scratch.clear();
                scratch.extend(cand.iter().map(|c| c.1));
                let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
                let kth = *kth;
                // anything not yet scanned is strictly farther than ring * bucket
                if kth <= ring as f64 * self.bucket || !inside {
                    break kth;
                }
            }
            if !inside {
                unreachable!("k < len guarantees enough candidates");
            }
            ring += 1;
        };
        cand.retain(|c| c.1 <= kdist);
        cand.sort_unstable_by_key(|c| c.0);
        (kdist, cand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_within(points: &[[f64; 2]], p: [f64; 2], r: f64) -> Vec<usize> {
        (0..points.len()).filter(|&j| dist(p, points[j]) <= r).collect()
    }

    #[test]
    fn radius_queries_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let n = rng.random_range(1..300);
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.random_range(0..60) as f64, rng.random_range(0..60) as f64])
                .collect();
            let index = GridIndex::new(&pts, 1.0 + trial as f64 * 0.7);
            for &p in pts.iter().take(30) {
                assert_eq!(index.within(p, 5.0), brute_within(&pts, p, 5.0));
            }
        }
    }

    #[test]
    fn knn_includes_ties_and_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for trial in 0..20 {
            let n = rng.random_range(2..250);
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.random_range(0..40) as f64, rng.random_range(0..40) as f64])
                .collect();
            let index = GridIndex::new(&pts, 0.5 + trial as f64 * 0.9);
            let k = rng.random_range(1..n);
            for i in 0..n.min(25) {
                let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(pts[i], pts[j])).collect();
                d.sort_by(f64::total_cmp);
                let kd = d[k - 1];
                let expected: Vec<usize> =
                    (0..n).filter(|&j| j != i && dist(pts[i], pts[j]) <= kd).collect();
                let (got_kd, got) = index.knn_with_ties(i, k);
                assert_eq!(got_kd, kd);
                assert_eq!(got.iter().map(|c| c.0).collect::<Vec<_>>(), expected);
            }
        }
    }

    #[test]
    fn coincident_points() {
        let pts = vec![[1.0, 1.0]; 5];
        let index = GridIndex::new(&pts, 0.0);
        let (kd, nb) = index.knn_with_ties(0, 2);
        assert_eq!(kd, 0.0);
        assert_eq!(nb.len(), 4);
    }
}
