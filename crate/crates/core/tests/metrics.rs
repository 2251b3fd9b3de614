mod common;

use egodyn::evaluation::{
    bracket_report, distance_errors, eval_report, match_by_intersection, seg_counts, DistanceAccumulator,
    FrameEval, GtObject, MatchResult, SegAccumulator, DEFAULT_BRACKETS,
};
use egodyn::MaskFrame;
use proptest::prelude::*;

use common::{close, distance_oracle};

fn mask(data: Vec<u8>) -> MaskFrame {
    MaskFrame::new(16, 12, data).unwrap()
}

fn mask_data() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop_oneof![3 => Just(0u8), 1 => 1u8..=6], 16 * 12)
}

/// Frames with random ground truth, estimates and a random valid matching.
fn frames() -> impl Strategy<Value = Vec<FrameEval>> {
    let frame = (
        prop::collection::vec(0.05..12.0f64, 0..6),
        prop::collection::vec(0.05..12.0f64, 0..6),
        any::<u64>(),
    )
        .prop_map(|(gt_d, est_d, salt)| {
            let gt: Vec<GtObject> = gt_d
                .iter()
                .enumerate()
                .map(|(i, &d)| GtObject {
                    id: i as u8 + 1,
                    distance: d,
                    center_distance: None,
                })
                .collect();
            // a pseudo-random intersection matrix, half of it empty
            let inter: Vec<Vec<usize>> = (0..gt.len())
                .map(|g| {
                    (0..est_d.len())
                        .map(|e| {
                            let h = salt.wrapping_mul(31 + g as u64).rotate_left(e as u32 * 7 + 3);
                            if h % 2 == 0 { 0 } else { (h % 50) as usize }
                        })
                        .collect()
                })
                .collect();
            let ids: Vec<u8> = gt.iter().map(|g| g.id).collect();
            FrameEval {
                frame_index: 0,
                matches: match_by_intersection(&ids, &inter, est_d.len()),
                gt,
                estimate_distances: est_d,
            }
        });
    prop::collection::vec(frame, 1..20)
}

proptest! {
    #[test]
    fn seg_scores_are_symmetric(a in mask_data(), b in mask_data()) {
        let (p, g) = (mask(a), mask(b));
        let pg = seg_counts(&p, &g).unwrap();
        let gp = seg_counts(&g, &p).unwrap();
        prop_assert_eq!(pg.iou(), gp.iou());
        prop_assert_eq!(pg.precision(), gp.recall());
        for x in [pg.iou(), pg.precision(), pg.recall()].into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn seg_macro_average_matches_direct_mean(frames in prop::collection::vec((mask_data(), mask_data()), 1..12)) {
        let mut acc = SegAccumulator::default();
        let (mut ious, mut precs, mut recs) = (vec![], vec![], vec![]);
        for (a, b) in &frames {
            let c = seg_counts(&mask(a.clone()), &mask(b.clone())).unwrap();
            acc.add(&c);
            ious.extend(c.iou().filter(|_| !c.gt_empty()));
            precs.extend(c.precision());
            recs.extend(c.recall());
        }
        let s = acc.finish();
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        let near = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => close(a, b, 1e-12),
            (None, None) => true,
            _ => false,
        };
        prop_assert!(near(s.iou, mean(&ious)));
        prop_assert!(near(s.precision, mean(&precs)));
        prop_assert!(near(s.recall, mean(&recs)));
        prop_assert_eq!(s.frames_counted, frames.len());
    }

    #[test]
    fn streaming_errors_match_single_pass(
        pairs in prop::collection::vec((0.05..10.0f64, 0.0..12.0f64), 1..200),
        cut in 0usize..200,
    ) {
        let cut = cut.min(pairs.len());
        let mut left = DistanceAccumulator::default();
        let mut right = DistanceAccumulator::default();
        for &(d, e) in &pairs[..cut] {
            left.add(d, e).unwrap();
        }
        for &(d, e) in &pairs[cut..] {
            right.add(d, e).unwrap();
        }
        right.merge(&left);
        let got = right.finish().unwrap();
        let want = distance_oracle(&pairs);
        let got = [got.mae, got.squarel, got.rmse, got.rmsle, got.delta1, got.delta2, got.delta3];
        for k in 0..7 {
            prop_assert!(close(got[k], want[k], 1e-12), "metric {}: {} vs {}", k, got[k], want[k]);
        }
    }

    #[test]
    fn greedy_matching_is_a_partial_bijection(
        n_gt in 0usize..6,
        n_est in 0usize..6,
        cells in prop::collection::vec(0usize..5, 36),
    ) {
        let ids: Vec<u8> = (1..=n_gt as u8).collect();
        let inter: Vec<Vec<usize>> = (0..n_gt).map(|g| cells[g * 6..g * 6 + n_est].to_vec()).collect();
        let m = match_by_intersection(&ids, &inter, n_est);
        prop_assert_eq!(&m, &match_by_intersection(&ids, &inter, n_est));
        prop_assert_eq!(m.pairs.len() + m.misses.len(), n_gt);
        prop_assert_eq!(m.pairs.len() + m.hallucinations.len(), n_est);
        for p in &m.pairs {
            prop_assert!(p.intersection > 0);
            prop_assert_eq!(p.intersection, inter[p.gt_id as usize - 1][p.estimate]);
        }
        // the first pick is the global maximum
        let best = inter.iter().flatten().copied().max().unwrap_or(0);
        prop_assert_eq!(m.pairs.first().map_or(0, |p| p.intersection), best);
    }

    #[test]
    fn reports_match_brute_force(frames in frames()) {
        let report = eval_report(&frames, &DEFAULT_BRACKETS, 10.0, None).unwrap();

        let gt_d = |f: &FrameEval, id: u8| f.gt.iter().find(|g| g.id == id).unwrap().distance;
        let mut pairs = Vec::new();
        let mut in_range = 0;
        for f in &frames {
            for p in &f.matches.pairs {
                let d = gt_d(f, p.gt_id);
                if d <= 10.0 {
                    pairs.push((d, f.estimate_distances[p.estimate]));
                }
            }
            in_range += f.gt.iter().filter(|g| g.distance <= 10.0).count();
        }
        let rows = &report.brackets.rows;
        let bracketed: usize = rows.iter().map(|r| r.matched + r.missed).sum();
        prop_assert_eq!(bracketed, in_range);
        prop_assert_eq!(report.overall.matched + report.overall.missed, in_range);
        prop_assert_eq!(
            report.hallucinations,
            frames.iter().map(|f| f.matches.hallucinations.len()).sum::<usize>()
        );
        match report.overall.errors {
            None => prop_assert!(pairs.is_empty()),
            Some(e) => {
                let want = distance_oracle(&pairs);
                prop_assert!(close(e.mae, want[0], 1e-12));
                prop_assert!(close(e.rmse, want[2], 1e-12));
                prop_assert!(close(e.delta1, want[4], 1e-12));
            }
        }
    }
}

#[test]
fn bracket_edges_are_upper_inclusive() {
    let frame = FrameEval {
        frame_index: 0,
        gt: [3.0, 6.0, 10.0, 10.5]
            .iter()
            .enumerate()
            .map(|(i, &d)| GtObject {
                id: i as u8 + 1,
                distance: d,
                center_distance: None,
            })
            .collect(),
        estimate_distances: vec![],
        matches: MatchResult {
            pairs: vec![],
            misses: vec![1, 2, 3, 4],
            hallucinations: vec![],
        },
    };
    let r = bracket_report(&[frame], &DEFAULT_BRACKETS).unwrap();
    let missed: Vec<usize> = r.rows.iter().map(|r| r.missed).collect();
    assert_eq!(missed, [1, 1, 1]);
    assert!(r.rows.iter().all(|r| r.detection_rate == Some(0.0) && r.errors.is_none()));
}

#[test]
fn single_pair_errors() {
    // true 2 m, estimate 2.5 m: ratio 1.25 is not strictly below 1.25
    let e = distance_errors(&[(2.0, 2.5)]).unwrap();
    assert_eq!(e.mae, 0.5);
    assert_eq!(e.squarel, 0.0625);
    assert_eq!((e.delta1, e.delta2, e.delta3), (0.0, 1.0, 1.0));
    assert!(distance_errors(&[(0.0, 1.0)]).is_err());
    assert!(distance_errors(&[]).is_err());
}
