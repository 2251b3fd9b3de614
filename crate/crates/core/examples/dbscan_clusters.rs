//! Clusters two separated blobs plus a stray cell and summarizes each cluster.

use egodyn::clustering::{dbscan, distance_of, summarize_cluster};
use egodyn::{Cell, DbscanParams, MapConfig, PointSet2D};

fn main() -> egodyn::Result<()> {
    let blob = |c0: i32, r0: i32| (0..6).flat_map(move |c| (0..4).map(move |r| Cell::new(c0 + c, r0 + r)));
    let set: PointSet2D = blob(420, 300).chain(blob(560, 420)).chain([Cell::new(700, 100)]).collect();

    let params = DbscanParams { eps: 12.0, min_pts: 5 };
    let result = dbscan(&set, &params);
    println!("{} cells, {} clusters, {} noise", set.len(), result.clusters.len(), result.noise.len());

    let map = MapConfig::default();
    for (i, members) in result.clusters.iter().enumerate() {
        let c = summarize_cluster(members, &map)?;
        println!(
            "cluster {i}: {} cells, robot frame ({:+.3}, {:.3}) m, distance {:.3} m, radius {:.3} m",
            members.len(),
            c.centroid_robot.0,
            c.centroid_robot.1,
            distance_of(&c),
            c.radius
        );
    }
    Ok(())
}
