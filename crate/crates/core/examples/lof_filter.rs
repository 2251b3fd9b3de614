//! Scores a blob of cells with a few strays and removes the top 30 percent.

use egodyn::outlier::filter_outliers;
use egodyn::{Cell, LofParams, PointSet2D};

fn main() {
    let mut cells: Vec<Cell> = (0..10).flat_map(|c| (0..8).map(move |r| Cell::new(100 + c, 200 + r))).collect();
    cells.extend([Cell::new(130, 200), Cell::new(100, 240), Cell::new(60, 180)]);
    let set: PointSet2D = cells.into_iter().collect();

    let r = filter_outliers(&set, &LofParams::default());
    println!("{} cells, k = {}, {} removed", set.len(), r.n_neighbors, r.outliers.len());

    let mut ranked: Vec<(f64, Cell)> = r.scores.iter().copied().zip(set.iter().copied()).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (score, cell) in ranked.iter().take(6) {
        let tag = if r.outliers.contains(cell) { "removed" } else { "kept" };
        println!("  ({:>3}, {:>3})  lof {score:.3}  {tag}", cell.col, cell.row);
    }
}
