//! Egocentric top-down occupancy map.
//!
//! The robot sits at the middle of the map's near edge: row 0, column
//! `width / 2`. Rows grow forward along the camera axis, columns grow to the
//! right. With the default 1000x1000 map at 0.01 m per cell this gives 10 m of
//! forward reach and 5 m to either side.

use serde::{Deserialize, Serialize};

use crate::camera::Point3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    pub width: u32,
    pub height: u32,
    /// Meters per cell.
    pub resolution: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            width: 1000,
            height: 1000,
            resolution: 0.01,
        }
    }
}

impl MapConfig {
    pub fn new(width: u32, height: u32, resolution: f64) -> Result<Self> {
        let cfg = Self {
            width,
            height,
            resolution,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter(format!(
                "map size {}x{} must be nonzero",
                self.width, self.height
            )));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "map resolution {} must be positive",
                self.resolution
            )));
        }
        Ok(())
    }

    /// Lateral span of the map in meters.
    pub fn lateral_extent(&self) -> f64 {
        self.width as f64 * self.resolution
    }

    /// Forward reach of the map in meters.
    pub fn forward_extent(&self) -> f64 {
        self.height as f64 * self.resolution
    }

    /// The robot's own cell.
    pub fn robot_cell(&self) -> Cell {
        Cell::new((self.width / 2) as i32, 0)
    }

    /// Cell containing robot-frame point `(x, y)`, if it falls inside the map.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<Cell> {
        let col = ((x + self.lateral_extent() / 2.0) / self.resolution).floor();
        let row = (y / self.resolution).floor();
        if col >= 0.0 && col < self.width as f64 && row >= 0.0 && row < self.height as f64 {
            Some(Cell::new(col as i32, row as i32))
        } else {
            None
        }
    }
}

/// Integer map coordinate, ordered lexicographically by `(col, row)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub col: i32,
    pub row: i32,
}

impl Cell {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }

    pub fn as_f64(self) -> [f64; 2] {
        [self.col as f64, self.row as f64]
    }
}

/// A deduplicated, lexicographically sorted set of cells.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet2D(Vec<Cell>);

impl PointSet2D {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cell> {
        self.0.iter()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.0.binary_search(cell).is_ok()
    }

    pub fn to_f64(&self) -> Vec<[f64; 2]> {
        self.0.iter().map(|c| c.as_f64()).collect()
    }

    /// Number of cells present in both sets.
    pub fn intersection_len(&self, other: &PointSet2D) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

impl FromIterator<Cell> for PointSet2D {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        let mut cells: Vec<Cell> = iter.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        Self(cells)
    }
}

impl<'a> IntoIterator for &'a PointSet2D {
    type Item = &'a Cell;
    type IntoIter = std::slice::Iter<'a, Cell>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Per-cell point counts, row-major with row 0 at the robot.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoMap {
    config: MapConfig,
    cells: Vec<u32>,
    dropped: usize,
}

impl EgoMap {
    pub fn empty(config: MapConfig) -> Self {
        Self {
            config,
            cells: vec![0; config.width as usize * config.height as usize],
            dropped: 0,
        }
    }

    pub fn config(&self) -> &MapConfig {
        &self.config
    }

    pub fn count(&self, cell: Cell) -> u32 {
        if cell.col < 0
            || cell.row < 0
            || cell.col as u32 >= self.config.width
            || cell.row as u32 >= self.config.height
        {
            return 0;
        }
        self.cells[cell.row as usize * self.config.width as usize + cell.col as usize]
    }

    pub fn counts(&self) -> &[u32] {
        &self.cells
    }

    /// Points that fell outside the map.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Points binned into the map.
    pub fn in_bounds(&self) -> usize {
        self.cells.iter().map(|&c| c as usize).sum()
    }

    pub fn insert(&mut self, cell: Cell) {
        let idx = cell.row as usize * self.config.width as usize + cell.col as usize;
        self.cells[idx] += 1;
    }
}

/// Bins camera-frame points into a top-down map by their `(x, z)` coordinates.
///
/// The vertical coordinate is discarded. Points outside the map are counted
/// in [`EgoMap::dropped`].
pub fn build_ego_map(points: &[Point3], config: MapConfig) -> EgoMap {
    let mut map = EgoMap::empty(config);
    for p in points {
        match config.cell_of(p.x, p.z) {
            Some(cell) => map.insert(cell),
            None => map.dropped += 1,
        }
    }
    map
}

/// The set of occupied cells.
pub fn extract_points(map: &EgoMap) -> PointSet2D {
    let w = map.config.width as usize;
    // row-major traversal yields (row, col) order; PointSet2D re-sorts by (col, row)
    map.cells
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| Cell::new((i % w) as i32, (i / w) as i32))
        .collect()
}

/// Robot-frame position of a (possibly fractional) cell's center.
///
/// `x` is lateral (right positive), `y` is forward.
pub fn cell_to_robot_frame(col: f64, row: f64, config: &MapConfig) -> (f64, f64) {
    (
        (col + 0.5) * config.resolution - config.lateral_extent() / 2.0,
        (row + 0.5) * config.resolution,
    )
}
