//! Directed tile sets, finite grids, and local validity.
//!
//! A grid stores tile identifiers row by row; row 0 is the northern edge.
//! Each tile has a forward direction; a cell is *valid* when the tile set's
//! local rules hold on its Moore neighborhood. Cells near the edge of a
//! window-topology grid whose rules need a missing neighbor are invalid.

mod bxy;
mod kari;
mod trace;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Cell, Dir};

pub use bxy::{block_side, build_block, build_bxy, build_bxy_framed, BlockBuild};
pub use kari::{kari_tiles, Basic, KariRules, KariTile, Orient, Rule6Variant};
pub use trace::{path_components, trace_path, Component, PathTrace, Termination};

/// Outcome of evaluating the local rules at a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
    /// Some rule needs a neighbor outside the window.
    Unknown,
}

impl Validity {
    pub fn and(self, other: Validity) -> Validity {
        match (self, other) {
            (Validity::Invalid, _) | (_, Validity::Invalid) => Validity::Invalid,
            (Validity::Unknown, _) | (_, Validity::Unknown) => Validity::Unknown,
            _ => Validity::Valid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Window,
    Torus,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(Topology::Window),
            "torus" => Ok(Topology::Torus),
            other => Err(Error::InvalidArgument(format!("unknown topology `{other}`"))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Window => "window",
            Topology::Torus => "torus",
        })
    }
}

#[derive(Debug, Clone)]
enum Rules {
    /// No adjacency restrictions.
    Free,
    /// A fixed subset of the tiles is valid regardless of neighbors.
    PerTile(Vec<bool>),
    Kari(KariRules),
}

/// A finite tile alphabet with a forward direction per tile and a local
/// validity predicate.
#[derive(Debug, Clone)]
pub struct DirectedTileSet {
    name: String,
    dimension: usize,
    directions: Vec<Dir>,
    rules: Rules,
}

impl DirectedTileSet {
    /// The constraint-free set `{+e_1, …, +e_d}`; `d ≤ 2` since grids are planar.
    pub fn simple(dimension: usize) -> Result<Self> {
        let directions = match dimension {
            1 => vec![Dir::E],
            2 => vec![Dir::E, Dir::N],
            d => {
                return Err(Error::InvalidArgument(format!(
                    "simple tile sets are supported for dimension 1 or 2, got {d}"
                )))
            }
        };
        Ok(DirectedTileSet { name: format!("simple{dimension}"), dimension, directions, rules: Rules::Free })
    }

    /// `{→, ↑}` plus a third tile (pointing east) that is never valid, used
    /// to cut paths into finite chains.
    pub fn with_stop() -> Self {
        DirectedTileSet {
            name: "stop2".into(),
            dimension: 2,
            directions: vec![Dir::E, Dir::N, Dir::E],
            rules: Rules::PerTile(vec![true, true, false]),
        }
    }

    pub fn kari(variant: Rule6Variant) -> Self {
        let tiles = kari_tiles();
        DirectedTileSet {
            name: match variant {
                Rule6Variant::Corrected => "kari".into(),
                Rule6Variant::Literal => "kari-literal".into(),
            },
            dimension: 2,
            directions: tiles.iter().map(|t| t.direction).collect(),
            rules: Rules::Kari(KariRules::new(variant)),
        }
    }

    /// Looks a tile set up by its serialized name.
    pub fn by_name(name: &str) -> Result<Arc<Self>> {
        let set = match name {
            "simple1" => Self::simple(1)?,
            "simple2" => Self::simple(2)?,
            "stop2" => Self::with_stop(),
            "kari" => Self::kari(Rule6Variant::Corrected),
            "kari-literal" => Self::kari(Rule6Variant::Literal),
            other => return Err(Error::InvalidArgument(format!("unknown tile set `{other}`"))),
        };
        Ok(Arc::new(set))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, tile: u32) -> Dir {
        self.directions[tile as usize]
    }

    /// Moore-window radius of the validity rules.
    pub fn radius(&self) -> usize {
        match self.rules {
            Rules::Kari(_) => 1,
            _ => 0,
        }
    }

    /// Validity of a tile when it does not depend on neighbors.
    pub fn fixed_validity(&self, tile: u32) -> Option<bool> {
        match &self.rules {
            Rules::Free => Some(true),
            Rules::PerTile(ok) => Some(ok[tile as usize]),
            Rules::Kari(_) => None,
        }
    }

    pub fn kari_rules(&self) -> Option<&KariRules> {
        match &self.rules {
            Rules::Kari(r) => Some(r),
            _ => None,
        }
    }

    pub fn validity(&self, grid: &Grid, index: usize) -> Validity {
        match &self.rules {
            Rules::Free => Validity::Valid,
            Rules::PerTile(ok) => {
                if ok[grid.cells[index] as usize] {
                    Validity::Valid
                } else {
                    Validity::Invalid
                }
            }
            Rules::Kari(rules) => rules.validity(grid, index),
        }
    }
}

/// A finite rectangular patch of tiles.
#[derive(Debug, Clone)]
pub struct Grid {
    pub tileset: Arc<DirectedTileSet>,
    pub topology: Topology,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<u32>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.tileset.name == other.tileset.name
            && self.topology == other.topology
            && self.width == other.width
            && self.height == other.height
            && self.cells == other.cells
    }
}

impl Grid {
    pub fn new(
        tileset: Arc<DirectedTileSet>,
        topology: Topology,
        width: usize,
        height: usize,
        cells: Vec<u32>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Schema("grid dimensions must be positive".into()));
        }
        if cells.len() != width * height {
            return Err(Error::Schema(format!(
                "expected {} cells for a {width}x{height} grid, got {}",
                width * height,
                cells.len()
            )));
        }
        if tileset.dimension() == 1 && height != 1 {
            return Err(Error::Schema("one-dimensional tile sets need height 1".into()));
        }
        if let Some(&bad) = cells.iter().find(|&&c| c as usize >= tileset.len()) {
            return Err(Error::UnknownTile(format!("{bad} (tile set `{}`)", tileset.name())));
        }
        Ok(Grid { tileset, topology, width, height, cells })
    }

    pub fn uniform(
        tileset: Arc<DirectedTileSet>,
        topology: Topology,
        width: usize,
        height: usize,
        tile: u32,
    ) -> Result<Self> {
        Grid::new(tileset, topology, width, height, vec![tile; width * height])
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, cell: Cell) -> Option<usize> {
        let (w, h) = (self.width as i64, self.height as i64);
        let (x, y) = match self.topology {
            Topology::Torus => (cell.x.rem_euclid(w), cell.y.rem_euclid(h)),
            Topology::Window => {
                if !(0..w).contains(&cell.x) || !(0..h).contains(&cell.y) {
                    return None;
                }
                (cell.x, cell.y)
            }
        };
        Some((y * w + x) as usize)
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i64, (index / self.width) as i64)
    }

    pub fn check_inside(&self, cell: Cell) -> Result<usize> {
        if cell.x < 0 || cell.y < 0 || cell.x >= self.width as i64 || cell.y >= self.height as i64 {
            return Err(Error::OutOfBounds { x: cell.x, y: cell.y, width: self.width, height: self.height });
        }
        Ok(self.index(cell).expect("inside"))
    }

    pub fn tile_at(&self, cell: Cell) -> Option<u32> {
        self.index(cell).map(|i| self.cells[i])
    }

    /// Neighbor of `index` at grid offset `(dx, dy)` (north = `dy < 0`).
    pub fn neighbor(&self, index: usize, dx: i64, dy: i64) -> Option<usize> {
        self.index(self.cell(index).offset(dx, dy))
    }

    /// Cell the tile at `index` points at, if it lies in the grid.
    pub fn successor(&self, index: usize) -> Option<usize> {
        let (dx, dy) = self.tileset.direction(self.cells[index]).grid_step();
        self.neighbor(index, dx, dy)
    }

    pub fn validity(&self, index: usize) -> Validity {
        self.tileset.validity(self, index)
    }

    pub fn valid_at(&self, cell: Cell) -> bool {
        self.index(cell).is_some_and(|i| self.validity(i) == Validity::Valid)
    }

    pub fn validity_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.validity(i) == Validity::Valid).collect()
    }

    /// For every cell: its successor when the cell is valid and the
    /// successor lies in the grid, `None` otherwise.
    pub fn forward_map(&self) -> Vec<Option<usize>> {
        (0..self.len()).map(|i| if self.validity(i) == Validity::Valid { self.successor(i) } else { None }).collect()
    }

    pub fn with_topology(&self, topology: Topology) -> Grid {
        Grid { topology, ..self.clone() }
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Grid> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidArgument("crop exceeds the grid".into()));
        }
        let mut cells = Vec::with_capacity(width * height);
        for y in y0..y0 + height {
            cells.extend_from_slice(&self.cells[y * self.width + x0..y * self.width + x0 + width]);
        }
        Grid::new(self.tileset.clone(), self.topology, width, height, cells)
    }
}
