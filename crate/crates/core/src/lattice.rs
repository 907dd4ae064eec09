//! Lattice cells and compass directions.
//!
//! Two coordinate conventions coexist. Hilbert paths live in the Cartesian
//! plane (`y` grows northwards). Grids are stored row-major with `y` the row
//! index, so north is *decreasing* `y`. [`Dir::grid_step`] and
//! [`Dir::cartesian_step`] give the offsets in each convention.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64) -> Self {
        Cell { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn l1(self, other: Cell) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl From<(i64, i64)> for Cell {
    fn from((x, y): (i64, i64)) -> Self {
        Cell::new(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Dir::E | Dir::W)
    }

    /// Offset with north pointing towards decreasing row index.
    pub fn grid_step(self) -> (i64, i64) {
        match self {
            Dir::N => (0, -1),
            Dir::E => (1, 0),
            Dir::S => (0, 1),
            Dir::W => (-1, 0),
        }
    }

    /// Offset with north pointing towards increasing `y`.
    pub fn cartesian_step(self) -> (i64, i64) {
        match self {
            Dir::N => (0, 1),
            Dir::E => (1, 0),
            Dir::S => (0, -1),
            Dir::W => (-1, 0),
        }
    }

    pub fn from_cartesian_step(dx: i64, dy: i64) -> Option<Dir> {
        match (dx, dy) {
            (0, 1) => Some(Dir::N),
            (1, 0) => Some(Dir::E),
            (0, -1) => Some(Dir::S),
            (-1, 0) => Some(Dir::W),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Dir::N => 'N',
            Dir::E => 'E',
            Dir::S => 'S',
            Dir::W => 'W',
        }
    }

    pub fn parse(s: &str) -> Option<Dir> {
        match s {
            "N" | "n" => Some(Dir::N),
            "E" | "e" => Some(Dir::E),
            "S" | "s" => Some(Dir::S),
            "W" | "w" => Some(Dir::W),
            _ => None,
        }
    }
}
