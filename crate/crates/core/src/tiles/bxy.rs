//! Hierarchical valid patches.
//!
//! A level-`k` block has side `2^(k+1) − 1`. Level 0 is a single blank
//! cross. A level-`k` block puts a bold cross in the middle, four arms
//! running from it to the block edge, and four level-`(k−1)` blocks in the
//! quadrants; each quadrant block's orientation is the quadrant it sits in
//! and its Hilbert label is the matching child of the parent's label.
//! Along an arm of a level-`k` cross, the cell at distance `2^(k−1)` is a
//! mixed arm, other cells at odd distance are blank arms and cells at even
//! distance are bold arms. The blank crosses sit at even coordinates and
//! are threaded by the Hilbert path of the root label.

use std::sync::Arc;

use super::kari::{
    kari_id, lateral_sides, mixed_side_labels, mixed_side_orients, Basic, KariTile, Orient, Rule6Variant,
};
use super::{DirectedTileSet, Grid, Topology};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_path, Variant};
use crate::lattice::{Cell, Dir};

/// Largest level accepted by the builders.
pub const MAX_LEVEL: u32 = 8;

pub fn block_side(level: u32) -> usize {
    (1usize << (level + 1)) - 1
}

/// A constructed patch together with its blank crosses in path order
/// (grid coordinates).
#[derive(Debug, Clone)]
pub struct BlockBuild {
    pub grid: Grid,
    pub path: Vec<Cell>,
}

impl BlockBuild {
    pub fn entry(&self) -> Cell {
        self.path[0]
    }
}

struct Builder {
    side: i64,
    tiles: Vec<Option<KariTile>>,
}

impl Builder {
    fn idx(&self, x: i64, y: i64) -> Option<usize> {
        ((0..self.side).contains(&x) && (0..self.side).contains(&y)).then(|| (y * self.side + x) as usize)
    }

    fn put(&mut self, x: i64, y: i64, t: KariTile) {
        let i = self.idx(x, y).expect("inside block");
        self.tiles[i] = Some(t);
    }

    fn get(&self, x: i64, y: i64) -> Option<&KariTile> {
        self.idx(x, y).and_then(|i| self.tiles[i].as_ref())
    }

    fn place(&mut self, level: u32, ox: i64, oy: i64, orient: Orient, label: Variant) {
        let base = |basic: Basic, arm: Option<Dir>| KariTile {
            basic,
            arm,
            orient,
            label,
            sides: None,
            corners: [0; 4],
            h: 0,
            v: 0,
            direction: Dir::N,
        };
        if level == 0 {
            self.put(ox, oy, base(Basic::BlankCross, None));
            return;
        }
        let half = 1i64 << level;
        let (cx, cy) = (ox + half - 1, oy + half - 1);
        self.put(cx, cy, base(Basic::BoldCross, None));
        for d in Dir::ALL {
            let (dx, dy) = d.cartesian_step();
            for t in 1..half {
                let basic = if t == half / 2 {
                    Basic::MixedArm
                } else if t % 2 == 1 {
                    Basic::BlankArm
                } else {
                    Basic::BoldArm
                };
                self.put(cx + dx * t, cy + dy * t, base(basic, Some(d)));
            }
        }
        let kids = label.children_by_quadrant();
        for (q, kid) in kids.into_iter().enumerate() {
            let (qx, qy) = crate::hilbert::quadrant_offset(q);
            self.place(level - 1, ox + qx * half, oy + qy * half, Orient::from_quadrant(q), kid);
        }
    }

    /// The arrow a neighbor sends through its side facing `(x, y)`.
    fn incoming(&self, x: i64, y: i64, from: Dir) -> Option<(Orient, Variant)> {
        let (dx, dy) = from.cartesian_step();
        let nb = self.get(x + dx, y + dy)?;
        match nb.arm {
            None => Some((nb.orient, nb.label)),
            Some(arm) if arm == from.opposite() => Some((nb.orient, nb.label)),
            Some(_) => None,
        }
    }

    /// Fills side arrows, corners, parities, and non-path directions.
    fn finish_labels(&mut self) {
        for y in 0..self.side {
            for x in 0..self.side {
                let mut t = *self.get(x, y).expect("every cell placed");
                t.h = (x % 2) as u8;
                t.v = (y % 2) as u8;
                match t.arm {
                    None => {
                        t.corners = [0, 1, 0, 1];
                        let (v, _) = t.orient.components();
                        t.direction = v.opposite();
                    }
                    Some(arm) => {
                        t.corners = if arm.is_horizontal() { [0, 0, 1, 1] } else { [1, 1, 0, 0] };
                        t.direction = arm;
                        let lat = lateral_sides(arm);
                        t.sides = Some(if t.basic == Basic::MixedArm {
                            let o = mixed_side_orients(arm);
                            let l = mixed_side_labels(arm, t.label);
                            [(o[0], l[0]), (o[1], l[1])]
                        } else {
                            // Edge cells with no feeding neighbor get the first
                            // admissible side orientations.
                            let fallback =
                                if arm.is_horizontal() { [Orient::SE, Orient::NE] } else { [Orient::NE, Orient::NW] };
                            let a = self.incoming(x, y, lat[0]);
                            let b = self.incoming(x, y, lat[1]);
                            match (a, b) {
                                (Some(a), Some(b)) => [a, b],
                                (Some(a), None) => [a, (partner(arm, a.0, 0), Variant::A)],
                                (None, Some(b)) => [(partner(arm, b.0, 1), Variant::A), b],
                                (None, None) => [(fallback[0], Variant::A), (fallback[1], Variant::A)],
                            }
                        });
                    }
                }
                let i = self.idx(x, y).expect("inside");
                self.tiles[i] = Some(t);
            }
        }
    }
}

/// The admissible side orientation paired with a known one.
fn partner(arm: Dir, known: Orient, known_index: usize) -> Orient {
    let pairs = if arm.is_horizontal() {
        [[Orient::SE, Orient::NE], [Orient::SW, Orient::NW]]
    } else {
        [[Orient::NE, Orient::NW], [Orient::SE, Orient::SW]]
    };
    pairs.iter().find(|p| p[known_index] == known).map(|p| p[1 - known_index]).unwrap_or(pairs[0][1 - known_index])
}

fn exit_direction(label: Variant) -> Dir {
    match label {
        Variant::A | Variant::C => Dir::E,
        Variant::B | Variant::D => Dir::N,
    }
}

fn kari_set(variant: Rule6Variant) -> Arc<DirectedTileSet> {
    Arc::new(DirectedTileSet::kari(variant))
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!("block level {level} exceeds the supported maximum {MAX_LEVEL}")));
    }
    Ok(())
}

/// Builds the full level-`level` block with the given central orientation
/// and Hilbert label, Cartesian layout mapped to grid rows (north on top).
pub fn build_block(level: u32, orient: Orient, label: Variant) -> Result<BlockBuild> {
    check_level(level)?;
    let side = block_side(level) as i64;
    let mut b = Builder { side, tiles: vec![None; (side * side) as usize] };
    b.place(level, 0, 0, orient, label);
    b.finish_labels();

    // Thread the blank crosses with the Hilbert path of the root label.
    let lattice: Vec<(i64, i64)> = if level == 0 {
        vec![(0, 0)]
    } else {
        hilbert_path(label, level as i64)?.into_iter().map(|c| (c.x * 2, c.y * 2)).collect()
    };
    for (k, &(x, y)) in lattice.iter().enumerate() {
        let dir = match lattice.get(k + 1) {
            Some(&(nx, ny)) => Dir::from_cartesian_step((nx - x) / 2, (ny - y) / 2).expect("unit lattice step"),
            None => exit_direction(label),
        };
        let i = b.idx(x, y).expect("inside");
        b.tiles[i].as_mut().expect("placed").direction = dir;
        let (dx, dy) = dir.cartesian_step();
        if let Some(j) = b.idx(x + dx, y + dy) {
            b.tiles[j].as_mut().expect("placed").direction = dir;
        }
    }

    let to_row = |y: i64| side - 1 - y;
    let mut cells = vec![0u32; (side * side) as usize];
    for y in 0..side {
        for x in 0..side {
            let t = b.get(x, y).expect("placed");
            let id = kari_id(t).unwrap_or_else(|| panic!("constructed tile outside the set: {t:?}"));
            cells[(to_row(y) * side + x) as usize] = id;
        }
    }
    let grid = Grid::new(kari_set(Rule6Variant::Corrected), Topology::Window, side as usize, side as usize, cells)?;
    let path = lattice.iter().map(|&(x, y)| Cell::new(x, to_row(y))).collect();
    Ok(BlockBuild { grid, path })
}

/// Root label whose grandchild in position `XY` of quadrant `opposite(XY)` is `label`.
fn root_for(orient: Orient, label: Variant) -> Variant {
    let q = orient.opposite().quadrant();
    Variant::ALL
        .into_iter()
        .find(|r| r.children_by_quadrant()[q].children_by_quadrant()[orient.quadrant()] == label)
        .expect("every label is reachable")
}

/// Cuts the level-`level` block with the given orientation and label out of
/// a block two levels higher, where it sits next to the central cross, and
/// keeps `margin` extra cells of context on every side.
fn embedded(level: u32, orient: Orient, label: Variant, margin: i64, variant: Rule6Variant) -> Result<BlockBuild> {
    check_level(level + 2)?;
    let root = root_for(orient, label);
    let big = build_block(level + 2, Orient::NE, root)?;
    let big_side = block_side(level + 2) as i64;
    let q = orient.opposite();
    let (qx, qy) = crate::hilbert::quadrant_offset(q.quadrant());
    let (sx, sy) = crate::hilbert::quadrant_offset(orient.quadrant());
    let x0 = qx * (1 << (level + 2)) + sx * (1 << (level + 1)) - margin;
    let y0 = qy * (1 << (level + 2)) + sy * (1 << (level + 1)) - margin;
    let side = block_side(level) as i64 + 2 * margin;
    let row0 = big_side - (y0 + side);
    let grid = big.grid.crop(x0 as usize, row0 as usize, side as usize, side as usize)?;
    let grid = Grid { tileset: kari_set(variant), ..grid };
    let inner = margin..side - margin;
    let path = big
        .path
        .iter()
        .map(|c| Cell::new(c.x - x0, c.y - row0))
        .filter(|c| inner.contains(&c.x) && inner.contains(&c.y))
        .collect();
    Ok(BlockBuild { grid, path })
}

/// The level-`n` patch with the given central orientation and Hilbert label.
pub fn build_bxy(level: u32, orient: Orient, label: Variant) -> Result<Grid> {
    Ok(embedded(level, orient, label, 0, Rule6Variant::Corrected)?.grid)
}

/// [`build_bxy`] with one extra ring of surrounding context, so that the
/// patch's own edge cells have all their neighbors.
pub fn build_bxy_framed(level: u32, orient: Orient, label: Variant, variant: Rule6Variant) -> Result<BlockBuild> {
    embedded(level, orient, label, 1, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiles::Validity;

    fn tile(g: &Grid, x: usize, y: usize) -> &'static KariTile {
        g.tileset.kari_rules().unwrap().tile(g.cells[y * g.width + x])
    }

    #[test]
    fn level_zero_is_a_blank_cross() {
        for o in Orient::ALL {
            for l in Variant::ALL {
                let g = build_bxy(0, o, l).unwrap();
                assert_eq!((g.width, g.height), (1, 1));
                let t = tile(&g, 0, 0);
                assert_eq!((t.basic, t.orient, t.label), (Basic::BlankCross, o, l));
            }
        }
    }

    #[test]
    fn level_two_cross_layout() {
        let g = build_bxy(2, Orient::SW, Variant::C).unwrap();
        assert_eq!((g.width, g.height), (7, 7));
        let centre = tile(&g, 3, 3);
        assert_eq!((centre.basic, centre.orient, centre.label), (Basic::BoldCross, Orient::SW, Variant::C));
        // Sub-block centres carry their quadrant as orientation.
        for (x, y, o) in [(1, 5, Orient::SW), (1, 1, Orient::NW), (5, 1, Orient::NE), (5, 5, Orient::SE)] {
            let t = tile(&g, x, y);
            assert_eq!((t.basic, t.orient), (Basic::BoldCross, o));
        }
        // Blank crosses at even coordinates, oriented by their quadrant in
        // the enclosing level-one block.
        for y in (0..7).step_by(2) {
            for x in (0..7).step_by(2) {
                let t = tile(&g, x, y);
                assert_eq!(t.basic, Basic::BlankCross);
                let cart_y = 6 - y;
                let q = match ((x % 4) / 2, (cart_y % 4) / 2) {
                    (0, 0) => Orient::SW,
                    (0, 1) => Orient::NW,
                    (1, 1) => Orient::NE,
                    _ => Orient::SE,
                };
                assert_eq!(t.orient, q);
            }
        }
        // Arms: mixed next to the sub-block centres, blank elsewhere.
        assert_eq!(tile(&g, 3, 1).basic, Basic::MixedArm);
        assert_eq!(tile(&g, 3, 0).basic, Basic::BlankArm);
        assert_eq!(tile(&g, 3, 2).basic, Basic::BlankArm);
        assert_eq!(tile(&g, 3, 2).arm, Some(Dir::N));
    }

    #[test]
    fn centre_of_level_one_is_valid() {
        for o in Orient::ALL {
            for l in Variant::ALL {
                let g = build_bxy(1, o, l).unwrap();
                assert!(g.valid_at(Cell::new(1, 1)));
            }
        }
    }

    #[test]
    fn full_blocks_are_valid_away_from_the_edge() {
        for level in 1..=4 {
            for l in Variant::ALL {
                let b = build_block(level, Orient::NE, l).unwrap();
                let g = &b.grid;
                for y in 1..g.height - 1 {
                    for x in 1..g.width - 1 {
                        let i = y * g.width + x;
                        assert_eq!(
                            g.validity(i),
                            Validity::Valid,
                            "level {level} label {l} at ({x},{y}): {:?}",
                            tile(g, x, y)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn framed_trace_follows_the_hilbert_path() {
        use crate::tiles::{trace_path, Termination};
        for level in 0..=3u32 {
            for o in Orient::ALL {
                for l in Variant::ALL {
                    let b = build_bxy_framed(level, o, l, Rule6Variant::Corrected).unwrap();
                    let n = 1usize << (2 * level);
                    assert_eq!(b.path.len(), n);
                    let p = trace_path(&b.grid, b.entry(), usize::MAX).unwrap();
                    assert_eq!(p.cells.len(), 2 * n - 1, "{level} {o} {l}");
                    assert_eq!(p.termination, Termination::HitInvalid);
                    let crosses: Vec<Cell> = p.cells.iter().step_by(2).copied().collect();
                    assert_eq!(crosses, b.path);
                    if level > 0 {
                        let side = block_side(level) as i64;
                        let want: Vec<Cell> = hilbert_path(l, level as i64)
                            .unwrap()
                            .into_iter()
                            .map(|c| Cell::new(2 * c.x + 1, side - 2 * c.y))
                            .collect();
                        assert_eq!(crosses, want);
                    }
                }
            }
        }
    }

    #[test]
    fn literal_direction_rule_rejects_the_construction() {
        let b = build_bxy_framed(2, Orient::NE, Variant::A, Rule6Variant::Literal).unwrap();
        let g = &b.grid;
        let invalid = (0..g.len())
            .filter(|&i| {
                let c = g.cell(i);
                c.x > 0 && c.y > 0 && c.x < g.width as i64 - 1 && c.y < g.height as i64 - 1
            })
            .filter(|&i| g.validity(i) != Validity::Valid)
            .count();
        assert!(invalid > 0);
    }

    #[test]
    fn uniform_blank_crosses_are_invalid() {
        let set = kari_set(Rule6Variant::Corrected);
        let blank = crate::tiles::kari_tiles().iter().position(|t| t.basic == Basic::BlankCross).unwrap();
        let g = Grid::uniform(set, Topology::Window, 3, 3, blank as u32).unwrap();
        assert!((0..9).all(|i| !g.valid_at(g.cell(i))));
        assert_eq!(g.validity(4), Validity::Invalid);
    }

    /// Applies a symmetry to a square grid: positions and tile labels.
    fn transform_grid(g: &Grid, s: Variant) -> Grid {
        let n = g.width as i64;
        let mut cells = vec![0u32; g.len()];
        for i in 0..g.len() {
            let c = g.cell(i);
            let (x, y) = s.transform(n, (c.x, n - 1 - c.y));
            let t = tile(g, c.x as usize, c.y as usize).transformed(s);
            cells[((n - 1 - y) * n + x) as usize] = kari_id(&t).unwrap();
        }
        Grid::new(g.tileset.clone(), g.topology, g.width, g.height, cells).unwrap()
    }

    #[test]
    fn validity_is_invariant_under_symmetries() {
        let b = build_block(3, Orient::SE, Variant::B).unwrap();
        let g = &b.grid;
        let n = g.width as i64;
        for s in Variant::ALL {
            let h = transform_grid(g, s);
            for i in 0..g.len() {
                let c = g.cell(i);
                let (x, y) = s.transform(n, (c.x, n - 1 - c.y));
                let j = ((n - 1 - y) * n + x) as usize;
                assert_eq!(g.validity(i), h.validity(j), "{s} at {c:?}");
            }
        }
    }

    #[test]
    fn validity_is_local() {
        let b = build_block(3, Orient::NW, Variant::D).unwrap();
        let g = &b.grid;
        let before = g.validity(7 * g.width + 7);
        let mut h = g.clone();
        for i in 0..h.len() {
            let c = h.cell(i);
            if (c.x - 7).abs() > 1 || (c.y - 7).abs() > 1 {
                h.cells[i] = (h.cells[i] * 7 + 3) % crate::tiles::kari_tiles().len() as u32;
            }
        }
        assert_eq!(h.validity(7 * g.width + 7), before);
    }

    #[test]
    fn mutations_are_detected() {
        let b = build_block(3, Orient::NE, Variant::A).unwrap();
        let g = &b.grid;
        let total = crate::tiles::kari_tiles().len() as u64;
        let mut caught = 0;
        let trials = 400;
        let mut s = 12345u64;
        for _ in 0..trials {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = 1 + (s >> 40) as usize % (g.width - 2);
            let y = 1 + (s >> 20) as usize % (g.height - 2);
            let mut h = g.clone();
            let i = y * g.width + x;
            let new = ((s >> 3) % total) as u32;
            if new == h.cells[i] {
                continue;
            }
            h.cells[i] = new;
            let broken = (-1..=1).any(|dy: i64| {
                (-1..=1).any(|dx: i64| h.neighbor(i, dx, dy).is_some_and(|j| h.validity(j) != Validity::Valid))
            });
            caught += broken as usize;
        }
        assert!(caught >= trials * 99 / 100, "{caught}/{trials}");
    }
}
