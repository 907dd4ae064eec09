use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::path::{basic_path, hilbert_path, step_dir, Variant};
use crate::error::{Error, Result};
use crate::lattice::{Cell, Dir};

/// A tile of the substitution system: a 2×2 Hilbert piece together with the
/// sides through which the path enters and leaves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubstTile {
    pub variant: Variant,
    pub entry: Option<Dir>,
    pub exit: Option<Dir>,
}

impl SubstTile {
    pub fn new(variant: Variant, entry: Dir, exit: Dir) -> Self {
        SubstTile { variant, entry: Some(entry), exit: Some(exit) }
    }

    /// Compact name such as `aWE`; missing sides print as `-`.
    pub fn name(&self) -> String {
        let side = |d: Option<Dir>| d.map_or('-', Dir::letter);
        format!("{}{}{}", self.variant.letter(), side(self.entry), side(self.exit))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let bad = || Error::UnknownTile(s.to_string());
        if chars.len() != 3 {
            return Err(bad());
        }
        let variant: Variant = chars[0].to_string().parse().map_err(|_| bad())?;
        let side = |c: char| -> Result<Option<Dir>> {
            if c == '-' {
                Ok(None)
            } else {
                Dir::parse(&c.to_string()).map(Some).ok_or_else(bad)
            }
        };
        Ok(SubstTile { variant, entry: side(chars[1])?, exit: side(chars[2])? })
    }
}

impl fmt::Display for SubstTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Rectangular patch of substitution tiles, Cartesian (`y` up), stored
/// row by row starting from `y = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubstGrid {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<SubstTile>,
}

impl SubstGrid {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> SubstTile) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        SubstGrid { width, height, cells }
    }

    pub fn single(tile: SubstTile) -> Self {
        SubstGrid { width: 1, height: 1, cells: vec![tile] }
    }

    pub fn at(&self, x: usize, y: usize) -> SubstTile {
        self.cells[y * self.width + x]
    }

    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> SubstGrid {
        SubstGrid::from_fn(w, h, |x, y| self.at(x0 + x, y0 + y))
    }

    /// Applies the substitution to every tile, doubling both dimensions.
    pub fn substitute(&self) -> Result<SubstGrid> {
        let blocks: Vec<SubstGrid> = self.cells.iter().map(|&t| substitute(t)).collect::<Result<_>>()?;
        Ok(SubstGrid::from_fn(self.width * 2, self.height * 2, |x, y| {
            blocks[(y / 2) * self.width + x / 2].at(x % 2, y % 2)
        }))
    }
}

/// Applies the substitution rule to a tile, valid for any tile whose sides
/// are consistent with its variant (including open path ends).
fn substitute_unchecked(tile: SubstTile) -> SubstGrid {
    let order = basic_path(tile.variant);
    let kids = tile.variant.children_in_path_order();
    let mut block = [[None; 2]; 2];
    for k in 0..4 {
        let entry = if k == 0 { tile.entry } else { step_dir(order[k], order[k - 1]) };
        let exit = if k == 3 { tile.exit } else { step_dir(order[k], order[k + 1]) };
        let c = order[k];
        block[c.y as usize][c.x as usize] = Some(SubstTile { variant: kids[k], entry, exit });
    }
    SubstGrid::from_fn(2, 2, |x, y| block[y][x].expect("basic path covers the block"))
}

/// The substitution image of an alphabet tile as a 2×2 block.
pub fn substitute(tile: SubstTile) -> Result<SubstGrid> {
    if !alphabet().contains(&tile) {
        return Err(Error::UnknownTile(tile.name()));
    }
    Ok(substitute_unchecked(tile))
}

/// `ρ^m(tile)`, a `2^m × 2^m` patch.
pub fn iterate(tile: SubstTile, m: u32) -> Result<SubstGrid> {
    let mut g = SubstGrid::single(tile);
    for _ in 0..m {
        g = g.substitute()?;
    }
    Ok(g)
}

/// Groups Hilbert paths of levels `2..=max_level` into aligned 2×2 blocks and
/// collects the tiles that occur, ignoring the open first and last block.
pub fn alphabet_from_paths(max_level: i64) -> BTreeSet<SubstTile> {
    let mut out = BTreeSet::new();
    for v in Variant::ALL {
        for n in 2..=max_level {
            let path = hilbert_path(v, n).expect("level is positive");
            for (b, chunk) in path.chunks(4).enumerate() {
                if b == 0 || (b + 1) * 4 == path.len() {
                    continue;
                }
                out.insert(tile_of_chunk(chunk, path[b * 4 - 1], path[(b + 1) * 4]));
            }
        }
    }
    out
}

fn tile_of_chunk(chunk: &[Cell], before: Cell, after: Cell) -> SubstTile {
    let (ox, oy) = (chunk[0].x.div_euclid(2) * 2, chunk[0].y.div_euclid(2) * 2);
    let local: Vec<Cell> = chunk.iter().map(|c| c.offset(-ox, -oy)).collect();
    let variant = Variant::ALL
        .into_iter()
        .find(|&v| basic_path(v) == local)
        .expect("aligned 4-cell chunks of a Hilbert path are basic paths");
    SubstTile { variant, entry: step_dir(chunk[0], before), exit: step_dir(chunk[3], after) }
}

/// The 12-tile alphabet, derived from path groupings.
pub fn alphabet() -> &'static BTreeSet<SubstTile> {
    static ALPHABET: OnceLock<BTreeSet<SubstTile>> = OnceLock::new();
    ALPHABET.get_or_init(|| alphabet_from_paths(4))
}

/// Restriction patterns: for every alphabet tile, its image as four
/// optional slots indexed `y * 2 + x`.
fn images() -> &'static Vec<(SubstTile, [SubstTile; 4])> {
    static IMAGES: OnceLock<Vec<(SubstTile, [SubstTile; 4])>> = OnceLock::new();
    IMAGES.get_or_init(|| {
        alphabet()
            .iter()
            .map(|&t| {
                let b = substitute_unchecked(t);
                (t, [b.at(0, 0), b.at(1, 0), b.at(0, 1), b.at(1, 1)])
            })
            .collect()
    })
}

/// Result of inverting the substitution on a patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    /// Cell `(x, y)` of the input sits at `(x + sx, y + sy)` of the
    /// substituted preimage.
    pub shift: (usize, usize),
    pub preimage: SubstGrid,
}

/// Inverts the substitution on a finite patch.
///
/// Every shift class modulo 2 is tried; a class is admissible when each
/// (possibly partial) 2×2 group agrees with the image of some alphabet tile.
/// Partial groups that fit several tiles resolve to the smallest.
pub fn derive(block: &SubstGrid) -> Result<Derivation> {
    if block.width == 0 || block.height == 0 {
        return Err(Error::InvalidArgument("empty block".into()));
    }
    let mut found = Vec::new();
    for sy in 0..2 {
        for sx in 0..2 {
            if let Some(pre) = derive_with_shift(block, sx, sy) {
                found.push(Derivation { shift: (sx, sy), preimage: pre });
            }
        }
    }
    match found.len() {
        0 => Err(Error::NotAdmissible),
        1 => Ok(found.pop().expect("one element")),
        n => Err(Error::DerivationNotUnique(n)),
    }
}

fn derive_with_shift(block: &SubstGrid, sx: usize, sy: usize) -> Option<SubstGrid> {
    let pw = (block.width + sx).div_ceil(2);
    let ph = (block.height + sy).div_ceil(2);
    let mut groups: BTreeMap<(usize, usize), [Option<SubstTile>; 4]> = BTreeMap::new();
    for y in 0..block.height {
        for x in 0..block.width {
            let (gx, gy) = (x + sx, y + sy);
            groups.entry((gx / 2, gy / 2)).or_insert([None; 4])[(gy % 2) * 2 + gx % 2] = Some(block.at(x, y));
        }
    }
    let mut pre = Vec::with_capacity(pw * ph);
    for py in 0..ph {
        for px in 0..pw {
            let slots = groups.get(&(px, py))?;
            let tile = images().iter().find_map(|(t, img)| {
                let fits = slots.iter().zip(img).all(|(s, i)| s.is_none_or(|s| s == *i));
                fits.then_some(*t)
            })?;
            pre.push(tile);
        }
    }
    Some(SubstGrid { width: pw, height: ph, cells: pre })
}

/// All distinct `w × h` sub-patches of `ρ^n(s)` over alphabet tiles `s`.
pub fn admissible_blocks(level: u32, width: usize, height: usize) -> Result<Vec<SubstGrid>> {
    let limit = 1usize << level;
    if width > limit || height > limit || width == 0 || height == 0 {
        return Err(Error::OversizedWindow { width, height, limit });
    }
    let mut out = BTreeSet::new();
    for &s in alphabet() {
        let big = iterate(s, level)?;
        for y0 in 0..=limit - height {
            for x0 in 0..=limit - width {
                out.insert(big.crop(x0, y0, width, height));
            }
        }
    }
    Ok(out.into_iter().collect())
}
