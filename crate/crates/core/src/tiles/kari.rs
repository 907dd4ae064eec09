//! Kari's Hilbert tiles.
//!
//! Every tile carries a basic shape (cross or arm), arrow labels
//! (orientation and Hilbert variant), corner parities, horizontal and
//! vertical parities, and a direction. Arms point away from the cross
//! they belong to: the principal arrow's head sits on the arm's side and
//! its tail on the opposite side; the two side arrows have their tails on
//! the lateral sides and must be fed by heads of the lateral neighbors.
//! Crosses emit heads on all four sides.
//!
//! Corner parities are compared between diagonally touching tiles of the
//! same family (two crosses or two arms).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{Grid, Validity};
use crate::error::{Error, Result};
use crate::hilbert::Variant;
use crate::lattice::Dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basic {
    BlankCross,
    BoldCross,
    BlankArm,
    BoldArm,
    MixedArm,
}

impl Basic {
    pub const ALL: [Basic; 5] = [Basic::BlankCross, Basic::BoldCross, Basic::BlankArm, Basic::BoldArm, Basic::MixedArm];

    pub fn is_cross(self) -> bool {
        matches!(self, Basic::BlankCross | Basic::BoldCross)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orient {
    NE,
    NW,
    SE,
    SW,
}

impl Orient {
    pub const ALL: [Orient; 4] = [Orient::NE, Orient::NW, Orient::SE, Orient::SW];

    pub fn from_components(vertical: Dir, horizontal: Dir) -> Orient {
        match (vertical, horizontal) {
            (Dir::N, Dir::E) => Orient::NE,
            (Dir::N, Dir::W) => Orient::NW,
            (Dir::S, Dir::E) => Orient::SE,
            (Dir::S, Dir::W) => Orient::SW,
            (a, b) if a.is_horizontal() && !b.is_horizontal() => Orient::from_components(b, a),
            _ => panic!("orientation needs one vertical and one horizontal component"),
        }
    }

    /// `(vertical, horizontal)` components.
    pub fn components(self) -> (Dir, Dir) {
        match self {
            Orient::NE => (Dir::N, Dir::E),
            Orient::NW => (Dir::N, Dir::W),
            Orient::SE => (Dir::S, Dir::E),
            Orient::SW => (Dir::S, Dir::W),
        }
    }

    pub fn opposite(self) -> Orient {
        let (v, h) = self.components();
        Orient::from_components(v.opposite(), h.opposite())
    }

    /// Quadrant index in the `[BL, TL, TR, BR]` convention of the Hilbert module.
    pub fn quadrant(self) -> usize {
        match self {
            Orient::SW => 0,
            Orient::NW => 1,
            Orient::NE => 2,
            Orient::SE => 3,
        }
    }

    pub fn from_quadrant(q: usize) -> Orient {
        [Orient::SW, Orient::NW, Orient::NE, Orient::SE][q]
    }
}

impl fmt::Display for Orient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Orient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NE" => Ok(Orient::NE),
            "NW" => Ok(Orient::NW),
            "SE" => Ok(Orient::SE),
            "SW" => Ok(Orient::SW),
            _ => Err(Error::InvalidArgument(format!("unknown orientation `{s}`"))),
        }
    }
}

/// Which reading of the direction rule for blank crosses pointing
/// away from a south-east neighbor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Rule6Variant {
    /// As printed: the south-east clause allows direction W via the
    /// lower side arrow, and no blank cross may point east.
    Literal,
    /// The south-east clause allows direction E via the upper side arrow,
    /// the mirror image of the north-west clause for direction N.
    #[default]
    Corrected,
}

/// One tile of the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KariTile {
    pub basic: Basic,
    /// Arms only: the way the principal arrow points.
    pub arm: Option<Dir>,
    /// Cross orientation, or the principal arrow's orientation for arms.
    pub orient: Orient,
    /// Cross Hilbert label, or the principal arrow's label for arms.
    pub label: Variant,
    /// Arms only: side arrows as `(orientation, label)`, ordered north then
    /// south for horizontal arms and west then east for vertical arms.
    pub sides: Option<[(Orient, Variant); 2]>,
    /// Corner parities ordered NW, NE, SE, SW.
    pub corners: [u8; 4],
    pub h: u8,
    pub v: u8,
    pub direction: Dir,
}

const HORIZONTAL_CORNERS: [u8; 4] = [0, 0, 1, 1];
const VERTICAL_CORNERS: [u8; 4] = [1, 1, 0, 0];

fn cross_corners(phase: u8) -> [u8; 4] {
    [phase, 1 - phase, phase, 1 - phase]
}

fn arm_corners(dir: Dir) -> [u8; 4] {
    if dir.is_horizontal() {
        HORIZONTAL_CORNERS
    } else {
        VERTICAL_CORNERS
    }
}

/// The lateral sides of an arm, in the order used by [`KariTile::sides`].
pub(crate) fn lateral_sides(arm: Dir) -> [Dir; 2] {
    if arm.is_horizontal() {
        [Dir::N, Dir::S]
    } else {
        [Dir::W, Dir::E]
    }
}

/// Side orientations allowed on blank and bold arms.
fn plain_side_orients(arm: Dir) -> [[Orient; 2]; 2] {
    if arm.is_horizontal() {
        [[Orient::SE, Orient::NE], [Orient::SW, Orient::NW]]
    } else {
        [[Orient::NE, Orient::NW], [Orient::SE, Orient::SW]]
    }
}

/// Side orientations of a mixed arm: the quadrants flanking its tip.
pub fn mixed_side_orients(arm: Dir) -> [Orient; 2] {
    match arm {
        Dir::E => [Orient::NE, Orient::SE],
        Dir::W => [Orient::NW, Orient::SW],
        Dir::N => [Orient::NW, Orient::NE],
        Dir::S => [Orient::SW, Orient::SE],
    }
}

/// Side labels of a mixed arm: the child variants in the flanking quadrants.
pub fn mixed_side_labels(arm: Dir, label: Variant) -> [Variant; 2] {
    let kids = label.children_by_quadrant();
    let [a, b] = mixed_side_orients(arm);
    [kids[a.quadrant()], kids[b.quadrant()]]
}

const PARITIES_NONBLANK: [(u8, u8); 3] = [(0, 1), (1, 0), (1, 1)];

impl KariTile {
    pub fn is_arm(&self) -> bool {
        self.arm.is_some()
    }

    pub fn is_vertical_arm(&self) -> bool {
        self.arm.is_some_and(|d| !d.is_horizontal())
    }

    pub fn is_horizontal_arm(&self) -> bool {
        self.arm.is_some_and(Dir::is_horizontal)
    }

    /// Side arrow on a given lateral side.
    pub fn side(&self, side: Dir) -> Option<(Orient, Variant)> {
        let arm = self.arm?;
        let sides = self.sides?;
        lateral_sides(arm).iter().position(|&s| s == side).map(|i| sides[i])
    }

    /// Checks every intra-tile constraint.
    pub fn is_well_formed(&self) -> bool {
        let parity_ok = match self.basic {
            Basic::BlankCross => self.h == 0 && self.v == 0,
            _ => (self.h | self.v) == 1 && self.h <= 1 && self.v <= 1,
        };
        let shape_ok = match (self.basic.is_cross(), self.arm, self.sides) {
            (true, None, None) => self.corners == cross_corners(0) || self.corners == cross_corners(1),
            (false, Some(arm), Some(sides)) => {
                let orients = [sides[0].0, sides[1].0];
                let sides_ok = match self.basic {
                    Basic::MixedArm => {
                        orients == mixed_side_orients(arm)
                            && [sides[0].1, sides[1].1] == mixed_side_labels(arm, self.label)
                    }
                    _ => plain_side_orients(arm).contains(&orients),
                };
                sides_ok && self.corners == arm_corners(arm)
            }
            _ => false,
        };
        parity_ok && shape_ok
    }

    /// Image of the tile under one of the four symmetries that permute the
    /// Hilbert variants (identity, transpose, anti-transpose, half turn),
    /// named by the variant that the symmetry produces from `a`.
    pub fn transformed(&self, g: Variant) -> KariTile {
        let map_dir = |d: Dir| transform_dir(g, d);
        let map_orient = |o: Orient| {
            let (v, h) = o.components();
            Orient::from_components(map_dir(v), map_dir(h))
        };
        let arm = self.arm.map(map_dir);
        let sides = match (self.arm, self.sides, arm) {
            (Some(old), Some(s), Some(new)) => {
                let mut out = s;
                for (i, side) in lateral_sides(old).into_iter().enumerate() {
                    let j = lateral_sides(new).iter().position(|&t| t == map_dir(side)).expect("lateral");
                    out[j] = (map_orient(s[i].0), g.compose(s[i].1));
                }
                Some(out)
            }
            _ => None,
        };
        let swap = matches!(g, Variant::B | Variant::C);
        KariTile {
            basic: self.basic,
            arm,
            orient: map_orient(self.orient),
            label: g.compose(self.label),
            sides,
            corners: arm.map_or(self.corners, arm_corners),
            h: if swap { self.v } else { self.h },
            v: if swap { self.h } else { self.v },
            direction: map_dir(self.direction),
        }
    }
}

/// Arm direction, side arrows and corner parities of a tile before its
/// parity and direction labels are chosen.
type Shape = (Option<Dir>, Option<[(Orient, Variant); 2]>, [u8; 4]);

/// Action of a symmetry on compass directions (Cartesian, north up).
pub fn transform_dir(g: Variant, d: Dir) -> Dir {
    let (x, y) = d.cartesian_step();
    let (nx, ny) = match g {
        Variant::A => (x, y),
        Variant::B => (y, x),
        Variant::C => (-y, -x),
        Variant::D => (-x, -y),
    };
    Dir::from_cartesian_step(nx, ny).expect("unit step")
}

fn enumerate() -> Vec<KariTile> {
    let mut out = Vec::new();
    for basic in Basic::ALL {
        let parities: &[(u8, u8)] = if basic == Basic::BlankCross { &[(0, 0)] } else { &PARITIES_NONBLANK };
        for orient in Orient::ALL {
            for label in Variant::ALL {
                let mut shapes: Vec<Shape> = Vec::new();
                if basic.is_cross() {
                    shapes.push((None, None, cross_corners(0)));
                    shapes.push((None, None, cross_corners(1)));
                } else {
                    for arm in Dir::ALL {
                        if basic == Basic::MixedArm {
                            let o = mixed_side_orients(arm);
                            let l = mixed_side_labels(arm, label);
                            shapes.push((Some(arm), Some([(o[0], l[0]), (o[1], l[1])]), arm_corners(arm)));
                            continue;
                        }
                        for o in plain_side_orients(arm) {
                            for l0 in Variant::ALL {
                                for l1 in Variant::ALL {
                                    shapes.push((Some(arm), Some([(o[0], l0), (o[1], l1)]), arm_corners(arm)));
                                }
                            }
                        }
                    }
                }
                for &(arm, sides, corners) in &shapes {
                    for &(h, v) in parities {
                        for direction in Dir::ALL {
                            out.push(KariTile { basic, arm, orient, label, sides, corners, h, v, direction });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All tiles in canonical order; a tile's position is its identifier.
pub fn kari_tiles() -> &'static [KariTile] {
    static TILES: OnceLock<Vec<KariTile>> = OnceLock::new();
    TILES.get_or_init(enumerate)
}

/// Identifier of a tile, if it belongs to the set.
pub fn kari_id(tile: &KariTile) -> Option<u32> {
    kari_tiles().binary_search(tile).ok().map(|i| i as u32)
}

/// Arrow code `1 + 4·orientation + label`; zero means no arrow.
fn code(o: Orient, l: Variant) -> u8 {
    1 + 4 * o as u8 + l as u8
}

#[derive(Debug, Clone, Copy, Default)]
struct Arrows {
    /// Head emitted on each side (indexed by `Dir`).
    head: [u8; 4],
    /// Tail on each side and whether a head must meet it.
    tail: [u8; 4],
    tail_required: [bool; 4],
}

fn arrows_of(t: &KariTile) -> Arrows {
    let mut a = Arrows::default();
    let principal = code(t.orient, t.label);
    match (t.arm, t.sides) {
        (Some(arm), Some(sides)) => {
            a.head[arm.index()] = principal;
            a.tail[arm.opposite().index()] = principal;
            for (side, (o, l)) in lateral_sides(arm).into_iter().zip(sides) {
                a.tail[side.index()] = code(o, l);
                a.tail_required[side.index()] = true;
            }
        }
        _ => a.head = [principal; 4],
    }
    a
}

/// The local rules, with per-tile arrow tables precomputed.
#[derive(Debug, Clone)]
pub struct KariRules {
    pub variant: Rule6Variant,
    arrows: &'static [Arrows],
}

static DIAGONALS: [(i64, i64); 4] = [(-1, -1), (1, -1), (1, 1), (-1, 1)];

impl KariRules {
    pub fn new(variant: Rule6Variant) -> Self {
        static ARROWS: OnceLock<Vec<Arrows>> = OnceLock::new();
        let arrows = ARROWS.get_or_init(|| kari_tiles().iter().map(arrows_of).collect());
        KariRules { variant, arrows }
    }

    pub fn tile(&self, id: u32) -> &'static KariTile {
        &kari_tiles()[id as usize]
    }

    pub fn validity(&self, grid: &Grid, index: usize) -> Validity {
        let tiles = kari_tiles();
        let me_id = grid.cells[index] as usize;
        let me = &tiles[me_id];
        let my_arrows = &self.arrows[me_id];
        let mut unknown = false;

        let mut orth = [None; 4];
        for d in Dir::ALL {
            let (dx, dy) = d.grid_step();
            orth[d.index()] = grid.neighbor(index, dx, dy).map(|j| grid.cells[j] as usize);
        }
        let mut diag = [None; 4];
        for (k, &(dx, dy)) in DIAGONALS.iter().enumerate() {
            diag[k] = grid.neighbor(index, dx, dy).map(|j| grid.cells[j] as usize);
        }

        for d in Dir::ALL {
            let Some(nid) = orth[d.index()] else {
                unknown = true;
                continue;
            };
            let nb = &tiles[nid];
            let na = &self.arrows[nid];
            let facing = d.opposite().index();
            let (h, t) = (my_arrows.head[d.index()], my_arrows.tail[d.index()]);
            // Heads must meet a tail with matching labels.
            if h != 0 && na.tail[facing] != h {
                return Validity::Invalid;
            }
            // Side tails must be fed by a matching head.
            if my_arrows.tail_required[d.index()] && na.head[facing] != t {
                return Validity::Invalid;
            }
            // Any head meeting one of our tails must agree with it.
            if t != 0 && na.head[facing] != 0 && na.head[facing] != t {
                return Validity::Invalid;
            }
            // Parities alternate along their axis and agree across it.
            let ok = if d.is_horizontal() { nb.h != me.h && nb.v == me.v } else { nb.v != me.v && nb.h == me.h };
            if !ok {
                return Validity::Invalid;
            }
        }

        for (k, nid) in diag.iter().enumerate() {
            let Some(nid) = *nid else {
                unknown = true;
                continue;
            };
            let nb = &tiles[nid];
            if nb.basic.is_cross() == me.basic.is_cross() && nb.corners[(k + 2) % 4] != me.corners[k] {
                return Validity::Invalid;
            }
        }

        let dir = match me.basic {
            Basic::BlankCross => self.blank_cross_direction(me.direction, &diag),
            _ => nonblank_direction(me, &orth),
        };
        match dir {
            Validity::Invalid => Validity::Invalid,
            Validity::Unknown => Validity::Unknown,
            Validity::Valid if unknown => Validity::Unknown,
            Validity::Valid => Validity::Valid,
        }
    }

    fn blank_cross_direction(&self, direction: Dir, diag: &[Option<usize>; 4]) -> Validity {
        use Variant::{A, B, C, D};
        let tiles = kari_tiles();
        let (nw, se) = (diag[0].map(|i| &tiles[i]), diag[2].map(|i| &tiles[i]));
        let bold = |t: &KariTile, l: Variant| t.basic == Basic::BoldCross && t.label == l;
        let side_in = |t: &KariTile, side: Dir, set: [Variant; 2]| t.side(side).is_some_and(|(_, l)| set.contains(&l));
        let check = |t: Option<&KariTile>, f: &dyn Fn(&KariTile) -> bool| match t {
            None => Validity::Unknown,
            Some(t) if f(t) => Validity::Valid,
            Some(_) => Validity::Invalid,
        };
        let from_nw_north = |t: &KariTile| bold(t, B) || (t.is_vertical_arm() && side_in(t, Dir::E, [A, D]));
        let from_nw_west = |t: &KariTile| bold(t, D) || (t.is_horizontal_arm() && side_in(t, Dir::S, [C, B]));
        let from_se_south = |t: &KariTile| bold(t, C) || (t.is_vertical_arm() && side_in(t, Dir::W, [A, D]));
        let from_se_east = |t: &KariTile| bold(t, A) || (t.is_horizontal_arm() && side_in(t, Dir::N, [C, B]));
        let from_se_west_literal = |t: &KariTile| bold(t, A) || (t.is_horizontal_arm() && side_in(t, Dir::S, [C, B]));
        match (direction, self.variant) {
            (Dir::N, _) => check(nw, &from_nw_north),
            (Dir::S, _) => check(se, &from_se_south),
            (Dir::E, Rule6Variant::Corrected) => check(se, &from_se_east),
            (Dir::E, Rule6Variant::Literal) => Validity::Invalid,
            (Dir::W, Rule6Variant::Corrected) => check(nw, &from_nw_west),
            (Dir::W, Rule6Variant::Literal) => {
                let a = check(nw, &from_nw_west);
                let b = check(se, &from_se_west_literal);
                match (a, b) {
                    (Validity::Valid, _) | (_, Validity::Valid) => Validity::Valid,
                    (Validity::Invalid, Validity::Invalid) => Validity::Invalid,
                    _ => Validity::Unknown,
                }
            }
        }
    }
}

/// Non-blank tiles copy the direction of any blank cross pointing at them;
/// otherwise arms follow their principal arrow and bold crosses point
/// against one component of their orientation.
fn nonblank_direction(me: &KariTile, orth: &[Option<usize>; 4]) -> Validity {
    let tiles = kari_tiles();
    let mut pointed = false;
    for d in Dir::ALL {
        let Some(nid) = orth[d.index()] else {
            return Validity::Unknown;
        };
        let nb = &tiles[nid];
        if nb.basic == Basic::BlankCross && nb.direction == d.opposite() {
            if nb.direction != me.direction {
                return Validity::Invalid;
            }
            pointed = true;
        }
    }
    if pointed {
        return Validity::Valid;
    }
    let ok = match me.arm {
        Some(arm) => me.direction == arm,
        None => {
            let (v, h) = me.orient.components();
            me.direction == v.opposite() || me.direction == h.opposite()
        }
    };
    if ok {
        Validity::Valid
    } else {
        Validity::Invalid
    }
}
