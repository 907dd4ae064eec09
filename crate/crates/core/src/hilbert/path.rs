use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Cell, Dir};

/// One of the four Hilbert path variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    A,
    B,
    C,
    D,
}

/// Quadrant positions of a 2×2 square, indexed like `[BL, TL, TR, BR]`.
pub(crate) const QUADRANT_OFFSETS: [(i64, i64); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

/// Unit offset of quadrant `q` in the `[BL, TL, TR, BR]` order.
pub fn quadrant_offset(q: usize) -> (i64, i64) {
    QUADRANT_OFFSETS[q]
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::A, Variant::B, Variant::C, Variant::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Variant {
        Variant::ALL[i]
    }

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    /// Maps a point of the variant-`a` picture on a square of side `side`
    /// onto the picture of this variant.
    ///
    /// `b` is the transpose, `c` the anti-transpose, `d` the half turn.
    pub fn transform(self, side: i64, (x, y): (i64, i64)) -> (i64, i64) {
        let m = side - 1;
        match self {
            Variant::A => (x, y),
            Variant::B => (y, x),
            Variant::C => (m - y, m - x),
            Variant::D => (m - x, m - y),
        }
    }

    /// Composition `self ∘ other` inside the Klein group of the four transforms.
    pub fn compose(self, other: Variant) -> Variant {
        Variant::from_index(self.index() ^ other.index())
    }

    /// Child variants in the order they are walked by the level-one path.
    pub fn children_in_path_order(self) -> [Variant; 4] {
        use Variant::*;
        match self {
            A => [B, A, A, C],
            B => [A, B, B, D],
            C => [D, C, C, A],
            D => [C, D, D, B],
        }
    }

    /// Child variants by quadrant, indexed `[BL, TL, TR, BR]`.
    pub fn children_by_quadrant(self) -> [Variant; 4] {
        let order = basic_path(self);
        let kids = self.children_in_path_order();
        let mut out = [Variant::A; 4];
        for (k, c) in order.iter().enumerate() {
            let q = QUADRANT_OFFSETS
                .iter()
                .position(|&(qx, qy)| qx == c.x && qy == c.y)
                .expect("basic path stays in the unit square");
            out[q] = kids[k];
        }
        out
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Variant::A),
            "b" | "B" => Ok(Variant::B),
            "c" | "C" => Ok(Variant::C),
            "d" | "D" => Ok(Variant::D),
            other => Err(Error::InvalidArgument(format!("unknown Hilbert variant `{other}`"))),
        }
    }
}

const BASIC_A: [(i64, i64); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

/// The four-cell path through the unit square for a variant.
pub fn basic_path(variant: Variant) -> Vec<Cell> {
    BASIC_A
        .iter()
        .map(|&p| {
            let (x, y) = variant.transform(2, p);
            Cell::new(x, y)
        })
        .collect()
}

/// The level-`n` Hilbert path through `[0, 2^n)²`.
pub fn hilbert_path(variant: Variant, level: i64) -> Result<Vec<Cell>> {
    if level < 1 {
        return Err(Error::InvalidLevel { min: 1, got: level });
    }
    if level > 30 {
        return Err(Error::InvalidArgument(format!("level {level} is too large")));
    }
    let mut path: Vec<(i64, i64)> = BASIC_A.to_vec();
    let mut side = 2i64;
    for _ in 1..level {
        let mut next = Vec::with_capacity(path.len() * 4);
        for (k, &(ox, oy)) in BASIC_A.iter().enumerate() {
            let child = Variant::A.children_in_path_order()[k];
            next.extend(path.iter().map(|&p| child.transform(side, p)).map(|(x, y)| (x + ox * side, y + oy * side)));
        }
        path = next;
        side *= 2;
    }
    Ok(path
        .into_iter()
        .map(|p| {
            let (x, y) = variant.transform(side, p);
            Cell::new(x, y)
        })
        .collect())
}

/// Direction of the unit step `from → to`, if they are adjacent.
pub(crate) fn step_dir(from: Cell, to: Cell) -> Option<Dir> {
    Dir::from_cartesian_step(to.x - from.x, to.y - from.y)
}

/// Finds the smallest 1-based `i` such that the `4^n` cells starting at
/// position `i` are distinct and fill an axis-aligned `2^n × 2^n` square.
///
/// Returns `(i, i + 4^n)`; the segment is the half-open range `[i, j)`.
pub fn check_square_fill(path: &[Cell], n: u32) -> Option<(usize, usize)> {
    let len = 1usize.checked_shl(2 * n)?;
    let side = 1i64 << n;
    if path.len() < len {
        return None;
    }
    let mut counts: HashMap<Cell, usize> = HashMap::with_capacity(len);
    let mut distinct = 0usize;
    let mut add = |counts: &mut HashMap<Cell, usize>, c: Cell, delta: isize| {
        let e = counts.entry(c).or_insert(0);
        if delta > 0 {
            if *e == 0 {
                distinct += 1;
            }
            *e += 1;
        } else {
            *e -= 1;
            if *e == 0 {
                distinct -= 1;
            }
        }
        distinct
    };
    let mut current = 0;
    for &c in &path[..len] {
        current = add(&mut counts, c, 1);
    }
    for start in 0..=path.len() - len {
        if start > 0 {
            add(&mut counts, path[start - 1], -1);
            current = add(&mut counts, path[start + len - 1], 1);
        }
        if current == len && fills_square(&path[start..start + len], side) {
            return Some((start + 1, start + 1 + len));
        }
    }
    None
}

/// Exhaustive check that every contiguous sub-path with at least
/// `2·4^n` cells contains `4^n` consecutive cells filling a `2^n` square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareFillReport {
    pub n: u32,
    pub path_len: usize,
    /// Sub-paths examined.
    pub checked: u64,
    /// Half-open `[i, j)` (0-based) sub-paths without a filled square.
    pub counterexamples: Vec<(usize, usize)>,
}

pub fn square_fill_report(path: &[Cell], n: u32) -> SquareFillReport {
    let len = 1usize << (2 * n);
    let side = 1i64 << n;
    let min = 2 * len;
    let fills: Vec<bool> = (0..path.len().saturating_sub(len - 1))
        .map(|s| {
            let seg = &path[s..s + len];
            seg.iter().collect::<std::collections::HashSet<_>>().len() == len && fills_square(seg, side)
        })
        .collect();
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for i in 0..path.len() {
        // First filled segment starting at or after i.
        let first = (i..fills.len()).find(|&s| fills[s]);
        for j in i + min..=path.len() {
            checked += 1;
            if !first.is_some_and(|s| s + len <= j) {
                counterexamples.push((i, j));
            }
        }
    }
    SquareFillReport { n, path_len: path.len(), checked, counterexamples }
}

fn fills_square(cells: &[Cell], side: i64) -> bool {
    let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for c in cells {
        x0 = x0.min(c.x);
        x1 = x1.max(c.x);
        y0 = y0.min(c.y);
        y1 = y1.max(c.y);
    }
    x1 - x0 + 1 == side && y1 - y0 + 1 == side
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn is_bijective_unit_path(path: &[Cell], side: i64) -> bool {
        let set: HashSet<_> = path.iter().copied().collect();
        set.len() == path.len()
            && path.len() as i64 == side * side
            && path.iter().all(|c| (0..side).contains(&c.x) && (0..side).contains(&c.y))
            && path.windows(2).all(|w| w[0].l1(w[1]) == 1)
    }

    #[test]
    fn basic_path_a_matches_definition() {
        let p = basic_path(Variant::A);
        let want: Vec<Cell> = BASIC_A.iter().map(|&(x, y)| Cell::new(x, y)).collect();
        assert_eq!(p, want);
    }

    #[test]
    fn level_one_is_basic() {
        for v in Variant::ALL {
            assert_eq!(hilbert_path(v, 1).unwrap(), basic_path(v));
            assert!(is_bijective_unit_path(&basic_path(v), 2));
        }
    }

    #[test]
    fn space_filling_up_to_level_six() {
        for v in Variant::ALL {
            for n in 1..=6 {
                let p = hilbert_path(v, n).unwrap();
                assert!(is_bijective_unit_path(&p, 1 << n), "{v} level {n}");
            }
        }
    }

    #[test]
    fn level_two_endpoints() {
        // Quadrant recursion: b in the lower-left starts at the origin; c in the
        // lower-right ends at the south-east corner.
        let p = hilbert_path(Variant::A, 2).unwrap();
        assert_eq!(p[0], Cell::new(0, 0));
        assert_eq!(p[15], Cell::new(3, 0));
        assert_eq!(&p[..4], &[(0, 0), (1, 0), (1, 1), (0, 1)].map(Cell::from));
    }

    #[test]
    fn rejects_nonpositive_level() {
        assert!(matches!(hilbert_path(Variant::A, 0), Err(Error::InvalidLevel { .. })));
        assert!(hilbert_path(Variant::A, -2).is_err());
    }

    #[test]
    fn quadrant_tables() {
        use Variant::*;
        assert_eq!(A.children_by_quadrant(), [B, A, A, C]);
        assert_eq!(B.children_by_quadrant(), [A, D, B, B]);
        assert_eq!(C.children_by_quadrant(), [C, C, D, A]);
        assert_eq!(D.children_by_quadrant(), [D, B, C, D]);
    }

    #[test]
    fn variant_paths_are_transforms_of_a() {
        for v in Variant::ALL {
            for n in 1..=4 {
                let a = hilbert_path(Variant::A, n).unwrap();
                let p = hilbert_path(v, n).unwrap();
                let side = 1 << n;
                for (ca, cv) in a.iter().zip(&p) {
                    assert_eq!(v.transform(side, (ca.x, ca.y)), (cv.x, cv.y));
                }
            }
        }
    }

    /// Independent naming oracle: among all dihedral images of the basic
    /// picture, find the naming of b, c, d under which the inductive
    /// concatenation for `a` is a connected corner-to-corner path and every
    /// variant's level-(n+1) path splits into named level-n paths.
    #[test]
    fn closure_oracle_selects_the_naming() {
        type Map = fn(i64, (i64, i64)) -> (i64, i64);
        let dihedral: [Map; 8] = [
            |_, (x, y)| (x, y),
            |_, (x, y)| (y, x),
            |s, (x, y)| (s - 1 - y, s - 1 - x),
            |s, (x, y)| (s - 1 - x, s - 1 - y),
            |s, (x, y)| (s - 1 - x, y),
            |s, (x, y)| (x, s - 1 - y),
            |s, (x, y)| (y, s - 1 - x),
            |s, (x, y)| (s - 1 - y, x),
        ];
        let level =
            |g: Map, pts: &[(i64, i64)], side: i64| -> Vec<(i64, i64)> { pts.iter().map(|&p| g(side, p)).collect() };
        let mut winners = Vec::new();
        for b in 1..8 {
            for c in 1..8 {
                for d in 1..8 {
                    if b == c || c == d || b == d {
                        continue;
                    }
                    let named = [0usize, b, c, d];
                    let mut ok = true;
                    let mut pa: Vec<(i64, i64)> = BASIC_A.to_vec();
                    let mut side = 2;
                    for _ in 0..3 {
                        // P^a_{n+1} = b, a, a, c on BL, TL, TR, BR.
                        let mut next = Vec::new();
                        for (k, &(ox, oy)) in BASIC_A.iter().enumerate() {
                            let g = dihedral[named[[1, 0, 0, 2][k]]];
                            next.extend(level(g, &pa, side).into_iter().map(|(x, y)| (x + ox * side, y + oy * side)));
                        }
                        let s2 = side * 2;
                        let connected = next.windows(2).all(|w| (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs() == 1);
                        let corners = next[0] == (0, 0) && *next.last().unwrap() == (s2 - 1, 0);
                        ok &= connected && corners;
                        // Each variant's path must split into named level-n pieces.
                        let named_small: Vec<Vec<(i64, i64)>> =
                            named.iter().map(|&g| level(dihedral[g], &pa, side)).collect();
                        for &g in &named {
                            let pv = level(dihedral[g], &next, s2);
                            for q in 0..4 {
                                let seg = &pv[q * pa.len()..(q + 1) * pa.len()];
                                let (mx, my) =
                                    seg.iter().fold((i64::MAX, i64::MAX), |m, p| (m.0.min(p.0), m.1.min(p.1)));
                                let local: Vec<_> = seg.iter().map(|&(x, y)| (x - mx, y - my)).collect();
                                ok &= named_small.contains(&local);
                            }
                        }
                        pa = next;
                        side = s2;
                    }
                    if ok {
                        winners.push((b, c, d));
                    }
                }
            }
        }
        assert_eq!(winners, vec![(1, 2, 3)]);
        for (idx, v) in Variant::ALL.iter().enumerate() {
            for x in 0..4 {
                for y in 0..4 {
                    let g = dihedral[[0, 1, 2, 3][idx]];
                    assert_eq!(v.transform(4, (x, y)), g(4, (x, y)));
                }
            }
        }
    }

    #[test]
    fn square_fill_report_counts() {
        let p = hilbert_path(Variant::A, 3).unwrap();
        let r = square_fill_report(&p, 1);
        assert!(r.counterexamples.is_empty());
        // Sub-paths [i, j) with j - i >= 8 of a 64-cell path.
        let want: u64 = (8..=64).map(|l| 65 - l as u64).sum();
        assert_eq!(r.checked, want);
        let line: Vec<Cell> = (0..20).map(|x| Cell::new(x, 0)).collect();
        assert_eq!(square_fill_report(&line, 1).counterexamples.len() as u64, square_fill_report(&line, 1).checked);
    }

    #[test]
    fn square_fill_examples() {
        let p = hilbert_path(Variant::A, 2).unwrap();
        let (i, j) = check_square_fill(&p, 1).unwrap();
        assert_eq!(j - i, 4);
        assert!(i <= 8);
        let line: Vec<Cell> = (0..8).map(|x| Cell::new(x, 0)).collect();
        assert_eq!(check_square_fill(&line, 1), None);
        for n in 1..=4u32 {
            let p = hilbert_path(Variant::C, n as i64).unwrap();
            assert_eq!(check_square_fill(&p, n), Some((1, 1 + 4usize.pow(n))));
        }
    }

    #[test]
    fn every_long_subpath_contains_a_filled_square() {
        for v in Variant::ALL {
            for m in 1..=4i64 {
                let p = hilbert_path(v, m).unwrap();
                for n in 0..m as u32 {
                    let need = 2 * 4usize.pow(n);
                    for start in 0..=p.len().saturating_sub(need) {
                        let seg = &p[start..(start + need).min(p.len())];
                        if seg.len() < need {
                            continue;
                        }
                        assert!(check_square_fill(seg, n).is_some(), "{v} m={m} n={n} at {start}");
                    }
                }
            }
        }
    }
}
