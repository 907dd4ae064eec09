//! The majority-vote automaton on the free group of rank two.
//!
//! Group elements are freely reduced words over `a`, `b`, `A = a⁻¹`,
//! `B = b⁻¹`; the identity is the empty word. The automaton sets
//! `(Mx)_w = maj(x_{wa}, x_{wb}, x_{wa⁻¹})`. On a finite ball of radius `r`
//! it produces a pattern on the ball of radius `r − 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of cells enumerated by [`exact_event_probability`].
pub const MAX_EVENT_CELLS: usize = 25;

const LETTERS: [char; 4] = ['a', 'b', 'A', 'B'];

fn inverse_letter(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

fn letter_rank(c: char) -> usize {
    LETTERS.iter().position(|&l| l == c).expect("validated letter")
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(String);

impl Word {
    pub fn identity() -> Self {
        Word(String::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Right multiplication by a generator or inverse generator.
    pub fn times(&self, letter: char) -> Word {
        let mut s = self.0.clone();
        if s.ends_with(inverse_letter(letter)) {
            s.pop();
        } else {
            s.push(letter);
        }
        Word(s)
    }

    /// Product `self · other`, freely reduced.
    pub fn mul(&self, other: &Word) -> Word {
        other.0.chars().fold(self.clone(), |w, c| w.times(c))
    }

    fn sort_key(&self) -> (usize, Vec<usize>) {
        (self.0.len(), self.0.chars().map(letter_rank).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses a letter string; `1` or the empty string is the identity.
    /// The input is freely reduced.
    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Word::identity());
        }
        if let Some(bad) = s.chars().find(|c| !LETTERS.contains(c)) {
            return Err(Error::Schema(format!("`{bad}` is not a free-group letter in `{s}`")));
        }
        Ok(s.chars().fold(Word::identity(), |w, c| w.times(c)))
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let w: Word = s.parse()?;
        if w.0 != s && s != "1" {
            return Err(Error::Schema(format!("word `{s}` is not freely reduced")));
        }
        Ok(w)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// All reduced words of length at most `radius`, canonically ordered.
pub fn ball(radius: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut shell = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(shell.len() * 3);
        for w in &shell {
            for c in LETTERS {
                let v = w.times(c);
                if v.len() > w.len() {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        shell = next;
    }
    out.sort();
    out
}

/// A `{0,1}` pattern on a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallPattern {
    pub radius: usize,
    pub values: BTreeMap<Word, u8>,
}

impl BallPattern {
    pub fn zeros(radius: usize) -> Self {
        BallPattern { radius, values: ball(radius).into_iter().map(|w| (w, 0)).collect() }
    }

    /// Checks that the pattern is total on its ball with binary values.
    pub fn validate(&self) -> Result<()> {
        let b = ball(self.radius);
        if b.len() != self.values.len() || b.iter().any(|w| !self.values.contains_key(w)) {
            return Err(Error::Schema(format!("pattern must assign every word of the radius-{} ball", self.radius)));
        }
        if self.values.values().any(|&v| v > 1) {
            return Err(Error::Schema("pattern values must be 0 or 1".into()));
        }
        Ok(())
    }

    pub fn get(&self, w: &Word) -> Option<u8> {
        self.values.get(w).copied()
    }
}

/// The three cells voting for `w`: `wa`, `wb`, `wa⁻¹`.
pub fn voters(w: &Word) -> [Word; 3] {
    [w.times('a'), w.times('b'), w.times('A')]
}

fn majority(a: u8, b: u8, c: u8) -> u8 {
    u8::from(a + b + c >= 2)
}

/// One majority step; the output lives on the ball of radius `r − 1`.
pub fn majority_step(pattern: &BallPattern) -> Result<BallPattern> {
    pattern.validate()?;
    if pattern.radius == 0 {
        return Err(Error::InvalidArgument("majority step needs radius at least 1".into()));
    }
    let values = ball(pattern.radius - 1)
        .into_iter()
        .map(|w| {
            let [p, q, r] = voters(&w).map(|v| pattern.values[&v]);
            (w, majority(p, q, r))
        })
        .collect();
    Ok(BallPattern { radius: pattern.radius - 1, values })
}

/// Exact probability of an event under the uniform product measure on the
/// given cells, by enumerating all `2^k` assignments.
///
/// The predicate receives the assignment as a bit per cell, in the order of
/// `cells`.
pub fn exact_event_probability<F>(cells: &[Word], predicate: F) -> Result<Ratio<u64>>
where
    F: Fn(&[u8]) -> bool + Sync,
{
    if cells.len() > MAX_EVENT_CELLS {
        return Err(Error::BudgetExceeded { required: 1u128 << cells.len(), budget: 1u128 << MAX_EVENT_CELLS });
    }
    let k = cells.len();
    let total = 1u64 << k;
    let hits: u64 = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0u8; k],
            |bits, mask| {
                for (i, b) in bits.iter_mut().enumerate() {
                    *b = ((mask >> i) & 1) as u8;
                }
                u64::from(predicate(bits))
            },
        )
        .sum();
    Ok(Ratio::new(hits, total))
}

/// Named events on the free-group shift, each with the cells it reads.
pub mod events {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().expect("static word")
    }

    /// `{x : x_{a⁻¹} ≠ x_a}`.
    pub fn disagreement() -> (Vec<Word>, impl Fn(&[u8]) -> bool + Sync) {
        (vec![w("A"), w("a")], |x: &[u8]| x[0] != x[1])
    }

    /// Cells read by the preimage of the disagreement event: the voters of
    /// `a⁻¹` and `a`, i.e. `1, a⁻², a⁻¹b, a², ab`.
    pub fn preimage_cells() -> Vec<Word> {
        let mut cells: Vec<Word> = voters(&w("A")).into_iter().chain(voters(&w("a"))).collect();
        cells.sort();
        cells.dedup();
        cells
    }

    /// `M⁻¹{x_{a⁻¹} ≠ x_a}`, evaluated by applying the majority rule.
    pub fn disagreement_preimage() -> (Vec<Word>, impl Fn(&[u8]) -> bool + Sync) {
        let cells = preimage_cells();
        let pos = |s: &str| cells.iter().position(|c| *c == w(s)).expect("cell present");
        let [ia, ib, ic] = voters(&w("A")).map(|v| pos(v.as_str()));
        let [ja, jb, jc] = voters(&w("a")).map(|v| pos(v.as_str()));
        let pred = move |x: &[u8]| majority(x[ia], x[ib], x[ic]) != majority(x[ja], x[jb], x[jc]);
        (cells, pred)
    }

    /// How the identity cell disagrees with the pairs `{a⁻², a⁻¹b}` and
    /// `{a², ab}`.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum PairReading {
        /// Disagrees with both cells of exactly one pair.
        Exclusive,
        /// Disagrees with both cells of both pairs.
        Both,
        /// Disagrees with both cells of at least one pair.
        Either,
    }

    pub fn pair_disagreement(reading: PairReading) -> (Vec<Word>, impl Fn(&[u8]) -> bool + Sync) {
        let cells = preimage_cells();
        let pos = |s: &str| cells.iter().position(|c| *c == w(s)).expect("cell present");
        let (e, l1, l2, r1, r2) = (pos(""), pos("AA"), pos("Ab"), pos("aa"), pos("ab"));
        let pred = move |x: &[u8]| {
            let left = x[e] != x[l1] && x[e] != x[l2];
            let right = x[e] != x[r1] && x[e] != x[r2];
            match reading {
                PairReading::Exclusive => left != right,
                PairReading::Both => left && right,
                PairReading::Either => left || right,
            }
        };
        (cells, pred)
    }
}

/// Builds `x` on the ball of radius `r + 1` with `(Mx)_w = target_w` for
/// every `w` in `window`.
///
/// Rooting the Cayley tree at the identity, the voters of `w` other than its
/// parent are children of `w` and belong to no other cell's vote; they are
/// all set to `target_w`, which fixes the majority. Remaining cells are 0.
pub fn preimage_on_tree(target: &BallPattern, window: &[Word]) -> Result<BallPattern> {
    target.validate()?;
    let mut out = BallPattern::zeros(target.radius + 1);
    for w in window {
        let value = target.get(w).ok_or_else(|| {
            Error::InvalidArgument(format!("word {w} lies outside the radius-{} ball", target.radius))
        })?;
        for v in voters(w) {
            if v.len() > w.len() {
                out.values.insert(v, value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::events::*;
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(0), vec![Word::identity()]);
        assert_eq!(ball(1).len(), 5);
        assert_eq!(ball(2).len(), 17);
        for r in 1..6 {
            assert_eq!(ball(r).len() - ball(r - 1).len(), 4 * 3usize.pow(r as u32 - 1));
        }
    }

    #[test]
    fn reduction() {
        assert_eq!(w("aAb"), w("b"));
        assert_eq!(w("ab").mul(&w("BA")), Word::identity());
        assert_eq!(Word::identity().to_string(), "1");
        assert!("ax".parse::<Word>().is_err());
        assert!(serde_json::from_str::<Word>("\"aA\"").is_err());
        assert_eq!(serde_json::from_str::<Word>("\"aB\"").unwrap(), w("aB"));
    }

    #[test]
    fn majority_examples() {
        let z = BallPattern::zeros(2);
        assert_eq!(majority_step(&z).unwrap(), BallPattern::zeros(1));
        let mut p = BallPattern::zeros(1);
        p.values.insert(w("a"), 1);
        p.values.insert(w("b"), 1);
        assert_eq!(majority_step(&p).unwrap().get(&Word::identity()), Some(1));
        let mut q = BallPattern::zeros(1);
        q.values.insert(w("a"), 1);
        assert_eq!(majority_step(&q).unwrap().get(&Word::identity()), Some(0));
        assert!(majority_step(&BallPattern::zeros(0)).is_err());
    }

    #[test]
    fn event_probabilities() {
        let (cells, pred) = disagreement();
        assert_eq!(exact_event_probability(&cells, pred).unwrap(), Ratio::new(1, 2));
        assert_eq!(exact_event_probability(&cells, |_| true).unwrap(), Ratio::new(1, 1));
        assert_eq!(preimage_cells(), vec![w(""), w("aa"), w("ab"), w("Ab"), w("AA")]);
        let (cells, pred) = disagreement_preimage();
        assert_eq!(exact_event_probability(&cells, pred).unwrap(), Ratio::new(3, 8));
        let readings = [
            (PairReading::Exclusive, Ratio::new(3, 8)),
            (PairReading::Both, Ratio::new(1, 16)),
            (PairReading::Either, Ratio::new(7, 16)),
        ];
        for (r, want) in readings {
            let (cells, pred) = pair_disagreement(r);
            assert_eq!(exact_event_probability(&cells, pred).unwrap(), want, "{r:?}");
        }
    }

    #[test]
    fn preimage_event_matches_exclusive_reading() {
        let (_, m) = disagreement_preimage();
        let (_, x) = pair_disagreement(PairReading::Exclusive);
        for mask in 0..32u8 {
            let bits: Vec<u8> = (0..5).map(|i| (mask >> i) & 1).collect();
            assert_eq!(m(&bits), x(&bits));
        }
    }

    #[test]
    fn preimage_event_reads_only_five_cells() {
        // Evaluate through majority_step on random radius-2 patterns and flip
        // every cell outside the five.
        let cells = preimage_cells();
        let (_, pred) = disagreement_preimage();
        let mut s = 99u64;
        for _ in 0..200 {
            let mut p = BallPattern::zeros(2);
            for v in p.values.values_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                *v = (s >> 63) as u8;
            }
            let eval = |p: &BallPattern| {
                let m = majority_step(p).unwrap();
                m.get(&w("A")) != m.get(&w("a"))
            };
            let bits: Vec<u8> = cells.iter().map(|c| p.values[c]).collect();
            assert_eq!(eval(&p), pred(&bits));
            let mut q = p.clone();
            for (k, v) in q.values.iter_mut() {
                if !cells.contains(k) {
                    *v ^= 1;
                }
            }
            assert_eq!(eval(&p), eval(&q));
        }
    }

    #[test]
    fn event_budget() {
        let cells = ball(3);
        assert!(cells.len() > MAX_EVENT_CELLS);
        assert!(matches!(exact_event_probability(&cells, |_| true), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn preimage_examples() {
        let zero = BallPattern::zeros(1);
        let x = preimage_on_tree(&zero, &ball(1)).unwrap();
        assert!(x.values.values().all(|&v| v == 0));
        let mut delta = BallPattern::zeros(1);
        delta.values.insert(Word::identity(), 1);
        let x = preimage_on_tree(&delta, &[Word::identity()]).unwrap();
        for s in ["a", "b", "A"] {
            assert_eq!(x.get(&w(s)), Some(1));
        }
        assert_eq!(x.values.values().filter(|&&v| v == 1).count(), 3);
        assert_eq!(majority_step(&x).unwrap().get(&Word::identity()), Some(1));
    }

    proptest! {
        #[test]
        fn tree_preimage_is_sound(radius in 0usize..=3, seed in any::<u64>()) {
            let mut target = BallPattern::zeros(radius);
            let mut s = seed;
            for v in target.values.values_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *v = (s >> 63) as u8;
            }
            let window = ball(radius);
            let x = preimage_on_tree(&target, &window).unwrap();
            let y = majority_step(&x).unwrap();
            for v in &window {
                prop_assert_eq!(y.get(v), target.get(v));
            }
        }
    }
}
