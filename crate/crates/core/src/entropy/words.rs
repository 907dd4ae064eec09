use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{dependency_set, FiniteGroup};
use crate::error::{Error, Result};
use crate::lattice::Cell;
use crate::rng::SampleStream;
use crate::tiles::Grid;

/// Default cap on the number of enumerated assignments.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Exact,
    Sampled,
}

/// Distinct space-time words of a window with their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordSet {
    pub window: Vec<Cell>,
    pub horizon: usize,
    /// Slicing modulus (1 for the plain automaton).
    pub m: u32,
    pub mode: CountMode,
    pub dependency_size: usize,
    /// Assignments enumerated (exact) or samples drawn (sampled).
    pub total: u64,
    pub distinct: usize,
    /// Sorted words (window values per step, then the phase when `m > 1`)
    /// with the number of assignments or samples producing each.
    #[serde(skip)]
    pub words: Vec<(Vec<u32>, u64)>,
}

impl WordSet {
    pub fn log_count(&self) -> f64 {
        (self.distinct as f64).ln()
    }

    fn from_counts(cone: &Cone, mode: CountMode, total: u64, counts: HashMap<Vec<u32>, u64>) -> Self {
        let mut words: Vec<_> = counts.into_iter().collect();
        words.sort_unstable();
        WordSet {
            window: cone.window.clone(),
            horizon: cone.horizon,
            m: cone.m,
            mode,
            dependency_size: cone.cells.len(),
            total,
            distinct: words.len(),
            words,
        }
    }
}

/// The cells feeding a window's word, with the dynamics restricted to them.
struct Cone {
    window: Vec<Cell>,
    horizon: usize,
    m: u32,
    /// Grid indices of the dependency set, ascending.
    cells: Vec<usize>,
    /// Local successor inside the cone.
    forward: Vec<Option<usize>>,
    /// Local indices of the window cells.
    window_local: Vec<usize>,
}

impl Cone {
    fn new(grid: &Grid, window: &[Cell], horizon: usize, m: u32) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("slicing modulus must be positive".into()));
        }
        // Updates that can happen within the first horizon − 1 steps.
        let updates = (horizon - 1).div_ceil(m as usize);
        let dep = dependency_set(grid, window, updates + 1)?;
        let cells: Vec<usize> = dep.iter().map(|&c| grid.index(c).expect("inside")).collect();
        let local = |g: usize| cells.binary_search(&g).ok();
        let forward_grid = grid.forward_map();
        let forward = cells.iter().map(|&g| forward_grid[g].and_then(local)).collect();
        let window_local =
            window.iter().map(|&c| local(grid.index(c).expect("inside")).expect("window in cone")).collect();
        Ok(Cone { window: window.to_vec(), horizon, m, cells, forward, window_local })
    }

    fn word(&self, group: &FiniteGroup, gamma: &mut Vec<u32>, scratch: &mut Vec<u32>, mut phase: u32) -> Vec<u32> {
        let per_step = self.window_local.len() + usize::from(self.m > 1);
        let mut out = Vec::with_capacity(self.horizon * per_step);
        for t in 0..self.horizon {
            out.extend(self.window_local.iter().map(|&i| gamma[i]));
            if self.m > 1 {
                out.push(phase);
            }
            if t + 1 == self.horizon {
                break;
            }
            if phase == 0 {
                scratch.clear();
                scratch.extend((0..gamma.len()).map(|i| match self.forward[i] {
                    Some(j) => group.op(gamma[i], gamma[j]),
                    None => gamma[i],
                }));
                std::mem::swap(gamma, scratch);
            }
            phase = (phase + 1) % self.m;
        }
        out
    }

    fn assignments(&self, order: usize) -> u128 {
        let per = (order as u128).checked_pow(self.cells.len() as u32).unwrap_or(u128::MAX);
        per.saturating_mul(u128::from(self.m))
    }
}

/// Enumerates every group assignment on the dependency set (identity
/// elsewhere) and, for sliced dynamics, every initial phase.
pub fn count_words_exact(
    grid: &Grid,
    group: &Arc<FiniteGroup>,
    window: &[Cell],
    horizon: usize,
    m: u32,
    budget: u128,
) -> Result<WordSet> {
    let cone = Cone::new(grid, window, horizon, m)?;
    let required = cone.assignments(group.order());
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let total = required as u64;
    let order = group.order() as u64;
    let size = cone.cells.len();
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || (HashMap::new(), Vec::with_capacity(size), Vec::with_capacity(size)),
            |(mut map, mut gamma, mut scratch): (HashMap<Vec<u32>, u64>, Vec<u32>, Vec<u32>), code| {
                let phase = (code % u64::from(m)) as u32;
                let mut rest = code / u64::from(m);
                gamma.clear();
                for _ in 0..size {
                    gamma.push((rest % order) as u32);
                    rest /= order;
                }
                let w = cone.word(group, &mut gamma, &mut scratch, phase);
                *map.entry(w).or_insert(0) += 1;
                (map, gamma, scratch)
            },
        )
        .map(|(map, _, _)| map)
        .reduce(HashMap::new, merge);
    Ok(WordSet::from_counts(&cone, CountMode::Exact, total, counts))
}

fn merge(mut a: HashMap<Vec<u32>, u64>, b: HashMap<Vec<u32>, u64>) -> HashMap<Vec<u32>, u64> {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Draws `samples` uniform assignments on the dependency set. The value of
/// grid cell `i` in sample `s` is slot `i` of stream `s`; the initial phase
/// is slot `grid.len()`.
pub fn count_words_sampled(
    grid: &Grid,
    group: &Arc<FiniteGroup>,
    window: &[Cell],
    horizon: usize,
    m: u32,
    samples: u64,
    seed: u64,
) -> Result<WordSet> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let cone = Cone::new(grid, window, horizon, m)?;
    let order = group.order() as u64;
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || (HashMap::new(), Vec::new(), Vec::new()),
            |(mut map, mut gamma, mut scratch): (HashMap<Vec<u32>, u64>, Vec<u32>, Vec<u32>), s| {
                let mut stream = SampleStream::new(seed, s);
                gamma.clear();
                for &g in &cone.cells {
                    stream.seek(g as u64);
                    gamma.push(stream.below(order) as u32);
                }
                stream.seek(grid.len() as u64);
                let phase = stream.below(u64::from(m)) as u32;
                let w = cone.word(group, &mut gamma, &mut scratch, phase);
                *map.entry(w).or_insert(0) += 1;
                (map, gamma, scratch)
            },
        )
        .map(|(map, _, _)| map)
        .reduce(HashMap::new, merge);
    Ok(WordSet::from_counts(&cone, CountMode::Sampled, samples, counts))
}
