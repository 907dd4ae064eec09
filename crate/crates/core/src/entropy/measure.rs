use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::rate::entropy_rate;
use crate::automaton::FiniteGroup;
use crate::error::{Error, Result};
use crate::rng::SampleStream;
use crate::tiles::{DirectedTileSet, Grid, Topology, Validity};

/// Plug-in estimates of the block entropies `H_k`, `k = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub tileset: String,
    pub group: String,
    pub window: (usize, usize),
    pub horizon: usize,
    pub samples: u64,
    pub seed: u64,
    /// Plug-in `H_k` in nats, from the first `k` steps of each sampled word.
    pub block_entropies: Vec<f64>,
    /// `H_n / n`.
    pub per_step: f64,
    /// Least-squares slope of `H_k` against `k`; free of the constant
    /// contributed by the tiles and initial values.
    pub slope: f64,
    /// Distinct full-length words observed.
    pub distinct_words: usize,
    pub note: String,
}

fn plug_in(counts: &HashMap<&[u32], u64>, total: u64) -> f64 {
    // Summed in a fixed order so results are bit-for-bit reproducible.
    let mut c: Vec<u64> = counts.values().copied().collect();
    c.sort_unstable();
    let n = total as f64;
    c.into_iter()
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Samples tiles and group values i.i.d. uniformly on a patch large enough
/// to hold the window's dependency cone and its validity neighborhoods,
/// then estimates the entropy of the window's space-time words.
pub fn measure_entropy_estimate(
    tileset: &Arc<DirectedTileSet>,
    group: &Arc<FiniteGroup>,
    window: (usize, usize),
    horizon: usize,
    samples: u64,
    seed: u64,
) -> Result<MeasureEstimate> {
    if horizon < 3 {
        return Err(Error::TooFewPoints { need: 3, got: horizon });
    }
    if samples == 0 || window.0 == 0 || window.1 == 0 {
        return Err(Error::InvalidArgument("need a nonempty window and at least one sample".into()));
    }
    let margin = horizon + tileset.radius();
    let (pw, ph, ox, oy) = if tileset.dimension() == 1 {
        if window.1 != 1 {
            return Err(Error::InvalidArgument("one-dimensional tile sets need a window of height 1".into()));
        }
        (window.0 + 2 * margin, 1, margin, 0)
    } else {
        (window.0 + 2 * margin, window.1 + 2 * margin, margin, margin)
    };
    let cells = pw * ph;
    let window_idx: Vec<usize> =
        (0..window.1).flat_map(|y| (0..window.0).map(move |x| (oy + y) * pw + ox + x)).collect();
    let n_tiles = tileset.len() as u64;
    let order = group.order() as u64;

    let words: Vec<Vec<u32>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut stream = SampleStream::new(seed, s);
            let tiles: Vec<u32> = (0..cells).map(|_| stream.below(n_tiles) as u32).collect();
            let gamma: Vec<u32> = (0..cells).map(|_| stream.below(order) as u32).collect();
            let grid = Grid::new(tileset.clone(), Topology::Window, pw, ph, tiles).expect("sampled ids are in range");
            sample_word(&grid, group, &window_idx, gamma, horizon)
        })
        .collect();

    let w = window_idx.len();
    let mut block_entropies = Vec::with_capacity(horizon);
    let mut distinct_words = 0;
    for k in 1..=horizon {
        let len = w + k * w;
        let mut counts: HashMap<&[u32], u64> = HashMap::new();
        for word in &words {
            *counts.entry(&word[..len]).or_insert(0) += 1;
        }
        block_entropies.push(plug_in(&counts, samples));
        distinct_words = counts.len();
    }
    let points: Vec<(f64, f64)> = block_entropies.iter().enumerate().map(|(k, &h)| ((k + 1) as f64, h)).collect();
    let fit = entropy_rate(&points)?;
    let possible = (n_tiles as f64).powi(w as i32) * (order as f64).powi((w * horizon) as i32);
    let note = if (distinct_words as f64) * 10.0 > samples as f64 {
        format!("{distinct_words} distinct words from {samples} samples: the plug-in estimate is biased low")
    } else {
        format!("{distinct_words} distinct words from {samples} samples ({possible:.3e} possible)")
    };
    Ok(MeasureEstimate {
        tileset: tileset.name().to_string(),
        group: group.name().to_string(),
        window,
        horizon,
        samples,
        seed,
        per_step: block_entropies[horizon - 1] / horizon as f64,
        slope: fit.slope,
        block_entropies,
        distinct_words,
        note,
    })
}

/// Word layout: window tiles, then window values for each step.
fn sample_word(grid: &Grid, group: &FiniteGroup, window: &[usize], mut gamma: Vec<u32>, horizon: usize) -> Vec<u32> {
    // Cone of cells reachable within horizon − 1 valid steps.
    let mut forward: HashMap<usize, Option<usize>> = HashMap::new();
    let mut frontier: Vec<usize> = window.to_vec();
    let mut cone: Vec<usize> = window.to_vec();
    for _ in 1..horizon {
        let mut next = Vec::new();
        for &i in &frontier {
            if forward.contains_key(&i) {
                continue;
            }
            let f = if grid.validity(i) == Validity::Valid { grid.successor(i) } else { None };
            forward.insert(i, f);
            if let Some(j) = f {
                if !cone.contains(&j) {
                    cone.push(j);
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut word: Vec<u32> = window.iter().map(|&i| grid.cells[i]).collect();
    let mut scratch: Vec<(usize, u32)> = Vec::with_capacity(cone.len());
    for t in 0..horizon {
        word.extend(window.iter().map(|&i| gamma[i]));
        if t + 1 == horizon {
            break;
        }
        scratch.clear();
        for &i in &cone {
            if let Some(Some(j)) = forward.get(&i) {
                scratch.push((i, group.op(gamma[i], gamma[*j])));
            }
        }
        for &(i, v) in &scratch {
            gamma[i] = v;
        }
    }
    word
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub threshold: usize,
    pub window: usize,
    pub probability: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalTable {
    pub tileset: String,
    pub rows: Vec<SurvivalRow>,
}

impl SurvivalTable {
    pub fn probability(&self, window: usize, threshold: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.window == window && r.threshold == threshold).map(|r| r.probability)
    }
}

/// For each window size, the fraction of uniformly random tile patches in
/// which some valid path starting in the central quarter has at least `L`
/// cells. Sample `s` of window `w` reads stream `(w << 40) | s`.
pub fn valid_path_survival(
    tileset: &Arc<DirectedTileSet>,
    windows: &[usize],
    thresholds: &[usize],
    samples: u64,
    seed: u64,
) -> Result<SurvivalTable> {
    if samples == 0 || samples >= 1 << 40 {
        return Err(Error::InvalidArgument("sample count must lie in [1, 2^40)".into()));
    }
    let mut thresholds = thresholds.to_vec();
    thresholds.sort_unstable();
    thresholds.dedup();
    let mut rows = Vec::new();
    for &w in windows {
        if w < 2 {
            return Err(Error::InvalidArgument("survival windows must be at least 2 cells wide".into()));
        }
        let h = if tileset.dimension() == 1 { 1 } else { w };
        let longest: Vec<usize> = (0..samples)
            .into_par_iter()
            .map(|s| {
                let mut stream = SampleStream::new(seed, ((w as u64) << 40) | s);
                let n = tileset.len() as u64;
                let tiles = (0..w * h).map(|_| stream.below(n) as u32).collect();
                let grid = Grid::new(tileset.clone(), Topology::Window, w, h, tiles).expect("ids in range");
                longest_central_path(&grid)
            })
            .collect();
        for &l in &thresholds {
            let hits = longest.iter().filter(|&&x| x >= l).count() as u64;
            rows.push(SurvivalRow {
                threshold: l,
                window: w,
                probability: hits as f64 / samples as f64,
                hits,
                samples,
                seed,
            });
        }
    }
    Ok(SurvivalTable { tileset: tileset.name().to_string(), rows })
}

/// Length of the longest valid path whose first cell lies in the central
/// quarter; paths that close into a cycle count as the grid size.
pub(crate) fn longest_central_path(grid: &Grid) -> usize {
    const UNSEEN: usize = usize::MAX;
    const ACTIVE: usize = usize::MAX - 1;
    let (w, h) = (grid.width, grid.height);
    let cap = grid.len();
    let mut length = vec![UNSEEN; grid.len()];
    let (x0, x1) = (w / 4, (3 * w).div_ceil(4).max(w / 4 + 1));
    let (y0, y1) = if h == 1 { (0, 1) } else { (h / 4, (3 * h).div_ceil(4).max(h / 4 + 1)) };
    let mut best = 0;
    for y in y0..y1 {
        for x in x0..x1 {
            let start = y * w + x;
            let mut stack = Vec::new();
            let mut cur = Some(start);
            // Walk until a resolved cell, an invalid cell, or the edge.
            let tail = loop {
                let Some(i) = cur else { break 0 };
                match length[i] {
                    UNSEEN => {}
                    ACTIVE => break cap,
                    known => break known,
                }
                if grid.validity(i) != Validity::Valid {
                    length[i] = 0;
                    break 0;
                }
                length[i] = ACTIVE;
                stack.push(i);
                cur = grid.successor(i);
            };
            let mut acc = tail;
            for &i in stack.iter().rev() {
                acc = if tail == cap { cap } else { (acc + 1).min(cap) };
                length[i] = acc;
            }
            best = best.max(length[start]);
        }
    }
    best
}
