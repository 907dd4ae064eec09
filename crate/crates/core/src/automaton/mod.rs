//! The path-XOR automaton.
//!
//! Each valid cell adds the group value of the cell its tile points at:
//! `γ_n ← γ_n + γ_{n+d(x_n)}`, synchronously. Invalid cells, and cells whose
//! successor lies outside a window-topology grid, keep their value. The
//! sliced variant performs that update once every `m` steps, driven by a
//! global phase counter.

mod group;

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use group::FiniteGroup;

use crate::error::{Error, Result};
use crate::lattice::Cell;
use crate::tiles::Grid;

/// Tiles together with one group element per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub grid: Grid,
    pub group: Arc<FiniteGroup>,
    pub gamma: Vec<u32>,
    pub phase: u32,
    pub m: u32,
}

impl Configuration {
    pub fn new(grid: Grid, group: Arc<FiniteGroup>, gamma: Vec<u32>) -> Result<Self> {
        Configuration::sliced(grid, group, gamma, 0, 1)
    }

    pub fn sliced(grid: Grid, group: Arc<FiniteGroup>, gamma: Vec<u32>, phase: u32, m: u32) -> Result<Self> {
        if gamma.len() != grid.len() {
            return Err(Error::Schema(format!("expected {} group values, got {}", grid.len(), gamma.len())));
        }
        if let Some(&g) = gamma.iter().find(|&&g| g as usize >= group.order()) {
            return Err(Error::Schema(format!("group value {g} outside {}", group.name())));
        }
        if m == 0 || phase >= m {
            return Err(Error::Schema(format!("phase {phase} must lie in [0, {m})")));
        }
        Ok(Configuration { grid, group, gamma, phase, m })
    }

    pub fn identity(grid: Grid, group: Arc<FiniteGroup>) -> Self {
        let n = grid.len();
        Configuration { grid, group, gamma: vec![0; n], phase: 0, m: 1 }
    }
}

/// Precomputed update structure for a fixed tile grid.
#[derive(Debug, Clone)]
pub struct Automaton {
    pub group: Arc<FiniteGroup>,
    forward: Vec<Option<usize>>,
}

impl Automaton {
    pub fn new(grid: &Grid, group: Arc<FiniteGroup>) -> Self {
        Automaton { group, forward: grid.forward_map() }
    }

    pub fn forward(&self) -> &[Option<usize>] {
        &self.forward
    }

    /// One synchronous update from `src` into `dst`.
    pub fn step_into(&self, src: &[u32], dst: &mut [u32]) {
        for (i, out) in dst.iter_mut().enumerate() {
            *out = match self.forward[i] {
                Some(j) => self.group.op(src[i], src[j]),
                None => src[i],
            };
        }
    }

    pub fn step_gamma(&self, gamma: &[u32]) -> Vec<u32> {
        let mut out = vec![0; gamma.len()];
        self.step_into(gamma, &mut out);
        out
    }
}

/// One update of the plain automaton.
pub fn step(config: &Configuration) -> Configuration {
    let a = Automaton::new(&config.grid, config.group.clone());
    Configuration { gamma: a.step_gamma(&config.gamma), ..config.clone() }
}

/// One update of the sliced automaton: the plain update happens only in
/// phase 0; the phase always advances modulo `m`.
pub fn step_sliced(config: &Configuration) -> Configuration {
    let mut next = if config.phase == 0 { step(config) } else { config.clone() };
    next.phase = (config.phase + 1) % config.m;
    next
}

/// Builds `x` with the same tiles such that `step(x)` agrees with `target`
/// on `window`. Group values are the identity outside the window and are
/// solved successor-first inside it: `γ(x)_n = γ(y)_n − γ(x)_{n+d(x_n)}`.
pub fn preimage(target: &Configuration, window: &[Cell]) -> Result<Configuration> {
    let grid = &target.grid;
    let group = &target.group;
    let forward = grid.forward_map();
    let mut in_window = vec![false; grid.len()];
    for &c in window {
        in_window[grid.check_inside(c)?] = true;
    }
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Todo,
        Active,
        Done,
    }
    let mut state = vec![State::Todo; grid.len()];
    let mut gamma = vec![0u32; grid.len()];
    for &c in window {
        let root = grid.index(c).expect("checked");
        if state[root] == State::Done {
            continue;
        }
        // Walk forward until a solved cell or the end of the chain in F.
        let mut chain = Vec::new();
        let mut cur = root;
        loop {
            match state[cur] {
                State::Done => break,
                State::Active => {
                    let c = grid.cell(cur);
                    return Err(Error::CyclicDependency { x: c.x, y: c.y });
                }
                State::Todo => {}
            }
            state[cur] = State::Active;
            chain.push(cur);
            match forward[cur] {
                Some(next) if in_window[next] => cur = next,
                _ => break,
            }
        }
        for &i in chain.iter().rev() {
            gamma[i] = match forward[i] {
                Some(next) if in_window[next] => group.sub(target.gamma[i], gamma[next]),
                _ => target.gamma[i],
            };
            state[i] = State::Done;
        }
    }
    Ok(Configuration { gamma, ..target.clone() })
}

/// Cells reachable from `window` by at most `horizon − 1` valid forward
/// steps: the cells whose initial values determine the window's word.
pub fn dependency_set(grid: &Grid, window: &[Cell], horizon: usize) -> Result<Vec<Cell>> {
    let forward = grid.forward_map();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &c in window {
        let i = grid.check_inside(c)?;
        if seen.insert(i) {
            queue.push_back((i, 0usize));
        }
    }
    while let Some((i, depth)) = queue.pop_front() {
        if depth + 1 >= horizon {
            continue;
        }
        if let Some(j) = forward[i] {
            if seen.insert(j) {
                queue.push_back((j, depth + 1));
            }
        }
    }
    Ok(seen.into_iter().map(|i| grid.cell(i)).collect())
}

/// The window restrictions of the first `horizon` iterates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceTimeWord {
    pub window: Vec<Cell>,
    pub horizon: usize,
    pub tiles: Vec<u32>,
    /// `gamma[t][k]`: value at `window[k]` after `t` steps.
    pub gamma: Vec<Vec<u32>>,
    /// Phase after `t` steps.
    pub phases: Vec<u32>,
}

/// Records the window's word under the (possibly sliced) dynamics.
pub fn trajectory_word(config: &Configuration, window: &[Cell], horizon: usize) -> Result<SpaceTimeWord> {
    let idx: Vec<usize> = window.iter().map(|&c| config.grid.check_inside(c)).collect::<Result<_>>()?;
    let automaton = Automaton::new(&config.grid, config.group.clone());
    let mut gamma = config.gamma.clone();
    let mut scratch = vec![0; gamma.len()];
    let mut phase = config.phase;
    let mut word = SpaceTimeWord {
        window: window.to_vec(),
        horizon,
        tiles: idx.iter().map(|&i| config.grid.cells[i]).collect(),
        gamma: Vec::with_capacity(horizon),
        phases: Vec::with_capacity(horizon),
    };
    for t in 0..horizon {
        word.gamma.push(idx.iter().map(|&i| gamma[i]).collect());
        word.phases.push(phase);
        if t + 1 == horizon {
            break;
        }
        if phase == 0 {
            automaton.step_into(&gamma, &mut scratch);
            std::mem::swap(&mut gamma, &mut scratch);
        }
        phase = (phase + 1) % config.m;
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Variant;
    use crate::tiles::{build_bxy, DirectedTileSet, Orient, Topology};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2).unwrap())
    }

    fn chain(gamma: Vec<u32>) -> Configuration {
        let g = Grid::uniform(DirectedTileSet::by_name("simple2").unwrap(), Topology::Window, 3, 1, 0).unwrap();
        Configuration::new(g, z2(), gamma).unwrap()
    }

    fn cells(v: &[(i64, i64)]) -> Vec<Cell> {
        v.iter().map(|&p| Cell::from(p)).collect()
    }

    #[test]
    fn chain_step() {
        assert_eq!(step(&chain(vec![1, 1, 0])).gamma, vec![0, 1, 0]);
    }

    #[test]
    fn invalid_cells_are_fixed() {
        let g = Grid::uniform(DirectedTileSet::by_name("stop2").unwrap(), Topology::Torus, 4, 3, 2).unwrap();
        let gamma: Vec<u32> = (0..12).map(|i| i % 2).collect();
        let c = Configuration::new(g, z2(), gamma.clone()).unwrap();
        assert_eq!(step(&c).gamma, gamma);
    }

    #[test]
    fn sliced_steps() {
        let c = chain(vec![1, 1, 0]);
        assert_eq!(step_sliced(&c).gamma, step(&c).gamma);
        let s = Configuration { phase: 1, m: 3, ..c.clone() };
        let n = step_sliced(&s);
        assert_eq!((n.gamma.clone(), n.phase), (s.gamma.clone(), 2));
    }

    #[test]
    fn preimage_examples() {
        let zero = chain(vec![0, 0, 0]);
        let p = preimage(&zero, &cells(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(p.gamma, vec![0, 0, 0]);
        let target = chain(vec![1, 0, 1]);
        let f = cells(&[(0, 0), (1, 0)]);
        let p = preimage(&target, &f).unwrap();
        // b = 0 (successor outside F), a = 1 − 0.
        assert_eq!(p.gamma, vec![1, 0, 0]);
        assert_eq!(&step(&p).gamma[..2], &[1, 0]);
    }

    #[test]
    fn preimage_refuses_cycles() {
        let g = Grid::uniform(DirectedTileSet::by_name("simple2").unwrap(), Topology::Torus, 3, 1, 0).unwrap();
        let c = Configuration::new(g, z2(), vec![1, 0, 1]).unwrap();
        let all = cells(&[(0, 0), (1, 0), (2, 0)]);
        assert!(matches!(preimage(&c, &all), Err(Error::CyclicDependency { .. })));
        // Breaking the loop by leaving a cell out of F works.
        assert!(preimage(&c, &all[..2]).is_ok());
    }

    #[test]
    fn preimage_on_constructed_patch() {
        let grid = build_bxy(2, Orient::NE, Variant::A).unwrap();
        let group = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f: Vec<Cell> = (2..5).flat_map(|y| (2..5).map(move |x| Cell::new(x, y))).collect();
        for _ in 0..100 {
            let gamma = (0..grid.len()).map(|_| rng.gen_range(0..3)).collect();
            let target = Configuration::new(grid.clone(), group.clone(), gamma).unwrap();
            let x = preimage(&target, &f).unwrap();
            let y = step(&x);
            for c in &f {
                let i = grid.index(*c).unwrap();
                assert_eq!(y.gamma[i], target.gamma[i]);
            }
        }
    }

    #[test]
    fn dependency_examples() {
        let g = Grid::uniform(DirectedTileSet::by_name("simple2").unwrap(), Topology::Window, 5, 1, 0).unwrap();
        let f = cells(&[(0, 0)]);
        assert_eq!(dependency_set(&g, &f, 3).unwrap(), cells(&[(0, 0), (1, 0), (2, 0)]));
        assert_eq!(dependency_set(&g, &f, 1).unwrap(), f);
        let s = Grid::uniform(DirectedTileSet::by_name("stop2").unwrap(), Topology::Window, 5, 1, 2).unwrap();
        assert_eq!(dependency_set(&s, &f, 9).unwrap(), f);
    }

    #[test]
    fn word_examples() {
        let c = chain(vec![1, 1, 0]);
        let a = cells(&[(0, 0)]);
        let w = trajectory_word(&c, &a, 3).unwrap();
        assert_eq!(w.gamma, vec![vec![1], vec![0], vec![1]]);
        assert_eq!(trajectory_word(&c, &a, 1).unwrap().gamma, vec![vec![1]]);
        let s = Grid::uniform(DirectedTileSet::by_name("stop2").unwrap(), Topology::Window, 3, 1, 2).unwrap();
        let c = Configuration::new(s, z2(), vec![1, 0, 1]).unwrap();
        let w = trajectory_word(&c, &a, 5).unwrap();
        assert!(w.gamma.iter().all(|g| g == &vec![1]));
    }

    fn random_config(seed: u64, w: usize, h: usize, group: &str, torus: bool) -> Configuration {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = DirectedTileSet::by_name("stop2").unwrap();
        let cells = (0..w * h).map(|_| rng.gen_range(0..3)).collect();
        let topo = if torus { Topology::Torus } else { Topology::Window };
        let grid = Grid::new(set, topo, w, h, cells).unwrap();
        let group: Arc<FiniteGroup> = Arc::new(group.parse().unwrap());
        let gamma = (0..w * h).map(|_| rng.gen_range(0..group.order() as u32)).collect();
        Configuration::new(grid, group, gamma).unwrap()
    }

    proptest! {
        #[test]
        fn tiles_never_change(seed in any::<u64>(), steps in 1usize..6) {
            let c = random_config(seed, 5, 4, "Zm:3", seed % 2 == 0);
            let mut d = c.clone();
            for _ in 0..steps {
                d = step(&d);
            }
            prop_assert_eq!(&d.grid, &c.grid);
        }

        #[test]
        fn step_is_linear(seed in any::<u64>()) {
            let c = random_config(seed, 6, 5, "product:[Z2,Zm:3]", true);
            let d = random_config(seed ^ 0x9e37, 6, 5, "product:[Z2,Zm:3]", true);
            let d = Configuration { grid: c.grid.clone(), ..d };
            let sum: Vec<u32> = c.gamma.iter().zip(&d.gamma).map(|(&a, &b)| c.group.op(a, b)).collect();
            let s = Configuration { gamma: sum, ..c.clone() };
            let lhs = step(&s).gamma;
            let (sc, sd) = (step(&c).gamma, step(&d).gamma);
            let rhs: Vec<u32> = sc.iter().zip(&sd).map(|(&a, &b)| c.group.op(a, b)).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn m_sliced_steps_equal_one_step(seed in any::<u64>(), m in 1u32..=8) {
            let c = random_config(seed, 5, 5, "Zm:4", true);
            let mut s = Configuration { m, ..c.clone() };
            for _ in 0..m {
                s = step_sliced(&s);
            }
            prop_assert_eq!(s.phase, 0);
            prop_assert_eq!(s.gamma, step(&c).gamma);
        }

        #[test]
        fn step_is_local(seed in any::<u64>(), cell in 0usize..30, other in 0usize..30, value in 0u32..5) {
            let c = random_config(seed, 6, 5, "Zm:5", seed % 3 == 0);
            let succ = c.grid.successor(cell);
            prop_assume!(other != cell && Some(other) != succ);
            let mut d = c.clone();
            d.gamma[other] = value;
            prop_assert_eq!(step(&c).gamma[cell], step(&d).gamma[cell]);
        }

        #[test]
        fn preimage_is_sound(seed in any::<u64>(), x0 in 0i64..4, y0 in 0i64..4) {
            let c = random_config(seed, 7, 6, "Zm:3", false);
            let f: Vec<Cell> = (y0..y0 + 3).flat_map(|y| (x0..x0 + 3).map(move |x| Cell::new(x, y))).collect();
            let x = preimage(&c, &f).unwrap();
            prop_assert_eq!(&x.grid, &c.grid);
            let y = step(&x);
            for cell in &f {
                let i = c.grid.index(*cell).unwrap();
                prop_assert_eq!(y.gamma[i], c.gamma[i]);
            }
            for i in 0..c.grid.len() {
                if !f.contains(&c.grid.cell(i)) {
                    prop_assert_eq!(x.gamma[i], 0);
                }
            }
        }

        #[test]
        fn word_depends_only_on_dependency_set(seed in any::<u64>(), horizon in 1usize..6) {
            let c = random_config(seed, 6, 6, "Z2", seed % 2 == 1);
            let f = vec![Cell::new(2, 3), Cell::new(3, 3)];
            let dep = dependency_set(&c.grid, &f, horizon).unwrap();
            let mut d = c.clone();
            for i in 0..d.gamma.len() {
                if !dep.contains(&d.grid.cell(i)) {
                    d.gamma[i] ^= 1;
                }
            }
            prop_assert_eq!(trajectory_word(&c, &f, horizon).unwrap(), trajectory_word(&d, &f, horizon).unwrap());
        }
    }
}
