//! Valid paths and the weak components of the path graph.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Grid, Validity};
use crate::error::Result;
use crate::lattice::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    LeftWindow,
    HitInvalid,
    CycleDetected,
    MaxLength,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathTrace {
    pub cells: Vec<Cell>,
    pub termination: Termination,
}

/// Follows forward directions from `start` while cells are valid.
pub fn trace_path(grid: &Grid, start: Cell, max_length: usize) -> Result<PathTrace> {
    let mut cur = grid.check_inside(start)?;
    let mut seen = HashSet::new();
    let mut cells = Vec::new();
    let termination = loop {
        if cells.len() >= max_length {
            break Termination::MaxLength;
        }
        if !seen.insert(cur) {
            break Termination::CycleDetected;
        }
        if grid.validity(cur) != Validity::Valid {
            break Termination::HitInvalid;
        }
        cells.push(grid.cell(cur));
        match grid.successor(cur) {
            Some(next) => cur = next,
            None => break Termination::LeftWindow,
        }
    };
    Ok(PathTrace { cells, termination })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub cells: Vec<Cell>,
    pub escapes_window: bool,
}

/// Weakly connected components of the graph with an edge from every valid
/// cell to its in-grid successor.
///
/// A component escapes the window when one of its paths runs off the grid
/// or into a cell whose validity depends on cells outside it.
pub fn path_components(grid: &Grid) -> Vec<Component> {
    let n = grid.len();
    let validity: Vec<Validity> = (0..n).map(|i| grid.validity(i)).collect();
    let forward: Vec<Option<usize>> =
        (0..n).map(|i| if validity[i] == Validity::Valid { grid.successor(i) } else { None }).collect();
    let mut backward: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in forward.iter().enumerate() {
        if let Some(j) = *f {
            backward[j].push(i);
        }
    }
    let open_end = |i: usize| match validity[i] {
        Validity::Valid => forward[i].is_none(),
        Validity::Unknown => !backward[i].is_empty(),
        Validity::Invalid => false,
    };

    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut members = Vec::new();
        let mut escapes = false;
        while let Some(i) = queue.pop_front() {
            members.push(i);
            escapes |= open_end(i);
            for j in forward[i].iter().chain(&backward[i]) {
                if !seen[*j] {
                    seen[*j] = true;
                    queue.push_back(*j);
                }
            }
        }
        members.sort_unstable();
        out.push(Component { cells: members.into_iter().map(|i| grid.cell(i)).collect(), escapes_window: escapes });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiles::{DirectedTileSet, Topology};
    use proptest::prelude::*;

    fn simple(w: usize, h: usize, cells: Vec<u32>, topology: Topology) -> Grid {
        Grid::new(DirectedTileSet::by_name("simple2").unwrap(), topology, w, h, cells).unwrap()
    }

    #[test]
    fn straight_row_leaves_window() {
        let g = simple(5, 1, vec![0; 5], Topology::Window);
        let p = trace_path(&g, Cell::new(0, 0), 100).unwrap();
        assert_eq!(p.cells, (0..5).map(|x| Cell::new(x, 0)).collect::<Vec<_>>());
        assert_eq!(p.termination, Termination::LeftWindow);
    }

    #[test]
    fn torus_row_cycles() {
        let g = simple(5, 1, vec![0; 5], Topology::Torus);
        let p = trace_path(&g, Cell::new(0, 0), 100).unwrap();
        assert_eq!(p.cells.len(), 5);
        assert_eq!(p.termination, Termination::CycleDetected);
        let p = trace_path(&g, Cell::new(0, 0), 3).unwrap();
        assert_eq!(p.termination, Termination::MaxLength);
        assert!(trace_path(&g, Cell::new(5, 0), 3).is_err());
    }

    #[test]
    fn stop_tile_ends_path() {
        let g =
            Grid::new(DirectedTileSet::by_name("stop2").unwrap(), Topology::Window, 4, 1, vec![0, 0, 2, 0]).unwrap();
        let p = trace_path(&g, Cell::new(0, 0), 100).unwrap();
        assert_eq!(p.cells.len(), 2);
        assert_eq!(p.termination, Termination::HitInvalid);
    }

    #[test]
    fn rows_are_escaping_components() {
        let comps = path_components(&simple(3, 3, vec![0; 9], Topology::Window));
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.escapes_window && c.cells.len() == 3));
    }

    fn union_find_components(g: &Grid) -> usize {
        let mut parent: Vec<usize> = (0..g.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut c = i;
            while p[c] != r {
                let nx = p[c];
                p[c] = r;
                c = nx;
            }
            r
        }
        for i in 0..g.len() {
            if g.validity(i) == Validity::Valid {
                if let Some(j) = g.successor(i) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        (0..g.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    proptest! {
        #[test]
        fn components_match_union_find(
            w in 1usize..=8, h in 1usize..=8, seed in any::<u64>(), torus in any::<bool>(), stop in any::<bool>(),
        ) {
            let name = if stop { "stop2" } else { "simple2" };
            let set = DirectedTileSet::by_name(name).unwrap();
            let k = set.len() as u64;
            let mut s = seed;
            let cells = (0..w * h).map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % k) as u32
            }).collect();
            let topo = if torus { Topology::Torus } else { Topology::Window };
            let g = Grid::new(set, topo, w, h, cells).unwrap();
            let comps = path_components(&g);
            prop_assert_eq!(comps.len(), union_find_components(&g));
            let total: usize = comps.iter().map(|c| c.cells.len()).sum();
            prop_assert_eq!(total, w * h);
        }
    }
}
