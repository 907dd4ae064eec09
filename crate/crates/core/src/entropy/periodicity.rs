use std::collections::BTreeSet;

use crate::automaton::FiniteGroup;
use crate::error::{Error, Result};
use crate::lattice::Cell;
use crate::tiles::{path_components, Grid};

/// Smallest `p ≤ bound` with `(T^p y)_F = y_F` for every assignment `y`, or
/// `None` when no such `p` exists. Refuses grids with escaping components.
///
/// Every assignment on the forward closure of the window is simulated; the
/// closure is finite because all path components are.
pub fn periodicity_check(
    grid: &Grid,
    group: &FiniteGroup,
    window: &[Cell],
    bound: usize,
    budget: u128,
) -> Result<Option<usize>> {
    let escaping = path_components(grid).iter().filter(|c| c.escapes_window).count();
    if escaping > 0 {
        return Err(Error::EscapingComponent(escaping));
    }
    let forward = grid.forward_map();
    let mut closure = BTreeSet::new();
    let mut stack = Vec::new();
    for &c in window {
        stack.push(grid.check_inside(c)?);
    }
    while let Some(i) = stack.pop() {
        if closure.insert(i) {
            if let Some(j) = forward[i] {
                stack.push(j);
            }
        }
    }
    let cells: Vec<usize> = closure.into_iter().collect();
    let local = |g: usize| cells.binary_search(&g).expect("closed under successors");
    let succ: Vec<Option<usize>> = cells.iter().map(|&g| forward[g].map(local)).collect();
    let win: Vec<usize> = window.iter().map(|&c| local(grid.index(c).expect("inside"))).collect();

    let order = group.order() as u128;
    let required = order.checked_pow(cells.len() as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    // periodic[p] stays true while every assignment returns at step p.
    let mut periodic = vec![true; bound + 1];
    let mut gamma = vec![0u32; cells.len()];
    let mut next = gamma.clone();
    for code in 0..required {
        let mut rest = code;
        for g in gamma.iter_mut() {
            *g = (rest % order) as u32;
            rest /= order;
        }
        let start: Vec<u32> = win.iter().map(|&i| gamma[i]).collect();
        for still_periodic in periodic.iter_mut().skip(1) {
            for i in 0..gamma.len() {
                next[i] = match succ[i] {
                    Some(j) => group.op(gamma[i], gamma[j]),
                    None => gamma[i],
                };
            }
            std::mem::swap(&mut gamma, &mut next);
            if *still_periodic && win.iter().zip(&start).any(|(&i, &s)| gamma[i] != s) {
                *still_periodic = false;
            }
        }
    }
    Ok((1..=bound).find(|&p| periodic[p]))
}
