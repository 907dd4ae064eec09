//! Entropy tooling for the path-XOR automaton.
//!
//! - Exact and sampled counting of space-time words over a window.
//! - Least-squares entropy-rate fits.
//! - Periodicity of the dynamics on finite path components.
//! - Monte Carlo experiments under the uniform Bernoulli measure: plug-in
//!   measure entropy and the survival of long valid paths.

mod measure;
mod periodicity;
mod rate;
mod words;

pub use measure::{measure_entropy_estimate, valid_path_survival, MeasureEstimate, SurvivalRow, SurvivalTable};
use num_rational::Ratio;
pub use periodicity::periodicity_check;
pub use rate::{entropy_rate, EntropyEstimate};
pub use words::{count_words_exact, count_words_sampled, CountMode, WordSet, DEFAULT_BUDGET};

/// Square-filling constants: the filled fraction `ε`, the bound `M = ⌈1/ε⌉`
/// on disjoint forward-infinite valid paths, and the sharper bound 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constants {
    pub epsilon: Ratio<u64>,
    pub m: u64,
    pub refined: u64,
}

/// A path of length below `4^(n+1)` fills a `2^n` square inside a
/// `2^(n+3)`-sided square centred at its start; `ε` is that density.
pub fn report_constants() -> Constants {
    let n = 1u32;
    let epsilon = Ratio::new(4u64.pow(n), 4u64.pow(n + 3));
    let inv = epsilon.recip();
    let m = inv.ceil().to_integer();
    Constants { epsilon, m, refined: 4 }
}
