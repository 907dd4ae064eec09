//! Discrete Hilbert paths and the substitution system they induce.
//!
//! Paths live in the Cartesian plane anchored at the origin, `y` pointing
//! north. The four variants are dihedral images of the basic path
//! `(0,0) → (0,1) → (1,1) → (1,0)`; see [`Variant::transform`].

mod path;
mod subst;

pub use path::{
    basic_path, check_square_fill, hilbert_path, quadrant_offset, square_fill_report, SquareFillReport, Variant,
};
pub use subst::{
    admissible_blocks, alphabet, alphabet_from_paths, derive, iterate, substitute, Derivation, SubstGrid, SubstTile,
};
