//! Walks on ordinals and the finite-condition posets built from them.
//!
//! The crate is organised bottom-up:
//!
//! * [`ordinal`]: Cantor-normal-form ordinals below ε₀, notation, sweeps.
//! * [`csequence`]: C-sequence families and their square-sequence validator.
//! * [`walk`]: upper/lower traces and the memoized `ρ` function.
//! * [`table`] and [`lemmas`]: bulk `ρ` tables and the property suite run over them.
//! * [`poset`]: conditions of `Q`, `P` and their restrictions, compatibility,
//!   amalgamation, projections.
//! * [`deltasys`]: Δ-system extraction, ρ-gap refinement, the Knaster harness.
//! * [`tree`]: finite generic filters and the leveled tree they induce.

pub mod csequence;
pub mod deltasys;
pub mod error;
pub mod lemmas;
pub mod ordinal;
pub mod par;
pub mod poset;
pub mod table;
pub mod tree;
pub mod walk;

pub use error::{Error, Result};
pub use ordinal::{ord, Ordinal};
