//! C-sequences `α ↦ C_α` and the queries a walk needs from them.

mod club;
mod family;
mod file;
mod validate;

pub use club::{Club, Ladder, SEGMENT_LIMIT};
pub use family::{
    CSequence, CanonicalFamily, CofinalityClass, FamilySpec, FullIntervalFamily, OverlayFamily,
    TwoTierSquare,
};
pub use file::{load_family_file, parse_family_spec, parse_family_text};
pub use validate::{validate_family, FamilyClause, FamilyReport, FamilyViolation};
