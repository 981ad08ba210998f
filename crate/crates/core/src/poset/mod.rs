//! Finite conditions of `Q`, `P` and their restrictions.

mod amalgam;
mod compat;
mod condition;
mod counterexample;
mod project;
mod sample;
mod validate;
mod variant;

pub use amalgam::{amalgamate_delta_pair, isomorphic_fixing};
pub use compat::{
    compatible, forced_closure, Compatibility, ForcedStep, IncompatibilityCertificate, Obstruction,
    CLOSURE_BUDGET,
};
pub use condition::Condition;
pub use counterexample::{counterexample_query, suborder_counterexample};
pub use project::{
    merge_projection, project_below, project_to_countable, BelowProjection, CountableProjection,
    SEARCH_BUDGET,
};
pub use validate::{
    initial_segment_gap, is_valid, shared_max, validate_condition, window_clash, ConditionClause,
    ConditionReport, ConditionViolation,
};
pub use sample::ConditionSampler;
pub use variant::Variant;
