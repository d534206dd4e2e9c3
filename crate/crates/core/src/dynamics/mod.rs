//! Stable cycles and the counts `s_n`, settledness profiles, descendants,
//! and stable blocks.
//!
//! A cycle of `α` on level `n` is stable when the vertices above it form a
//! single cycle of doubled length on every deeper level. This happens exactly
//! when the product `β` of the sections of `α` along the cycle acts
//! transitively on every level below, that is when `β` is an odometer. For
//! words the sign profile decides that for all levels at once; for portraits
//! it is checked through a depth budget. [`lift_doubling_failure`] follows
//! the lifts directly and serves as the reference check.

mod blocks;
mod count;
mod descendants;
mod stability;

pub use blocks::{
    block_analysis, d_sequence, estimate_111, BlockEntry, BlockLevel, BlockReport, DSequence,
    Estimate, DEFAULT_BLOCK_DEPTH,
};
pub use count::{
    s_n, s_n_portrait, settle_profile, Mode, ProfileRow, SettleProfile, StableCounter,
    DIRECT_MAX_LEVEL, MEMO_LIMIT, PROFILE_CSV_HEADER, RECURSIVE_MAX_LEVEL,
};
pub use descendants::{
    dedup_elements, descendant_levels, descendants_n, normal_form, DEDUP_DEPTH, DESCENDANT_LIMIT,
    GUARD_DEPTH,
};
pub use stability::{
    cycle_records_portrait, cycle_records_word, lift_doubling_failure, lift_doubling_failures,
    stable_status_portrait, stable_status_word, CycleRecord, SectionProduct, StabilityStatus,
    DEFAULT_DEPTH_BUDGET,
};
