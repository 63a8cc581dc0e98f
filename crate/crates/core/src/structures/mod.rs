//! Structured matrices and ordinal-violation analysis.

mod bwm;
mod cdag;
mod h2h;
mod ordinal;

pub use bwm::{
    bwm_enumerate_violations, bwm_guarantee, bwm_llsm_violates, bwm_matrix, BwmBoundsReport,
    BwmCounts, EnumerationMode,
};
pub use cdag::{cdag_matrix, random_cdag, topological_order, CdagDocument, CdagSpec};
pub use h2h::{head_to_head_ingest, parse_win_counts, Adjustment, HeadToHeadOptions};
pub use ordinal::{
    ordinal_violations, ordinal_violations_for, OrdinalViolation, OrdinalViolationReport,
};
