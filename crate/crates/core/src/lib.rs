//! Incomplete pairwise comparison matrices: completion, weighting,
//! inconsistency thresholds, structured matrices and elicitation sessions.

// Matrix code walks (i, j) and (j, i) together; index loops read better there.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod eigen;
pub mod elicitation;
pub mod error;
pub mod format;
pub mod graph;
pub mod inconsistency;
pub mod lex;
pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod structures;
pub mod triads;
pub mod weighting;
pub mod weights;

pub use analysis::{analyze, Analysis, AnalysisOptions};
pub use eigen::{consistency_index, dominant_eigenvalue, EigenPair};
pub use elicitation::{
    create_session, pattern_experiment, session_report, submit_answer, QuestionPolicy, Session,
};
pub use error::{PcmError, Result};
pub use format::{parse_pcm, parse_pcm_detect, serialize_pcm, DocumentFormat, MatrixDocument};
pub use graph::{associated_graph, is_connected, ComparisonGraph};
pub use inconsistency::{
    cr_incomplete, ri_approx, ri_lookup, simulate_ri, InconsistencyReport, RiQueryPolicy, RiTable,
};
pub use lex::{lex_completion, lex_completion_independent, solve_minmax_lp, LexLp, LexStageRecord};
pub use matrix::{IncompletePcm, Judgment, Scale};
pub use triads::{triad_profile, triad_ti, TriadProfile};
pub use weighting::{CompletionMethod, CompletionResult, WeightMethod};
pub use weights::{Gauge, WeightVector};
