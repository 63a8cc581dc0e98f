//! Elicitation sessions and the filling-pattern experiment.

mod patterns;
mod policy;
mod session;

pub use patterns::{
    edge_list, pattern_experiment, pattern_experiment_with, pattern_sample, DistanceMetric,
    NestedStep, PatternExperiment, PatternOptions, PatternRow,
};
pub use policy::{balanced_order, PolicyDocument, QuestionPolicy, ROSS_ORDER_6};
pub use session::{
    create_session, session_report, submit_answer, Answer, AnswerDocument, CrRecord, CrSeries,
    CrossingDirection, SeriesPoint, Session, SessionDocument, SessionOptions, SessionReport,
    SessionStatus, ThresholdCrossing, ACCEPTANCE_THRESHOLD,
};
