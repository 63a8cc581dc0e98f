//! Error type shared by every module of the crate.
//!
//! Indices carried by error variants are 1-based, matching the external
//! matrix formats.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PcmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcmError {
    // -- parsing and validation
    #[error("ReciprocityViolation: a_{i}{j} and a_{j}{i} are not reciprocal")]
    ReciprocityViolation { i: usize, j: usize },
    #[error("AsymmetricMissing: exactly one of a_{i}{j} and a_{j}{i} is missing")]
    AsymmetricMissing { i: usize, j: usize },
    #[error("NonPositiveEntry: a_{i}{j} must be positive and finite")]
    NonPositiveEntry { i: usize, j: usize },
    #[error("NotOnScale: a_{i}{j} is not on the Saaty scale")]
    NotOnScale { i: usize, j: usize },
    #[error("DuplicateEntry: pair ({i},{j}) listed more than once")]
    DuplicateEntry { i: usize, j: usize },
    #[error("BadDimension: {0}")]
    BadDimension(String),
    #[error("ParseError: {0}")]
    Parse(String),

    // -- matrix and graph preconditions
    #[error("MatrixIncomplete: operation requires a complete matrix")]
    MatrixIncomplete,
    #[error("DisconnectedGraph: the graph of known comparisons is not connected")]
    DisconnectedGraph,
    #[error("DimensionMismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("NoConvergence: iteration cap of {0} reached")]
    NoConvergence(usize),
    #[error("TooManyTrees: {0} spanning trees exceed the cap")]
    TooManyTrees(u128),

    // -- lexicographic completion and LP
    #[error("NotIndependent: missing entries share a row or column")]
    NotIndependent,
    #[error("LpNumericalFailure: {0}")]
    LpNumericalFailure(String),
    #[error("Unbounded: linear program is unbounded")]
    Unbounded,
    #[error("Infeasible: linear program is infeasible")]
    Infeasible,
    #[error("CycleDetected: simplex iteration cap reached")]
    CycleDetected,

    // -- random indices
    #[error("OutOfRange: n={n}, m={m} outside the admissible range")]
    OutOfRange { n: usize, m: usize },
    #[error("NotInTable: no tabulated random index for n={n}, m={m}")]
    NotInTable { n: usize, m: usize },
    #[error("UnknownBaseRi: no complete random index for n={0}")]
    UnknownBaseRi(usize),
    #[error("PatternDisconnected: missing-entry pattern disconnects the graph")]
    PatternDisconnected,
    #[error("InvalidSamples: {0}")]
    InvalidSamples(String),

    // -- structured matrices
    #[error("CycleFound: arc set contains a directed cycle")]
    CycleFound,
    #[error("NotWeaklyConnected: arc set is not weakly connected")]
    NotWeaklyConnected,
    #[error("InvalidAlpha: dominance parameter must exceed 1, got {0}")]
    InvalidAlpha(f64),
    #[error("ValueBelowOne: best-worst judgments must be at least 1, got {0}")]
    ValueBelowOne(f64),
    #[error("WrongArity: {0}")]
    WrongArity(String),
    #[error("NotBwmShape: {0}")]
    NotBwmShape(String),
    #[error("ScaleUnsupported: {0}")]
    ScaleUnsupported(String),
    #[error("NegativeCount: wins x_{i}{j} is negative")]
    NegativeCount { i: usize, j: usize },
    #[error("NonzeroDiagonal: wins x_{0}{0} must be zero")]
    NonzeroDiagonal(usize),
    #[error("TooLarge: {0}")]
    TooLarge(String),

    // -- elicitation
    #[error("BadLabels: {0}")]
    BadLabels(String),
    #[error("PolicyArityMismatch: {0}")]
    PolicyArityMismatch(String),
    #[error("WrongPair: expected ({0},{1}), got ({2},{3})")]
    WrongPair(usize, usize, usize, usize),
    #[error("SessionClosed: session no longer accepts answers")]
    SessionClosed,
    #[error("BadValue: {0}")]
    BadValue(String),
    #[error("BadMetric: unknown distance metric {0:?}")]
    BadMetric(String),
}

impl PcmError {
    /// The error case name, used by the CLI diagnostics and the HTTP error body.
    pub fn kind(&self) -> &'static str {
        use PcmError::*;
        match self {
            ReciprocityViolation { .. } => "ReciprocityViolation",
            AsymmetricMissing { .. } => "AsymmetricMissing",
            NonPositiveEntry { .. } => "NonPositiveEntry",
            NotOnScale { .. } => "NotOnScale",
            DuplicateEntry { .. } => "DuplicateEntry",
            BadDimension(_) => "BadDimension",
            Parse(_) => "ParseError",
            MatrixIncomplete => "MatrixIncomplete",
            DisconnectedGraph => "DisconnectedGraph",
            DimensionMismatch { .. } => "DimensionMismatch",
            NoConvergence(_) => "NoConvergence",
            TooManyTrees(_) => "TooManyTrees",
            NotIndependent => "NotIndependent",
            LpNumericalFailure(_) => "LpNumericalFailure",
            Unbounded => "Unbounded",
            Infeasible => "Infeasible",
            CycleDetected => "CycleDetected",
            OutOfRange { .. } => "OutOfRange",
            NotInTable { .. } => "NotInTable",
            UnknownBaseRi(_) => "UnknownBaseRi",
            PatternDisconnected => "PatternDisconnected",
            InvalidSamples(_) => "InvalidSamples",
            CycleFound => "CycleFound",
            NotWeaklyConnected => "NotWeaklyConnected",
            InvalidAlpha(_) => "InvalidAlpha",
            ValueBelowOne(_) => "ValueBelowOne",
            WrongArity(_) => "WrongArity",
            NotBwmShape(_) => "NotBwmShape",
            ScaleUnsupported(_) => "ScaleUnsupported",
            NegativeCount { .. } => "NegativeCount",
            NonzeroDiagonal(_) => "NonzeroDiagonal",
            TooLarge(_) => "TooLarge",
            BadLabels(_) => "BadLabels",
            PolicyArityMismatch(_) => "PolicyArityMismatch",
            WrongPair(..) => "WrongPair",
            SessionClosed => "SessionClosed",
            BadValue(_) => "BadValue",
            BadMetric(_) => "BadMetric",
        }
    }
}
