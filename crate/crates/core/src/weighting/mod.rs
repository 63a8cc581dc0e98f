//! Weight derivation and optimal completions of incomplete matrices.

mod em;
mod harker;
mod llsm;
mod trees;

use serde::{Deserialize, Serialize};

pub use em::{em_completion, em_completion_with, em_weights, Bounds, EmOptions, EmStart};
pub use harker::{harker_matrix, harker_weights, HarkerMatrix};
pub use llsm::{llsm_completion, llsm_log_weights, llsm_objective, llsm_weights};
pub use trees::{spanning_tree_gm_weights, DEFAULT_TREE_CAP};

use crate::format::{fmt_sig, round_sig, MatrixDocument, ValueToken};
use crate::lex::LexStageRecord;
use crate::matrix::IncompletePcm;
use crate::weights::WeightVector;

/// Weight derivation method for incomplete matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    #[default]
    Llsm,
    Em,
    Harker,
    TreeGm,
}

impl WeightMethod {
    pub fn weigh(self, pcm: &IncompletePcm) -> crate::Result<WeightVector> {
        match self {
            WeightMethod::Llsm => llsm_weights(pcm),
            WeightMethod::Em => em_weights(pcm),
            WeightMethod::Harker => harker_weights(pcm),
            WeightMethod::TreeGm => spanning_tree_gm_weights(pcm, DEFAULT_TREE_CAP),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightMethod::Llsm => "llsm",
            WeightMethod::Em => "em",
            WeightMethod::Harker => "harker",
            WeightMethod::TreeGm => "tree-gm",
        }
    }
}

impl std::str::FromStr for WeightMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llsm" => Ok(Self::Llsm),
            "em" | "eigenvalue" => Ok(Self::Em),
            "harker" => Ok(Self::Harker),
            "tree-gm" => Ok(Self::TreeGm),
            other => Err(format!("unknown weighting method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletionMethod {
    Llsm,
    EigenvalueOptimal,
    Lexicographic,
}

impl std::str::FromStr for CompletionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llsm" => Ok(Self::Llsm),
            "em" | "eigenvalue" => Ok(Self::EigenvalueOptimal),
            "lex" | "lexicographic" => Ok(Self::Lexicographic),
            other => Err(format!("unknown completion method {other:?}")),
        }
    }
}

impl CompletionMethod {
    /// Runs the completion. Bounds only apply to the eigenvalue-optimal method.
    pub fn complete(
        self,
        pcm: &IncompletePcm,
        bounds: Option<Bounds>,
    ) -> crate::Result<CompletionResult> {
        match (self, bounds) {
            (CompletionMethod::EigenvalueOptimal, b) => em_completion(pcm, b),
            (_, Some(_)) => Err(crate::PcmError::BadValue(
                "bounds apply only to the eigenvalue-optimal completion".into(),
            )),
            (CompletionMethod::Llsm, None) => llsm_completion(pcm),
            (CompletionMethod::Lexicographic, None) => crate::lex::lex_completion(pcm),
        }
    }
}

/// A value chosen for an originally missing pair, 0-based `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilledEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Method-specific diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// LLSM objective over ordered known pairs.
    pub objective: Option<f64>,
    /// Dominant eigenvalue of the completed matrix.
    pub lambda_max: Option<f64>,
    /// Cyclic-coordinate sweeps performed.
    pub sweeps: Option<usize>,
    /// Lexicographic stage records.
    pub stages: Option<Vec<LexStageRecord>>,
    /// Max triad inconsistency of the completed matrix.
    pub max_ti: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub matrix: IncompletePcm,
    pub filled: Vec<FilledEntry>,
    pub method: CompletionMethod,
    pub diagnostics: Diagnostics,
}

impl CompletionResult {
    /// Builds the result from the source matrix and the values for its
    /// missing pairs (same order as `missing_pairs()`).
    pub(crate) fn from_fill(
        source: &IncompletePcm,
        values: &[f64],
        method: CompletionMethod,
        diagnostics: Diagnostics,
    ) -> crate::Result<Self> {
        let missing = source.missing_pairs();
        debug_assert_eq!(missing.len(), values.len());
        let mut matrix = source.clone().with_scale(crate::Scale::Free)?;
        let mut filled = Vec::with_capacity(missing.len());
        for (&(i, j), &value) in missing.iter().zip(values) {
            matrix.set(i, j, value.into())?;
            filled.push(FilledEntry { i, j, value });
        }
        Ok(Self {
            matrix,
            filled,
            method,
            diagnostics,
        })
    }

    /// Value filled at `(i, j)` (0-based, either orientation).
    pub fn filled_value(&self, i: usize, j: usize) -> Option<f64> {
        self.filled.iter().find_map(|f| {
            if (f.i, f.j) == (i, j) {
                Some(f.value)
            } else if (f.j, f.i) == (i, j) {
                Some(1.0 / f.value)
            } else {
                None
            }
        })
    }

    /// Structured document: the completed matrix plus `filled`,
    /// `method` and `diagnostics`. Filled values carry 10 significant digits.
    pub fn to_document(&self) -> CompletionDocument {
        let mut matrix = MatrixDocument::from_pcm(&self.matrix);
        for e in &mut matrix.entries {
            if let Some(v) = self.filled_value(e.i - 1, e.j - 1) {
                e.value = ValueToken::Text(fmt_sig(v, 10));
            }
        }
        let d = &self.diagnostics;
        let r = |x: Option<f64>| x.map(|v| round_sig(v, 10));
        CompletionDocument {
            matrix,
            filled: self
                .filled
                .iter()
                .map(|f| FilledDocument {
                    i: f.i + 1,
                    j: f.j + 1,
                    value: round_sig(f.value, 10),
                })
                .collect(),
            method: self.method,
            diagnostics: DiagnosticsDocument {
                objective: r(d.objective),
                lambda_max: r(d.lambda_max),
                sweeps: d.sweeps,
                max_ti: r(d.max_ti),
            },
            stages: d
                .stages
                .as_ref()
                .map(|s| s.iter().map(LexStageRecord::to_document).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilledDocument {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ti: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionDocument {
    #[serde(flatten)]
    pub matrix: MatrixDocument,
    pub filled: Vec<FilledDocument>,
    pub method: CompletionMethod,
    pub diagnostics: DiagnosticsDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<crate::lex::StageDocument>>,
}
