//! One-shot summary of a matrix: comparison graph, fully known triads,
//! inconsistency ratio, weights and ordinal violations.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::format::round_sig;
use crate::graph::associated_graph;
use crate::inconsistency::{cr_incomplete, InconsistencyReport, RiQueryPolicy};
use crate::matrix::IncompletePcm;
use crate::structures::{ordinal_violations, OrdinalViolationReport};
use crate::triads::{triad_ti, triples};
use crate::weighting::WeightMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub method: WeightMethod,
    pub bounded: bool,
    pub ri_policy: RiQueryPolicy,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            method: WeightMethod::Llsm,
            bounded: true,
            ri_policy: RiQueryPolicy::TableThenApprox,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    /// 1-based edges of the comparison graph.
    pub edges: Vec<[usize; 2]>,
    pub connected: bool,
    /// Decimal string, since the count can exceed 2^53.
    pub spanning_trees: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownTriad {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub ti: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub graph: GraphSummary,
    /// Triads whose three comparisons are all known, largest TI first.
    pub triads: Vec<KnownTriad>,
    pub missing: usize,
    /// `None` when no random index exists for the shape (e.g. `n = 3`).
    pub inconsistency: Option<InconsistencyReport>,
    pub method: WeightMethod,
    pub weights: Vec<f64>,
    pub violations: OrdinalViolationReport,
}

/// Fails with `DisconnectedGraph` when the known comparisons do not
/// connect every alternative.
pub fn analyze(pcm: &IncompletePcm, opts: &AnalysisOptions) -> Result<Analysis> {
    let g = associated_graph(pcm);
    let connected = g.is_connected();
    let graph = GraphSummary {
        n: pcm.n(),
        edges: g.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
        connected,
        spanning_trees: g.spanning_tree_count().to_string(),
    };
    if !connected {
        return Err(PcmError::DisconnectedGraph);
    }
    let mut triads: Vec<KnownTriad> = triples(pcm.n())
        .filter_map(|(i, j, k)| {
            let ti = triad_ti(pcm.get(i, j)?, pcm.get(j, k)?, pcm.get(i, k)?);
            Some(KnownTriad {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                ti: round_sig(ti, 12),
            })
        })
        .collect();
    triads.sort_by(|a, b| b.ti.total_cmp(&a.ti));
    let inconsistency = match cr_incomplete(pcm, opts.ri_policy, opts.bounded) {
        Ok(r) => Some(r),
        Err(PcmError::UnknownBaseRi(_) | PcmError::NotInTable { .. }) => None,
        Err(e) => return Err(e),
    };
    let w = opts.method.weigh(pcm)?;
    let mut violations = ordinal_violations(pcm, &w)?;
    violations.method = Some(opts.method);
    Ok(Analysis {
        graph,
        triads,
        missing: pcm.missing_count(),
        inconsistency,
        method: opts.method,
        weights: w.weights().to_vec(),
        violations,
    })
}
