//! Incomplete logarithmic least squares.
//!
//! The log-weights `y` minimize `Σ (ln a_ij − y_i + y_j)²` over known
//! ordered pairs. The normal equations are the graph Laplacian system
//! `L y = r` with `r_i = Σ_{j known} ln a_ij`; pinning `y_{n-1} = 0` removes
//! the one-dimensional kernel and leaves a positive definite system when the
//! graph is connected.

use crate::error::{PcmError, Result};
use crate::graph::associated_graph;
use crate::linalg::Cholesky;
use crate::matrix::IncompletePcm;
use crate::weights::{Gauge, WeightVector};

use super::{CompletionMethod, CompletionResult, Diagnostics};

/// Log-weights with the last alternative pinned at zero.
pub fn llsm_log_weights(pcm: &IncompletePcm) -> Result<Vec<f64>> {
    let g = associated_graph(pcm);
    if !g.is_connected() {
        return Err(PcmError::DisconnectedGraph);
    }
    let n = pcm.n();
    let mut rhs = vec![0.0; n - 1];
    for (i, r) in rhs.iter_mut().enumerate() {
        *r = (0..n)
            .filter(|&j| j != i)
            .filter_map(|j| pcm.get(i, j))
            .map(f64::ln)
            .sum();
    }
    let chol = Cholesky::factor(&g.reduced_laplacian())
        .ok_or_else(|| PcmError::LpNumericalFailure("singular reduced Laplacian".into()))?;
    let mut y = chol.solve(&rhs);
    y.push(0.0);
    Ok(y)
}

pub fn llsm_weights(pcm: &IncompletePcm) -> Result<WeightVector> {
    Ok(WeightVector::from_logs(
        &llsm_log_weights(pcm)?,
        Gauge::SumOne,
    ))
}

/// `Σ (ln a_ij − y_i + y_j)²` over ordered known pairs `i ≠ j`.
pub fn llsm_objective(pcm: &IncompletePcm, log_weights: &[f64]) -> f64 {
    pcm.known_pairs()
        .into_iter()
        .map(|(i, j)| {
            let r = pcm.get(i, j).unwrap().ln() - log_weights[i] + log_weights[j];
            2.0 * r * r
        })
        .sum()
}

/// Missing entries set to `w_i / w_j` from the LLSM weights.
pub fn llsm_completion(pcm: &IncompletePcm) -> Result<CompletionResult> {
    let y = llsm_log_weights(pcm)?;
    let values: Vec<f64> = pcm
        .missing_pairs()
        .into_iter()
        .map(|(i, j)| (y[i] - y[j]).exp())
        .collect();
    let diagnostics = Diagnostics {
        objective: Some(llsm_objective(pcm, &y)),
        ..Default::default()
    };
    CompletionResult::from_fill(pcm, &values, CompletionMethod::Llsm, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;
    use crate::matrix::Scale;

    #[test]
    fn consistent_input_recovers_weights() {
        let w = [8.0, 4.0, 3.0, 1.0, 0.5];
        let a = IncompletePcm::from_weights(&w).unwrap();
        let got = llsm_weights(&a).unwrap().regauge(Gauge::LastOne);
        for (g, e) in got.weights().iter().zip(w.iter().map(|x| x / 0.5)) {
            assert!((g - e).abs() < 1e-10 * e);
        }
    }

    #[test]
    fn tree_completion_is_consistent() {
        let a = parse_pcm("1,2,*\n1/2,1,3\n*,1/3,1").unwrap();
        let c = llsm_completion(&a).unwrap();
        assert!((c.filled_value(0, 2).unwrap() - 6.0).abs() < 1e-12);
        assert!(c.diagnostics.objective.unwrap() < 1e-20);
    }

    #[test]
    fn complete_input_is_unchanged() {
        let a = parse_pcm("1,2,3\n1/2,1,4\n1/3,1/4,1").unwrap();
        let c = llsm_completion(&a).unwrap();
        assert!(c.filled.is_empty());
        assert_eq!(c.matrix, a.with_scale(Scale::Free).unwrap());
    }

    #[test]
    fn disconnected_is_rejected() {
        let a = parse_pcm("1,2,*\n1/2,1,*\n*,*,1").unwrap();
        assert_eq!(llsm_weights(&a), Err(PcmError::DisconnectedGraph));
    }
}
