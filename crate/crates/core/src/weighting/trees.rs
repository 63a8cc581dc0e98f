//! Geometric mean of spanning-tree weight vectors.

use crate::error::{PcmError, Result};
use crate::graph::associated_graph;
use crate::matrix::IncompletePcm;
use crate::weights::{Gauge, WeightVector};

pub const DEFAULT_TREE_CAP: u128 = 1_000_000;

/// Each spanning tree determines a consistent weight vector by path
/// products from vertex 0; the result is their geometric mean.
pub fn spanning_tree_gm_weights(pcm: &IncompletePcm, tree_cap: u128) -> Result<WeightVector> {
    let g = associated_graph(pcm);
    if !g.is_connected() {
        return Err(PcmError::DisconnectedGraph);
    }
    let n = pcm.n();
    let trees = g.spanning_trees(tree_cap)?;
    let mut sum = vec![0.0; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut logs = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for tree in &trees {
        adj.iter_mut().for_each(Vec::clear);
        for &(i, j) in tree {
            adj[i].push(j);
            adj[j].push(i);
        }
        seen.iter_mut().for_each(|s| *s = false);
        logs[0] = 0.0;
        seen[0] = true;
        stack.push(0);
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    // a_ij = w_i / w_j
                    logs[j] = logs[i] - pcm.get(i, j).expect("tree edge is known").ln();
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        for (s, y) in sum.iter_mut().zip(&logs) {
            *s += y;
        }
    }
    let count = trees.len() as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
    Ok(WeightVector::from_logs(&mean, Gauge::SumOne))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;

    #[test]
    fn tree_input_gives_exact_weights() {
        let a = parse_pcm("1,2,*,*\n1/2,1,3,1/2\n*,1/3,1,*\n*,2,*,1").unwrap();
        let w = spanning_tree_gm_weights(&a, DEFAULT_TREE_CAP)
            .unwrap()
            .regauge(Gauge::LastOne);
        // w2 = w4 / 2, w1 = 2 w2, w3 = w2 / 3
        let expected = [1.0, 0.5, 1.0 / 6.0, 1.0];
        for (g, e) in w.weights().iter().zip(expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_uses_four_trees() {
        let a = parse_pcm("1,2,*,4\n1/2,1,1,*\n*,1,1,2\n1/4,*,1/2,1").unwrap();
        let w = spanning_tree_gm_weights(&a, 4).unwrap();
        assert_eq!(w.len(), 4);
        assert!(spanning_tree_gm_weights(&a, 3).is_err());
    }
}
