//! Harker's eigenvector method for incomplete matrices.

use crate::eigen::perron;
use crate::error::Result;
use crate::graph::require_connected;
use crate::matrix::{IncompletePcm, SquareMatrix};
use crate::weights::{Gauge, WeightVector};

/// `h_ii = 1 + (missing in row i)`, `h_ij = 0` where missing, `a_ij` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct HarkerMatrix {
    pub h: SquareMatrix,
}

pub fn harker_matrix(pcm: &IncompletePcm) -> HarkerMatrix {
    let n = pcm.n();
    let h = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0 + pcm.missing_in_row(i) as f64
        } else {
            pcm.get(i, j).unwrap_or(0.0)
        }
    });
    HarkerMatrix { h }
}

/// Principal eigenvector of the Harker matrix. The matrix is nonnegative
/// with a positive diagonal, hence primitive when the graph is connected.
pub fn harker_weights(pcm: &IncompletePcm) -> Result<WeightVector> {
    require_connected(pcm)?;
    let e = perron(&harker_matrix(pcm).h)?;
    Ok(WeightVector::from_weights(&e.vector, Gauge::SumOne))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;

    #[test]
    fn example_1_structure() {
        let a = parse_pcm("1,2,*,4\n1/2,1,1,*\n*,1,1,2\n1/4,*,1/2,1").unwrap();
        let h = harker_matrix(&a).h;
        for i in 0..4 {
            assert_eq!(h.get(i, i), 2.0);
        }
        assert_eq!(h.get(0, 2), 0.0);
        assert_eq!(h.get(2, 0), 0.0);
        assert_eq!(h.get(1, 3), 0.0);
        assert_eq!(h.get(3, 1), 0.0);
        assert_eq!(h.get(0, 1), 2.0);
        assert_eq!(h.get(3, 2), 0.5);
    }

    #[test]
    fn consistent_incomplete_input_recovers_weights() {
        let w = [6.0, 3.0, 2.0, 1.0];
        let full = IncompletePcm::from_weights(&w).unwrap();
        let a = full.restricted(|i, j| (i, j) != (0, 2) && (i, j) != (1, 3));
        let got = harker_weights(&a).unwrap();
        let s: f64 = w.iter().sum();
        for (g, e) in got.weights().iter().zip(w) {
            assert!((g - e / s).abs() < 1e-12);
        }
    }
}
