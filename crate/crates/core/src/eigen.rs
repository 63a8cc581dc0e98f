//! Dominant (Perron) eigenpairs of positive and primitive nonnegative matrices.
//!
//! Plain power iteration: the vector is renormalized to unit sum after every
//! multiplication, the eigenvalue estimate is the sum of `A v`, and
//! iteration stops once successive estimates differ by less than `1e-13`
//! and the residual `‖Av − λv‖∞` is at most `1e-10 ‖v‖∞`.

use crate::error::{PcmError, Result};
use crate::matrix::{IncompletePcm, SquareMatrix};

pub const MAX_ITERATIONS: usize = 100_000;
pub const LAMBDA_TOLERANCE: f64 = 1e-13;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Positive eigenvector normalized to unit sum.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration from `v` (overwritten with the eigenvector). Uses `Aᵀ`
/// when `transposed` is set, which yields the left eigenvector.
pub(crate) fn power_iterate(
    a: &SquareMatrix,
    v: &mut [f64],
    scratch: &mut [f64],
    transposed: bool,
) -> Result<(f64, usize)> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    let mut lambda_prev = f64::NAN;
    for iter in 1..=MAX_ITERATIONS {
        if transposed {
            a.mul_vec_transposed(v, scratch);
        } else {
            a.mul_vec(v, scratch);
        }
        let lambda: f64 = scratch.iter().sum();
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PcmError::NoConvergence(iter));
        }
        let residual = scratch
            .iter()
            .zip(v.iter())
            .map(|(w, x)| (w - lambda * x).abs())
            .fold(0.0, f64::max);
        let v_max = v.iter().copied().fold(0.0, f64::max);
        let converged = (lambda - lambda_prev).abs() < LAMBDA_TOLERANCE
            && residual <= RESIDUAL_TOLERANCE * v_max;
        for (x, w) in v.iter_mut().zip(scratch.iter()) {
            *x = w / lambda;
        }
        if converged {
            return Ok((lambda, iter));
        }
        lambda_prev = lambda;
    }
    Err(PcmError::NoConvergence(MAX_ITERATIONS))
}

/// Perron eigenpair of `a`, starting from the all-ones vector.
pub fn perron(a: &SquareMatrix) -> Result<EigenPair> {
    let n = a.n();
    let mut v = vec![1.0; n];
    let mut scratch = vec![0.0; n];
    let (lambda, iterations) = power_iterate(a, &mut v, &mut scratch, false)?;
    Ok(EigenPair {
        lambda,
        vector: v,
        iterations,
    })
}

/// `λ_max` and right eigenvector of a complete pairwise comparison matrix.
pub fn dominant_eigenvalue(pcm: &IncompletePcm) -> Result<EigenPair> {
    perron(&pcm.to_dense()?)
}

/// Saaty's consistency index `(λ_max − n) / (n − 1)`, clamped at zero
/// against round-off.
pub fn consistency_index(lambda_max: f64, n: usize) -> f64 {
    ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0)
}
