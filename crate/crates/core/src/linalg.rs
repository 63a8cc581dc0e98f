//! Dense Cholesky factorization for the small symmetric positive definite
//! systems that arise from reduced graph Laplacians.

use crate::matrix::SquareMatrix;

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: SquareMatrix,
}

impl Cholesky {
    /// Returns `None` if `a` is not (numerically) positive definite.
    pub fn factor(a: &SquareMatrix) -> Option<Self> {
        let n = a.n();
        let mut l = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if d <= 1e-12 * a.get(j, j).abs().max(1.0) {
                return None;
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Some(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.n();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l.get(i, k) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.l.get(k, i) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    /// `ln det A`.
    pub fn log_det(&self) -> f64 {
        (0..self.l.n()).map(|i| 2.0 * self.l.get(i, i).ln()).sum()
    }
}
