//! Triad inconsistency and the sorted inconsistency profile.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::IncompletePcm;

/// `TI = max{a_ik / (a_ij a_jk), (a_ij a_jk) / a_ik}`; always `>= 1`.
pub fn triad_ti(a_ij: f64, a_jk: f64, a_ik: f64) -> f64 {
    let r = a_ik / (a_ij * a_jk);
    r.max(1.0 / r)
}

/// One evaluated triad, 0-based `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triad {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub ti: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadProfile {
    /// Sorted by inconsistency descending, ties by `(i, j, k)` ascending.
    pub triads: Vec<Triad>,
    /// The TI values in the same order (non-increasing).
    pub theta: Vec<f64>,
}

impl TriadProfile {
    pub fn max(&self) -> f64 {
        self.theta.first().copied().unwrap_or(1.0)
    }
}

pub fn triad_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// All triads `i < j < k` in lexicographic order.
pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
}

/// Profile of a complete matrix.
pub fn triad_profile(pcm: &IncompletePcm) -> Result<TriadProfile> {
    if !pcm.is_complete() {
        return Err(PcmError::MatrixIncomplete);
    }
    let get = |i, j| pcm.get(i, j).expect("complete");
    Ok(profile_from_fn(pcm.n(), get))
}

pub(crate) fn profile_from_fn(n: usize, get: impl Fn(usize, usize) -> f64) -> TriadProfile {
    let mut triads: Vec<Triad> = triples(n)
        .map(|(i, j, k)| Triad {
            i,
            j,
            k,
            ti: triad_ti(get(i, j), get(j, k), get(i, k)),
        })
        .collect();
    // stable sort keeps the lexicographic order among ties
    triads.sort_by(|a, b| b.ti.total_cmp(&a.ti));
    let theta = triads.iter().map(|t| t.ti).collect();
    TriadProfile { triads, theta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Scale;
    use proptest::prelude::*;

    #[test]
    fn ti_examples() {
        assert_eq!(triad_ti(1.0, 8.0, 1.0), 8.0);
        assert_eq!(triad_ti(2.0, 3.0, 6.0), 1.0);
        assert_eq!(triad_ti(2.0, 1.0, 8.0), 4.0);
    }

    #[test]
    fn example_3_profile_at_optimum() {
        let vals = [
            [0.0, 2.0, 4.0, 8.0],
            [0.0, 0.0, 1.0, 8.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let a = IncompletePcm::from_upper(4, Scale::Free, |i, j| Some(vals[i][j])).unwrap();
        let p = triad_profile(&a).unwrap();
        assert_eq!(p.theta, vec![8.0, 2.0, 2.0, 2.0]);
        assert_eq!((p.triads[0].i, p.triads[0].j, p.triads[0].k), (1, 2, 3));
        // ties in lexicographic order
        let rest: Vec<_> = p.triads[1..].iter().map(|t| (t.i, t.j, t.k)).collect();
        assert_eq!(rest, vec![(0, 1, 2), (0, 1, 3), (0, 2, 3)]);
    }

    #[test]
    fn consistent_matrix_profile() {
        let a = IncompletePcm::from_weights(&[5.0, 3.0, 2.0, 1.5, 1.0]).unwrap();
        let p = triad_profile(&a).unwrap();
        assert_eq!(p.theta.len(), 10);
        assert!(p.theta.iter().all(|&t| (t - 1.0).abs() < 1e-12));
    }

    #[test]
    fn incomplete_matrix_rejected() {
        let a = IncompletePcm::new(4, Scale::Free).unwrap();
        assert_eq!(triad_profile(&a), Err(PcmError::MatrixIncomplete));
        assert_eq!(triad_count(4), 4);
    }

    proptest! {
        #[test]
        fn ti_orientation_invariant(a in 0.01f64..100.0, b in 0.01f64..100.0, c in 0.01f64..100.0) {
            let forward = triad_ti(a, b, c);
            let reversed = triad_ti(1.0 / b, 1.0 / a, 1.0 / c);
            prop_assert!((forward - reversed).abs() <= 1e-12 * forward);
            prop_assert!(forward >= 1.0);
        }
    }
}
