//! Ordinal violations: a known `a_ij > 1` while `w_i < w_j`.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::IncompletePcm;
use crate::weighting::WeightMethod;
use crate::weights::WeightVector;

/// Weights closer than this relative gap count as tied, so values that
/// agree up to rounding are never reported.
const TIE_TOLERANCE: f64 = 1e-9;

/// 0-based pair with the offending entry and weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrdinalViolation {
    pub i: usize,
    pub j: usize,
    pub a_ij: f64,
    pub w_i: f64,
    pub w_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalViolationReport {
    pub violations: Vec<OrdinalViolation>,
    pub method: Option<WeightMethod>,
}

impl OrdinalViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.violations.iter().any(|v| (v.i, v.j) == (i, j))
    }
}

pub fn ordinal_violations(pcm: &IncompletePcm, w: &WeightVector) -> Result<OrdinalViolationReport> {
    let n = pcm.n();
    if w.len() != n {
        return Err(PcmError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let w = w.weights();
    let mut violations = Vec::new();
    for (p, q) in pcm.known_pairs() {
        let a = pcm.get(p, q).expect("known");
        let (i, j, a_ij) = if a > 1.0 { (p, q, a) } else { (q, p, 1.0 / a) };
        if a_ij > 1.0 && w[i] < w[j] * (1.0 - TIE_TOLERANCE) {
            violations.push(OrdinalViolation {
                i,
                j,
                a_ij,
                w_i: w[i],
                w_j: w[j],
            });
        }
    }
    violations.sort_by_key(|v| (v.i, v.j));
    Ok(OrdinalViolationReport {
        violations,
        method: None,
    })
}

/// Weighs with `method`, then checks.
pub fn ordinal_violations_for(
    pcm: &IncompletePcm,
    method: WeightMethod,
) -> Result<OrdinalViolationReport> {
    let w = method.weigh(pcm)?;
    let mut report = ordinal_violations(pcm, &w)?;
    report.method = Some(method);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;
    use crate::weights::Gauge;

    #[test]
    fn consistent_matrix_has_none() {
        let w = [5.0, 3.0, 2.0, 1.0];
        let a = IncompletePcm::from_weights(&w).unwrap();
        let r = ordinal_violations(&a, &WeightVector::from_weights(&w, Gauge::SumOne)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn reversed_weights_violate_both_orientations() {
        let a = parse_pcm("1,2,1/3\n1/2,1,1\n3,1,1").unwrap();
        let w = WeightVector::from_weights(&[1.0, 2.0, 1.0], Gauge::SumOne);
        let r = ordinal_violations(&a, &w).unwrap();
        // a12 = 2 but w1 < w2; a31 = 3 tied; a23 = 1 is no preference
        assert_eq!(r.violations.len(), 1);
        assert!(r.contains(0, 1));
    }

    #[test]
    fn dimension_is_checked() {
        let a = parse_pcm("1,2\n1/2,1").unwrap();
        let w = WeightVector::from_weights(&[1.0, 2.0, 1.0], Gauge::SumOne);
        assert_eq!(
            ordinal_violations(&a, &w),
            Err(PcmError::DimensionMismatch {
                expected: 2,
                got: 3
            })
        );
    }
}
