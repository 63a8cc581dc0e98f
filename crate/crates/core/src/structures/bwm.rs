//! Best–worst method matrices: construction, the two sufficient conditions
//! for violation-free LLSM weights, and exhaustive enumeration.
//!
//! Alternative 1 is the best and alternative `n` the worst. Only row 1 and
//! column `n` are known, so the comparison graph is a double star plus the
//! edge `{1, n}`. The LLSM normal equations then reduce to explicit
//! formulas. With `b_j = ln a_1j`, `c_j = ln a_jn`, `d = ln a_1n` and
//! `D = y_1 − y_n`:
//!
//! ```text
//! n·D = Σ_j (b_j + c_j) + 2d,     y_j = (y_1 + y_n + c_j − b_j) / 2,
//! ```
//!
//! so `w_1 < w_j` or `w_j < w_n` holds for some middle `j` exactly when
//! `D < |c_j − b_j|`. Exponentiating by `n` turns this into an integer test
//! for integer entries: with `P = a_1n² Π_j a_1j a_jn`, a violation exists
//! iff `P·a_1j^n < a_jn^n` or `P·a_jn^n < a_1j^n` for some `j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::{IncompletePcm, Judgment, Scale};

const REL_TOLERANCE: f64 = 1e-12;
const SAATY_MIN: u32 = 2;
const SAATY_MAX: u32 = 9;
const EXHAUSTIVE_MAX_N: usize = 7;
const SAMPLED_MAX_N: usize = 14;

/// `best_row` holds `a_12, …, a_1n`; `others_to_worst` holds
/// `a_2n, …, a_(n−1)n`.
pub fn bwm_matrix(n: usize, best_row: &[f64], others_to_worst: &[f64]) -> Result<IncompletePcm> {
    if n < 3 {
        return Err(PcmError::WrongArity(format!("need n >= 3, got {n}")));
    }
    if best_row.len() != n - 1 {
        return Err(PcmError::WrongArity(format!(
            "best row needs {} values, got {}",
            n - 1,
            best_row.len()
        )));
    }
    if others_to_worst.len() != n - 2 {
        return Err(PcmError::WrongArity(format!(
            "others-to-worst needs {} values, got {}",
            n - 2,
            others_to_worst.len()
        )));
    }
    if let Some(&v) = best_row
        .iter()
        .chain(others_to_worst)
        .find(|&&v| v.is_nan() || v < 1.0)
    {
        return Err(PcmError::ValueBelowOne(v));
    }
    let mut pcm = IncompletePcm::new(n, Scale::Free)?;
    for (j, &v) in best_row.iter().enumerate() {
        pcm.set(0, j + 1, judgment(v))?;
    }
    for (j, &v) in others_to_worst.iter().enumerate() {
        pcm.set(j + 1, n - 1, judgment(v))?;
    }
    Ok(pcm)
}

fn judgment(v: f64) -> Judgment {
    if v.fract() == 0.0 && v < 1e15 {
        Judgment::fraction(v as u64, 1)
    } else {
        Judgment::real(v)
    }
}

/// Row 1 and column `n` (oriented as preferences), or `NotBwmShape`.
fn bwm_parts(pcm: &IncompletePcm) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = pcm.n();
    if n < 3 {
        return Err(PcmError::NotBwmShape(format!("n = {n} is below 3")));
    }
    for i in 0..n {
        for j in i + 1..n {
            let should = i == 0 || j == n - 1;
            if pcm.is_known(i, j) != should {
                return Err(PcmError::NotBwmShape(format!(
                    "entry ({}, {}) is {}",
                    i + 1,
                    j + 1,
                    if should { "missing" } else { "known" }
                )));
            }
        }
    }
    let best = (1..n).map(|j| pcm.get(0, j).expect("known")).collect();
    let worst = (1..n - 1)
        .map(|j| pcm.get(j, n - 1).expect("known"))
        .collect();
    Ok((best, worst))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BwmBoundsReport {
    pub n: usize,
    /// `min {a_1j, a_jn : 2 ≤ j ≤ n−1}`.
    pub p: f64,
    pub max_pref: f64,
    pub a_1n: f64,
    pub theorem1_holds: bool,
    pub theorem1_failure: Option<String>,
    pub theorem2_holds: bool,
    pub theorem2_failure: Option<String>,
    /// `p^(4/(n−3)+3)`; infinite for `n = 3`.
    pub theorem2_bound: f64,
}

impl BwmBoundsReport {
    /// Either theorem certifies violation-free LLSM weights.
    pub fn certified(&self) -> bool {
        self.theorem1_holds || self.theorem2_holds
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + REL_TOLERANCE)
}

pub fn bwm_guarantee(pcm: &IncompletePcm) -> Result<BwmBoundsReport> {
    let n = pcm.n();
    let (best, worst) = bwm_parts(pcm)?;
    let a_1n = best[n - 2];
    let middle_best = &best[..n - 2];
    let p = middle_best
        .iter()
        .chain(&worst)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max_pref = best
        .iter()
        .chain(&worst)
        .map(|&v| v.max(1.0 / v))
        .fold(f64::NEG_INFINITY, f64::max);
    let p_ok = p > 1.0;
    let theorem1_failure = if !p_ok {
        Some(format!("uniform lower bound p = {p} is not above 1"))
    } else if !le(p, a_1n) {
        Some(format!(
            "a_1n = {a_1n} is below the uniform lower bound p = {p}"
        ))
    } else if !le(max_pref, p.powi(3)) {
        Some(format!(
            "max preference {max_pref} exceeds p^3 = {}",
            p.powi(3)
        ))
    } else {
        None
    };
    let theorem2_bound = if n == 3 {
        if p > 1.0 {
            f64::INFINITY
        } else {
            1.0
        }
    } else {
        p.powf(4.0 / (n - 3) as f64 + 3.0)
    };
    let max_best = middle_best
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let max_worst = worst.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let theorem2_failure = if !p_ok {
        Some(format!("uniform lower bound p = {p} is not above 1"))
    } else if !le(max_best, a_1n) {
        Some(format!("a_1n = {a_1n} is below max a_1j = {max_best}"))
    } else if !le(max_worst, a_1n) {
        Some(format!("a_1n = {a_1n} is below max a_jn = {max_worst}"))
    } else if !le(a_1n, theorem2_bound) {
        Some(format!(
            "a_1n = {a_1n} exceeds p^(4/(n-3)+3) = {theorem2_bound}"
        ))
    } else {
        None
    };
    Ok(BwmBoundsReport {
        n,
        p,
        max_pref,
        a_1n,
        theorem1_holds: theorem1_failure.is_none(),
        theorem1_failure,
        theorem2_holds: theorem2_failure.is_none(),
        theorem2_failure,
        theorem2_bound,
    })
}

/// Closed-form check for integer entries: `best_row = a_12..a_1n`,
/// `worst = a_2n..a_(n−1)n`.
pub fn bwm_llsm_violates(best_row: &[u32], worst: &[u32]) -> bool {
    let n = best_row.len() + 1;
    debug_assert_eq!(worst.len(), n - 2);
    let a_1n = best_row[n - 2] as u128;
    let mut p = a_1n * a_1n;
    for (&b, &c) in best_row[..n - 2].iter().zip(worst) {
        p *= b as u128 * c as u128;
    }
    let e = n as u32;
    best_row[..n - 2].iter().zip(worst).any(|(&b, &c)| {
        let (bn, cn) = ((b as u128).pow(e), (c as u128).pow(e));
        p * bn < cn || p * cn < bn
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwmCounts {
    pub total: u64,
    /// Matrices meeting the first condition with `p` fixed at the scale's
    /// smallest preference 2, i.e. with no entry equal to 9.
    pub theorem1: u64,
    /// Matrices meeting the first condition with `p` taken per matrix.
    pub theorem1_per_matrix: u64,
    pub violations: u64,
}

impl BwmCounts {
    fn add(self, o: Self) -> Self {
        Self {
            total: self.total + o.total,
            theorem1: self.theorem1 + o.theorem1,
            theorem1_per_matrix: self.theorem1_per_matrix + o.theorem1_per_matrix,
            violations: self.violations + o.violations,
        }
    }

    const ZERO: Self = Self {
        total: 0,
        theorem1: 0,
        theorem1_per_matrix: 0,
        violations: 0,
    };
}

struct Evaluator {
    n: usize,
    pow_n: [u128; 10],
}

impl Evaluator {
    fn new(n: usize) -> Self {
        let mut pow_n = [0u128; 10];
        for (v, p) in pow_n.iter_mut().enumerate() {
            *p = (v as u128).pow(n as u32);
        }
        Self { n, pow_n }
    }

    /// `digits` = `a_12..a_1n` followed by `a_2n..a_(n−1)n`.
    fn count(&self, digits: &[u32]) -> BwmCounts {
        let n = self.n;
        let (best, worst) = digits.split_at(n - 1);
        let a_1n = best[n - 2] as u128;
        let mut p = a_1n * a_1n;
        let mut lo = u32::MAX;
        let mut hi = best[n - 2];
        let mut violation = false;
        for (&b, &c) in best[..n - 2].iter().zip(worst) {
            p *= (b * c) as u128;
            lo = lo.min(b).min(c);
            hi = hi.max(b).max(c);
        }
        for (&b, &c) in best[..n - 2].iter().zip(worst) {
            let (bn, cn) = (self.pow_n[b as usize], self.pow_n[c as usize]);
            if p * bn < cn || p * cn < bn {
                violation = true;
                break;
            }
        }
        BwmCounts {
            total: 1,
            theorem1: u64::from(hi <= SAATY_MIN.pow(3)),
            theorem1_per_matrix: u64::from(hi <= lo.min(best[n - 2]).pow(3)),
            violations: u64::from(violation),
        }
    }
}

/// Counts over the best–worst matrices whose `2n−3` comparisons are all
/// integer Saaty preferences `2..=9`.
pub fn bwm_enumerate_violations(
    n: usize,
    scale: Scale,
    mode: EnumerationMode,
) -> Result<BwmCounts> {
    if scale != Scale::Saaty {
        return Err(PcmError::ScaleUnsupported(
            "enumeration needs the integer Saaty scale".into(),
        ));
    }
    if n < 3 {
        return Err(PcmError::WrongArity(format!("need n >= 3, got {n}")));
    }
    let digits = 2 * n - 3;
    let base = SAATY_MAX - SAATY_MIN + 1;
    let eval = Evaluator::new(n);
    match mode {
        EnumerationMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(PcmError::TooLarge(format!(
                    "exhaustive enumeration supports n <= {EXHAUSTIVE_MAX_N}"
                )));
            }
            // blocks by the two leading digits, reduced in block order
            let blocks: Vec<BwmCounts> = (0..base * base)
                .into_par_iter()
                .map(|block| {
                    let mut d = vec![SAATY_MIN; digits];
                    d[0] = SAATY_MIN + block / base;
                    d[1] = SAATY_MIN + block % base;
                    let mut acc = BwmCounts::ZERO;
                    loop {
                        acc = acc.add(eval.count(&d));
                        let mut k = digits - 1;
                        loop {
                            if k < 2 {
                                return acc;
                            }
                            if d[k] < SAATY_MAX {
                                d[k] += 1;
                                break;
                            }
                            d[k] = SAATY_MIN;
                            k -= 1;
                        }
                    }
                })
                .collect();
            Ok(blocks.into_iter().fold(BwmCounts::ZERO, BwmCounts::add))
        }
        EnumerationMode::Sampled { count, seed } => {
            if n > SAMPLED_MAX_N {
                return Err(PcmError::TooLarge(format!(
                    "sampled enumeration supports n <= {SAMPLED_MAX_N}"
                )));
            }
            if count == 0 {
                return Err(PcmError::InvalidSamples("count must be positive".into()));
            }
            // one generator stream per block of samples
            const BLOCK: u64 = 1 << 14;
            let blocks: Vec<BwmCounts> = (0..count.div_ceil(BLOCK))
                .into_par_iter()
                .map(|b| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(b);
                    let mut d = vec![0u32; digits];
                    let mut acc = BwmCounts::ZERO;
                    for _ in b * BLOCK..((b + 1) * BLOCK).min(count) {
                        d.iter_mut()
                            .for_each(|x| *x = rng.random_range(SAATY_MIN..=SAATY_MAX));
                        acc = acc.add(eval.count(&d));
                    }
                    acc
                })
                .collect();
            Ok(blocks.into_iter().fold(BwmCounts::ZERO, BwmCounts::add))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_6() -> IncompletePcm {
        bwm_matrix(6, &[2.0; 5], &[9.0, 2.0, 2.0, 2.0]).unwrap()
    }

    #[test]
    fn example_6_shape() {
        let a = example_6();
        assert_eq!(a.missing_count(), 6);
        assert_eq!(a.get(1, 5), Some(9.0));
        assert_eq!(a.get(5, 2), Some(0.5));
    }

    #[test]
    fn small_and_invalid_inputs() {
        assert!(bwm_matrix(3, &[3.0, 5.0], &[2.0]).unwrap().is_complete());
        assert!(matches!(
            bwm_matrix(4, &[2.0, 2.0], &[2.0, 2.0]),
            Err(PcmError::WrongArity(_))
        ));
        assert_eq!(
            bwm_matrix(3, &[0.5, 2.0], &[2.0]),
            Err(PcmError::ValueBelowOne(0.5))
        );
    }

    #[test]
    fn example_6_guarantee() {
        let r = bwm_guarantee(&example_6()).unwrap();
        assert_eq!((r.p, r.max_pref, r.a_1n), (2.0, 9.0, 2.0));
        assert!(!r.theorem1_holds && !r.theorem2_holds);
        assert!(r.theorem2_failure.unwrap().contains("max a_jn"));
    }

    #[test]
    fn uniform_entries_satisfy_theorem_one() {
        let a = bwm_matrix(5, &[3.0, 3.0, 3.0, 9.0], &[3.0, 3.0, 3.0]).unwrap();
        let r = bwm_guarantee(&a).unwrap();
        assert!(r.theorem1_holds);
        assert!(r.theorem2_holds);
    }

    #[test]
    fn theorem_two_exponent_passes_nine_up_to_26() {
        for n in 4..=26 {
            assert!(2f64.powf(4.0 / (n - 3) as f64 + 3.0) > 9.0, "n = {n}");
        }
        assert!(2f64.powf(4.0 / 24.0 + 3.0) < 9.0);
    }

    #[test]
    fn non_bwm_is_rejected() {
        let a = crate::format::parse_pcm("1,2,3\n1/2,1,*\n1/3,*,1").unwrap();
        assert!(matches!(bwm_guarantee(&a), Err(PcmError::NotBwmShape(_))));
    }

    #[test]
    fn closed_form_detects_example_6() {
        assert!(bwm_llsm_violates(&[2, 2, 2, 2, 2], &[9, 2, 2, 2]));
        assert!(!bwm_llsm_violates(&[2, 2, 2, 2, 2], &[2, 2, 2, 2]));
    }

    #[test]
    fn enumeration_rejects_free_scale() {
        assert!(matches!(
            bwm_enumerate_violations(6, Scale::Free, EnumerationMode::Exhaustive),
            Err(PcmError::ScaleUnsupported(_))
        ));
    }

    #[test]
    fn small_exhaustive_totals() {
        let c = bwm_enumerate_violations(4, Scale::Saaty, EnumerationMode::Exhaustive).unwrap();
        assert_eq!(c.total, 8u64.pow(5));
        assert_eq!(c.theorem1, 7u64.pow(5));
    }
}
