//! Incomplete pairwise comparison matrices.
//!
//! Only the strict upper triangle is stored; the lower triangle and the
//! diagonal are implied by reciprocity, so the two matrix invariants
//! (`a_ji = 1/a_ij` and symmetric missingness) hold by construction.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};

/// Admissible values for known comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Integers 1..9 and their reciprocals.
    Saaty,
    /// Any positive finite real.
    #[default]
    Free,
}

/// The seventeen values of the Saaty scale, ascending.
pub const SAATY_VALUES: [(u32, u32); 17] = [
    (1, 9),
    (1, 8),
    (1, 7),
    (1, 6),
    (1, 5),
    (1, 4),
    (1, 3),
    (1, 2),
    (1, 1),
    (2, 1),
    (3, 1),
    (4, 1),
    (5, 1),
    (6, 1),
    (7, 1),
    (8, 1),
    (9, 1),
];

/// A known comparison value.
///
/// Values parsed from integer or `p/q` tokens keep their exact fraction so
/// they serialize back bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Judgment {
    value: f64,
    exact: Option<(u64, u64)>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Judgment {
    pub fn real(value: f64) -> Self {
        Self { value, exact: None }
    }

    /// Exact fraction `p/q`; both parts must be positive.
    pub fn fraction(p: u64, q: u64) -> Self {
        assert!(p > 0 && q > 0, "fraction parts must be positive");
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        Self {
            value: p as f64 / q as f64,
            exact: Some((p, q)),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<(u64, u64)> {
        self.exact
    }

    pub fn reciprocal(&self) -> Self {
        match self.exact {
            Some((p, q)) => Self {
                value: q as f64 / p as f64,
                exact: Some((q, p)),
            },
            None => Self::real(1.0 / self.value),
        }
    }

    pub fn is_saaty(&self) -> bool {
        match self.exact {
            Some((p, q)) => (p == 1 && q <= 9) || (q == 1 && p <= 9),
            None => SAATY_VALUES.iter().any(|&(p, q)| {
                let s = p as f64 / q as f64;
                ((self.value - s) / s).abs() < 1e-9
            }),
        }
    }

    /// Parses `"7"`, `"1/7"` or a decimal such as `"0.1705"`.
    pub fn parse(token: &str) -> std::result::Result<Self, String> {
        let token = token.trim();
        if let Some((p, q)) = token.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad fraction {token:?}"))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad fraction {token:?}"))?;
            if p == 0 || q == 0 {
                return Err(format!("fraction {token:?} must have positive parts"));
            }
            return Ok(Self::fraction(p, q));
        }
        if !token.is_empty() && token.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(p) = token.parse::<u64>() {
                if p == 0 {
                    return Ok(Self::real(0.0));
                }
                return Ok(Self::fraction(p, 1));
            }
        }
        token
            .parse::<f64>()
            .map(Self::real)
            .map_err(|_| format!("bad value {token:?}"))
    }

    /// Token form: exact fractions as `p` or `p/q`, reals in shortest
    /// round-trip notation.
    pub fn to_token(&self) -> String {
        match self.exact {
            Some((p, 1)) => p.to_string(),
            Some((p, q)) => format!("{p}/{q}"),
            None => format!("{}", self.value),
        }
    }
}

impl From<f64> for Judgment {
    fn from(value: f64) -> Self {
        Judgment::real(value)
    }
}

/// Number of unordered pairs `i < j` among `n` items.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// All pairs `i < j` in row-major order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Row-major index of pair `(i, j)`, `i < j`, in the strict upper triangle.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `out = self * v`.
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = selfᵀ * v`.
    pub fn mul_vec_transposed(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
    }
}

/// A reciprocal positive matrix with possibly missing comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompletePcm {
    n: usize,
    scale: Scale,
    upper: Vec<Option<Judgment>>,
}

impl IncompletePcm {
    /// All off-diagonal comparisons missing.
    pub fn new(n: usize, scale: Scale) -> Result<Self> {
        if n < 2 {
            return Err(PcmError::BadDimension(format!(
                "need at least 2 alternatives, got {n}"
            )));
        }
        Ok(Self {
            n,
            scale,
            upper: vec![None; pair_count(n)],
        })
    }

    /// Builds a matrix from upper-triangle values given by `f(i, j)`, `i < j`.
    pub fn from_upper(
        n: usize,
        scale: Scale,
        mut f: impl FnMut(usize, usize) -> Option<f64>,
    ) -> Result<Self> {
        let mut pcm = Self::new(n, scale)?;
        for i in 0..n {
            for j in i + 1..n {
                if let Some(v) = f(i, j) {
                    pcm.set(i, j, Judgment::real(v))?;
                }
            }
        }
        Ok(pcm)
    }

    /// The consistent matrix `a_ij = w_i / w_j`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::from_upper(weights.len(), Scale::Free, |i, j| {
            Some(weights[i] / weights[j])
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn with_scale(mut self, scale: Scale) -> Result<Self> {
        if scale == Scale::Saaty {
            for (i, j) in self.known_pairs() {
                if !self.judgment(i, j).expect("known").is_saaty() {
                    return Err(PcmError::NotOnScale { i: i + 1, j: j + 1 });
                }
            }
        }
        self.scale = scale;
        Ok(self)
    }

    /// Sets `a_ij` (and implicitly `a_ji`). Indices are 0-based, `i != j`.
    pub fn set(&mut self, i: usize, j: usize, value: Judgment) -> Result<()> {
        self.check_pair(i, j)?;
        let v = value.value();
        if !(v.is_finite() && v > 0.0) {
            return Err(PcmError::NonPositiveEntry { i: i + 1, j: j + 1 });
        }
        if self.scale == Scale::Saaty && !value.is_saaty() {
            return Err(PcmError::NotOnScale { i: i + 1, j: j + 1 });
        }
        let (lo, hi, stored) = if i < j {
            (i, j, value)
        } else {
            (j, i, value.reciprocal())
        };
        self.upper[pair_index(self.n, lo, hi)] = Some(stored);
        Ok(())
    }

    /// Marks `a_ij` and `a_ji` missing.
    pub fn clear(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.upper[pair_index(self.n, lo, hi)] = None;
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n || i == j {
            return Err(PcmError::BadDimension(format!(
                "pair ({}, {}) invalid for n = {}",
                i + 1,
                j + 1,
                self.n
            )));
        }
        Ok(())
    }

    /// The judgment at `(i, j)` for any `i != j`; `None` when missing.
    pub fn judgment(&self, i: usize, j: usize) -> Option<Judgment> {
        if i == j {
            return Some(Judgment::fraction(1, 1));
        }
        if i < j {
            self.upper[pair_index(self.n, i, j)]
        } else {
            self.upper[pair_index(self.n, j, i)].map(|v| v.reciprocal())
        }
    }

    /// Numeric value of `a_ij`; the diagonal is 1.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(1.0);
        }
        if i < j {
            self.upper[pair_index(self.n, i, j)].map(|v| v.value())
        } else {
            self.upper[pair_index(self.n, j, i)].map(|v| 1.0 / v.value())
        }
    }

    pub fn is_known(&self, i: usize, j: usize) -> bool {
        i == j || self.get(i, j).is_some()
    }

    /// Known pairs `i < j` in row-major order.
    pub fn known_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs_where(true)
    }

    /// Missing pairs `i < j` in row-major order.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs_where(false)
    }

    fn pairs_where(&self, known: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.upper[pair_index(self.n, i, j)].is_some() == known {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn missing_count(&self) -> usize {
        self.upper.iter().filter(|v| v.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.upper.iter().all(Option::is_some)
    }

    /// Number of missing comparisons in row `i`.
    pub fn missing_in_row(&self, i: usize) -> usize {
        (0..self.n)
            .filter(|&j| j != i && !self.is_known(i, j))
            .count()
    }

    /// Dense matrix; requires completeness.
    pub fn to_dense(&self) -> Result<SquareMatrix> {
        if !self.is_complete() {
            return Err(PcmError::MatrixIncomplete);
        }
        Ok(SquareMatrix::from_fn(self.n, |i, j| {
            self.get(i, j).unwrap()
        }))
    }

    /// Dense matrix with missing positions filled by `fill(i, j)` for `i < j`
    /// (and the reciprocal below the diagonal).
    pub fn to_dense_filled(&self, mut fill: impl FnMut(usize, usize) -> f64) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            m.set(i, i, 1.0);
            for j in i + 1..self.n {
                let v = self.get(i, j).unwrap_or_else(|| fill(i, j));
                m.set(i, j, v);
                m.set(j, i, 1.0 / v);
            }
        }
        m
    }

    /// Copy restricted to the pairs for which `keep(i, j)` holds (`i < j`).
    pub fn restricted(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !keep(i, j) {
                    out.upper[pair_index(self.n, i, j)] = None;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_row_major() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn reciprocity_is_implied() {
        let mut a = IncompletePcm::new(3, Scale::Saaty).unwrap();
        a.set(0, 1, Judgment::fraction(1, 7)).unwrap();
        a.set(2, 1, Judgment::fraction(3, 1)).unwrap();
        assert_eq!(a.get(1, 0), Some(7.0));
        assert_eq!(a.judgment(1, 2).unwrap().to_token(), "1/3");
        assert_eq!(a.get(0, 2), None);
        assert_eq!(a.get(2, 0), None);
        assert_eq!(a.missing_count(), 1);
    }

    #[test]
    fn saaty_scale_rejects_off_scale_values() {
        let mut a = IncompletePcm::new(3, Scale::Saaty).unwrap();
        assert_eq!(
            a.set(0, 1, Judgment::fraction(10, 1)),
            Err(PcmError::NotOnScale { i: 1, j: 2 })
        );
        assert!(a.set(0, 1, Judgment::real(0.5)).is_ok());
    }

    #[test]
    fn rejects_non_positive() {
        let mut a = IncompletePcm::new(2, Scale::Free).unwrap();
        assert_eq!(
            a.set(0, 1, Judgment::real(-1.0)),
            Err(PcmError::NonPositiveEntry { i: 1, j: 2 })
        );
        assert!(a.set(0, 1, Judgment::real(f64::INFINITY)).is_err());
    }

    #[test]
    fn judgment_tokens() {
        assert_eq!(Judgment::parse("2/4").unwrap().to_token(), "1/2");
        assert_eq!(Judgment::parse("9").unwrap().exact(), Some((9, 1)));
        assert_eq!(Judgment::parse("0.1705").unwrap().to_token(), "0.1705");
        assert!(Judgment::parse("a/b").is_err());
        assert!(Judgment::parse("1/0").is_err());
    }
}
