//! Matrices from head-to-head win counts.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::{IncompletePcm, Judgment, Scale};

/// Value used when exactly one side has won.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjustment {
    /// `⌈wins / divisor⌉` for the side with all wins.
    Ceiling,
    /// `wins + addend` for the side with all wins.
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadToHeadOptions {
    pub adjustment: Adjustment,
    pub divisor: u64,
    pub addend: u64,
    /// With `Some(T)` every comparison is raised to `(x_ij + x_ji)/T`, which
    /// pulls pairs with few matches towards 1.
    pub exponent_cap: Option<u64>,
}

impl HeadToHeadOptions {
    pub fn new(adjustment: Adjustment) -> Self {
        Self {
            adjustment,
            divisor: 5,
            addend: 2,
            exponent_cap: None,
        }
    }
}

/// Parses a CSV of integer win counts; `x_ij` is row `i`, column `j`.
pub fn parse_win_counts(text: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .map(|c| {
                    c.trim()
                        .parse::<i64>()
                        .map_err(|_| PcmError::Parse(format!("bad win count {:?}", c.trim())))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows)
}

pub fn head_to_head_ingest(wins: &[Vec<i64>], opts: &HeadToHeadOptions) -> Result<IncompletePcm> {
    let n = wins.len();
    if let Some(r) = wins.iter().find(|r| r.len() != n) {
        return Err(PcmError::BadDimension(format!(
            "row of length {} in a {n}x{n} matrix",
            r.len()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if wins[i][j] < 0 {
                return Err(PcmError::NegativeCount { i: i + 1, j: j + 1 });
            }
        }
        if wins[i][i] != 0 {
            return Err(PcmError::NonzeroDiagonal(i + 1));
        }
    }
    if opts.divisor == 0 || opts.exponent_cap == Some(0) {
        return Err(PcmError::BadValue(
            "divisor and exponent cap must be positive".into(),
        ));
    }
    let mut pcm = IncompletePcm::new(n, Scale::Free)?;
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (wins[i][j] as u64, wins[j][i] as u64);
            if x + y == 0 {
                continue;
            }
            let lopsided = |w: u64| match opts.adjustment {
                Adjustment::Ceiling => w.div_ceil(opts.divisor),
                Adjustment::Additive => w + opts.addend,
            };
            let base = if x > 0 && y > 0 {
                Judgment::fraction(x, y)
            } else if x == 0 {
                Judgment::fraction(1, lopsided(y))
            } else {
                Judgment::fraction(lopsided(x), 1)
            };
            let value = match opts.exponent_cap {
                None => base,
                Some(t) if x + y == t => base,
                Some(t) => Judgment::real(base.value().powf((x + y) as f64 / t as f64)),
            };
            pcm.set(i, j, value)?;
        }
    }
    Ok(pcm)
}
