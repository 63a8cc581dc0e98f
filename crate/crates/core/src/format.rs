//! Matrix document formats.
//!
//! Two encodings are accepted everywhere:
//!
//! * CSV grid: `n` lines of `n` comma-separated cells. A cell is a decimal,
//!   a fraction `p/q`, or `*` for a missing comparison. The diagonal must be
//!   `1` and the lower triangle must be reciprocal to the upper one.
//! * Structured JSON: `{"n": 4, "scale": "saaty", "entries": [{"i": 1, "j": 2,
//!   "value": "1/7"}]}`, listing known pairs only. Omitted pairs are missing.
//!
//! Indices are 1-based in both.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::{IncompletePcm, Judgment, Scale};

const RECIPROCITY_TOLERANCE: f64 = 1e-8;

/// Which encoding a document used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentFormat {
    Csv,
    Structured,
}

/// A value token in a structured document: a string (`"1/7"`) or a bare number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueToken {
    Text(String),
    Number(f64),
}

impl ValueToken {
    /// Integral numbers become exact fractions, like the token `"7"`.
    pub fn to_judgment(&self) -> Result<Judgment> {
        match self {
            ValueToken::Text(t) => Judgment::parse(t).map_err(PcmError::Parse),
            ValueToken::Number(v) if *v >= 1.0 && v.fract() == 0.0 && *v < 1e15 => {
                Ok(Judgment::fraction(*v as u64, 1))
            }
            ValueToken::Number(v) => Ok(Judgment::real(*v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub i: usize,
    pub j: usize,
    pub value: ValueToken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    #[serde(default)]
    pub scale: Scale,
    pub entries: Vec<EntryDocument>,
}

impl MatrixDocument {
    pub fn from_pcm(pcm: &IncompletePcm) -> Self {
        let entries = pcm
            .known_pairs()
            .into_iter()
            .map(|(i, j)| EntryDocument {
                i: i + 1,
                j: j + 1,
                value: ValueToken::Text(pcm.judgment(i, j).expect("known").to_token()),
            })
            .collect();
        Self {
            n: pcm.n(),
            scale: pcm.scale(),
            entries,
        }
    }

    pub fn to_pcm(&self) -> Result<IncompletePcm> {
        let mut pcm = IncompletePcm::new(self.n, Scale::Free)?;
        for e in &self.entries {
            if e.i == 0 || e.j == 0 || e.i > self.n || e.j > self.n || e.i == e.j {
                return Err(PcmError::BadDimension(format!(
                    "entry ({}, {}) invalid for n = {}",
                    e.i, e.j, self.n
                )));
            }
            let (i, j) = (e.i - 1, e.j - 1);
            if pcm.get(i, j).is_some() {
                return Err(PcmError::DuplicateEntry {
                    i: e.i.min(e.j),
                    j: e.i.max(e.j),
                });
            }
            pcm.set(i, j, e.value.to_judgment()?)?;
        }
        pcm.with_scale(self.scale)
    }
}

/// Parses either document format, detected by a leading `{`.
pub fn parse_pcm(text: &str) -> Result<IncompletePcm> {
    parse_pcm_detect(text).map(|(pcm, _)| pcm)
}

/// Like [`parse_pcm`], also reporting which format was found.
pub fn parse_pcm_detect(text: &str) -> Result<(IncompletePcm, DocumentFormat)> {
    if text.trim_start().starts_with('{') {
        let doc: MatrixDocument =
            serde_json::from_str(text).map_err(|e| PcmError::Parse(e.to_string()))?;
        Ok((doc.to_pcm()?, DocumentFormat::Structured))
    } else {
        Ok((parse_csv(text)?, DocumentFormat::Csv))
    }
}

fn parse_cell(token: &str, i: usize, j: usize) -> Result<Option<Judgment>> {
    let token = token.trim();
    if token == "*" {
        return Ok(None);
    }
    let v = Judgment::parse(token).map_err(|e| PcmError::Parse(format!("cell ({i},{j}): {e}")))?;
    if !(v.value().is_finite() && v.value() > 0.0) {
        return Err(PcmError::NonPositiveEntry { i, j });
    }
    Ok(Some(v))
}

/// Parses the CSV grid format.
pub fn parse_csv(text: &str) -> Result<IncompletePcm> {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    let n = rows.len();
    if n < 2 {
        return Err(PcmError::BadDimension(format!(
            "need at least 2 rows, got {n}"
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(PcmError::BadDimension(format!(
                "row {} has {} cells, expected {n}",
                r + 1,
                row.len()
            )));
        }
    }
    let mut pcm = IncompletePcm::new(n, Scale::Free)?;
    for i in 0..n {
        match parse_cell(rows[i][i], i + 1, i + 1)? {
            Some(v) if v.value() == 1.0 => {}
            _ => {
                return Err(PcmError::BadDimension(format!(
                    "diagonal cell ({0},{0}) must be 1",
                    i + 1
                )))
            }
        }
        for j in i + 1..n {
            let upper = parse_cell(rows[i][j], i + 1, j + 1)?;
            let lower = parse_cell(rows[j][i], j + 1, i + 1)?;
            match (upper, lower) {
                (None, None) => {}
                (Some(u), Some(l)) => {
                    if (u.value() * l.value() - 1.0).abs() > RECIPROCITY_TOLERANCE {
                        return Err(PcmError::ReciprocityViolation { i: i + 1, j: j + 1 });
                    }
                    pcm.set(i, j, u)?;
                }
                _ => return Err(PcmError::AsymmetricMissing { i: i + 1, j: j + 1 }),
            }
        }
    }
    Ok(pcm)
}

/// CSV grid with exact tokens where available and `*` for missing cells.
pub fn to_csv(pcm: &IncompletePcm) -> String {
    let n = pcm.n();
    let mut out = String::new();
    for i in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|j| match pcm.judgment(i, j) {
                Some(v) => v.to_token(),
                None => "*".to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_structured(pcm: &IncompletePcm) -> String {
    serde_json::to_string_pretty(&MatrixDocument::from_pcm(pcm)).expect("serializable")
}

/// Serializes in the requested format.
pub fn serialize_pcm(pcm: &IncompletePcm, format: DocumentFormat) -> String {
    match format {
        DocumentFormat::Csv => to_csv(pcm),
        DocumentFormat::Structured => to_structured(pcm),
    }
}

/// Rounds to `digits` significant digits. Used for all numeric output.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

/// `x` rounded to `digits` significant digits, in shortest notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    format!("{}", round_sig(x, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_1: &str = "1,2,*,4\n1/2,1,1,*\n*,1,1,2\n1/4,*,1/2,1\n";

    #[test]
    fn parses_csv_with_missing_entries() {
        let a = parse_pcm(EXAMPLE_1).unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.missing_count(), 2);
        assert_eq!(a.missing_pairs(), vec![(0, 2), (1, 3)]);
        assert_eq!(a.get(3, 0), Some(0.25));
    }

    #[test]
    fn two_by_two_identity() {
        let a = parse_pcm("1,1\n1,1").unwrap();
        assert!(a.is_complete());
        assert_eq!(a.missing_count(), 0);
    }

    #[test]
    fn reciprocity_violation() {
        assert_eq!(
            parse_pcm("1,2\n3,1"),
            Err(PcmError::ReciprocityViolation { i: 1, j: 2 })
        );
    }

    #[test]
    fn asymmetric_missing() {
        assert_eq!(
            parse_pcm("1,*\n1,1"),
            Err(PcmError::AsymmetricMissing { i: 1, j: 2 })
        );
    }

    #[test]
    fn non_positive_and_dimension_errors() {
        assert_eq!(
            parse_pcm("1,0\n*,1"),
            Err(PcmError::NonPositiveEntry { i: 1, j: 2 })
        );
        assert!(matches!(
            parse_pcm("1,2\n1/2"),
            Err(PcmError::BadDimension(_))
        ));
        assert!(matches!(parse_pcm("1"), Err(PcmError::BadDimension(_))));
        assert!(matches!(
            parse_pcm("2,1\n1,1"),
            Err(PcmError::BadDimension(_))
        ));
    }

    #[test]
    fn structured_document() {
        let text = r#"{"n": 3, "scale": "saaty", "entries": [
            {"i": 1, "j": 2, "value": "1/7"}, {"i": 2, "j": 3, "value": 3}]}"#;
        let a = parse_pcm(text).unwrap();
        assert_eq!(a.scale(), Scale::Saaty);
        assert_eq!(a.get(0, 1), Some(1.0 / 7.0));
        assert_eq!(a.get(2, 1), Some(1.0 / 3.0));
        assert_eq!(a.missing_pairs(), vec![(0, 2)]);
    }

    #[test]
    fn structured_document_errors() {
        let dup = r#"{"n": 3, "entries": [{"i":1,"j":2,"value":"2"},{"i":2,"j":1,"value":"1/2"}]}"#;
        assert_eq!(parse_pcm(dup), Err(PcmError::DuplicateEntry { i: 1, j: 2 }));
        let off = r#"{"n": 3, "scale": "saaty", "entries": [{"i":1,"j":2,"value":"11"}]}"#;
        assert_eq!(parse_pcm(off), Err(PcmError::NotOnScale { i: 1, j: 2 }));
        assert!(matches!(parse_pcm("{not json"), Err(PcmError::Parse(_))));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let a = parse_pcm(EXAMPLE_1).unwrap();
        assert_eq!(to_csv(&a), EXAMPLE_1);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.170_512_345_678_9, 4), "0.1705");
        assert_eq!(fmt_sig(8.0, 10), "8");
        assert_eq!(fmt_sig(1.0 / 3.0, 10), "0.3333333333");
    }
}
