//! Comparison-collection sessions with per-answer inconsistency monitoring.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::eigen::consistency_index;
use crate::error::{PcmError, Result};
use crate::graph::associated_graph;
use crate::inconsistency::{ri_lookup, RiQueryPolicy, RiSource};
use crate::matrix::{pair_count, IncompletePcm, Judgment, Scale};
use crate::weighting::{em_completion, llsm_weights, Bounds};

use super::policy::{PolicyDocument, QuestionPolicy};

/// Consistency ratios below this value are acceptable.
pub const ACCEPTANCE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Active,
    Completed,
    Abandoned,
}

/// One submitted comparison. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub i: usize,
    pub j: usize,
    pub value: Judgment,
    pub timestamp_ms: u64,
}

/// Inconsistency after an answer, recorded once the graph is connected.
///
/// `cr_generalized` divides by the random index for the current number of
/// missing entries; `cr_naive` by the complete-matrix index. Either is `None`
/// when no positive index is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrRecord {
    pub answered_count: usize,
    /// The pair just answered, 1-based.
    pub pair: [usize; 2],
    pub connected: bool,
    pub lambda_max: f64,
    pub ci: f64,
    pub m: usize,
    pub ri_nm: Option<f64>,
    pub ri_nm_source: Option<RiSource>,
    pub ri_n: Option<f64>,
    pub cr_generalized: Option<f64>,
    pub cr_naive: Option<f64>,
}

/// Session construction parameters beyond the alternative count.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionOptions {
    /// Display labels; empty means `"1".."n"`.
    pub labels: Vec<String>,
    pub policy: QuestionPolicy,
    /// Saaty restricts answers to the 17-point scale.
    pub scale: Scale,
    /// Clamp the eigenvalue-optimal completion to `[1/9, 9]`.
    pub bounded: bool,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            labels: Vec::new(),
            policy: QuestionPolicy::Balanced,
            scale: Scale::Free,
            bounded: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    id: String,
    n: usize,
    labels: Vec<String>,
    policy: QuestionPolicy,
    order: Vec<(usize, usize)>,
    answers: Vec<Answer>,
    cr_history: Vec<CrRecord>,
    status: SessionStatus,
    scale: Scale,
    bounded: bool,
    pcm: IncompletePcm,
}

fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn check_labels(n: usize, labels: Vec<String>) -> Result<Vec<String>> {
    if labels.is_empty() {
        return Ok((1..=n).map(|i| i.to_string()).collect());
    }
    if labels.len() != n {
        return Err(PcmError::BadLabels(format!(
            "{} labels for {n} alternatives",
            labels.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for l in &labels {
        if l.trim().is_empty() {
            return Err(PcmError::BadLabels("labels must be non-empty".into()));
        }
        if !seen.insert(l.as_str()) {
            return Err(PcmError::BadLabels(format!("duplicate label {l:?}")));
        }
    }
    Ok(labels)
}

/// Opens an active session with a random id.
pub fn create_session(n: usize, labels: Vec<String>, policy: QuestionPolicy) -> Result<Session> {
    Session::create(
        n,
        SessionOptions {
            labels,
            policy,
            ..Default::default()
        },
    )
}

/// Records an answer for the next pair; returns the new inconsistency record
/// if the graph is connected after it.
pub fn submit_answer(
    session: &mut Session,
    pair: (usize, usize),
    value: Judgment,
) -> Result<Option<CrRecord>> {
    session.submit(pair, value).map(|r| r.cloned())
}

impl Session {
    pub fn create(n: usize, opts: SessionOptions) -> Result<Self> {
        Self::create_with_id(new_id(), n, opts)
    }

    fn create_with_id(id: String, n: usize, opts: SessionOptions) -> Result<Self> {
        if n < 3 {
            return Err(PcmError::BadDimension(format!(
                "sessions need at least 3 alternatives, got {n}"
            )));
        }
        let labels = check_labels(n, opts.labels)?;
        let order = opts.policy.order(n)?;
        Ok(Self {
            id,
            n,
            labels,
            policy: opts.policy,
            order,
            answers: Vec::new(),
            cr_history: Vec::new(),
            status: SessionStatus::Active,
            scale: opts.scale,
            bounded: opts.bounded,
            pcm: IncompletePcm::new(n, opts.scale)?,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn policy(&self) -> &QuestionPolicy {
        &self.policy
    }

    pub fn order(&self) -> &[(usize, usize)] {
        &self.order
    }

    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    pub fn cr_history(&self) -> &[CrRecord] {
        &self.cr_history
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// The matrix of answers so far.
    pub fn matrix(&self) -> &IncompletePcm {
        &self.pcm
    }

    pub fn total_questions(&self) -> usize {
        pair_count(self.n)
    }

    /// The oriented pair to ask next, 0-based; `None` once closed.
    pub fn next_pair(&self) -> Option<(usize, usize)> {
        if self.status != SessionStatus::Active {
            return None;
        }
        self.order.get(self.answers.len()).copied()
    }

    pub fn submit(&mut self, pair: (usize, usize), value: Judgment) -> Result<Option<&CrRecord>> {
        self.submit_at(pair, value, now_ms())
    }

    /// [`Session::submit`] with an explicit timestamp, used by replay.
    pub fn submit_at(
        &mut self,
        pair: (usize, usize),
        value: Judgment,
        timestamp_ms: u64,
    ) -> Result<Option<&CrRecord>> {
        let expected = self.next_pair().ok_or(PcmError::SessionClosed)?;
        if pair != expected {
            return Err(PcmError::WrongPair(
                expected.0 + 1,
                expected.1 + 1,
                pair.0 + 1,
                pair.1 + 1,
            ));
        }
        let v = value.value();
        if !(v.is_finite() && v > 0.0) {
            return Err(PcmError::BadValue(format!(
                "comparison value must be positive, got {v}"
            )));
        }
        if self.scale == Scale::Saaty && !value.is_saaty() {
            return Err(PcmError::BadValue(format!(
                "{} is not on the Saaty scale",
                value.to_token()
            )));
        }
        let mut pcm = self.pcm.clone();
        pcm.set(pair.0, pair.1, value)?;
        let record = if associated_graph(&pcm).is_connected() {
            Some(self.evaluate(&pcm, pair)?)
        } else {
            None
        };
        self.pcm = pcm;
        self.answers.push(Answer {
            i: pair.0,
            j: pair.1,
            value,
            timestamp_ms,
        });
        if self.answers.len() == self.order.len() {
            self.status = SessionStatus::Completed;
        }
        Ok(record.map(|r| {
            self.cr_history.push(r);
            self.cr_history.last().expect("just pushed")
        }))
    }

    fn evaluate(&self, pcm: &IncompletePcm, pair: (usize, usize)) -> Result<CrRecord> {
        let c = em_completion(pcm, self.bounded.then_some(Bounds::SAATY))?;
        let lambda_max = c.diagnostics.lambda_max.expect("em reports lambda");
        let ci = consistency_index(lambda_max, self.n);
        let m = pcm.missing_count();
        let policy = RiQueryPolicy::TableThenApprox;
        let nm = ri_lookup(self.n, m, policy).ok();
        let ri_n = ri_lookup(self.n, 0, policy).ok().map(|(v, _)| v);
        let ratio = |ri: Option<f64>| ri.filter(|&r| r > 0.0).map(|r| ci / r);
        Ok(CrRecord {
            answered_count: self.answers.len() + 1,
            pair: [pair.0 + 1, pair.1 + 1],
            connected: true,
            lambda_max,
            ci,
            m,
            ri_nm: nm.map(|(v, _)| v),
            ri_nm_source: nm.map(|(_, s)| s),
            ri_n,
            cr_generalized: ratio(nm.map(|(v, _)| v)),
            cr_naive: ratio(ri_n),
        })
    }

    /// Closes an active session; later submissions fail with `SessionClosed`.
    pub fn abandon(&mut self) -> Result<()> {
        if self.status != SessionStatus::Active {
            return Err(PcmError::SessionClosed);
        }
        self.status = SessionStatus::Abandoned;
        Ok(())
    }

    pub fn report(&self) -> SessionReport {
        session_report(self)
    }

    pub fn to_document(&self) -> SessionDocument {
        SessionDocument {
            id: self.id.clone(),
            n: self.n,
            labels: self.labels.clone(),
            policy: self.policy.to_document(),
            scale: self.scale,
            bounded: self.bounded,
            status: self.status,
            order: self.order.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            answers: self
                .answers
                .iter()
                .map(|a| AnswerDocument {
                    i: a.i + 1,
                    j: a.j + 1,
                    value: a.value.to_token(),
                    timestamp_ms: a.timestamp_ms,
                })
                .collect(),
            cr_history: self.cr_history.clone(),
        }
    }

    /// Rebuilds a session by replaying the answers of an exported document.
    /// The inconsistency history is recomputed rather than trusted.
    pub fn from_document(doc: &SessionDocument) -> Result<Self> {
        let mut s = Self::create_with_id(
            doc.id.clone(),
            doc.n,
            SessionOptions {
                labels: doc.labels.clone(),
                policy: doc.policy.to_policy()?,
                scale: doc.scale,
                bounded: doc.bounded,
            },
        )?;
        let order: Vec<[usize; 2]> = s.order.iter().map(|&(i, j)| [i + 1, j + 1]).collect();
        if !doc.order.is_empty() && doc.order != order {
            return Err(PcmError::PolicyArityMismatch(
                "stored order differs from the policy's order".into(),
            ));
        }
        for a in &doc.answers {
            if a.i == 0 || a.j == 0 {
                return Err(PcmError::BadValue(format!(
                    "answer pair ({}, {}) is not 1-based",
                    a.i, a.j
                )));
            }
            let value = Judgment::parse(&a.value).map_err(PcmError::BadValue)?;
            s.submit_at((a.i - 1, a.j - 1), value, a.timestamp_ms)?;
        }
        if doc.status == SessionStatus::Abandoned && s.status == SessionStatus::Active {
            s.status = SessionStatus::Abandoned;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerDocument {
    pub i: usize,
    pub j: usize,
    pub value: String,
    pub timestamp_ms: u64,
}

/// Export format of a session. Pairs are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub id: String,
    pub n: usize,
    pub labels: Vec<String>,
    pub policy: PolicyDocument,
    #[serde(default)]
    pub scale: Scale,
    pub bounded: bool,
    pub status: SessionStatus,
    #[serde(default)]
    pub order: Vec<[usize; 2]>,
    pub answers: Vec<AnswerDocument>,
    #[serde(default)]
    pub cr_history: Vec<CrRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrSeries {
    Generalized,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingDirection {
    /// From acceptable to unacceptable.
    Up,
    Down,
}

/// A step at which a consistency-ratio series crossed the acceptance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdCrossing {
    pub series: CrSeries,
    pub direction: CrossingDirection,
    pub answered_count: usize,
    /// The answer that caused the crossing, 1-based.
    pub pair: [usize; 2],
}

/// A point of a consistency-ratio series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub answered_count: usize,
    pub cr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub id: String,
    pub labels: Vec<String>,
    pub status: SessionStatus,
    pub answered: usize,
    pub total: usize,
    pub bounded: bool,
    pub next_pair: Option<[usize; 2]>,
    pub records: Vec<CrRecord>,
    pub generalized: Vec<SeriesPoint>,
    pub naive: Vec<SeriesPoint>,
    /// LLSM weights of the answers so far (unit sum), once connected.
    pub weights: Option<Vec<f64>>,
    pub crossings: Vec<ThresholdCrossing>,
    /// Whether the latest generalized ratio is below the threshold.
    pub acceptable: Option<bool>,
}

fn crossings_of(records: &[CrRecord], series: CrSeries, out: &mut Vec<ThresholdCrossing>) {
    let mut prev = 0.0;
    for r in records {
        let cr = match series {
            CrSeries::Generalized => r.cr_generalized,
            CrSeries::Naive => r.cr_naive,
        };
        let Some(cr) = cr else { continue };
        let direction = match (prev >= ACCEPTANCE_THRESHOLD, cr >= ACCEPTANCE_THRESHOLD) {
            (false, true) => Some(CrossingDirection::Up),
            (true, false) => Some(CrossingDirection::Down),
            _ => None,
        };
        if let Some(direction) = direction {
            out.push(ThresholdCrossing {
                series,
                direction,
                answered_count: r.answered_count,
                pair: r.pair,
            });
        }
        prev = cr;
    }
}

pub fn session_report(session: &Session) -> SessionReport {
    let records = session.cr_history.clone();
    let series = |f: fn(&CrRecord) -> Option<f64>| -> Vec<SeriesPoint> {
        records
            .iter()
            .filter_map(|r| {
                f(r).map(|cr| SeriesPoint {
                    answered_count: r.answered_count,
                    cr,
                })
            })
            .collect()
    };
    let generalized = series(|r| r.cr_generalized);
    let naive = series(|r| r.cr_naive);
    let mut crossings = Vec::new();
    crossings_of(&records, CrSeries::Generalized, &mut crossings);
    crossings_of(&records, CrSeries::Naive, &mut crossings);
    crossings.sort_by_key(|c| (c.answered_count, c.series == CrSeries::Naive));
    let weights = associated_graph(&session.pcm)
        .is_connected()
        .then(|| llsm_weights(&session.pcm).ok())
        .flatten()
        .map(|w| w.weights().to_vec());
    SessionReport {
        id: session.id.clone(),
        labels: session.labels.clone(),
        status: session.status,
        answered: session.answers.len(),
        total: session.total_questions(),
        bounded: session.bounded,
        next_pair: session.next_pair().map(|(i, j)| [i + 1, j + 1]),
        acceptable: generalized.last().map(|p| p.cr < ACCEPTANCE_THRESHOLD),
        records,
        generalized,
        naive,
        weights,
        crossings,
    }
}
