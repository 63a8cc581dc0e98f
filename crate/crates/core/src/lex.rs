//! Lexicographically optimal completion.
//!
//! Works in log space: every missing pair `(i, j)` becomes a free variable
//! `ℓ_ij`, and every triad `i < j < k` contributes the affine deviation
//! `d = ℓ_ij + ℓ_jk − ℓ_ik`, whose absolute value is the log of its triad
//! inconsistency. Each stage minimizes the largest `|d|` over the triads
//! that are still active. Triads that cannot go below the stage optimum are
//! frozen at that level with two-sided inequalities, and the next stage
//! continues with the rest.
//!
//! A triad counts as forced when minimizing its own deviation, with the
//! other active triads capped at the stage level and the frozen ones kept,
//! still ends at the stage level. Dual prices are computed as well and any
//! disagreement with that test is recorded in the stage record.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::format::round_sig;
use crate::graph::require_connected;
use crate::lp::{self, LinearProgram};
use crate::matrix::IncompletePcm;
use crate::triads::{profile_from_fn, triad_profile, triples};
use crate::weighting::{Bounds, CompletionMethod, CompletionResult, Diagnostics};

/// Slack on frozen and capped triads.
const FREEZE_SLACK: f64 = 1e-9;
/// A triad within this distance of the stage level is a forcing candidate,
/// and a verification optimum within it counts as not dropping.
const FORCE_TOLERANCE: f64 = 1e-7;
const DUAL_TOLERANCE: f64 = 1e-9;
/// Spread of the probe objective over the optimal face above which the
/// stage is flagged as non-unique.
const FACE_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LexStageRecord {
    /// 1-based stage number.
    pub stage: usize,
    /// Optimal max-log-inconsistency of the stage.
    pub level: f64,
    /// Triads frozen at this stage, 0-based `(i, j, k)` with `i < j < k`.
    pub frozen_triads: Vec<(usize, usize, usize)>,
    /// The optimal face of the stage LP has more than one point.
    pub degenerate_face: bool,
    /// Active triads where the dual-price test and the re-solve disagreed.
    pub dual_disagreements: usize,
}

impl LexStageRecord {
    /// Stage level as a triad inconsistency value.
    pub fn ti_level(&self) -> f64 {
        self.level.exp()
    }

    pub fn to_document(&self) -> StageDocument {
        StageDocument {
            stage: self.stage,
            level: round_sig(self.ti_level(), 10),
            frozen: self
                .frozen_triads
                .iter()
                .map(|&(i, j, k)| [i + 1, j + 1, k + 1])
                .collect(),
            degenerate_face: self.degenerate_face,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDocument {
    pub stage: usize,
    pub level: f64,
    pub frozen: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate_face: bool,
}

/// `d = Σ coeff·x + constant` for one triad.
#[derive(Debug, Clone, PartialEq)]
pub struct TriadForm {
    pub triad: (usize, usize, usize),
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl TriadForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|&(v, c)| c * x[v]).sum::<f64>()
    }

    fn dense(&self, vars: usize, sign: f64) -> Vec<f64> {
        let mut row = vec![0.0; vars];
        for &(v, c) in &self.coeffs {
            row[v] += sign * c;
        }
        row
    }
}

/// One stage problem: minimize `t` with `|d| ≤ t` on active triads and
/// `|d| ≤ level` on frozen ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LexLp {
    pub var_count: usize,
    pub active: Vec<TriadForm>,
    pub frozen: Vec<(TriadForm, f64)>,
    /// Optional box on each variable, in log space.
    pub log_bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinmaxSolution {
    pub level: f64,
    pub assignment: Vec<f64>,
    /// Per active triad: a nonzero dual on either of its two rows.
    pub dual_forced: Vec<bool>,
}

enum Goal<'a> {
    Level,
    /// Minimize `c·x` with active triads capped at the level.
    Probe(&'a [f64], f64),
}

impl LexLp {
    /// Stage-one problem for `pcm`: one variable per missing pair in
    /// row-major order and every triad active.
    pub fn build(pcm: &IncompletePcm, bounds: Option<Bounds>) -> Self {
        let n = pcm.n();
        let missing = pcm.missing_pairs();
        let var_of = |i: usize, j: usize| missing.iter().position(|&p| p == (i, j));
        let mut active = Vec::new();
        for (i, j, k) in triples(n) {
            let mut form = TriadForm {
                triad: (i, j, k),
                coeffs: Vec::new(),
                constant: 0.0,
            };
            for (p, q, sign) in [(i, j, 1.0), (j, k, 1.0), (i, k, -1.0)] {
                match pcm.get(p, q) {
                    Some(a) => form.constant += sign * a.ln(),
                    None => form
                        .coeffs
                        .push((var_of(p, q).expect("missing pair"), sign)),
                }
            }
            active.push(form);
        }
        Self {
            var_count: missing.len(),
            active,
            frozen: Vec::new(),
            log_bounds: bounds.map(|b| (b.lo.ln(), b.hi.ln())),
        }
    }

    /// Rows of the LP: two per active triad, two per frozen triad and two
    /// per bounded variable.
    pub fn constraint_count(&self) -> usize {
        2 * (self.active.len() + self.frozen.len())
            + if self.log_bounds.is_some() {
                2 * self.var_count
            } else {
                0
            }
    }

    fn program(&self, goal: &Goal) -> LinearProgram {
        let nv = self.var_count;
        let (objective, nonneg, with_t) = match goal {
            Goal::Level => {
                let mut c = vec![0.0; nv + 1];
                c[nv] = 1.0;
                let mut nn = vec![false; nv + 1];
                nn[nv] = true;
                (c, nn, true)
            }
            Goal::Probe(c, _) => (c.to_vec(), vec![false; nv], false),
        };
        let width = objective.len();
        let mut lp = LinearProgram::new(objective, nonneg);
        let mut push = |form: &TriadForm, sign: f64, cap: Option<f64>| {
            let mut row = form.dense(width, sign);
            match cap {
                None => {
                    row[nv] = -1.0;
                    lp.add_le(row, -sign * form.constant);
                }
                Some(level) => lp.add_le(row, level + FREEZE_SLACK - sign * form.constant),
            }
        };
        let cap = match goal {
            Goal::Level => None,
            Goal::Probe(_, level) => Some(*level),
        };
        debug_assert_eq!(with_t, cap.is_none());
        for form in &self.active {
            push(form, 1.0, cap);
            push(form, -1.0, cap);
        }
        for (form, level) in &self.frozen {
            push(form, 1.0, Some(*level));
            push(form, -1.0, Some(*level));
        }
        if let Some((lo, hi)) = self.log_bounds {
            for v in 0..nv {
                let mut row = vec![0.0; width];
                row[v] = 1.0;
                lp.add_le(row.clone(), hi);
                row[v] = -1.0;
                lp.add_le(row, -lo);
            }
        }
        lp
    }
}

/// Solves one stage. With no active triads the level is 0 by convention
/// and the assignment is empty.
pub fn solve_minmax_lp(stage: &LexLp) -> Result<MinmaxSolution> {
    if stage.active.is_empty() {
        return Ok(MinmaxSolution {
            level: 0.0,
            assignment: Vec::new(),
            dual_forced: Vec::new(),
        });
    }
    let sol = lp::solve(&stage.program(&Goal::Level))?;
    let nv = stage.var_count;
    let dual_forced = (0..stage.active.len())
        .map(|a| {
            sol.duals[2 * a].abs() > DUAL_TOLERANCE || sol.duals[2 * a + 1].abs() > DUAL_TOLERANCE
        })
        .collect();
    Ok(MinmaxSolution {
        level: sol.x[nv].max(0.0),
        assignment: sol.x[..nv].to_vec(),
        dual_forced,
    })
}

/// Minimizes and maximizes a fixed direction over the optimal face.
fn face_is_degenerate(stage: &LexLp, level: f64) -> Result<bool> {
    let nv = stage.var_count;
    if nv == 0 {
        return Ok(false);
    }
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let c: Vec<f64> = (0..nv)
        .map(|k| 1.0 + ((k + 1) as f64 * GOLDEN).fract())
        .collect();
    let neg: Vec<f64> = c.iter().map(|v| -v).collect();
    let lo = lp::solve(&stage.program(&Goal::Probe(&c, level)))?.objective;
    let hi = -lp::solve(&stage.program(&Goal::Probe(&neg, level)))?.objective;
    Ok(hi - lo > FACE_TOLERANCE)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LexOptions {
    /// Box for the filled entries, e.g. [`Bounds::SAATY`].
    pub bounds: Option<Bounds>,
}

pub fn lex_completion(pcm: &IncompletePcm) -> Result<CompletionResult> {
    lex_completion_with(pcm, &LexOptions::default())
}

pub fn lex_completion_with(pcm: &IncompletePcm, opts: &LexOptions) -> Result<CompletionResult> {
    require_connected(pcm)?;
    if pcm.is_complete() {
        let diagnostics = Diagnostics {
            stages: Some(Vec::new()),
            max_ti: Some(triad_profile(pcm)?.max()),
            ..Default::default()
        };
        return CompletionResult::from_fill(pcm, &[], CompletionMethod::Lexicographic, diagnostics);
    }
    let mut stage_lp = LexLp::build(pcm, opts.bounds);
    let max_stages = stage_lp.active.len();
    let mut records = Vec::new();
    let mut assignment = vec![0.0; stage_lp.var_count];
    while !stage_lp.active.is_empty() {
        if records.len() >= max_stages {
            return Err(PcmError::LpNumericalFailure("stage limit exceeded".into()));
        }
        let sol = solve_minmax_lp(&stage_lp)?;
        let level = sol.level;
        assignment.clone_from(&sol.assignment);
        let mut forced = vec![false; stage_lp.active.len()];
        for (a, form) in stage_lp.active.iter().enumerate() {
            if form.eval(&sol.assignment).abs() < level - FORCE_TOLERANCE {
                continue;
            }
            let mut probe = stage_lp.clone();
            let own = probe.active.remove(a);
            let capped = probe.active.drain(..).map(|f| (f, level));
            probe.frozen.extend(capped);
            probe.active.push(own);
            let s = solve_minmax_lp(&probe)?.level;
            forced[a] = s >= level - FORCE_TOLERANCE;
        }
        if !forced.iter().any(|&f| f) {
            return Err(PcmError::LpNumericalFailure(format!(
                "no forced triad at stage {}",
                records.len() + 1
            )));
        }
        let dual_disagreements = forced
            .iter()
            .zip(&sol.dual_forced)
            .filter(|(a, b)| a != b)
            .count();
        let degenerate_face = face_is_degenerate(&stage_lp, level)?;
        let mut frozen_triads = Vec::new();
        let mut remaining = Vec::new();
        for (form, is_forced) in stage_lp.active.drain(..).zip(forced) {
            if is_forced {
                frozen_triads.push(form.triad);
                stage_lp.frozen.push((form, level));
            } else {
                remaining.push(form);
            }
        }
        stage_lp.active = remaining;
        records.push(LexStageRecord {
            stage: records.len() + 1,
            level,
            frozen_triads,
            degenerate_face,
            dual_disagreements,
        });
    }
    let values: Vec<f64> = assignment.iter().map(|l| l.exp()).collect();
    finish(pcm, &values, Some(records))
}

fn finish(
    pcm: &IncompletePcm,
    values: &[f64],
    stages: Option<Vec<LexStageRecord>>,
) -> Result<CompletionResult> {
    let mut result = CompletionResult::from_fill(
        pcm,
        values,
        CompletionMethod::Lexicographic,
        Diagnostics::default(),
    )?;
    let m = &result.matrix;
    let theta = profile_from_fn(m.n(), |i, j| m.get(i, j).expect("complete"));
    result.diagnostics.max_ti = Some(theta.max());
    result.diagnostics.stages = stages;
    Ok(result)
}

/// Missing pairs share no index.
pub fn missing_are_independent(pcm: &IncompletePcm) -> bool {
    let mut used = vec![false; pcm.n()];
    for (i, j) in pcm.missing_pairs() {
        if used[i] || used[j] {
            return false;
        }
        used[i] = true;
        used[j] = true;
    }
    true
}

/// Closed form for independent missing entries: each one only appears in
/// triads `(i, k, j)` whose other two entries are known, so its log is the
/// midpoint of the extreme two-step paths `ln a_ik + ln a_kj`.
pub fn lex_completion_independent(pcm: &IncompletePcm) -> Result<CompletionResult> {
    lex_completion_independent_with(pcm, &LexOptions::default())
}

pub fn lex_completion_independent_with(
    pcm: &IncompletePcm,
    opts: &LexOptions,
) -> Result<CompletionResult> {
    if !missing_are_independent(pcm) {
        return Err(PcmError::NotIndependent);
    }
    require_connected(pcm)?;
    let n = pcm.n();
    let values: Vec<f64> = pcm
        .missing_pairs()
        .into_iter()
        .map(|(i, j)| {
            let (lo, hi) = (0..n)
                .filter(|&k| k != i && k != j)
                .map(|k| {
                    pcm.get(i, k).expect("independent").ln()
                        + pcm.get(k, j).expect("independent").ln()
                })
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                    (lo.min(c), hi.max(c))
                });
            let v = (0.5 * (lo + hi)).exp();
            opts.bounds.map_or(v, |b| b.clamp(v))
        })
        .collect();
    finish(pcm, &values, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;
    use crate::triads::triad_profile;

    fn example_3() -> IncompletePcm {
        parse_pcm("1,2,*,*\n1/2,1,1,8\n*,1,1,1\n*,1/8,1,1").unwrap()
    }

    #[test]
    fn stage_one_is_bounded_by_variable_free_triad() {
        let s = solve_minmax_lp(&LexLp::build(&example_3(), None)).unwrap();
        assert!((s.level - 8f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn empty_stage_has_level_zero() {
        let stage = LexLp {
            var_count: 0,
            active: Vec::new(),
            frozen: Vec::new(),
            log_bounds: None,
        };
        let s = solve_minmax_lp(&stage).unwrap();
        assert_eq!(s.level, 0.0);
        assert!(s.assignment.is_empty());
    }

    #[test]
    fn stage_one_constraint_count() {
        let stage = LexLp::build(&example_3(), None);
        assert_eq!(stage.constraint_count(), 2 * 4);
    }

    #[test]
    fn example_3_stages() {
        let c = lex_completion(&example_3()).unwrap();
        assert!((c.filled_value(0, 2).unwrap() - 4.0).abs() < 1e-6);
        assert!((c.filled_value(0, 3).unwrap() - 8.0).abs() < 1e-6);
        let stages = c.diagnostics.stages.as_ref().unwrap();
        let levels: Vec<f64> = stages.iter().map(LexStageRecord::ti_level).collect();
        assert_eq!(levels.len(), 2);
        assert!((levels[0] - 8.0).abs() < 1e-9 && (levels[1] - 2.0).abs() < 1e-9);
        assert_eq!(stages[0].frozen_triads, vec![(1, 2, 3)]);
        assert_eq!(stages[1].frozen_triads.len(), 3);
        let theta = triad_profile(&c.matrix).unwrap().theta;
        for (g, e) in theta.iter().zip([8.0, 2.0, 2.0, 2.0]) {
            assert!((g - e).abs() < 1e-9);
        }
    }

    #[test]
    fn example_3_is_not_independent() {
        assert_eq!(
            lex_completion_independent(&example_3()),
            Err(PcmError::NotIndependent)
        );
    }

    #[test]
    fn independent_fast_path_matches_lp() {
        let a = parse_pcm("1,2,*,4\n1/2,1,1,*\n*,1,1,2\n1/4,*,1/2,1").unwrap();
        let fast = lex_completion_independent(&a).unwrap();
        let slow = lex_completion(&a).unwrap();
        for (f, s) in fast.filled.iter().zip(&slow.filled) {
            assert!((f.value - s.value).abs() < 1e-8, "{f:?} vs {s:?}");
        }
    }

    #[test]
    fn complete_input_has_no_stages() {
        let a = parse_pcm("1,2,3\n1/2,1,4\n1/3,1/4,1").unwrap();
        let c = lex_completion(&a).unwrap();
        assert!(c.filled.is_empty());
        assert_eq!(c.diagnostics.stages.as_ref().unwrap().len(), 0);
        assert!((c.diagnostics.max_ti.unwrap() - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stage_documents_are_one_based() {
        let c = lex_completion(&example_3()).unwrap();
        let doc = c.diagnostics.stages.as_ref().unwrap()[0].to_document();
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            json,
            r#"{"stage":1,"level":8.0,"frozen":[[2,3,4]],"degenerate_face":true}"#
        );
    }
}
