//! Eigenvalue-optimal completion by cyclic coordinates.
//!
//! Each missing entry is parameterized as `x = e^t`. The Perron root is a
//! log-convex function of `t` for every coordinate, so each one-dimensional
//! subproblem has a single minimizer. It is located from the sign of the
//! derivative
//!
//! ```text
//! dλ/dt = (u_i v_j a_ij − u_j v_i a_ji) / (u·v)
//! ```
//!
//! where `v` and `u` are the right and left Perron vectors: the step is
//! bracketed by tripling steps and then refined with Illinois regula falsi.
//! Sweeps run over the missing pairs in row-major order and stop when
//! `λ_max` improves by less than the tolerance and no coordinate moved by
//! more than `1e-10`.

use crate::eigen::{perron, power_iterate};
use crate::error::{PcmError, Result};
use crate::graph::require_connected;
use crate::matrix::{IncompletePcm, Judgment, SquareMatrix};
use crate::weights::{Gauge, WeightVector};

use super::llsm::llsm_log_weights;
use super::{CompletionMethod, CompletionResult, Diagnostics};

const SLOPE_TOLERANCE: f64 = 1e-12;
const ARGUMENT_TOLERANCE: f64 = 1e-12;
const STEP_TOLERANCE: f64 = 1e-10;
const MAX_BRACKET_EXPANSIONS: usize = 60;
const MAX_ROOT_ITERATIONS: usize = 200;

/// Closed interval for filled entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    /// `[1/9, 9]`.
    pub const SAATY: Bounds = Bounds {
        lo: 1.0 / 9.0,
        hi: 9.0,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(PcmError::BadValue(format!("invalid bounds [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Parses `lo:hi`, each side a decimal or fraction (`1/9:9`).
    pub fn parse(text: &str) -> Result<Self> {
        let (lo, hi) = text
            .split_once(':')
            .ok_or_else(|| PcmError::BadValue(format!("bounds {text:?} must be lo:hi")))?;
        let p = |s: &str| {
            Judgment::parse(s)
                .map(|j| j.value())
                .map_err(PcmError::BadValue)
        };
        Self::new(p(lo)?, p(hi)?)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// Initial values for the missing entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmStart {
    /// The LLSM completion.
    #[default]
    Llsm,
    /// All missing entries equal to 1.
    Ones,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmOptions {
    pub bounds: Option<Bounds>,
    pub start: EmStart,
    pub max_sweeps: usize,
    /// Minimal `λ_max` improvement per sweep.
    pub tolerance: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            bounds: None,
            start: EmStart::Llsm,
            max_sweeps: 200,
            tolerance: 1e-12,
        }
    }
}

struct Solver {
    a: SquareMatrix,
    vars: Vec<(usize, usize)>,
    t: Vec<f64>,
    right: Vec<f64>,
    left: Vec<f64>,
    scratch: Vec<f64>,
    lambda: f64,
    log_bounds: (f64, f64),
}

impl Solver {
    fn set(&mut self, k: usize, t: f64) {
        let (i, j) = self.vars[k];
        self.t[k] = t;
        self.a.set(i, j, t.exp());
        self.a.set(j, i, (-t).exp());
    }

    fn eval_right(&mut self) -> Result<f64> {
        let (lambda, _) = power_iterate(&self.a, &mut self.right, &mut self.scratch, false)?;
        self.lambda = lambda;
        Ok(lambda)
    }

    /// `dλ/dt_k` at `t`, leaving the solver at `t`.
    fn slope_at(&mut self, k: usize, t: f64) -> Result<f64> {
        self.set(k, t);
        self.eval_right()?;
        power_iterate(&self.a, &mut self.left, &mut self.scratch, true)?;
        let (i, j) = self.vars[k];
        let (u, v) = (&self.left, &self.right);
        let uv: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        Ok((u[i] * v[j] * self.a.get(i, j) - u[j] * v[i] * self.a.get(j, i)) / uv)
    }

    /// Moves coordinate `k` to its minimizer; returns the absolute step.
    fn minimize(&mut self, k: usize) -> Result<f64> {
        let t0 = self.t[k];
        let (lo_b, hi_b) = self.log_bounds;
        let g0 = self.slope_at(k, t0)?;
        if g0.abs() <= SLOPE_TOLERANCE {
            return Ok(0.0);
        }
        // bracket [a, b] with g(a) <= 0 <= g(b)
        let dir = if g0 > 0.0 { -1.0 } else { 1.0 };
        let (mut near, mut g_near) = (t0, g0);
        let mut step = 3f64.ln();
        let mut far;
        let mut g_far;
        let mut expansions = 0;
        loop {
            far = (t0 + dir * step).clamp(lo_b, hi_b);
            g_far = self.slope_at(k, far)?;
            if g_far * g0 <= 0.0 {
                break;
            }
            if far == lo_b || far == hi_b {
                // minimizer sits on the bound
                return Ok((far - t0).abs());
            }
            near = far;
            g_near = g_far;
            step *= 3.0;
            expansions += 1;
            if expansions > MAX_BRACKET_EXPANSIONS {
                return Err(PcmError::NoConvergence(expansions));
            }
        }
        let (mut a, mut ga, mut b, mut gb) = if dir > 0.0 {
            (near, g_near, far, g_far)
        } else {
            (far, g_far, near, g_near)
        };
        let mut side = 0i8;
        let mut c = 0.5 * (a + b);
        for _ in 0..MAX_ROOT_ITERATIONS {
            c = (a * gb - b * ga) / (gb - ga);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let gc = self.slope_at(k, c)?;
            if gc.abs() <= SLOPE_TOLERANCE {
                break;
            }
            if gc < 0.0 {
                a = c;
                ga = gc;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                gb = gc;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            }
            if b - a < ARGUMENT_TOLERANCE {
                break;
            }
        }
        if self.t[k] != c {
            self.set(k, c);
            self.eval_right()?;
        }
        Ok((c - t0).abs())
    }
}

/// Eigenvalue-optimal completion with default options and optional bounds.
pub fn em_completion(pcm: &IncompletePcm, bounds: Option<Bounds>) -> Result<CompletionResult> {
    em_completion_with(
        pcm,
        &EmOptions {
            bounds,
            ..Default::default()
        },
    )
}

pub fn em_completion_with(pcm: &IncompletePcm, opts: &EmOptions) -> Result<CompletionResult> {
    require_connected(pcm)?;
    let vars = pcm.missing_pairs();
    if vars.is_empty() {
        let e = perron(&pcm.to_dense()?)?;
        let diagnostics = Diagnostics {
            lambda_max: Some(e.lambda),
            sweeps: Some(0),
            ..Default::default()
        };
        return CompletionResult::from_fill(
            pcm,
            &[],
            CompletionMethod::EigenvalueOptimal,
            diagnostics,
        );
    }
    let start: Vec<f64> = match opts.start {
        EmStart::Llsm => {
            let y = llsm_log_weights(pcm)?;
            vars.iter().map(|&(i, j)| y[i] - y[j]).collect()
        }
        EmStart::Ones => vec![0.0; vars.len()],
    };
    let log_bounds = opts.bounds.map_or((f64::NEG_INFINITY, f64::INFINITY), |b| {
        (b.lo.ln(), b.hi.ln())
    });
    let n = pcm.n();
    let mut solver = Solver {
        a: pcm.to_dense_filled(|_, _| 1.0),
        t: vec![0.0; vars.len()],
        vars,
        right: vec![1.0; n],
        left: vec![1.0; n],
        scratch: vec![0.0; n],
        lambda: f64::NAN,
        log_bounds,
    };
    for (k, &t) in start.iter().enumerate() {
        solver.set(k, t.clamp(log_bounds.0, log_bounds.1));
    }
    let mut lambda = solver.eval_right()?;
    let mut sweeps = 0;
    let mut converged = false;
    let mut last_improvement = f64::INFINITY;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_step: f64 = 0.0;
        for k in 0..solver.vars.len() {
            max_step = max_step.max(solver.minimize(k)?);
        }
        last_improvement = lambda - solver.lambda;
        lambda = solver.lambda;
        if last_improvement < opts.tolerance && max_step < STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged && last_improvement >= opts.tolerance {
        return Err(PcmError::NoConvergence(sweeps));
    }
    let values: Vec<f64> = solver.t.iter().map(|t| t.exp()).collect();
    let result_lambda = perron(&solver.a)?.lambda;
    let diagnostics = Diagnostics {
        lambda_max: Some(result_lambda),
        sweeps: Some(sweeps),
        ..Default::default()
    };
    CompletionResult::from_fill(
        pcm,
        &values,
        CompletionMethod::EigenvalueOptimal,
        diagnostics,
    )
}

/// Perron vector of the eigenvalue-optimal completion.
pub fn em_weights(pcm: &IncompletePcm) -> Result<WeightVector> {
    let c = em_completion(pcm, None)?;
    let e = perron(&c.matrix.to_dense()?)?;
    Ok(WeightVector::from_weights(&e.vector, Gauge::SumOne))
}
