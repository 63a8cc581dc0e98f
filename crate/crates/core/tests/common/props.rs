//! Randomized property suites shared by the property tests and the
//! acceptance report. Each returns the number of instances checked.

#![allow(dead_code)]

use pcm_core::lex::lex_completion;
use pcm_core::matrix::{pairs, SAATY_VALUES};
use pcm_core::structures::{cdag_matrix, ordinal_violations, random_cdag};
use pcm_core::weighting::{em_completion, llsm_completion, llsm_weights, spanning_tree_gm_weights};
use pcm_core::{associated_graph, triad_ti, Gauge, IncompletePcm, Scale, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INSTANCES: usize = 200;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn saaty(rng: &mut ChaCha8Rng) -> f64 {
    let (p, q) = SAATY_VALUES[rng.random_range(0..SAATY_VALUES.len())];
    f64::from(p) / f64::from(q)
}

/// Random connected matrix with exactly `m` missing pairs.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, m: usize, on_scale: bool) -> IncompletePcm {
    let all: Vec<(usize, usize)> = pairs(n).collect();
    loop {
        let missing = rand::seq::index::sample(rng, all.len(), m).into_vec();
        let mut a = IncompletePcm::new(n, Scale::Free).unwrap();
        for (k, &(i, j)) in all.iter().enumerate() {
            if !missing.contains(&k) {
                let v = if on_scale {
                    saaty(rng)
                } else {
                    rng.random_range(-2.5f64..2.5).exp()
                };
                a.set(i, j, v.into()).unwrap();
            }
        }
        if associated_graph(&a).is_connected() {
            return a;
        }
    }
}

fn max_missing(n: usize) -> usize {
    (n - 1) * (n - 2) / 2
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Geometric mean over spanning trees equals the LLSM weights.
pub fn tree_gm_equals_llsm(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..INSTANCES {
        let n = r.random_range(3..=6);
        let m = r.random_range(0..=max_missing(n));
        let a = random_connected(&mut r, n, m, case % 2 == 0);
        let t = spanning_tree_gm_weights(&a, 1 << 20).map_err(|e| e.to_string())?;
        let l = llsm_weights(&a).map_err(|e| e.to_string())?;
        let d = max_abs_diff(t.weights(), l.weights());
        if d > 1e-10 {
            return Err(format!("case {case} (n={n}, m={m}): deviation {d:e}"));
        }
    }
    Ok(INSTANCES)
}

/// For four alternatives the eigenvalue-optimal and LLSM completions agree.
pub fn em_equals_llsm_for_four(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..INSTANCES {
        let m = r.random_range(1..=3);
        let a = random_connected(&mut r, 4, m, case % 2 == 0);
        let e = em_completion(&a, None).map_err(|e| e.to_string())?;
        let l = llsm_completion(&a).map_err(|e| e.to_string())?;
        for (i, j) in a.missing_pairs() {
            let (x, y) = (e.filled_value(i, j).unwrap(), l.filled_value(i, j).unwrap());
            if (x.ln() - y.ln()).abs() > 1e-6 {
                return Err(format!(
                    "case {case}: a_{}{} em {x} vs llsm {y}",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    Ok(INSTANCES)
}

/// Largest triad inconsistency with the missing entries set to `x` (logs).
fn max_ti_with(a: &IncompletePcm, vars: &[(usize, usize)], logs: &[f64]) -> f64 {
    let n = a.n();
    let get = |i: usize, j: usize| -> f64 {
        if let Some(v) = a.get(i, j) {
            return v;
        }
        let k = vars
            .iter()
            .position(|&p| p == (i.min(j), i.max(j)))
            .unwrap();
        if i < j {
            logs[k].exp()
        } else {
            (-logs[k]).exp()
        }
    };
    let mut worst: f64 = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                worst = worst.max(triad_ti(get(i, j), get(j, k), get(i, k)));
            }
        }
    }
    worst
}

/// Zooming grid search of the minimal largest triad inconsistency over the
/// missing entries (at most two). The objective is convex in the logs.
pub fn grid_min_max_ti(a: &IncompletePcm) -> f64 {
    let vars = a.missing_pairs();
    let steps = 60usize;
    let mut center = vec![0.0; vars.len()];
    let mut half = 6.0;
    let mut best = f64::INFINITY;
    for _ in 0..10 {
        let h = 2.0 * half / steps as f64;
        let mut best_point = center.clone();
        let points = (steps + 1).pow(vars.len() as u32);
        for idx in 0..points {
            let mut p = center.clone();
            let mut rest = idx;
            for c in p.iter_mut() {
                *c += -half + h * (rest % (steps + 1)) as f64;
                rest /= steps + 1;
            }
            let v = max_ti_with(a, &vars, &p);
            if v < best {
                best = v;
                best_point = p;
            }
        }
        center = best_point;
        half = 4.0 * h;
    }
    best
}

/// The first component of the lexicographic profile equals the grid-search
/// minimum of the largest triad inconsistency.
pub fn lex_matches_grid(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..INSTANCES {
        let n = r.random_range(3..=4);
        let m = r.random_range(1..=max_missing(n).min(2));
        let a = random_connected(&mut r, n, m, case % 3 != 0);
        let c = lex_completion(&a).map_err(|e| format!("case {case}: {e}"))?;
        let theta1 = c.diagnostics.max_ti.unwrap();
        let grid = grid_min_max_ti(&a);
        if (theta1 - grid).abs() > 2e-3 {
            return Err(format!(
                "case {case} (n={n}, m={m}): lex {theta1} vs grid {grid}"
            ));
        }
    }
    Ok(INSTANCES)
}

fn random_cdag_matrix(r: &mut ChaCha8Rng, alpha: f64) -> (usize, pcm_core::structures::CdagSpec) {
    let n = r.random_range(3..=7);
    let density = r.random_range(0.3..0.8);
    let spec = random_cdag(n, density, alpha, r.random()).unwrap();
    (n, spec)
}

/// Weights computed from the lexicographic completion of a CDAG matrix
/// respect every known comparison.
pub fn cdag_lex_has_no_violations(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..INSTANCES {
        let alpha = [2.0, 3.0, 5.0, 9.0][case % 4];
        let (_, spec) = random_cdag_matrix(&mut r, alpha);
        let a = cdag_matrix(&spec).unwrap();
        let c = lex_completion(&a).map_err(|e| format!("case {case}: {e}"))?;
        let dense = c.matrix.to_dense().unwrap();
        let em = pcm_core::eigen::perron(&dense).map_err(|e| e.to_string())?;
        let weightings = [
            ("em", WeightVector::from_weights(&em.vector, Gauge::SumOne)),
            ("llsm", llsm_weights(&c.matrix).map_err(|e| e.to_string())?),
        ];
        for (name, w) in weightings {
            let v = ordinal_violations(&a, &w).map_err(|e| e.to_string())?;
            if !v.is_empty() {
                return Err(format!(
                    "case {case} {name}: {:?} on {:?}",
                    v.violations, spec
                ));
            }
        }
    }
    Ok(INSTANCES)
}

/// The LLSM ranking of a CDAG matrix does not depend on the dominance value.
pub fn cdag_llsm_ranking_alpha_invariant(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for case in 0..INSTANCES {
        let (_, mut spec) = random_cdag_matrix(&mut r, 2.0);
        let mut base: Option<Vec<f64>> = None;
        for alpha in [2.0, 3.0, 5.0, 9.0] {
            spec.alpha = alpha;
            let y = pcm_core::weighting::llsm_log_weights(&cdag_matrix(&spec).unwrap()).unwrap();
            // log-weights scale linearly with ln alpha
            let shape: Vec<f64> = y.iter().map(|v| v / f64::ln(alpha)).collect();
            match &base {
                None => base = Some(shape),
                Some(b) => {
                    if max_abs_diff(b, &shape) > 1e-9 {
                        return Err(format!("case {case}: shape changes at alpha {alpha}"));
                    }
                }
            }
        }
    }
    Ok(INSTANCES)
}
