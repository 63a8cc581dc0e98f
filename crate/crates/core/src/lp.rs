//! Dense two-phase tableau simplex for small linear programs.
//!
//! Problems have the form `min c·x` subject to `A x ≤ b`, each variable
//! either free or nonnegative. Free variables are split into two
//! nonnegative columns. Pricing is Dantzig's rule and switches to Bland's
//! rule after `10·(rows + cols)` iterations; a hard iteration cap reports
//! `CycleDetected`.

use crate::error::{PcmError, Result};

/// Feasibility and optimality tolerance.
pub const EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub nonnegative: Vec<bool>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, nonnegative: Vec<bool>) -> Self {
        assert_eq!(objective.len(), nonnegative.len());
        Self {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
            nonnegative,
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row · x ≤ rhs`.
    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.var_count());
        self.rows.push(row);
        self.rhs.push(rhs);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// Shadow prices `∂ objective / ∂ rhs_i` (nonpositive for `≤` rows).
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    /// `m` constraint rows of width `cols + 1` (last entry is the rhs).
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    /// Reduced costs, width `cols + 1`; the last entry is `−objective`.
    z: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    fn price(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        self.z = vec![0.0; w];
        self.z[..self.cols].copy_from_slice(&cost[..self.cols]);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (zj, tj) in self.z.iter_mut().zip(&self.t[i]) {
                    *zj -= cb * tj;
                }
            }
        }
    }

    /// Runs simplex iterations over columns where `allowed` holds.
    fn optimize(&mut self, allowed: &[bool]) -> Result<()> {
        let m = self.t.len();
        let bland_after = 10 * (m + self.cols);
        let cap = bland_after + 50 * (m + self.cols) + 1000;
        let mut local = 0usize;
        loop {
            let bland = local >= bland_after;
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && self.z[j] < -EPS)
            } else {
                (0..self.cols)
                    .filter(|&j| allowed[j] && self.z[j] < -EPS)
                    .min_by(|&a, &b| self.z[a].total_cmp(&self.z[b]))
            };
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][self.cols].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let better = ratio < best - 1e-12
                                || (ratio <= best + 1e-12
                                    && if bland {
                                        self.basis[i] < self.basis[r]
                                    } else {
                                        a > self.t[r][c]
                                    });
                            if better {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(PcmError::Unbounded);
            };
            self.pivot(r, c);
            local += 1;
            self.iterations += 1;
            if local > cap {
                return Err(PcmError::CycleDetected);
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let nv = lp.var_count();
    let m = lp.rows.len();
    // structural columns
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(nv);
    let mut ncols = 0;
    for &nonneg in &lp.nonnegative {
        if nonneg {
            col_of.push((ncols, None));
            ncols += 1;
        } else {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let slack0 = ncols;
    ncols += m;
    let flipped: Vec<bool> = lp.rhs.iter().map(|&b| b < 0.0).collect();
    let art_rows: Vec<usize> = (0..m).filter(|&i| flipped[i]).collect();
    let art0 = ncols;
    ncols += art_rows.len();

    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0; m];
    for i in 0..m {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for (v, &(p, q)) in col_of.iter().enumerate() {
            let a = lp.rows[i][v] * sign;
            t[i][p] = a;
            if let Some(q) = q {
                t[i][q] = -a;
            }
        }
        t[i][slack0 + i] = sign;
        t[i][ncols] = lp.rhs[i] * sign;
        basis[i] = slack0 + i;
    }
    for (k, &i) in art_rows.iter().enumerate() {
        t[i][art0 + k] = 1.0;
        basis[i] = art0 + k;
    }
    let mut tab = Tableau {
        t,
        basis,
        cols: ncols,
        z: Vec::new(),
        iterations: 0,
    };

    if !art_rows.is_empty() {
        let mut cost = vec![0.0; ncols];
        cost[art0..].iter_mut().for_each(|c| *c = 1.0);
        tab.price(&cost);
        tab.optimize(&vec![true; ncols])?;
        if -tab.z[ncols] > EPS * (1.0 + art_rows.len() as f64) {
            return Err(PcmError::Infeasible);
        }
        // drive remaining artificials out of the basis
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= art0 {
                match (0..art0).find(|&j| tab.t[r][j].abs() > 1e-9) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![0.0; ncols];
    for (v, &(p, q)) in col_of.iter().enumerate() {
        cost[p] = lp.objective[v];
        if let Some(q) = q {
            cost[q] = -lp.objective[v];
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < art0).collect();
    tab.price(&cost);
    tab.optimize(&allowed)?;

    let mut values = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.t[i][ncols];
    }
    let x: Vec<f64> = col_of
        .iter()
        .map(|&(p, q)| values[p] - q.map_or(0.0, |q| values[q]))
        .collect();
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let duals = (0..m).map(|i| -tab.z[slack0 + i]).collect();
    Ok(LpSolution {
        objective,
        x,
        duals,
        iterations: tab.iterations,
    })
}
