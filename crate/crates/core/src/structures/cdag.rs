//! Matrices generated by connected directed acyclic graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::graph::UnionFind;
use crate::matrix::{IncompletePcm, Judgment, Scale};

/// Arcs are 0-based `(from, to)`: `from` dominates `to` by `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdagSpec {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
    pub alpha: f64,
}

/// External form with 1-based arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdagDocument {
    pub n: usize,
    pub arcs: Vec<[usize; 2]>,
    pub alpha: f64,
}

impl CdagDocument {
    pub fn to_spec(&self) -> Result<CdagSpec> {
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for &[i, j] in &self.arcs {
            if i == 0 || j == 0 || i > self.n || j > self.n {
                return Err(PcmError::BadDimension(format!(
                    "arc ({i}, {j}) outside 1..={}",
                    self.n
                )));
            }
            arcs.push((i - 1, j - 1));
        }
        Ok(CdagSpec {
            n: self.n,
            arcs,
            alpha: self.alpha,
        })
    }

    pub fn from_spec(spec: &CdagSpec) -> Self {
        Self {
            n: spec.n,
            arcs: spec.arcs.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            alpha: spec.alpha,
        }
    }
}

/// Kahn's algorithm; smallest available vertex first.
pub fn topological_order(n: usize, arcs: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in arcs {
        out[i].push(j);
        indegree[j] += 1;
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if order.len() < n {
        return Err(PcmError::CycleFound);
    }
    Ok(order)
}

pub fn cdag_matrix(spec: &CdagSpec) -> Result<IncompletePcm> {
    let n = spec.n;
    if !(spec.alpha > 1.0 && spec.alpha.is_finite()) {
        return Err(PcmError::InvalidAlpha(spec.alpha));
    }
    for &(i, j) in &spec.arcs {
        if i >= n || j >= n || i == j {
            return Err(PcmError::BadDimension(format!(
                "arc ({}, {}) is invalid",
                i + 1,
                j + 1
            )));
        }
    }
    topological_order(n, &spec.arcs)?;
    let mut uf = UnionFind::new(n);
    for &(i, j) in &spec.arcs {
        uf.union(i, j);
    }
    if uf.components() != 1 {
        return Err(PcmError::NotWeaklyConnected);
    }
    let mut pcm = IncompletePcm::new(n, Scale::Free)?;
    let alpha = Judgment::real(spec.alpha);
    for &(i, j) in &spec.arcs {
        if pcm.is_known(i, j) {
            return Err(PcmError::DuplicateEntry { i: i + 1, j: j + 1 });
        }
        pcm.set(i, j, alpha)?;
    }
    Ok(pcm)
}

/// A random weakly connected DAG: vertices keep their labels, arcs point
/// from a random permutation's earlier vertex to its later one, and every
/// pair is an arc with probability `density`. Rejects until connected.
pub fn random_cdag(n: usize, density: f64, alpha: f64, seed: u64) -> Result<CdagSpec> {
    if n < 2 {
        return Err(PcmError::BadDimension(format!("n = {n}, need at least 2")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(PcmError::BadValue(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut rank: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            rank.swap(i, rng.random_range(0..=i));
        }
        let mut arcs = Vec::new();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    arcs.push(if rank[i] < rank[j] { (i, j) } else { (j, i) });
                    uf.union(i, j);
                }
            }
        }
        if uf.components() == 1 {
            return Ok(CdagSpec { n, arcs, alpha });
        }
    }
}
