//! Random indices for complete and incomplete matrices and the generalized
//! consistency ratio.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::consistency_index;
use crate::error::{PcmError, Result};
use crate::graph::{ComparisonGraph, UnionFind};
use crate::matrix::{pair_count, pair_index, pairs, IncompletePcm, Judgment, Scale, SAATY_VALUES};
use crate::weighting::{em_completion, Bounds};

/// Random index of complete matrices, `n = 4..=10`.
const COMPLETE_RI: [(usize, f64); 7] = [
    (4, 0.884),
    (5, 1.109),
    (6, 1.249),
    (7, 1.341),
    (8, 1.404),
    (9, 1.451),
    (10, 1.486),
];

/// `(n, m, mean, stdev)` for incomplete matrices.
const INCOMPLETE_RI: [(usize, usize, f64, f64); 19] = [
    (4, 1, 0.583, 0.531),
    (4, 2, 0.306, 0.387),
    (4, 3, 0.053, 0.073),
    (5, 1, 0.925, 0.485),
    (5, 2, 0.739, 0.452),
    (5, 3, 0.557, 0.405),
    (5, 4, 0.379, 0.340),
    (5, 5, 0.212, 0.247),
    (5, 6, 0.059, 0.068),
    (6, 1, 1.128, 0.400),
    (6, 2, 1.007, 0.392),
    (6, 3, 0.883, 0.380),
    (6, 4, 0.758, 0.364),
    (6, 5, 0.634, 0.344),
    (6, 6, 0.510, 0.317),
    (6, 7, 0.389, 0.281),
    (6, 8, 0.271, 0.234),
    (6, 9, 0.161, 0.170),
    (7, 1, 1.256, 0.330),
];

/// Largest number of missing entries that can leave the graph connected.
pub fn max_missing(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        (n - 1) * (n.saturating_sub(2)) / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiSource {
    Table,
    Approx,
    Simulated,
}

impl std::fmt::Display for RiSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RiSource::Table => "table",
            RiSource::Approx => "approx",
            RiSource::Simulated => "simulated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    BuiltinTable,
    Simulated { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiCell {
    pub mean: f64,
    /// `None` for the complete-matrix row, which is published without one.
    pub stdev: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiTable {
    complete_row: BTreeMap<usize, f64>,
    cells: BTreeMap<(usize, usize), RiCell>,
}

impl Default for RiTable {
    fn default() -> Self {
        Self::builtin()
    }
}

impl RiTable {
    pub fn builtin() -> Self {
        let complete_row: BTreeMap<usize, f64> = COMPLETE_RI.into_iter().collect();
        let mut cells = BTreeMap::new();
        for &(n, ri) in &COMPLETE_RI {
            cells.insert(
                (n, 0),
                RiCell {
                    mean: ri,
                    stdev: None,
                    provenance: Provenance::BuiltinTable,
                },
            );
        }
        for &(n, m, mean, stdev) in &INCOMPLETE_RI {
            cells.insert(
                (n, m),
                RiCell {
                    mean,
                    stdev: Some(stdev),
                    provenance: Provenance::BuiltinTable,
                },
            );
        }
        Self {
            complete_row,
            cells,
        }
    }

    pub fn complete(&self, n: usize) -> Option<f64> {
        self.complete_row.get(&n).copied()
    }

    pub fn cell(&self, n: usize, m: usize) -> Option<&RiCell> {
        self.cells.get(&(n, m))
    }

    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize), &RiCell)> {
        self.cells.iter().map(|(&k, v)| (k, v))
    }

    /// Overrides the complete-matrix random index for `n`.
    pub fn set_complete(&mut self, n: usize, ri: f64) {
        self.complete_row.insert(n, ri);
    }

    pub fn record_simulation(
        &mut self,
        n: usize,
        m: usize,
        mean: f64,
        stdev: f64,
        samples: usize,
        seed: u64,
    ) {
        self.cells.insert(
            (n, m),
            RiCell {
                mean,
                stdev: Some(stdev),
                provenance: Provenance::Simulated { samples, seed },
            },
        );
        if m == 0 {
            self.complete_row.insert(n, mean);
        }
    }

    /// `[1 − 2m/((n−1)(n−2))]·RI_{n,0}`.
    pub fn approx(&self, n: usize, m: usize) -> Result<f64> {
        check_range(n, m)?;
        let base = self.complete(n).ok_or(PcmError::UnknownBaseRi(n))?;
        Ok((1.0 - 2.0 * m as f64 / ((n - 1) * (n - 2)) as f64) * base)
    }

    pub fn lookup(&self, n: usize, m: usize, policy: RiQueryPolicy) -> Result<(f64, RiSource)> {
        check_range(n, m)?;
        if let Some(c) = self.cell(n, m) {
            let source = match c.provenance {
                Provenance::BuiltinTable => RiSource::Table,
                Provenance::Simulated { .. } => RiSource::Simulated,
            };
            return Ok((c.mean, source));
        }
        match policy {
            RiQueryPolicy::TableOnly => Err(PcmError::NotInTable { n, m }),
            RiQueryPolicy::TableThenApprox => Ok((self.approx(n, m)?, RiSource::Approx)),
            RiQueryPolicy::SimulateIfMissing { samples, seed } => {
                let (mean, _) =
                    simulate_ri(n, m, samples, seed, &MissingPatternPolicy::UniformConnected)?;
                Ok((mean, RiSource::Simulated))
            }
        }
    }
}

fn builtin() -> &'static RiTable {
    static TABLE: OnceLock<RiTable> = OnceLock::new();
    TABLE.get_or_init(RiTable::builtin)
}

fn check_range(n: usize, m: usize) -> Result<()> {
    if n < 3 || m > max_missing(n) {
        return Err(PcmError::OutOfRange { n, m });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RiQueryPolicy {
    TableOnly,
    #[default]
    TableThenApprox,
    SimulateIfMissing {
        samples: usize,
        seed: u64,
    },
}

/// Looks up the built-in table.
pub fn ri_lookup(n: usize, m: usize, policy: RiQueryPolicy) -> Result<(f64, RiSource)> {
    builtin().lookup(n, m, policy)
}

pub fn ri_approx(n: usize, m: usize) -> Result<f64> {
    builtin().approx(n, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiUsed {
    pub value: f64,
    pub source: RiSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InconsistencyReport {
    pub n: usize,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri_used: RiUsed,
    pub cr: f64,
    /// Missing count.
    pub m: usize,
    pub bounded: bool,
}

/// CI of the eigenvalue-optimal completion divided by `RI_{n,m}`.
pub fn cr_incomplete(
    pcm: &IncompletePcm,
    policy: RiQueryPolicy,
    bounded: bool,
) -> Result<InconsistencyReport> {
    let n = pcm.n();
    let m = pcm.missing_count();
    let completion = em_completion(pcm, bounded.then_some(Bounds::SAATY))?;
    let lambda_max = completion
        .diagnostics
        .lambda_max
        .expect("em reports lambda");
    let ci = consistency_index(lambda_max, n);
    let (ri, source) = ri_lookup(n, m, policy)?;
    Ok(InconsistencyReport {
        n,
        lambda_max,
        ci,
        ri_used: RiUsed { value: ri, source },
        cr: if ri > 0.0 { ci / ri } else { 0.0 },
        m,
        bounded,
    })
}

/// Where the missing entries of simulated matrices go.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum MissingPatternPolicy {
    /// Uniform over all position sets of the requested size that keep the
    /// graph connected, by rejection sampling.
    #[default]
    UniformConnected,
    /// The same 0-based pairs `i < j` in every sample.
    Fixed(Vec<(usize, usize)>),
}

impl std::str::FromStr for MissingPatternPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform-connected" => Ok(Self::UniformConnected),
            other => Err(format!("unknown pattern policy {other:?}")),
        }
    }
}

fn connected_without(n: usize, missing: &[bool]) -> bool {
    let mut uf = UnionFind::new(n);
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !missing[idx] {
                uf.union(i, j);
            }
            idx += 1;
        }
    }
    uf.components() == 1
}

/// Random matrix for sample `index`: the stream of the generator is the
/// sample index, so each sample is reproducible on its own.
pub fn random_sample(
    n: usize,
    m: usize,
    seed: u64,
    index: u64,
    pattern: &MissingPatternPolicy,
) -> Result<IncompletePcm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let total = pair_count(n);
    let mut missing = vec![false; total];
    match pattern {
        MissingPatternPolicy::UniformConnected => loop {
            missing.iter_mut().for_each(|x| *x = false);
            let picked = rand::seq::index::sample(&mut rng, total, m);
            for p in picked {
                missing[p] = true;
            }
            if connected_without(n, &missing) {
                break;
            }
        },
        MissingPatternPolicy::Fixed(list) => {
            for &(i, j) in list {
                missing[pair_index(n, i.min(j), i.max(j))] = true;
            }
        }
    }
    let mut pcm = IncompletePcm::new(n, Scale::Saaty)?;
    for ((i, j), &miss) in pairs(n).zip(&missing) {
        let (p, q) = SAATY_VALUES[rng.random_range(0..SAATY_VALUES.len())];
        if !miss {
            pcm.set(i, j, Judgment::fraction(p.into(), q.into()))?;
        }
    }
    Ok(pcm)
}

/// Mean and population standard deviation of the CI of the bounded
/// eigenvalue-optimal completion over `samples` random matrices.
pub fn simulate_ri(
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
    pattern: &MissingPatternPolicy,
) -> Result<(f64, f64)> {
    check_range(n, m)?;
    if samples == 0 {
        return Err(PcmError::InvalidSamples("samples must be positive".into()));
    }
    if let MissingPatternPolicy::Fixed(list) = pattern {
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in list {
            if i >= n || j >= n || i == j || !seen.insert((i.min(j), i.max(j))) {
                return Err(PcmError::InvalidSamples(format!(
                    "bad pattern pair ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        if list.len() != m {
            return Err(PcmError::InvalidSamples(format!(
                "pattern has {} pairs, expected {m}",
                list.len()
            )));
        }
        let g = ComparisonGraph::new(n, pairs(n).filter(|p| !seen.contains(p)));
        if !g.is_connected() {
            return Err(PcmError::PatternDisconnected);
        }
    }
    let cis: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let pcm = random_sample(n, m, seed, s, pattern)?;
            let c = em_completion(&pcm, Some(Bounds::SAATY))?;
            Ok(consistency_index(
                c.diagnostics.lambda_max.expect("em reports lambda"),
                n,
            ))
        })
        .collect::<Result<_>>()?;
    let count = samples as f64;
    let mean = cis.iter().sum::<f64>() / count;
    let var = cis.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / count;
    Ok((mean, var.sqrt()))
}
