//! Which subsets of comparisons best approximate the complete-matrix weights.
//!
//! For every connected graph on `n ≤ 6` vertices, up to isomorphism, the
//! experiment restricts random complete matrices to the graph's edges and
//! measures how far the LLSM weights of the restriction fall from the LLSM
//! weights of the full matrix. Graphs are ranked per edge count, and a
//! nested sequence of graphs (one per edge count, each extending the
//! previous by one edge) is chosen to contain as many per-count optima as
//! possible.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::format::fmt_sig;
use crate::matrix::{pair_count, pair_index, pairs, IncompletePcm, Scale, SAATY_VALUES};
use crate::weighting::llsm_weights;

const MAX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    Chebyshev,
    /// One minus the cosine similarity.
    Cosine,
}

impl DistanceMetric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DistanceMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            DistanceMetric::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            DistanceMetric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                (1.0 - dot / (na * nb)).max(0.0)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::Chebyshev => "chebyshev",
            DistanceMetric::Cosine => "cosine",
        }
    }
}

impl std::str::FromStr for DistanceMetric {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "chebyshev" => Ok(Self::Chebyshev),
            "cosine" => Ok(Self::Cosine),
            other => Err(PcmError::BadMetric(other.to_string())),
        }
    }
}

/// Random-matrix recipe and metric of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternOptions {
    pub samples: usize,
    pub seed: u64,
    pub metric: DistanceMetric,
    /// Standard deviation of the multiplicative log-normal noise.
    pub sigma: f64,
    /// Base log-weights are uniform on `[-spread, spread]`; `ln 3` keeps every
    /// consistent ratio within `[1/9, 9]`.
    pub log_spread: f64,
    /// Round the perturbed entries to the nearest Saaty value (in log terms).
    pub round_to_saaty: bool,
}

impl PatternOptions {
    pub fn new(samples: usize, seed: u64, metric: DistanceMetric) -> Self {
        Self {
            samples,
            seed,
            metric,
            sigma: 0.3,
            log_spread: 3f64.ln(),
            round_to_saaty: false,
        }
    }
}

/// One isomorphism class of connected graphs with its average distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub k: usize,
    /// Canonical representative, 1-based.
    pub edges: Vec<[usize; 2]>,
    pub mean_distance: f64,
    /// 1 is the closest class among those with `k` edges.
    pub rank: usize,
}

/// A step of the nested sequence: a labeled graph extending the previous one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedStep {
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    /// Edge added to the previous step; `None` for the first.
    pub added: Option<[usize; 2]>,
    pub rank: usize,
    pub mean_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternExperiment {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub metric: DistanceMetric,
    pub sigma: f64,
    /// Sorted by `k`, then rank.
    pub rows: Vec<PatternRow>,
    pub nested: Vec<NestedStep>,
    /// Number of steps of `nested` that are per-count optima.
    pub optima_in_nested: usize,
}

impl PatternExperiment {
    /// Whitespace-separated table `k  edges  mean-distance  rank`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{}  {}  {}  {}\n",
                r.k,
                edge_list(&r.edges),
                fmt_sig(r.mean_distance, 10),
                r.rank
            ));
        }
        out
    }

    /// Rows with a given edge count, best first.
    pub fn ranking(&self, k: usize) -> impl Iterator<Item = &PatternRow> {
        self.rows.iter().filter(move |r| r.k == k)
    }
}

/// Edges formatted as `1-2,1-3`.
pub fn edge_list(edges: &[[usize; 2]]) -> String {
    edges
        .iter()
        .map(|[i, j]| format!("{i}-{j}"))
        .collect::<Vec<_>>()
        .join(",")
}

struct GraphClass {
    mask: u32,
    k: usize,
}

struct Enumeration {
    n: usize,
    edges: Vec<(usize, usize)>,
    perm_maps: Vec<Vec<u8>>,
}

impl Enumeration {
    fn new(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = pairs(n).collect();
        let mut perm_maps = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| {
            perm_maps.push(
                edges
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (p[u], p[v]);
                        pair_index(n, a.min(b), a.max(b)) as u8
                    })
                    .collect(),
            );
        });
        Self {
            n,
            edges,
            perm_maps,
        }
    }

    fn relabel(&self, mask: u32, map: &[u8]) -> u32 {
        let mut out = 0;
        let mut m = mask;
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            out |= 1 << map[e];
            m &= m - 1;
        }
        out
    }

    fn canonical(&self, mask: u32) -> u32 {
        self.perm_maps
            .iter()
            .map(|p| self.relabel(mask, p))
            .min()
            .expect("n ≥ 1")
    }

    fn connected(&self, mask: u32) -> bool {
        let mut reach = 1u32;
        loop {
            let mut next = reach;
            for (e, &(u, v)) in self.edges.iter().enumerate() {
                if mask >> e & 1 == 1 && (reach >> u & 1 == 1 || reach >> v & 1 == 1) {
                    next |= 1 << u | 1 << v;
                }
            }
            if next == reach {
                return reach.count_ones() as usize == self.n;
            }
            reach = next;
        }
    }

    fn edges_of(&self, mask: u32) -> Vec<(usize, usize)> {
        (0..self.edges.len())
            .filter(|&e| mask >> e & 1 == 1)
            .map(|e| self.edges[e])
            .collect()
    }

    /// Connected classes ordered by edge count, then canonical mask.
    fn classes(&self) -> Vec<GraphClass> {
        let full = 1u32 << self.edges.len();
        let mut canon: Vec<u32> = (0..full)
            .into_par_iter()
            .filter(|&m| m.count_ones() as usize + 1 >= self.n && self.connected(m))
            .map(|m| self.canonical(m))
            .collect();
        canon.sort_unstable_by_key(|&m| (m.count_ones(), m));
        canon.dedup();
        canon
            .into_iter()
            .map(|mask| GraphClass {
                mask,
                k: mask.count_ones() as usize,
            })
            .collect()
    }
}

fn permutations(p: &mut Vec<usize>, at: usize, f: &mut impl FnMut(&[usize])) {
    if at == p.len() {
        f(p);
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permutations(p, at + 1, f);
        p.swap(at, i);
    }
}

fn nearest_saaty(x: f64) -> f64 {
    SAATY_VALUES
        .iter()
        .map(|&(p, q)| f64::from(p) / f64::from(q))
        .min_by(|a, b| (a.ln() - x.ln()).abs().total_cmp(&(b.ln() - x.ln()).abs()))
        .expect("non-empty scale")
}

/// Random complete matrix for sample `index` (stream = sample index).
pub fn pattern_sample(n: usize, opts: &PatternOptions, index: u64) -> Result<IncompletePcm> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index);
    let logs: Vec<f64> = (0..n)
        .map(|_| rng.random_range(-opts.log_spread..=opts.log_spread))
        .collect();
    let mut values = Vec::with_capacity(pair_count(n));
    for (i, j) in pairs(n) {
        let z: f64 = StandardNormal.sample(&mut rng);
        let v = (logs[i] - logs[j] + opts.sigma * z).exp();
        values.push(if opts.round_to_saaty {
            nearest_saaty(v)
        } else {
            v
        });
    }
    let mut it = values.into_iter();
    IncompletePcm::from_upper(n, Scale::Free, |_, _| it.next())
}

/// Runs the experiment with default noise settings; `metric` is
/// `euclidean`, `chebyshev` or `cosine`.
pub fn pattern_experiment(
    n: usize,
    samples: usize,
    seed: u64,
    metric: &str,
) -> Result<PatternExperiment> {
    let metric: DistanceMetric = metric.parse()?;
    pattern_experiment_with(n, &PatternOptions::new(samples, seed, metric))
}

pub fn pattern_experiment_with(n: usize, opts: &PatternOptions) -> Result<PatternExperiment> {
    if n > MAX_N {
        return Err(PcmError::TooLarge(format!(
            "pattern enumeration supports n ≤ {MAX_N}, got {n}"
        )));
    }
    if n < 3 {
        return Err(PcmError::BadDimension(format!(
            "need at least 3 alternatives, got {n}"
        )));
    }
    if opts.samples == 0 {
        return Err(PcmError::InvalidSamples("samples must be positive".into()));
    }
    let en = Enumeration::new(n);
    let classes = en.classes();

    let matrices: Vec<IncompletePcm> = (0..opts.samples as u64)
        .into_par_iter()
        .map(|s| pattern_sample(n, opts, s))
        .collect::<Result<_>>()?;
    let reference: Vec<Vec<f64>> = matrices
        .par_iter()
        .map(|a| llsm_weights(a).map(|w| w.weights().to_vec()))
        .collect::<Result<_>>()?;

    let means: Vec<f64> = classes
        .par_iter()
        .map(|c| {
            let keep = en.edges_of(c.mask);
            let mut total = 0.0;
            for (a, w_full) in matrices.iter().zip(&reference) {
                let restricted = a.restricted(|i, j| keep.contains(&(i, j)));
                let w = llsm_weights(&restricted)?;
                total += opts.metric.distance(w.weights(), w_full);
            }
            Ok(total / opts.samples as f64)
        })
        .collect::<Result<_>>()?;

    // rank within each edge count
    let mut rank = vec![0usize; classes.len()];
    let top = pair_count(n);
    for k in n - 1..=top {
        let mut ids: Vec<usize> = (0..classes.len()).filter(|&c| classes[c].k == k).collect();
        ids.sort_by(|&a, &b| {
            means[a]
                .total_cmp(&means[b])
                .then(classes[a].mask.cmp(&classes[b].mask))
        });
        for (r, &c) in ids.iter().enumerate() {
            rank[c] = r + 1;
        }
    }
    let to_doc = |edges: Vec<(usize, usize)>| -> Vec<[usize; 2]> {
        edges.into_iter().map(|(i, j)| [i + 1, j + 1]).collect()
    };
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&c| (classes[c].k, rank[c]));
    let rows = order
        .iter()
        .map(|&c| PatternRow {
            k: classes[c].k,
            edges: to_doc(en.edges_of(classes[c].mask)),
            mean_distance: means[c],
            rank: rank[c],
        })
        .collect();

    let (chain, optima) = nested_chain(&en, &classes, &means, &rank);
    let full_mask = (1u32 << top) - 1;
    let mut labeled = vec![0u32; chain.len()];
    let mut mask = full_mask;
    for (step, &c) in chain.iter().enumerate().rev() {
        if step + 1 < chain.len() {
            let target = classes[c].mask;
            let e = (0..top)
                .find(|&e| mask >> e & 1 == 1 && en.canonical(mask & !(1 << e)) == target)
                .expect("chain classes extend each other");
            mask &= !(1 << e);
        }
        labeled[step] = mask;
    }
    let nested = chain
        .iter()
        .enumerate()
        .map(|(step, &c)| {
            let added = (step > 0).then(|| {
                let e = (labeled[step] & !labeled[step - 1]).trailing_zeros() as usize;
                let (i, j) = en.edges[e];
                [i + 1, j + 1]
            });
            NestedStep {
                k: classes[c].k,
                edges: to_doc(en.edges_of(labeled[step])),
                added,
                rank: rank[c],
                mean_distance: means[c],
            }
        })
        .collect();

    Ok(PatternExperiment {
        n,
        samples: opts.samples,
        seed: opts.seed,
        metric: opts.metric,
        sigma: opts.sigma,
        rows,
        nested,
        optima_in_nested: optima,
    })
}

/// Chain of classes, one per edge count from `n − 1` up, maximizing the
/// number of rank-1 members and then minimizing the summed mean distance.
fn nested_chain(
    en: &Enumeration,
    classes: &[GraphClass],
    means: &[f64],
    rank: &[usize],
) -> (Vec<usize>, usize) {
    let index: HashMap<u32, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.mask, i))
        .collect();
    // (optima count, distance sum, predecessor)
    let mut best: Vec<Option<(usize, f64, Option<usize>)>> = vec![None; classes.len()];
    let lowest = en.n - 1;
    for (c, class) in classes.iter().enumerate() {
        let own = usize::from(rank[c] == 1);
        if class.k == lowest {
            best[c] = Some((own, means[c], None));
            continue;
        }
        let mut cand: Option<(usize, f64, Option<usize>)> = None;
        for e in 0..en.edges.len() {
            if class.mask >> e & 1 == 0 {
                continue;
            }
            let sub = class.mask & !(1 << e);
            if !en.connected(sub) {
                continue;
            }
            let p = index[&en.canonical(sub)];
            let Some((count, dist, _)) = best[p] else {
                continue;
            };
            let here = (count + own, dist + means[c], Some(p));
            let better = match cand {
                None => true,
                Some((bc, bd, _)) => here.0 > bc || (here.0 == bc && here.1 < bd),
            };
            if better {
                cand = Some(here);
            }
        }
        best[c] = cand;
    }
    let top = classes.len() - 1;
    let optima = best[top].expect("complete graph is reachable").0;
    let mut chain = vec![top];
    while let Some((_, _, Some(p))) = best[*chain.last().expect("non-empty")] {
        chain.push(p);
    }
    chain.reverse();
    (chain, optima)
}
