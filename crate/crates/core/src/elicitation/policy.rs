//! Question orders for elicitation sessions.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::{pair_count, pair_index};

/// The fixed six-alternative order used by the summer-house example,
/// 1-based and oriented as asked.
pub const ROSS_ORDER_6: [(usize, usize); 15] = [
    (1, 2),
    (6, 4),
    (5, 1),
    (3, 2),
    (5, 6),
    (1, 3),
    (2, 4),
    (6, 1),
    (4, 3),
    (5, 2),
    (1, 4),
    (3, 5),
    (2, 6),
    (4, 5),
    (3, 6),
];

/// Search budget of the balanced order before falling back to greedy.
const BALANCED_NODE_CAP: usize = 200_000;

/// How the questions of a session are ordered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum QuestionPolicy {
    /// Explicit oriented pairs, 0-based. Must list every pair exactly once.
    FixedOrder(Vec<(usize, usize)>),
    /// The six-alternative fixture order.
    RossFixture,
    /// Every prefix keeps the appearance counts of the alternatives within one
    /// of each other, and orientation evens out first and second positions.
    #[default]
    Balanced,
}

impl QuestionPolicy {
    /// The full question list for `n` alternatives, oriented, 0-based.
    pub fn order(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        match self {
            QuestionPolicy::FixedOrder(list) => {
                validate_fixed(n, list)?;
                Ok(list.clone())
            }
            QuestionPolicy::RossFixture => {
                if n != 6 {
                    return Err(PcmError::PolicyArityMismatch(format!(
                        "the fixture order needs 6 alternatives, got {n}"
                    )));
                }
                Ok(ROSS_ORDER_6.iter().map(|&(i, j)| (i - 1, j - 1)).collect())
            }
            QuestionPolicy::Balanced => Ok(balanced_order(n)),
        }
    }

    pub fn to_document(&self) -> PolicyDocument {
        match self {
            QuestionPolicy::FixedOrder(list) => PolicyDocument::FixedOrder {
                pairs: list.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            },
            QuestionPolicy::RossFixture => PolicyDocument::RossFixture,
            QuestionPolicy::Balanced => PolicyDocument::Balanced,
        }
    }
}

/// Serialized policy: `{"kind": "fixed-order", "pairs": [[1, 2], ...]}`,
/// `{"kind": "ross-fixture"}` or `{"kind": "balanced"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PolicyDocument {
    FixedOrder { pairs: Vec<[usize; 2]> },
    RossFixture,
    Balanced,
}

impl PolicyDocument {
    pub fn to_policy(&self) -> Result<QuestionPolicy> {
        Ok(match self {
            PolicyDocument::FixedOrder { pairs } => {
                let mut list = Vec::with_capacity(pairs.len());
                for &[i, j] in pairs {
                    if i == 0 || j == 0 {
                        return Err(PcmError::PolicyArityMismatch(format!(
                            "pair ({i}, {j}) is not 1-based"
                        )));
                    }
                    list.push((i - 1, j - 1));
                }
                QuestionPolicy::FixedOrder(list)
            }
            PolicyDocument::RossFixture => QuestionPolicy::RossFixture,
            PolicyDocument::Balanced => QuestionPolicy::Balanced,
        })
    }
}

impl std::str::FromStr for QuestionPolicy {
    type Err = PcmError;

    /// `balanced`, `ross`, or a fixed order such as `1-2,6-4,5-1`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "balanced" => Ok(QuestionPolicy::Balanced),
            "ross" | "ross-fixture" => Ok(QuestionPolicy::RossFixture),
            list => {
                let mut pairs = Vec::new();
                for token in list.split(',') {
                    let bad = || PcmError::PolicyArityMismatch(format!("bad pair token {token:?}"));
                    let (i, j) = token.trim().split_once('-').ok_or_else(bad)?;
                    let i: usize = i.trim().parse().map_err(|_| bad())?;
                    let j: usize = j.trim().parse().map_err(|_| bad())?;
                    if i == 0 || j == 0 {
                        return Err(bad());
                    }
                    pairs.push((i - 1, j - 1));
                }
                Ok(QuestionPolicy::FixedOrder(pairs))
            }
        }
    }
}

fn validate_fixed(n: usize, list: &[(usize, usize)]) -> Result<()> {
    let mut seen = vec![false; pair_count(n)];
    for &(i, j) in list {
        if i >= n || j >= n || i == j {
            return Err(PcmError::PolicyArityMismatch(format!(
                "pair ({}, {}) invalid for n = {n}",
                i + 1,
                j + 1
            )));
        }
        let k = pair_index(n, i.min(j), i.max(j));
        if std::mem::replace(&mut seen[k], true) {
            return Err(PcmError::PolicyArityMismatch(format!(
                "pair ({}, {}) listed twice",
                i + 1,
                j + 1
            )));
        }
    }
    if list.len() != seen.len() {
        return Err(PcmError::PolicyArityMismatch(format!(
            "order lists {} pairs, n = {n} needs {}",
            list.len(),
            seen.len()
        )));
    }
    Ok(())
}

struct BalancedSearch {
    pairs: Vec<(usize, usize)>,
    used: Vec<bool>,
    counts: Vec<usize>,
    seq: Vec<usize>,
    nodes: usize,
}

impl BalancedSearch {
    fn balanced_after(&self, p: usize) -> bool {
        let (u, v) = self.pairs[p];
        let mut lo = usize::MAX;
        let mut hi = 0;
        for (x, &c) in self.counts.iter().enumerate() {
            let c = c + usize::from(x == u || x == v);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        hi - lo <= 1
    }

    fn candidates(&self, balanced_only: bool) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.pairs.len())
            .filter(|&p| !self.used[p] && (!balanced_only || self.balanced_after(p)))
            .collect();
        c.sort_by_key(|&p| {
            let (u, v) = self.pairs[p];
            (
                self.counts[u] + self.counts[v],
                self.counts[u].max(self.counts[v]),
                p,
            )
        });
        c
    }

    fn push(&mut self, p: usize) {
        let (u, v) = self.pairs[p];
        self.used[p] = true;
        self.counts[u] += 1;
        self.counts[v] += 1;
        self.seq.push(p);
    }

    fn pop(&mut self) {
        let p = self.seq.pop().expect("non-empty");
        let (u, v) = self.pairs[p];
        self.used[p] = false;
        self.counts[u] -= 1;
        self.counts[v] -= 1;
    }

    fn dfs(&mut self) -> bool {
        if self.seq.len() == self.pairs.len() {
            return true;
        }
        for p in self.candidates(true) {
            self.nodes += 1;
            if self.nodes > BALANCED_NODE_CAP {
                return false;
            }
            self.push(p);
            if self.dfs() {
                return true;
            }
            self.pop();
        }
        false
    }
}

/// Balanced question order, oriented, 0-based.
pub fn balanced_order(n: usize) -> Vec<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = crate::matrix::pairs(n).collect();
    let mut search = BalancedSearch {
        used: vec![false; pairs.len()],
        pairs,
        counts: vec![0; n],
        seq: Vec::new(),
        nodes: 0,
    };
    if !search.dfs() {
        while !search.seq.is_empty() {
            search.pop();
        }
        while search.seq.len() < search.pairs.len() {
            let p = search.candidates(false)[0];
            search.push(p);
        }
    }
    debug_assert_eq!(search.counts.iter().sum::<usize>(), 2 * search.pairs.len());

    // orient: whoever has led fewer comparisons goes first
    let mut first = vec![0usize; n];
    let mut second = vec![0usize; n];
    search
        .seq
        .iter()
        .map(|&p| {
            let (u, v) = search.pairs[p];
            let u_first = (first[u] as isize - second[u] as isize)
                <= (first[v] as isize - second[v] as isize);
            let (a, b) = if u_first { (u, v) } else { (v, u) };
            first[a] += 1;
            second[b] += 1;
            (a, b)
        })
        .collect()
}
