use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted set of distinct vertex ids, 0-based internally and 1-based on the wire.
///
/// The derived ordering is lexicographic on the sorted ids, which is the
/// tie-breaking order used throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSet(Vec<usize>);

/// Vertices that receive injected attack signals.
pub type AttackSet = VertexSet;
/// Vertices whose outputs feed the alarm detector.
pub type MonitorSet = VertexSet;

impl VertexSet {
    /// Validates 0-based ids against a vertex count.
    pub fn new(mut ids: Vec<usize>, n: usize) -> Result<Self> {
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVertex(w[0] + 1));
            }
        }
        if let Some(&v) = ids.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v + 1, n });
        }
        Ok(VertexSet(ids))
    }

    pub fn from_one_based(ids: &[usize], n: usize) -> Result<Self> {
        if let Some(&v) = ids.iter().find(|&&v| v == 0) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        VertexSet::new(ids.iter().map(|v| v - 1).collect(), n)
    }

    /// Sorted 0-based ids without range checks.
    pub(crate) fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn max_id(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Image of the set under a vertex relabeling.
    pub fn mapped(&self, perm: &[usize]) -> VertexSet {
        let mut ids: Vec<usize> = self.0.iter().map(|&v| perm[v]).collect();
        ids.sort_unstable();
        VertexSet(ids)
    }

    /// Compact `1-3-7` rendering used in CSV cells.
    pub fn dashed(&self) -> String {
        self.one_based()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.one_based().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", ids.join(", "))
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = Error;

    fn try_from(one_based: Vec<usize>) -> Result<Self> {
        VertexSet::from_one_based(&one_based, usize::MAX)
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(set: VertexSet) -> Vec<usize> {
        set.one_based()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations::over((0..n).collect(), k)
}

/// Lexicographic `k`-subsets of an ascending pool of ids.
pub struct Combinations {
    pool: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn over(pool: Vec<usize>, k: usize) -> Self {
        let done = k > pool.len();
        Combinations {
            pool,
            idx: (0..k).collect(),
            done,
        }
    }
}

impl Iterator for Combinations {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let item = VertexSet::from_sorted(self.idx.iter().map(|&i| self.pool[i]).collect());
        let n = self.pool.len();
        let k = self.idx.len();
        match (0..k).rev().find(|&i| self.idx[i] != i + n - k) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(item)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ids() {
        assert!(matches!(VertexSet::new(vec![1, 1], 3), Err(Error::DuplicateVertex(2))));
        assert!(matches!(
            VertexSet::new(vec![3], 3),
            Err(Error::VertexOutOfRange { vertex: 4, n: 3 })
        ));
        assert!(VertexSet::from_one_based(&[0], 3).is_err());
        assert_eq!(VertexSet::from_one_based(&[3, 1], 3).unwrap().ids(), &[0, 2]);
    }

    #[test]
    fn serde_uses_one_based_ids() {
        let s = VertexSet::new(vec![0, 4], 5).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,5]");
        let back: VertexSet = serde_json::from_str("[5,1]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<VertexSet>("[0]").is_err());
        assert_eq!(s.to_string(), "{1, 5}");
        assert_eq!(s.dashed(), "1-5");
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let all: Vec<_> = combinations(4, 2).map(|s| s.one_based()).collect();
        assert_eq!(
            all,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(combinations(5, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
        for n in 0..9 {
            for k in 0..=n {
                assert_eq!(combinations(n, k).count(), binomial(n, k));
            }
        }
    }
}
