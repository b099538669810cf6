//! Degree, closeness and betweenness centrality, and the monitor sets with the
//! highest total score.
//!
//! Shortest paths are counted in hops; edge weights only enter degree.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{all_pairs_hop_distance, Graph};
use crate::sets::{Combinations, VertexSet};

/// Maximum number of tied candidate sets returned by [`top_monitor_sets`].
pub const TIE_LIST_CAP: usize = 1000;
/// Relative tolerance for treating two scores as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Closeness,
    Betweenness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 3] = [
        CentralityKind::Degree,
        CentralityKind::Closeness,
        CentralityKind::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Closeness => "closeness",
            CentralityKind::Betweenness => "betweenness",
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CentralityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown centrality kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityScores {
    pub kind: CentralityKind,
    pub values: Vec<f64>,
}

impl CentralityScores {
    pub fn compute(kind: CentralityKind, g: &Graph) -> Result<Self> {
        match kind {
            CentralityKind::Degree => Ok(degree_centrality(g)),
            CentralityKind::Closeness => closeness_centrality(g),
            CentralityKind::Betweenness => betweenness_centrality(g),
        }
    }
}

/// Weighted degree: row sums of the adjacency matrix.
pub fn degree_centrality(g: &Graph) -> CentralityScores {
    CentralityScores {
        kind: CentralityKind::Degree,
        values: (0..g.n()).map(|i| g.adjacency().row(i).sum()).collect(),
    }
}

/// `(n − 1) / Σ_j d(i, j)` with hop-count distances.
pub fn closeness_centrality(g: &Graph) -> Result<CentralityScores> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "closeness needs at least two vertices".into(),
        ));
    }
    let d = all_pairs_hop_distance(g)?;
    let values = d
        .iter()
        .map(|row| (n - 1) as f64 / row.iter().sum::<usize>() as f64)
        .collect();
    Ok(CentralityScores {
        kind: CentralityKind::Closeness,
        values,
    })
}

/// Brandes dependency accumulation over hop-count shortest paths, each
/// unordered pair `{s, t}` counted once.
pub fn betweenness_centrality(g: &Graph) -> Result<CentralityScores> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut values = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        order.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                values[w] += delta[w];
            }
        }
    }
    values.iter_mut().for_each(|v| *v /= 2.0);
    Ok(CentralityScores {
        kind: CentralityKind::Betweenness,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSetCandidate {
    pub vertices: VertexSet,
    pub total_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopSets {
    pub candidates: Vec<MonitorSetCandidate>,
    /// More tied sets existed than [`TIE_LIST_CAP`].
    pub truncated: bool,
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Every size-`budget` vertex set attaining the maximal total score, in
/// lexicographic order, capped at [`TIE_LIST_CAP`].
pub fn top_monitor_sets(scores: &CentralityScores, budget: usize) -> Result<TopSets> {
    top_monitor_sets_capped(scores, budget, TIE_LIST_CAP)
}

pub fn top_monitor_sets_capped(
    scores: &CentralityScores,
    budget: usize,
    cap: usize,
) -> Result<TopSets> {
    let values = &scores.values;
    let n = values.len();
    if budget == 0 || budget > n {
        return Err(Error::InvalidBudget(format!(
            "monitor budget {budget} must lie in 1..={n}"
        )));
    }
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let threshold = values[ranked[budget - 1]];

    // Vertices strictly above the cut are in every optimal set; the tied group
    // at the cut supplies the remaining members in every possible way.
    let above: Vec<usize> = (0..n)
        .filter(|&v| values[v] > threshold && !tied(values[v], threshold))
        .collect();
    let at_cut: Vec<usize> = (0..n).filter(|&v| tied(values[v], threshold)).collect();
    let need = budget - above.len();

    let mut candidates = Vec::new();
    let mut truncated = false;
    for chosen in Combinations::over(at_cut, need) {
        if candidates.len() == cap {
            truncated = true;
            break;
        }
        let mut ids = above.clone();
        ids.extend_from_slice(chosen.ids());
        ids.sort_unstable();
        let total_score = ids.iter().map(|&v| values[v]).sum();
        candidates.push(MonitorSetCandidate {
            vertices: VertexSet::from_sorted(ids),
            total_score,
        });
    }
    Ok(TopSets {
        candidates,
        truncated,
    })
}
