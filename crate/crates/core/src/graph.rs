//! Weighted undirected graphs, Laplacians, Erdős–Rényi sampling and hop-count
//! shortest paths.
//!
//! Vertices are 0-based inside the library. Every file format and every
//! user-facing rendering uses 1-based ids.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of reseeds before [`generate_erdos_renyi`] gives up.
pub const DEFAULT_REJECTION_CAP: usize = 10_000;

/// Seed for the random graph generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn offset(self, k: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected graph with strictly positive edge weights and no self loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: DMatrix<f64>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based `(i, j, w)` triples. Each unordered pair may
    /// appear at most once.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut adjacency = DMatrix::zeros(n, n);
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: a.max(b) + 1,
                    n,
                });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self loop at vertex {}", a + 1)));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {w}",
                    a + 1,
                    b + 1
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if adjacency[(i, j)] != 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) listed twice",
                    i + 1,
                    j + 1
                )));
            }
            adjacency[(i, j)] = w;
            adjacency[(j, i)] = w;
            list.push(Edge { i, j, weight: w });
        }
        list.sort_by_key(|e| (e.i, e.j));
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| adjacency[(i, j)] > 0.0).collect())
            .collect();
        Ok(Graph {
            n,
            edges: list,
            adjacency,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] > 0.0
    }

    /// Same topology with every weight set to 1.
    pub fn unit_weights(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().map(|e| (e.i, e.j, 1.0)))
            .expect("topology of a valid graph is valid")
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.weight)),
        )
    }

    pub fn laplacian(&self) -> Laplacian {
        laplacian(self)
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    pub fn to_json(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| (e.i + 1, e.j + 1, e.weight))
                .collect(),
        }
    }

    pub fn from_json(file: &GraphFile) -> Result<Graph> {
        let mut edges = Vec::with_capacity(file.edges.len());
        for &(i, j, w) in &file.edges {
            if i == 0 || j == 0 || i > file.n || j > file.n {
                return Err(Error::VertexOutOfRange {
                    vertex: if i == 0 || i > file.n { i } else { j },
                    n: file.n,
                });
            }
            if i >= j {
                return Err(Error::InvalidGraph(format!(
                    "edge [{i}, {j}] must satisfy i < j"
                )));
            }
            edges.push((i - 1, j - 1, w));
        }
        Graph::new(file.n, edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Graph> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: GraphFile = serde_json::from_str(&text)?;
        Graph::from_json(&file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={})", self.n, self.edges.len())
    }
}

/// On-disk graph: `{"n": int, "edges": [[i, j, w], ...]}` with 1-based `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// `L = Δ − A` together with the graph it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    pub matrix: DMatrix<f64>,
    pub source: Graph,
}

pub fn laplacian(g: &Graph) -> Laplacian {
    let n = g.n();
    let mut l = -g.adjacency().clone();
    for i in 0..n {
        l[(i, i)] = g.adjacency().row(i).sum();
    }
    Laplacian {
        matrix: l,
        source: g.clone(),
    }
}

/// Breadth-first reachability from vertex 0.
pub fn is_connected(g: &Graph) -> bool {
    bfs_hops(g, 0).iter().all(Option::is_some)
}

fn bfs_hops(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or_default();
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Matrix of minimum edge counts between every pair of vertices.
pub fn all_pairs_hop_distance(g: &Graph) -> Result<Vec<Vec<usize>>> {
    (0..g.n())
        .map(|s| {
            bfs_hops(g, s)
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::Disconnected)
        })
        .collect()
}

/// A connected Erdős–Rényi sample and how it was obtained.
#[derive(Debug, Clone)]
pub struct ErGraph {
    pub graph: Graph,
    /// Seed of the accepted draw (`requested + rejections`).
    pub seed_used: RngSeed,
    pub rejections: usize,
}

/// Samples G(n, p) with unit weights, reseeding with `seed + 1`, `seed + 2`, …
/// until the draw is connected.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: RngSeed) -> Result<ErGraph> {
    generate_erdos_renyi_capped(n, p, seed, DEFAULT_REJECTION_CAP)
}

pub fn generate_erdos_renyi_capped(
    n: usize,
    p: f64,
    seed: RngSeed,
    max_rejections: usize,
) -> Result<ErGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    for rejections in 0..=max_rejections {
        let seed_used = seed.offset(rejections as u64);
        let graph = sample_gnp(n, p, seed_used);
        if graph.is_connected() {
            return Ok(ErGraph {
                graph,
                seed_used,
                rejections,
            });
        }
    }
    Err(Error::Unconnectable {
        n,
        p,
        attempts: max_rejections + 1,
    })
}

fn sample_gnp(n: usize, p: f64, seed: RngSeed) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::new(n, edges).expect("sampled edges are valid")
}
