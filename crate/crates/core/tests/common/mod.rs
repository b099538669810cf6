#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use secalloc::graph::{generate_erdos_renyi, Graph, RngSeed};
use secalloc::sets::VertexSet;

/// Every simple path between `s` and `t`, by exhaustive depth-first search.
fn simple_paths(g: &Graph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, v: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &w in g.neighbors(v) {
            if !path.contains(&w) {
                path.push(w);
                walk(g, w, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, s, t, &mut vec![s], &mut out);
    out
}

/// Shortest paths of every pair `s < t`, found by enumerating all simple
/// paths and keeping the shortest ones.
pub fn shortest_paths(g: &Graph) -> Vec<((usize, usize), Vec<Vec<usize>>)> {
    let n = g.n();
    let mut all = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            let paths = simple_paths(g, s, t);
            let best = paths.iter().map(Vec::len).min().expect("connected graph");
            all.push(((s, t), paths.into_iter().filter(|p| p.len() == best).collect()));
        }
    }
    all
}

pub fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let mut b = vec![0.0; g.n()];
    for (_, paths) in shortest_paths(g) {
        let total = paths.len() as f64;
        for p in &paths {
            for &v in &p[1..p.len() - 1] {
                b[v] += 1.0 / total;
            }
        }
    }
    b
}

pub fn brute_closeness(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut far = vec![0usize; n];
    for ((s, t), paths) in shortest_paths(g) {
        let hops = paths[0].len() - 1;
        far[s] += hops;
        far[t] += hops;
    }
    far.iter().map(|&d| (n - 1) as f64 / d as f64).collect()
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> VertexSet {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.truncate(k);
    VertexSet::new(ids, n).unwrap()
}

#[derive(Debug, Clone)]
pub struct RandomScenario {
    pub graph: Graph,
    pub attack: VertexSet,
    pub monitors: VertexSet,
    pub delta: f64,
    pub attack_energy: f64,
}

/// A connected ER graph on `2..=max_n` vertices with one or two attacked
/// and one or two monitored vertices, and budgets in `[0.5, 2]`.
pub fn random_scenario<R: Rng>(rng: &mut R, max_n: usize) -> RandomScenario {
    let n = rng.gen_range(2..=max_n);
    let p = rng.gen_range(0.3..0.8);
    let graph = generate_erdos_renyi(n, p, RngSeed(rng.gen())).unwrap().graph;
    let na = rng.gen_range(1..=2.min(n));
    let ns = rng.gen_range(1..=2.min(n - 1));
    RandomScenario {
        attack: random_subset(rng, n, na),
        monitors: random_subset(rng, n, ns),
        delta: rng.gen_range(0.5..2.0),
        attack_energy: rng.gen_range(0.5..2.0),
        graph,
    }
}
