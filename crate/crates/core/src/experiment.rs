//! Batched comparisons of the five placement strategies.
//!
//! Each graph of a batch is drawn from its own seed, derived from the batch
//! seed, the graph size and the graph's index, so any record can be
//! regenerated on its own. Every strategy runs on a fresh cache with
//! single-threaded solves, which makes its wall time comparable to the others;
//! parallelism is only across graphs.

use std::path::PathBuf;
use std::time::Instant;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{
    allocate, gap_report, relative_gap, resolve_jobs, worst_attack_for, AllocationContext, AllocationResult,
    SolveCache, Strategy, TIE_RTOL,
};
use crate::centrality::{top_monitor_sets, CentralityKind};
use crate::error::{Error, Result};
use crate::graph::{generate_erdos_renyi, Graph, RngSeed};
use crate::model::{load_ieee14, Network};
use crate::sets::{AttackSet, MonitorSet, VertexSet};
use crate::wcai::ScenarioParams;

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub graphs_per_size: usize,
    pub p: f64,
    pub n_a: Vec<usize>,
    pub n_s: usize,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "one")]
    pub attack_energy: f64,
    pub seed: u64,
    /// Graphs processed concurrently; `SECALLOC_JOBS` overrides it.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "yes")]
    pub prune: bool,
    /// Where [`crate::report::emit_outputs`] writes when driven from the CLI.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad(format!("sizes must be a non-empty list of positive sizes, got {:?}", self.sizes));
        }
        if self.graphs_per_size == 0 {
            return bad("graphs_per_size must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("edge probability {} outside [0, 1]", self.p));
        }
        if self.n_a.is_empty() || self.n_a.contains(&0) {
            return bad(format!("n_a must be a non-empty list of positive budgets, got {:?}", self.n_a));
        }
        let smallest = *self.sizes.iter().min().unwrap();
        if self.n_s == 0 || self.n_s > smallest || self.n_a.iter().any(|&a| a > smallest) {
            return Err(Error::InvalidBudget(format!(
                "budgets n_s={} n_a={:?} must not exceed the smallest size {smallest}",
                self.n_s, self.n_a
            )));
        }
        ScenarioParams::new(self.delta, self.attack_energy)?;
        Ok(())
    }

    pub fn params(&self) -> ScenarioParams {
        ScenarioParams {
            delta: self.delta,
            attack_energy: self.attack_energy,
        }
    }
}

/// Seed of graph `index` of size `size`: one ChaCha8 stream per size, one
/// word pair per index.
pub fn graph_seed(seed: u64, size: usize, index: usize) -> RngSeed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(size as u64);
    rng.set_word_pos(2 * index as u128);
    RngSeed(rng.next_u64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub monitor_set: MonitorSet,
    pub wcai: f64,
    pub worst_attack: AttackSet,
    pub wcai_gap: Option<f64>,
    pub solve_time: f64,
    pub time_gap: Option<f64>,
    pub inner_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub size: usize,
    pub graph_index: usize,
    pub graph_seed: u64,
    pub n_a: usize,
    /// In [`Strategy::ALL`] order.
    pub outcomes: Vec<StrategyOutcome>,
}

impl ExperimentRecord {
    pub fn outcome(&self, s: Strategy) -> &StrategyOutcome {
        self.outcomes.iter().find(|o| o.strategy == s).expect("all strategies recorded")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub size: usize,
    pub graph_index: usize,
    pub n_a: usize,
    pub message: String,
}

/// Runs every strategy on one network and derives the gaps.
pub fn compare_strategies(ctx: &AllocationContext) -> Result<Vec<StrategyOutcome>> {
    let results: Vec<AllocationResult> = Strategy::ALL
        .into_iter()
        .map(|s| allocate(s, ctx, &SolveCache::new()))
        .collect::<Result<_>>()?;
    let report = gap_report(&results)?;
    Ok(results
        .into_iter()
        .zip(report.gaps)
        .map(|(r, g)| StrategyOutcome {
            strategy: r.strategy,
            monitor_set: r.monitor_set,
            wcai: r.wcai,
            worst_attack: r.worst_attack,
            wcai_gap: g.wcai_gap,
            solve_time: r.solve_time,
            time_gap: g.time_gap,
            inner_solves: r.inner_solves,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
}

/// Percentile by linear interpolation between order statistics:
/// position `q·(n−1)` in the sorted sample.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Quartiles> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        Some(Quartiles {
            p25: percentile(&v, 0.25)?,
            median: percentile(&v, 0.5)?,
            p75: percentile(&v, 0.75)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub wcai_gap: Option<Quartiles>,
    pub time_gap: Option<Quartiles>,
    pub mean_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub size: usize,
    pub n_a: usize,
    pub graphs: usize,
    pub failures: usize,
    pub strategies: Vec<StrategySummary>,
}

impl CellSummary {
    pub fn strategy(&self, s: Strategy) -> &StrategySummary {
        self.strategies.iter().find(|x| x.strategy == s).expect("all strategies summarised")
    }

    pub fn label(&self) -> String {
        format!("n{}_na{}", self.size, self.n_a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub cells: Vec<CellSummary>,
    pub percentile_method: &'static str,
}

pub const PERCENTILE_METHOD: &str = "linear interpolation between order statistics at q*(n-1)";

pub fn summarize(records: &[ExperimentRecord], failures: &[Failure]) -> ExperimentSummary {
    let mut keys: Vec<(usize, usize)> = records
        .iter()
        .map(|r| (r.size, r.n_a))
        .chain(failures.iter().map(|f| (f.size, f.n_a)))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let cells = keys
        .into_iter()
        .map(|(size, n_a)| {
            let cell: Vec<&ExperimentRecord> = records.iter().filter(|r| r.size == size && r.n_a == n_a).collect();
            let strategies = Strategy::ALL
                .into_iter()
                .map(|s| {
                    let outs: Vec<&StrategyOutcome> = cell.iter().map(|r| r.outcome(s)).collect();
                    let wcai: Vec<f64> = outs.iter().filter_map(|o| o.wcai_gap).collect();
                    let time: Vec<f64> = outs.iter().filter_map(|o| o.time_gap).collect();
                    StrategySummary {
                        strategy: s,
                        wcai_gap: Quartiles::of(&wcai),
                        time_gap: Quartiles::of(&time),
                        mean_time: if outs.is_empty() {
                            0.0
                        } else {
                            outs.iter().map(|o| o.solve_time).sum::<f64>() / outs.len() as f64
                        },
                    }
                })
                .collect();
            CellSummary {
                size,
                n_a,
                graphs: cell.len(),
                failures: failures.iter().filter(|f| f.size == size && f.n_a == n_a).count(),
                strategies,
            }
        })
        .collect();
    ExperimentSummary {
        cells,
        percentile_method: PERCENTILE_METHOD,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<Failure>,
    pub summary: ExperimentSummary,
}

/// Erdős–Rényi batch: for every size and attack budget, every strategy on
/// `graphs_per_size` connected graphs. Failing graphs are logged, counted
/// and skipped.
pub fn run_er_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let jobs = resolve_jobs(cfg.jobs);
    let tasks: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.graphs_per_size).map(move |k| (n, k)))
        .collect();
    let run = |&(size, index): &(usize, usize)| -> Vec<std::result::Result<ExperimentRecord, Failure>> {
        let seed = graph_seed(cfg.seed, size, index);
        let fail = |n_a: usize, e: Error| {
            log::warn!("graph {index} of size {size}, n_a={n_a}: {e}");
            Failure {
                size,
                graph_index: index,
                n_a,
                message: e.to_string(),
            }
        };
        let graph = match generate_erdos_renyi(size, cfg.p, seed) {
            Ok(er) => er.graph,
            Err(e) => {
                let msg = e.to_string();
                return cfg.n_a.iter().map(|&a| Err(fail(a, Error::InvalidGraph(msg.clone())))).collect();
            }
        };
        cfg.n_a
            .iter()
            .map(|&n_a| {
                let ctx = AllocationContext {
                    prune: cfg.prune,
                    ..AllocationContext::new(Network::Consensus(graph.clone()), cfg.params(), cfg.n_s, n_a)
                };
                log::info!("size {size}, graph {index}, n_a={n_a}");
                compare_strategies(&ctx)
                    .map(|outcomes| ExperimentRecord {
                        size,
                        graph_index: index,
                        graph_seed: seed.0,
                        n_a,
                        outcomes,
                    })
                    .map_err(|e| fail(n_a, e))
            })
            .collect()
    };
    let per_graph: Vec<_> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    } else {
        tasks.iter().map(run).collect()
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for item in per_graph.into_iter().flatten() {
        match item {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    records.sort_by_key(|r| (r.size, r.n_a, r.graph_index));
    failures.sort_by_key(|f| (f.size, f.n_a, f.graph_index));
    let summary = summarize(&records, &failures);
    Ok(ExperimentOutcome {
        records,
        failures,
        summary,
    })
}

/// One graph of a batch, as [`run_er_experiment`] generates it.
pub fn batch_graph(cfg: &ExperimentConfig, size: usize, index: usize) -> Result<Graph> {
    Ok(generate_erdos_renyi(size, cfg.p, graph_seed(cfg.seed, size, index))?.graph)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BusRow {
    /// 1-based bus number.
    pub bus: usize,
    pub wcai: f64,
    pub worst_attack: AttackSet,
    /// Percent above the best bus.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityPick {
    pub kind: CentralityKind,
    pub buses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ieee14Report {
    pub params: ScenarioParams,
    pub n_a: usize,
    pub rows: Vec<BusRow>,
    /// Buses whose worst-case impact ties the minimum.
    pub optimal_buses: Vec<usize>,
    pub optimal_bus: usize,
    pub centrality: Vec<CentralityPick>,
    pub solve_time: f64,
}

impl Ieee14Report {
    pub fn row(&self, bus: usize) -> Option<&BusRow> {
        self.rows.iter().find(|r| r.bus == bus)
    }
}

/// Worst-case impact of every single-bus monitor on the IEEE 14-bus swing
/// model, the bus picked by each centrality, and each bus's gap to the best.
pub fn run_ieee14_case(params: ScenarioParams, n_a: usize, jobs: usize) -> Result<Ieee14Report> {
    let start = Instant::now();
    let network = Network::Swing(load_ieee14()?);
    let n = network.vertex_count();
    let ctx = AllocationContext {
        jobs,
        ..AllocationContext::new(network, params, 1, n_a)
    };
    ctx.validate()?;
    let cache = SolveCache::new();
    let eval = |bus: usize| -> Result<BusRow> {
        let monitors = VertexSet::from_one_based(&[bus], n)?;
        let w = worst_attack_for(&ctx, &cache, &monitors)?;
        log::info!("bus {bus}: {:.9} (attack {})", w.value, w.attack);
        Ok(BusRow {
            bus,
            wcai: w.value,
            worst_attack: w.attack,
            gap: None,
        })
    };
    let mut rows: Vec<BusRow> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| (1..=n).into_par_iter().map(eval).collect::<Result<_>>())?
    } else {
        (1..=n).map(eval).collect::<Result<_>>()?
    };
    let best = rows.iter().map(|r| r.wcai).fold(f64::INFINITY, f64::min);
    for r in &mut rows {
        r.gap = relative_gap(r.wcai, best);
    }
    let optimal_buses: Vec<usize> = rows
        .iter()
        .filter(|r| (r.wcai - best).abs() <= TIE_RTOL * best.abs())
        .map(|r| r.bus)
        .collect();
    let centrality = CentralityKind::ALL
        .into_iter()
        .map(|kind| {
            let scores = crate::allocation::placement_scores(&ctx, kind)?;
            let top = top_monitor_sets(&scores, 1)?;
            Ok(CentralityPick {
                kind,
                buses: top.candidates.iter().map(|c| c.vertices.one_based()[0]).collect(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Ieee14Report {
        params,
        n_a,
        optimal_bus: optimal_buses[0],
        optimal_buses,
        rows,
        centrality,
        solve_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            sizes: vec![5],
            graphs_per_size: 2,
            p: 0.6,
            n_a: vec![1],
            n_s: 1,
            delta: 1.0,
            attack_energy: 1.0,
            seed: 7,
            jobs: Some(1),
            prune: true,
            out_dir: None,
        }
    }

    #[test]
    fn percentiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), Some(2.5));
        assert_eq!(percentile(&v, 0.25), Some(1.75));
        assert_eq!(percentile(&v, 1.0), Some(4.0));
        assert_eq!(percentile(&[3.0], 0.75), Some(3.0));
        assert_eq!(percentile(&[], 0.5), None);
        let q = Quartiles::of(&[5.0, 1.0, 3.0]).unwrap();
        assert_eq!((q.p25, q.median, q.p75), (2.0, 3.0, 4.0));
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(ExperimentConfig { p: 1.5, ..cfg() }.validate().is_err());
        assert!(ExperimentConfig { graphs_per_size: 0, ..cfg() }.validate().is_err());
        assert!(ExperimentConfig { n_a: vec![6], ..cfg() }.validate().is_err());
        assert!(ExperimentConfig { sizes: vec![], ..cfg() }.validate().is_err());
        let text = r#"{"sizes": [10], "graphs_per_size": 3, "p": 0.5, "n_a": [1, 2], "n_s": 1, "seed": 1}"#;
        let parsed: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!((parsed.delta, parsed.attack_energy, parsed.prune), (1.0, 1.0, true));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sizes": [10], "typo": 1}"#).is_err());
    }

    #[test]
    fn graph_seeds_are_stable_and_distinct() {
        assert_eq!(graph_seed(1, 10, 3), graph_seed(1, 10, 3));
        let mut seen: Vec<u64> = (0..5)
            .flat_map(|k| [10, 12].map(|n| graph_seed(1, n, k).0))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 10);
        assert_ne!(graph_seed(1, 10, 0), graph_seed(2, 10, 0));
    }

    #[test]
    fn batch_records_are_consistent() {
        let out = run_er_experiment(&cfg()).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.failures.is_empty());
        for r in &out.records {
            let gap = |s| r.outcome(s).wcai_gap.unwrap();
            assert_eq!(gap(Strategy::Optimal), 0.0);
            let kinds = [Strategy::Degree, Strategy::Closeness, Strategy::Betweenness].map(gap);
            assert_eq!(gap(Strategy::Combined), kinds.into_iter().fold(f64::INFINITY, f64::min));
            assert!(kinds.iter().all(|&g| g >= -1e-4));
        }
        let again = run_er_experiment(&cfg()).unwrap();
        for (a, b) in out.records.iter().zip(&again.records) {
            for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
                assert_eq!((&x.monitor_set, x.wcai, &x.worst_attack), (&y.monitor_set, y.wcai, &y.worst_attack));
            }
        }
        let cell = &out.summary.cells[0];
        assert_eq!((cell.size, cell.n_a, cell.graphs), (5, 1, 2));
        assert_eq!(cell.strategy(Strategy::Optimal).wcai_gap.unwrap().median, 0.0);
    }
}
