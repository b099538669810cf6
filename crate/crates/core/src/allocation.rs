//! Monitor placement against the worst admissible attack.
//!
//! The defender picks `n_s` monitored vertices, the attacker then picks the
//! `n_a` vertices that maximise the worst-case impact. [`allocate_optimal`]
//! enumerates every monitor set; the centrality strategies only evaluate the
//! best-scoring sets. All of them read and fill one [`SolveCache`], so a pair
//! of vertex sets is never solved twice within a run.
//!
//! Ties are resolved after the fact: every value within [`TIE_RTOL`] of the
//! extremum counts as attaining it and the lexicographically smallest set
//! wins. This keeps results independent of evaluation order (and of the
//! solver's last few digits on symmetric instances).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{top_monitor_sets, CentralityKind, CentralityScores};
use crate::error::{Error, Result};
use crate::model::Network;
use crate::sets::{binomial, combinations, AttackSet, MonitorSet};
use crate::wcai::{solve_wcai, ScenarioParams};

/// Relative tolerance under which two impact values are considered equal.
pub const TIE_RTOL: f64 = 1e-7;

/// Environment variable overriding the worker count.
pub const JOBS_ENV: &str = "SECALLOC_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Optimal,
    Degree,
    Closeness,
    Betweenness,
    Combined,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Optimal,
        Strategy::Degree,
        Strategy::Closeness,
        Strategy::Betweenness,
        Strategy::Combined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Optimal => "optimal",
            Strategy::Degree => "degree",
            Strategy::Closeness => "closeness",
            Strategy::Betweenness => "betweenness",
            Strategy::Combined => "combined",
        }
    }

    pub fn centrality(self) -> Option<CentralityKind> {
        match self {
            Strategy::Degree => Some(CentralityKind::Degree),
            Strategy::Closeness => Some(CentralityKind::Closeness),
            Strategy::Betweenness => Some(CentralityKind::Betweenness),
            _ => None,
        }
    }
}

impl From<CentralityKind> for Strategy {
    fn from(kind: CentralityKind) -> Self {
        match kind {
            CentralityKind::Degree => Strategy::Degree,
            CentralityKind::Closeness => Strategy::Closeness,
            CentralityKind::Betweenness => Strategy::Betweenness,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy '{s}'")))
    }
}

/// Worker count: `SECALLOC_JOBS` if set and valid, else `fallback`, else the
/// number of available cores.
pub fn resolve_jobs(fallback: Option<usize>) -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&j| j > 0)
        .or(fallback.filter(|&j| j > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone)]
pub struct AllocationContext {
    pub network: Network,
    pub params: ScenarioParams,
    /// `n_s`
    pub monitor_budget: usize,
    /// `n_a`
    pub attack_budget: usize,
    /// Abandon a monitor set as soon as it is provably worse than the best so far.
    pub prune: bool,
    /// Monitor sets evaluated concurrently; 1 keeps every solve on the caller's thread.
    pub jobs: usize,
}

impl AllocationContext {
    pub fn new(network: Network, params: ScenarioParams, monitor_budget: usize, attack_budget: usize) -> Self {
        AllocationContext {
            network,
            params,
            monitor_budget,
            attack_budget,
            prune: true,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.network.vertex_count();
        self.params.validate()?;
        for (name, k) in [("monitor", self.monitor_budget), ("attack", self.attack_budget)] {
            if k == 0 || k > n {
                return Err(Error::InvalidBudget(format!("{name} budget {k} must lie in 1..={n}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Entry {
    Value(f64),
    Failed,
}

/// Impact values keyed by (monitor set, attack set). Safe to share between
/// threads; a pair raced by two workers is merely solved twice.
#[derive(Debug, Default)]
pub struct SolveCache {
    map: Mutex<HashMap<(MonitorSet, AttackSet), Entry>>,
}

impl SolveCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached impact of a pair, `None` if unsolved or failed.
    pub fn value(&self, monitors: &MonitorSet, attack: &AttackSet) -> Option<f64> {
        match self.map.lock().unwrap().get(&(monitors.clone(), attack.clone())) {
            Some(Entry::Value(v)) => Some(*v),
            _ => None,
        }
    }

    fn get(&self, key: &(MonitorSet, AttackSet)) -> Option<Entry> {
        self.map.lock().unwrap().get(key).copied()
    }

    fn insert(&self, key: (MonitorSet, AttackSet), entry: Entry) {
        self.map.lock().unwrap().insert(key, entry);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveCounts {
    pub solves: usize,
    pub cache_hits: usize,
    pub failures: usize,
}

impl SolveCounts {
    fn add(&mut self, other: SolveCounts) {
        self.solves += other.solves;
        self.cache_hits += other.cache_hits;
        self.failures += other.failures;
    }
}

fn impact(
    ctx: &AllocationContext,
    cache: &SolveCache,
    monitors: &MonitorSet,
    attack: &AttackSet,
    counts: &mut SolveCounts,
) -> Result<Option<f64>> {
    let key = (monitors.clone(), attack.clone());
    let entry = match cache.get(&key) {
        Some(e) => {
            counts.cache_hits += 1;
            e
        }
        None => {
            let model = ctx.network.build(attack, monitors)?;
            let res = solve_wcai(&model, &ctx.params)?;
            counts.solves += 1;
            let e = if res.is_optimal() && res.value.is_finite() {
                Entry::Value(res.value)
            } else {
                log::warn!(
                    "excluding attack {attack} against monitors {monitors}: solver ended {} ({})",
                    res.status,
                    res.message
                );
                Entry::Failed
            };
            cache.insert(key, e);
            e
        }
    };
    if entry == Entry::Failed {
        counts.failures += 1;
    }
    Ok(match entry {
        Entry::Value(v) => Some(v),
        Entry::Failed => None,
    })
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs())
}

/// `a` exceeds `b` by more than the tie tolerance.
fn clearly_above(a: f64, b: f64) -> bool {
    a > b && !tied(a, b)
}

/// Among `(set, value)` pairs, the lexicographically smallest set whose value
/// ties the extremum selected by `better`.
fn select<'s>(items: impl IntoIterator<Item = (&'s MonitorSet, f64)>, maximise: bool) -> Option<(&'s MonitorSet, f64)> {
    let items: Vec<_> = items.into_iter().collect();
    let extreme = items
        .iter()
        .map(|&(_, v)| v)
        .reduce(|a, b| if (b > a) == maximise { b } else { a })?;
    items
        .into_iter()
        .filter(|&(_, v)| tied(v, extreme))
        .min_by(|a, b| a.0.cmp(b.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstAttack {
    pub attack: AttackSet,
    pub value: f64,
    pub counts: SolveCounts,
}

/// Outcome of evaluating one monitor set, possibly cut short.
enum Inner {
    Done(WorstAttack),
    Pruned(SolveCounts),
}

/// Attack sets in enumeration order, with `first` moved to the front.
fn attack_order(n: usize, n_a: usize, first: Option<&AttackSet>) -> Vec<AttackSet> {
    let mut all: Vec<AttackSet> = combinations(n, n_a).collect();
    if let Some(f) = first {
        if let Some(pos) = all.iter().position(|a| a == f) {
            let hint = all.remove(pos);
            all.insert(0, hint);
        }
    }
    all
}

fn evaluate_monitor_set(
    ctx: &AllocationContext,
    cache: &SolveCache,
    monitors: &MonitorSet,
    hint: Option<&AttackSet>,
    bound: Option<f64>,
) -> Result<Inner> {
    let n = ctx.network.vertex_count();
    let mut counts = SolveCounts::default();
    let mut values = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for attack in attack_order(n, ctx.attack_budget, hint) {
        let Some(v) = impact(ctx, cache, monitors, &attack, &mut counts)? else {
            continue;
        };
        running = running.max(v);
        values.push((attack, v));
        if let Some(b) = bound {
            if clearly_above(running, b) {
                return Ok(Inner::Pruned(counts));
            }
        }
    }
    let Some((attack, value)) = select(values.iter().map(|(a, v)| (a, *v)), true) else {
        return Err(Error::NoFeasibleScenario(monitors.to_string()));
    };
    Ok(Inner::Done(WorstAttack {
        attack: attack.clone(),
        value,
        counts,
    }))
}

/// The attack set maximising the impact against `monitors`; every one of the
/// `C(n, n_a)` attack sets is evaluated. Failed solves are logged and skipped.
pub fn worst_attack_for(ctx: &AllocationContext, cache: &SolveCache, monitors: &MonitorSet) -> Result<WorstAttack> {
    ctx.validate()?;
    if monitors.len() != ctx.monitor_budget || monitors.max_id().is_some_and(|m| m >= ctx.network.vertex_count()) {
        return Err(Error::InvalidBudget(format!(
            "monitor set {monitors} does not match budget {} on {} vertices",
            ctx.monitor_budget,
            ctx.network.vertex_count()
        )));
    }
    match evaluate_monitor_set(ctx, cache, monitors, None, None)? {
        Inner::Done(w) => Ok(w),
        Inner::Pruned(_) => unreachable!("no bound was given"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub strategy: Strategy,
    pub monitor_set: MonitorSet,
    /// Worst-case impact over all attack sets for the chosen monitors.
    pub wcai: f64,
    pub worst_attack: AttackSet,
    /// SDPs solved by this run (cache hits excluded).
    pub inner_solves: usize,
    pub cache_hits: usize,
    /// Scenarios excluded after a solver failure.
    pub failed_solves: usize,
    /// Monitor sets fully evaluated.
    pub candidates: usize,
    /// Wall-clock seconds.
    pub solve_time: f64,
}

/// Minimises the worst-case impact over `sets`, pruning sets that are
/// provably worse than the incumbent when enabled.
fn minimise(
    ctx: &AllocationContext,
    cache: &SolveCache,
    sets: &[MonitorSet],
) -> Result<(MonitorSet, WorstAttack, SolveCounts, usize)> {
    // Incumbent as f64 bits; only ever lowered.
    let incumbent = AtomicU64::new(f64::INFINITY.to_bits());
    let hint: Mutex<Option<AttackSet>> = Mutex::new(None);
    let run = |m: &MonitorSet| -> Result<Inner> {
        let bound = ctx.prune.then(|| f64::from_bits(incumbent.load(Ordering::Acquire)));
        let h = hint.lock().unwrap().clone();
        let out = evaluate_monitor_set(ctx, cache, m, h.as_ref(), bound.filter(|b| b.is_finite()))?;
        if let Inner::Done(w) = &out {
            *hint.lock().unwrap() = Some(w.attack.clone());
            let _ = incumbent.fetch_update(Ordering::AcqRel, Ordering::Acquire, |cur| {
                (w.value < f64::from_bits(cur)).then_some(w.value.to_bits())
            });
        }
        Ok(out)
    };
    let outcomes: Vec<Result<Inner>> = if ctx.jobs > 1 && sets.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {} workers: {e}", ctx.jobs)))?;
        pool.install(|| sets.par_iter().map(run).collect())
    } else {
        sets.iter().map(run).collect()
    };

    let mut counts = SolveCounts::default();
    let mut done = Vec::new();
    for (m, out) in sets.iter().zip(outcomes) {
        match out {
            Ok(Inner::Done(w)) => {
                counts.add(w.counts);
                done.push((m, w));
            }
            Ok(Inner::Pruned(c)) => counts.add(c),
            Err(Error::NoFeasibleScenario(s)) => log::warn!("monitor set {s} has no solvable attack scenario"),
            Err(e) => return Err(e),
        }
    }
    let evaluated = done.len();
    let (best, _) = select(done.iter().map(|(m, w)| (*m, w.value)), false)
        .ok_or_else(|| Error::NoFeasibleScenario(format!("any of {} monitor sets", sets.len())))?;
    let (m, w) = done.into_iter().find(|(m, _)| *m == best).expect("selected set was evaluated");
    Ok((m.clone(), w, counts, evaluated))
}

fn result(strategy: Strategy, picked: (MonitorSet, WorstAttack, SolveCounts, usize), start: Instant) -> AllocationResult {
    let (monitor_set, worst, counts, candidates) = picked;
    AllocationResult {
        strategy,
        monitor_set,
        wcai: worst.value,
        worst_attack: worst.attack,
        inner_solves: counts.solves,
        cache_hits: counts.cache_hits,
        failed_solves: counts.failures,
        candidates,
        solve_time: start.elapsed().as_secs_f64(),
    }
}

/// Exact min-max placement by enumerating all `C(n, n_s)` monitor sets.
pub fn allocate_optimal(ctx: &AllocationContext, cache: &SolveCache) -> Result<AllocationResult> {
    ctx.validate()?;
    let start = Instant::now();
    let n = ctx.network.vertex_count();
    let sets: Vec<MonitorSet> = combinations(n, ctx.monitor_budget).collect();
    debug_assert_eq!(sets.len(), binomial(n, ctx.monitor_budget));
    Ok(result(Strategy::Optimal, minimise(ctx, cache, &sets)?, start))
}

/// Centrality scores used for placement: hop-based, on the unweighted
/// interconnection graph.
pub fn placement_scores(ctx: &AllocationContext, kind: CentralityKind) -> Result<CentralityScores> {
    CentralityScores::compute(kind, &ctx.network.graph()?.unit_weights())
}

/// Evaluates the top-scoring monitor sets of one centrality and keeps the
/// one with the smallest worst-case impact.
pub fn allocate_by_centrality(
    kind: CentralityKind,
    ctx: &AllocationContext,
    cache: &SolveCache,
) -> Result<AllocationResult> {
    ctx.validate()?;
    let start = Instant::now();
    let top = top_monitor_sets(&placement_scores(ctx, kind)?, ctx.monitor_budget)?;
    if top.truncated {
        log::warn!("{kind}: more than {} tied monitor sets, evaluating the first ones only", top.candidates.len());
    }
    let sets: Vec<MonitorSet> = top.candidates.into_iter().map(|c| c.vertices).collect();
    Ok(result(kind.into(), minimise(ctx, cache, &sets)?, start))
}

/// Best of the three centrality strategies. The impact is selected, never
/// recomputed, so it is exactly the smallest of the three.
pub fn allocate_combined(ctx: &AllocationContext, cache: &SolveCache) -> Result<AllocationResult> {
    let start = Instant::now();
    let mut runs = CentralityKind::ALL
        .into_iter()
        .map(|k| allocate_by_centrality(k, ctx, cache))
        .collect::<Result<Vec<_>>>()?;
    let mut inner_solves = 0;
    let mut cache_hits = 0;
    let mut failed_solves = 0;
    let mut candidates = 0;
    for r in &runs {
        inner_solves += r.inner_solves;
        cache_hits += r.cache_hits;
        failed_solves += r.failed_solves;
        candidates += r.candidates;
    }
    // exact minimum; equal values fall back to the smaller set, then kind order
    runs.sort_by(|a, b| a.wcai.total_cmp(&b.wcai).then_with(|| a.monitor_set.cmp(&b.monitor_set)));
    let best = runs.swap_remove(0);
    Ok(AllocationResult {
        strategy: Strategy::Combined,
        inner_solves,
        cache_hits,
        failed_solves,
        candidates,
        solve_time: start.elapsed().as_secs_f64(),
        ..best
    })
}

pub fn allocate(strategy: Strategy, ctx: &AllocationContext, cache: &SolveCache) -> Result<AllocationResult> {
    match strategy {
        Strategy::Optimal => allocate_optimal(ctx, cache),
        Strategy::Combined => allocate_combined(ctx, cache),
        s => allocate_by_centrality(s.centrality().expect("centrality strategy"), ctx, cache),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyGap {
    pub strategy: Strategy,
    /// `100·(J_s − J_opt)/J_opt`; `None` when `J_opt` is numerically zero.
    pub wcai_gap: Option<f64>,
    /// `100·(t_opt − t_s)/t_opt`, positive when the strategy is faster.
    pub time_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub gaps: Vec<StrategyGap>,
}

impl GapReport {
    pub fn get(&self, strategy: Strategy) -> Option<&StrategyGap> {
        self.gaps.iter().find(|g| g.strategy == strategy)
    }
}

/// Values below this are treated as zero when used as a denominator.
pub const GAP_DENOMINATOR_FLOOR: f64 = 1e-12;

pub fn relative_gap(value: f64, reference: f64) -> Option<f64> {
    (reference.abs() > GAP_DENOMINATOR_FLOOR).then(|| 100.0 * (value - reference) / reference)
}

pub fn time_gap(time: f64, reference: f64) -> Option<f64> {
    (reference > 0.0).then(|| 100.0 * (reference - time) / reference)
}

/// Gaps of every result relative to the optimal one, which must be present.
pub fn gap_report(results: &[AllocationResult]) -> Result<GapReport> {
    let opt = results
        .iter()
        .find(|r| r.strategy == Strategy::Optimal)
        .ok_or_else(|| Error::InvalidParameter("gap report needs the optimal result".into()))?;
    let gaps = results
        .iter()
        .map(|r| StrategyGap {
            strategy: r.strategy,
            wcai_gap: if r.strategy == Strategy::Optimal {
                relative_gap(opt.wcai, opt.wcai).map(|_| 0.0)
            } else {
                relative_gap(r.wcai, opt.wcai)
            },
            time_gap: time_gap(r.solve_time, opt.solve_time),
        })
        .collect();
    Ok(GapReport { gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Graph;
    use crate::sets::VertexSet;

    fn ctx(g: Graph, ns: usize, na: usize) -> AllocationContext {
        AllocationContext::new(Network::Consensus(g), ScenarioParams::default(), ns, na)
    }

    fn set(ids: &[usize], n: usize) -> VertexSet {
        VertexSet::from_one_based(ids, n).unwrap()
    }

    #[test]
    fn parses_strategies() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("random".parse::<Strategy>().is_err());
        assert_eq!(serde_json::to_string(&Strategy::Combined).unwrap(), "\"combined\"");
    }

    #[test]
    fn budgets_are_checked() {
        let c = ctx(path(3), 0, 1);
        assert!(matches!(allocate_optimal(&c, &SolveCache::new()), Err(Error::InvalidBudget(_))));
        let c = ctx(path(3), 1, 4);
        assert!(matches!(allocate_optimal(&c, &SolveCache::new()), Err(Error::InvalidBudget(_))));
    }

    #[test]
    fn k2_inner_problem_enumerates_both_attacks() {
        let c = ctx(path(2), 1, 1);
        let cache = SolveCache::new();
        let m = set(&[1], 2);
        let w = worst_attack_for(&c, &cache, &m).unwrap();
        assert_eq!(w.counts.solves, 2);
        let a1 = cache.value(&m, &set(&[1], 2)).unwrap();
        let a2 = cache.value(&m, &set(&[2], 2)).unwrap();
        assert!(tied(w.value, a1.max(a2)));
        // the unmonitored end is the better attack point
        assert!(a2 > a1);
        assert_eq!(w.attack, set(&[2], 2));
    }

    #[test]
    fn full_attack_budget_has_one_scenario() {
        let c = ctx(path(3), 1, 3);
        let w = worst_attack_for(&c, &SolveCache::new(), &set(&[2], 3)).unwrap();
        assert_eq!(w.counts.solves, 1);
        assert_eq!(w.attack, set(&[1, 2, 3], 3));
    }

    #[test]
    fn star_leaves_tie_to_the_smallest() {
        let c = ctx(star(5), 1, 1);
        let cache = SolveCache::new();
        let m = set(&[1], 5);
        let w = worst_attack_for(&c, &cache, &m).unwrap();
        let leaves: Vec<f64> = (2..=5).map(|v| cache.value(&m, &set(&[v], 5)).unwrap()).collect();
        let centre = cache.value(&m, &set(&[1], 5)).unwrap();
        assert!(leaves.iter().all(|&v| tied(v, leaves[0])), "{leaves:?}");
        assert!(leaves[0] > centre);
        assert_eq!(w.attack, set(&[2], 5));
    }

    #[test]
    fn single_monitor_set_is_returned_directly() {
        let r = allocate_optimal(&ctx(path(2), 2, 1), &SolveCache::new()).unwrap();
        assert_eq!(r.monitor_set, set(&[1, 2], 2));
        assert_eq!(r.candidates, 1);
    }

    #[test]
    fn cycle_is_symmetric() {
        let c = ctx(cycle(5), 1, 1);
        let cache = SolveCache::new();
        let r = allocate_optimal(&AllocationContext { prune: false, ..c.clone() }, &cache).unwrap();
        assert_eq!(r.monitor_set, set(&[1], 5));
        let worst: Vec<f64> = (1..=5)
            .map(|m| worst_attack_for(&c, &cache, &set(&[m], 5)).unwrap().value)
            .collect();
        assert!(worst.iter().all(|&v| (v - worst[0]).abs() <= 1e-6 * worst[0]), "{worst:?}");
    }

    #[test]
    fn path_centre_is_chosen_by_every_strategy() {
        let c = ctx(path(3), 1, 1);
        let cache = SolveCache::new();
        for s in Strategy::ALL {
            let r = allocate(s, &c, &cache).unwrap();
            assert_eq!(r.monitor_set, set(&[2], 3), "{s}");
        }
        let d = allocate_by_centrality(CentralityKind::Degree, &c, &SolveCache::new()).unwrap();
        let w = worst_attack_for(&c, &SolveCache::new(), &set(&[2], 3)).unwrap();
        assert_eq!(d.wcai, w.value);
        assert_eq!(d.candidates, 1);
    }

    #[test]
    fn k4_betweenness_evaluates_the_whole_tie() {
        let c = ctx(complete(4), 1, 1);
        let cache = SolveCache::new();
        let r = allocate_by_centrality(CentralityKind::Betweenness, &c, &cache).unwrap();
        assert_eq!(r.candidates, 4);
        assert_eq!(r.inner_solves, 16);
        assert_eq!(r.monitor_set, set(&[1], 4));
    }

    #[test]
    fn enumeration_is_complete_without_pruning() {
        for (g, ns, na) in [(path(4), 1, 1), (cycle(5), 2, 1), (star(4), 1, 2)] {
            let n = g.n();
            let c = AllocationContext { prune: false, ..ctx(g, ns, na) };
            let r = allocate_optimal(&c, &SolveCache::new()).unwrap();
            assert_eq!(r.inner_solves, binomial(n, ns) * binomial(n, na));
            assert_eq!(r.candidates, binomial(n, ns));
        }
    }

    #[test]
    fn pruning_keeps_the_optimum() {
        let g = Graph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (1, 4, 1.0), (3, 4, 1.0)]).unwrap();
        let c = ctx(g, 1, 1);
        let full = allocate_optimal(&AllocationContext { prune: false, ..c.clone() }, &SolveCache::new()).unwrap();
        let pruned = allocate_optimal(&c, &SolveCache::new()).unwrap();
        assert_eq!(full.monitor_set, pruned.monitor_set);
        assert!(tied(full.wcai, pruned.wcai));
        assert!(pruned.inner_solves <= full.inner_solves);
    }

    #[test]
    fn combined_is_the_exact_minimum_and_reuses_solves() {
        let g = Graph::new(6, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 5, 1.0), (0, 5, 1.0)]).unwrap();
        let c = ctx(g, 1, 1);
        let cache = SolveCache::new();
        let combined = allocate_combined(&c, &cache).unwrap();
        let kinds: Vec<f64> = CentralityKind::ALL
            .into_iter()
            .map(|k| {
                let r = allocate_by_centrality(k, &c, &cache).unwrap();
                assert_eq!(r.inner_solves, 0, "{k} re-solved a cached pair");
                r.wcai
            })
            .collect();
        assert_eq!(combined.wcai, kinds.iter().copied().fold(f64::INFINITY, f64::min));
        let opt = allocate_optimal(&c, &cache).unwrap();
        assert!(opt.wcai <= combined.wcai * (1.0 + 1e-6));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = Graph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 2, 1.0)]).unwrap();
        let c = ctx(g, 1, 1);
        let seq = allocate_optimal(&c, &SolveCache::new()).unwrap();
        let par = allocate_optimal(&AllocationContext { jobs: 3, ..c }, &SolveCache::new()).unwrap();
        assert_eq!(seq.monitor_set, par.monitor_set);
        assert_eq!(seq.worst_attack, par.worst_attack);
        assert_eq!(seq.wcai, par.wcai);
    }

    #[test]
    fn relabelling_maps_the_choice() {
        let g = Graph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (1, 4, 1.0)]).unwrap();
        let perm = [3, 0, 4, 1, 2];
        let h = g.permuted(&perm).unwrap();
        for s in [Strategy::Optimal, Strategy::Betweenness] {
            let a = allocate(s, &ctx(g.clone(), 1, 1), &SolveCache::new()).unwrap();
            let b = allocate(s, &ctx(h.clone(), 1, 1), &SolveCache::new()).unwrap();
            assert!((a.wcai - b.wcai).abs() <= 1e-6 * a.wcai, "{s}: {} vs {}", a.wcai, b.wcai);
            assert_eq!(a.monitor_set.mapped(&perm), b.monitor_set, "{s}");
        }
    }

    #[test]
    fn gap_formulas() {
        assert_eq!(relative_gap(1.0, 1.0), Some(0.0));
        assert!((relative_gap(1.1, 1.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((time_gap(0.1, 1.0).unwrap() - 90.0).abs() < 1e-12);
        assert_eq!(relative_gap(1.0, 0.0), None);
        let mk = |strategy, wcai, solve_time| AllocationResult {
            strategy,
            monitor_set: VertexSet::from_one_based(&[1], 2).unwrap(),
            wcai,
            worst_attack: VertexSet::from_one_based(&[2], 2).unwrap(),
            inner_solves: 0,
            cache_hits: 0,
            failed_solves: 0,
            candidates: 1,
            solve_time,
        };
        let rep = gap_report(&[mk(Strategy::Optimal, 2.0, 1.0), mk(Strategy::Degree, 2.2, 0.25)]).unwrap();
        assert_eq!(rep.get(Strategy::Optimal).unwrap().wcai_gap, Some(0.0));
        let d = rep.get(Strategy::Degree).unwrap();
        assert!((d.wcai_gap.unwrap() - 10.0).abs() < 1e-9);
        assert!((d.time_gap.unwrap() - 75.0).abs() < 1e-9);
        assert!(gap_report(&[mk(Strategy::Degree, 1.0, 1.0)]).is_err());
    }
}
