//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line to
//! stderr (bypassing the harness's capture) and then asserts its outcome.
//! The tests take a shared lock so that wall-clock limits are measured
//! without competing for cores.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secalloc::allocation::Strategy;
use secalloc::centrality::{betweenness_centrality, closeness_centrality};
use secalloc::experiment::{run_er_experiment, run_ieee14_case, ExperimentConfig, ExperimentOutcome};
use secalloc::graph::{generate_erdos_renyi, Graph, RngSeed};
use secalloc::model::build_consensus_model;
use secalloc::sets::VertexSet;
use secalloc::sim::Waveform;
use secalloc::wcai::{solve_wcai, validate_bound, ScenarioParams};

use common::{brute_betweenness, brute_closeness, random_scenario};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, pass: bool, detail: &str) {
    let line = format!("criterion {id:>2}: {} — {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
    let _ = err.flush();
}

fn note(text: &str) {
    let _ = std::io::stderr().lock().write_all(format!("    {text}\n").as_bytes());
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

#[test]
fn c01_single_vertex_impact_is_one() {
    let _g = serial();
    let start = Instant::now();
    let g = Graph::new(1, []).unwrap();
    let one = VertexSet::from_one_based(&[1], 1).unwrap();
    let model = build_consensus_model(&g, &one, &one).unwrap();
    let r = solve_wcai(&model, &ScenarioParams::default()).unwrap();
    let t = start.elapsed();
    let pass = r.is_optimal() && (r.value - 1.0).abs() <= 1e-6 && t < Duration::from_secs(1);
    report(1, pass, &format!("J = {:.12}, |J-1| = {:.1e}, {:.3}s", r.value, (r.value - 1.0).abs(), t.as_secs_f64()));
    assert!(pass);
}

#[test]
fn c02_homogeneity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC02);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..20 {
        let s = random_scenario(&mut rng, 12);
        let model = build_consensus_model(&s.graph, &s.attack, &s.monitors).unwrap();
        let p = ScenarioParams::new(s.delta, s.attack_energy).unwrap();
        let a = solve_wcai(&model, &p).unwrap();
        let b = solve_wcai(&model, &p.scaled(2.0)).unwrap();
        let rel = (b.value - 2.0 * a.value).abs() / (2.0 * a.value);
        worst = worst.max(rel);
        if !(a.is_optimal() && b.is_optimal()) || rel > 1e-6 {
            bad += 1;
        }
    }
    let t = start.elapsed();
    let pass = bad == 0 && within(t, 120);
    report(2, pass, &format!("20 scenarios, worst relative error {worst:.1e}, {bad} bad, {:.1}s", t.as_secs_f64()));
    assert!(pass);
}

#[test]
fn c03_monitor_monotonicity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC03);
    let mut worst = f64::NEG_INFINITY;
    let mut bad = 0;
    for _ in 0..20 {
        let s = random_scenario(&mut rng, 12);
        let n = s.graph.n();
        let free: Vec<usize> = (0..n).filter(|v| !s.monitors.contains(*v)).collect();
        let extra = free[rng.gen_range(0..free.len())];
        let mut ids = s.monitors.ids().to_vec();
        ids.push(extra);
        let more = VertexSet::new(ids, n).unwrap();
        let p = ScenarioParams::new(s.delta, s.attack_energy).unwrap();
        let a = solve_wcai(&build_consensus_model(&s.graph, &s.attack, &s.monitors).unwrap(), &p).unwrap();
        let b = solve_wcai(&build_consensus_model(&s.graph, &s.attack, &more).unwrap(), &p).unwrap();
        let excess = (b.value - a.value) / a.value;
        worst = worst.max(excess);
        if !(a.is_optimal() && b.is_optimal()) || excess > 1e-6 {
            bad += 1;
        }
    }
    let t = start.elapsed();
    let pass = bad == 0 && within(t, 300);
    report(3, pass, &format!("20 scenarios, largest relative increase {worst:.1e}, {bad} bad, {:.1}s", t.as_secs_f64()));
    assert!(pass);
}

#[test]
fn c04_centrality_matches_path_enumeration() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC04);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=7);
        let g = generate_erdos_renyi(n, rng.gen_range(0.2..0.9), RngSeed(rng.gen())).unwrap().graph;
        let b = betweenness_centrality(&g).unwrap().values;
        let c = closeness_centrality(&g).unwrap().values;
        for (x, y) in b.iter().zip(brute_betweenness(&g)).chain(c.iter().zip(brute_closeness(&g))) {
            worst = worst.max((x - y).abs());
        }
    }
    let t = start.elapsed();
    let pass = worst <= 1e-9 && within(t, 60);
    report(4, pass, &format!("200 graphs, largest deviation {worst:.1e}, {:.2}s", t.as_secs_f64()));
    assert!(pass);
}

#[test]
fn c05_bound_survives_simulated_attacks() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC05);
    let (horizon, step) = (40.0, 1e-2);
    let mut violations = 0;
    let mut errors = 0;
    let mut best = 0.0f64;
    for _ in 0..10 {
        let s = random_scenario(&mut rng, 10);
        let model = build_consensus_model(&s.graph, &s.attack, &s.monitors).unwrap();
        let p = ScenarioParams::new(s.delta, s.attack_energy).unwrap();
        let r = solve_wcai(&model, &p).unwrap();
        let trials: Vec<Waveform> = (0..100).map(|_| Waveform::random(&mut rng, s.attack.len(), horizon)).collect();
        let rep = validate_bound(&model, &p, &r, &trials, horizon, step);
        violations += rep.violations;
        errors += rep.trials.iter().filter(|t| t.error.is_some()).count();
        best = best.max(rep.best_ratio);
    }
    let t = start.elapsed();
    let pass = violations == 0 && errors == 0 && within(t, 600);
    report(
        5,
        pass,
        &format!(
            "1000 trials, {violations} violation(s), {errors} simulation error(s), best achieved/J {best:.3}, {:.1}s",
            t.as_secs_f64()
        ),
    );
    assert!(pass);
}

fn er10_batch() -> &'static (ExperimentOutcome, Duration) {
    static BATCH: OnceLock<(ExperimentOutcome, Duration)> = OnceLock::new();
    BATCH.get_or_init(|| {
        let cfg = ExperimentConfig {
            sizes: vec![10],
            graphs_per_size: 30,
            p: 0.5,
            n_a: vec![1],
            n_s: 1,
            delta: 1.0,
            attack_energy: 1.0,
            seed: 20240,
            jobs: Some(1),
            prune: true,
            out_dir: None,
        };
        let start = Instant::now();
        let out = run_er_experiment(&cfg).unwrap();
        (out, start.elapsed())
    })
}

#[test]
fn c06_optimal_dominates_every_heuristic() {
    let _g = serial();
    let (out, t) = er10_batch();
    let mut bad = 0;
    for r in &out.records {
        let opt = r.outcome(Strategy::Optimal);
        if opt.wcai_gap != Some(0.0) {
            bad += 1;
        }
        for s in [Strategy::Degree, Strategy::Closeness, Strategy::Betweenness, Strategy::Combined] {
            if opt.wcai > r.outcome(s).wcai + 1e-6 * opt.wcai {
                bad += 1;
            }
        }
    }
    let pass = bad == 0 && out.records.len() == 30 && out.failures.is_empty() && within(*t, 1800);
    report(
        6,
        pass,
        &format!(
            "{} graphs, {} failure(s), {bad} dominance violation(s), batch {:.1}s",
            out.records.len(),
            out.failures.len(),
            t.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn c07_heuristic_gaps_are_small() {
    let _g = serial();
    let (out, _) = er10_batch();
    let cell = &out.summary.cells[0];
    let median = |s: Strategy| cell.strategy(s).wcai_gap.map(|q| q.median).unwrap_or(f64::NAN);
    for s in Strategy::ALL {
        if let Some(q) = cell.strategy(s).wcai_gap {
            note(&format!("{:<12} WCAI gap median {:6.3}%  [p25 {:6.3}, p75 {:6.3}]", s.name(), q.median, q.p25, q.p75));
        }
    }
    let (comb, betw) = (median(Strategy::Combined), median(Strategy::Betweenness));
    let pass = comb <= 15.0 && betw <= 15.0;
    report(7, pass, &format!("median gaps: combined {comb:.3}%, betweenness {betw:.3}% (limit 15%)"));
    assert!(pass);
}

#[test]
fn c08_ieee14_bus_four() {
    let _g = serial();
    let report_ = run_ieee14_case(ScenarioParams::default(), 1, 1).unwrap();
    let t = Duration::from_secs_f64(report_.solve_time);
    let picks_four = report_.centrality.iter().all(|c| c.buses == vec![4]);
    let gap4 = report_.row(4).and_then(|r| r.gap).unwrap_or(f64::NAN);
    for c in &report_.centrality {
        note(&format!("{} selects bus(es) {:?}", c.kind, c.buses));
    }
    if report_.optimal_bus != 2 {
        note(&format!(
            "FLAG: enumeration selects bus {} (ties: {:?}), not bus 2; per-bus table:",
            report_.optimal_bus, report_.optimal_buses
        ));
        for r in &report_.rows {
            note(&format!(
                "bus {:>2}: J = {:.9}  gap {:>7.4}%  worst attack {}",
                r.bus,
                r.wcai,
                r.gap.unwrap_or(f64::NAN),
                r.worst_attack
            ));
        }
    }
    let pass = picks_four && gap4 <= 5.0 && within(t, 900);
    report(
        8,
        pass,
        &format!(
            "centralities pick bus 4: {picks_four}; optimal bus {}; bus-4 gap {gap4:.4}% (target 5%); {:.1}s",
            report_.optimal_bus,
            t.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn c09_centrality_is_at_least_three_times_faster() {
    let _g = serial();
    let cfg = ExperimentConfig {
        sizes: vec![14],
        graphs_per_size: 10,
        p: 0.5,
        n_a: vec![1],
        n_s: 1,
        delta: 1.0,
        attack_energy: 1.0,
        seed: 20241,
        jobs: Some(1),
        prune: true,
        out_dir: None,
    };
    let out = run_er_experiment(&cfg).unwrap();
    let total = |s: Strategy| out.records.iter().map(|r| r.outcome(s).solve_time).sum::<f64>();
    let t_opt = total(Strategy::Optimal);
    let mut pass = out.failures.is_empty() && !out.records.is_empty();
    let mut parts = Vec::new();
    for s in [Strategy::Degree, Strategy::Closeness, Strategy::Betweenness] {
        let ratio = total(s) / t_opt;
        pass &= ratio <= 1.0 / 3.0;
        parts.push(format!("{} {:.3}", s.name(), ratio));
    }
    report(
        9,
        pass,
        &format!("time / optimal over {} graphs: {} (optimal {t_opt:.1}s)", out.records.len(), parts.join(", ")),
    );
    assert!(pass);
}

fn run_experiment_cli(config: &Path, out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_secalloc"))
        .args(["experiment", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("SECALLOC_JOBS", "2")
        .output()
        .expect("binary runs");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

#[test]
fn c10_experiment_records_are_reproducible() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"sizes": [7, 8], "graphs_per_size": 3, "p": 0.5, "n_a": [1, 2], "n_s": 1, "seed": 99}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_experiment_cli(&config, &a);
    run_experiment_cli(&config, &b);
    let read = |d: &Path| std::fs::read(d.join("records.csv")).unwrap();
    let (ra, rb) = (read(&a), read(&b));
    let rows = ra.iter().filter(|&&c| c == b'\n').count();
    let pass = ra == rb && rows == 1 + 2 * 3 * 2;
    report(10, pass, &format!("two runs, {} bytes / {rows} lines each, identical: {}", ra.len(), ra == rb));
    assert!(pass);
}
