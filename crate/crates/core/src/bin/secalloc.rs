use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use secalloc::allocation::{allocate, resolve_jobs, AllocationContext, AllocationResult, SolveCache, Strategy};
use secalloc::centrality::{top_monitor_sets, CentralityKind, CentralityScores};
use secalloc::error::Result;
use secalloc::experiment::{run_er_experiment, run_ieee14_case, ExperimentConfig};
use secalloc::graph::{generate_erdos_renyi, RngSeed};
use secalloc::report::emit_outputs;
use secalloc::scenario::{load_network, Scenario};
use secalloc::wcai::{check_certificate, solve_wcai_with, ScenarioParams, WcaiOptions, CERTIFICATE_TOL};

#[derive(Parser)]
#[command(version, about = "Worst-case stealthy attack impact and monitor allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a connected Erdős–Rényi graph.
    GenEr {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Centrality scores and the top-scoring monitor sets.
    Centrality {
        /// Graph JSON, swing JSON or `ieee14`.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        kind: CentralityKind,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        unit_weights: bool,
        #[arg(long, default_value_t = 1)]
        budget: usize,
    },
    /// Worst-case attack impact of one scenario.
    Wcai {
        #[arg(long)]
        scenario: PathBuf,
        /// Write the certificate matrix P as JSON.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
        /// Shift A by −εI (diagnostics only).
        #[arg(long, default_value_t = 0.0)]
        ground_epsilon: f64,
    },
    /// Place monitors with one or all strategies.
    Allocate {
        #[arg(long)]
        graph: PathBuf,
        /// optimal, degree, closeness, betweenness, combined or all.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long, default_value_t = 1)]
        ns: usize,
        #[arg(long, default_value_t = 1)]
        na: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        ae: f64,
        #[arg(long)]
        no_prune: bool,
        #[arg(long, env = "SECALLOC_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Erdős–Rényi batch comparison of all strategies.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-bus worst-case impact on the IEEE 14-bus system.
    Ieee14 {
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        ae: f64,
        #[arg(long, default_value_t = 1)]
        na: usize,
        #[arg(long, env = "SECALLOC_JOBS")]
        jobs: Option<usize>,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| secalloc::error::Error::Io {
        path: path.clone(),
        source: e,
    })
}

fn print_result(r: &AllocationResult) {
    println!(
        "{:<12} monitors {:<12} wcai {:<14.9} worst attack {:<12} solves {:>5} (cached {:>4}) {:>9.3}s",
        r.strategy.name(),
        r.monitor_set.to_string(),
        r.wcai,
        r.worst_attack.to_string(),
        r.inner_solves,
        r.cache_hits,
        r.solve_time
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenEr { n, p, seed, out } => {
            let er = generate_erdos_renyi(n, p, RngSeed(seed))?;
            eprintln!(
                "{} after {} rejection(s), seed used {}",
                er.graph, er.rejections, er.seed_used.0
            );
            match out {
                Some(path) => er.graph.save(&path)?,
                None => println!("{}", serde_json::to_string_pretty(&er.graph.to_json())?),
            }
        }
        Command::Centrality {
            graph,
            kind,
            unit_weights,
            budget,
        } => {
            let g = load_network(&graph)?.graph()?;
            let g = if unit_weights { g.unit_weights() } else { g };
            let scores = CentralityScores::compute(kind, &g)?;
            println!("vertex,{kind}");
            for (v, s) in scores.values.iter().enumerate() {
                println!("{},{s}", v + 1);
            }
            let top = top_monitor_sets(&scores, budget)?;
            for c in &top.candidates {
                println!("# top set {} (total {})", c.vertices, c.total_score);
            }
            if top.truncated {
                println!("# tie list truncated");
            }
        }
        Command::Wcai {
            scenario,
            emit_certificate,
            ground_epsilon,
        } => {
            let sc = Scenario::load(&scenario)?;
            let model = sc.model()?;
            let options = WcaiOptions {
                ground_epsilon,
                ..WcaiOptions::default()
            };
            let res = solve_wcai_with(&model, &sc.params, &secalloc::sdp::InteriorPoint::default(), &options)?;
            let cert = check_certificate(&model, &res);
            println!("J       {:.10}", res.value);
            println!("beta    {:.10}", res.beta);
            println!("gamma   {:?}", res.gammas);
            println!("status  {} ({})", res.status, res.message);
            println!("time    {:.3}s", res.solve_time);
            println!(
                "check   LMI max eig {:.2e}, P min eig {:.2e}",
                cert.lmi_max_eig, cert.p_min_eig
            );
            if let Some(path) = emit_certificate {
                let rows: Vec<Vec<f64>> = res.p_mat.row_iter().map(|r| r.iter().copied().collect()).collect();
                write_json(&path, &serde_json::json!({ "P": rows, "beta": res.beta, "gamma": res.gammas, "J": res.value }))?;
            }
            if !res.is_optimal() || !cert.holds(CERTIFICATE_TOL) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Allocate {
            graph,
            strategy,
            ns,
            na,
            delta,
            ae,
            no_prune,
            jobs,
            out,
        } => {
            let strategies: Vec<Strategy> = if strategy.eq_ignore_ascii_case("all") {
                Strategy::ALL.to_vec()
            } else {
                vec![strategy.parse()?]
            };
            let ctx = AllocationContext {
                prune: !no_prune,
                jobs: resolve_jobs(jobs),
                ..AllocationContext::new(load_network(&graph)?, ScenarioParams::new(delta, ae)?, ns, na)
            };
            let cache = SolveCache::new();
            let mut results = Vec::new();
            for s in strategies {
                let r = allocate(s, &ctx, &cache)?;
                print_result(&r);
                results.push(r);
            }
            if let Some(path) = out {
                write_json(&path, &results)?;
            }
        }
        Command::Experiment { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_er_experiment(&cfg)?;
            let dir = out.or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
            for path in emit_outputs(&outcome.records, &outcome.summary, &outcome.failures, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            for cell in &outcome.summary.cells {
                println!("N={} n_a={} graphs={} failures={}", cell.size, cell.n_a, cell.graphs, cell.failures);
                for s in &cell.strategies {
                    let fmt = |q: Option<secalloc::experiment::Quartiles>| {
                        q.map(|q| format!("{:7.2} [{:7.2}, {:7.2}]", q.median, q.p25, q.p75))
                            .unwrap_or_else(|| "n/a".into())
                    };
                    println!(
                        "  {:<12} wcai gap {}   time gap {}",
                        s.strategy.name(),
                        fmt(s.wcai_gap),
                        fmt(s.time_gap)
                    );
                }
            }
        }
        Command::Ieee14 {
            delta,
            ae,
            na,
            jobs,
            out,
        } => {
            let report = run_ieee14_case(ScenarioParams::new(delta, ae)?, na, resolve_jobs(jobs))?;
            println!("bus  wcai            gap %     worst attack");
            for r in &report.rows {
                println!(
                    "{:>3}  {:<14.9}  {:>8.4}  {}",
                    r.bus,
                    r.wcai,
                    r.gap.unwrap_or(f64::NAN),
                    r.worst_attack
                );
            }
            println!("optimal bus(es): {:?}", report.optimal_buses);
            for c in &report.centrality {
                println!("{} picks bus(es) {:?}", c.kind, c.buses);
            }
            println!("total time {:.1}s", report.solve_time);
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
