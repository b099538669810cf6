//! A small Erdős–Rényi batch written to a directory (default `er-results`):
//! records.csv, timings.csv, summary.json and one box-plot SVG per cell.

use secalloc::experiment::{run_er_experiment, ExperimentConfig};
use secalloc::report::emit_outputs;

fn main() -> secalloc::error::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "er-results".into());
    let cfg = ExperimentConfig {
        sizes: vec![6, 8],
        graphs_per_size: 5,
        p: 0.5,
        n_a: vec![1, 2],
        n_s: 1,
        delta: 1.0,
        attack_energy: 1.0,
        seed: 2024,
        jobs: None,
        prune: true,
        out_dir: None,
    };
    let outcome = run_er_experiment(&cfg)?;
    for cell in &outcome.summary.cells {
        print!("N={:<2} n_a={}:", cell.size, cell.n_a);
        for s in &cell.strategies {
            if let Some(q) = s.wcai_gap {
                print!("  {} {:.2}%", s.strategy.name(), q.median);
            }
        }
        println!();
    }
    for path in emit_outputs(&outcome.records, &outcome.summary, &outcome.failures, out.as_ref())? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
