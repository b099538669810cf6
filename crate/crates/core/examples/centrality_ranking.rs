//! Degree, closeness and betweenness on the IEEE 14-bus topology, and the
//! bus each one would monitor.

use secalloc::centrality::{top_monitor_sets, CentralityKind, CentralityScores};
use secalloc::model::load_ieee14;

fn main() -> secalloc::error::Result<()> {
    let g = load_ieee14()?.network()?.unit_weights();
    let all: Vec<CentralityScores> = CentralityKind::ALL
        .into_iter()
        .map(|k| CentralityScores::compute(k, &g))
        .collect::<Result<_, _>>()?;

    println!("bus  degree  closeness  betweenness");
    for v in 0..g.n() {
        println!(
            "{:>3}  {:>6.0}  {:>9.4}  {:>11.3}",
            v + 1,
            all[0].values[v],
            all[1].values[v],
            all[2].values[v]
        );
    }
    for s in &all {
        let top = top_monitor_sets(s, 1)?;
        let picks: Vec<String> = top.candidates.iter().map(|c| c.vertices.to_string()).collect();
        println!("{:<12} -> {}", s.kind.name(), picks.join(" "));
    }
    Ok(())
}
