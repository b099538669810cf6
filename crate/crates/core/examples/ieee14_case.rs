//! Per-bus worst-case impact on the IEEE 14-bus swing model. Solves 196 SDPs
//! in extended precision; expect several minutes on one core.
//!
//!     cargo run --release --example ieee14_case

use secalloc::allocation::resolve_jobs;
use secalloc::experiment::run_ieee14_case;
use secalloc::wcai::ScenarioParams;

fn main() -> secalloc::error::Result<()> {
    let report = run_ieee14_case(ScenarioParams::default(), 1, resolve_jobs(None))?;
    for r in &report.rows {
        println!("bus {:>2}: J = {:.9}  (+{:.4}%)  worst attack at {}", r.bus, r.wcai, r.gap.unwrap_or(0.0), r.worst_attack);
    }
    println!("best monitor bus: {:?}", report.optimal_buses);
    for c in &report.centrality {
        println!("{} would monitor bus {:?}", c.kind, c.buses);
    }
    Ok(())
}
