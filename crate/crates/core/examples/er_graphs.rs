//! Draws connected Erdős–Rényi graphs and reports how many draws were rejected.
//!
//!     cargo run --example er_graphs -- 12 0.3

use secalloc::graph::{generate_erdos_renyi, RngSeed};

fn main() -> secalloc::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let p: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.5);

    for seed in 0..5 {
        let er = generate_erdos_renyi(n, p, RngSeed(seed))?;
        let degrees: Vec<usize> = (0..n).map(|v| er.graph.neighbors(v).len()).collect();
        println!(
            "seed {seed}: {} edges, {} rejection(s), degrees {degrees:?}",
            er.graph.edges().len(),
            er.rejections
        );
    }
    Ok(())
}
