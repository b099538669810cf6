//! The same worst-case impact SDP through both conic backends.

use secalloc::graph::Graph;
use secalloc::model::build_consensus_model;
use secalloc::sdp::{ConicSolver, InteriorPoint};
use secalloc::sets::VertexSet;
use secalloc::wcai::{assemble_wcai_sdp, solve_wcai_with, ScenarioParams, WcaiOptions};

fn main() -> secalloc::error::Result<()> {
    let g = Graph::new(6, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (0, 5, 1.0), (1, 4, 1.0)])?;
    let model = build_consensus_model(
        &g,
        &VertexSet::from_one_based(&[3], 6)?,
        &VertexSet::from_one_based(&[6], 6)?,
    )?;
    let params = ScenarioParams::default();
    let sdp = assemble_wcai_sdp(&model, &params)?;
    println!("{} variables, block sizes {:?}", sdp.num_vars(), sdp.blocks.iter().map(|b| b.dim).collect::<Vec<_>>());

    let mut solvers: Vec<Box<dyn ConicSolver>> = vec![Box::new(InteriorPoint::default())];
    #[cfg(feature = "clarabel")]
    solvers.push(Box::new(secalloc::sdp::clarabel::ClarabelSolver::default()));
    for s in &solvers {
        let r = solve_wcai_with(&model, &params, s.as_ref(), &WcaiOptions::default())?;
        println!("{:<15} J = {:.9}  {}  {:.3}s", s.name(), r.value, r.status, r.solve_time);
    }
    Ok(())
}
