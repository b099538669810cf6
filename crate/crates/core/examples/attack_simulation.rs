//! Simulates a ramp attack on a consensus network and prints how much of the
//! attack shows up at the performance output versus the monitor.

use secalloc::graph::Graph;
use secalloc::model::build_consensus_model;
use secalloc::sets::VertexSet;
use secalloc::sim::{simulate, Waveform};

fn main() -> secalloc::error::Result<()> {
    // 1 - 2 - 3 - 4 - 5, attacker at the end, monitor in the middle
    let g = Graph::new(5, (0..4).map(|i| (i, i + 1, 1.0)))?;
    let attack = VertexSet::from_one_based(&[1], 5)?;
    let monitor = VertexSet::from_one_based(&[3], 5)?;
    let model = build_consensus_model(&g, &attack, &monitor)?;

    for rise in [1.0, 5.0, 20.0] {
        let w = Waveform::Ramp { level: vec![1.0], rise_time: rise };
        let tr = simulate(&model, &w, 20.0, 1e-3)?;
        println!(
            "ramp over {rise:>4}s: attack energy {:.4}, performance {:.4}, monitor {:.4}",
            tr.attack_energy, tr.perf_energy, tr.monitor_energy[0]
        );
    }
    Ok(())
}
