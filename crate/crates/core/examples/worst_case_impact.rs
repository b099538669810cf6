//! Certified worst-case impact of a stealthy attack, checked against
//! simulated random attacks rescaled to the energy and alarm budgets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secalloc::graph::Graph;
use secalloc::model::build_consensus_model;
use secalloc::sets::VertexSet;
use secalloc::sim::Waveform;
use secalloc::wcai::{check_certificate, solve_wcai, validate_bound, ScenarioParams};

fn main() -> secalloc::error::Result<()> {
    let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, 1.0)])?;
    let model = build_consensus_model(
        &g,
        &VertexSet::from_one_based(&[4], 4)?,
        &VertexSet::from_one_based(&[1], 4)?,
    )?;
    let params = ScenarioParams::new(0.5, 2.0)?;
    let res = solve_wcai(&model, &params)?;
    let cert = check_certificate(&model, &res);
    println!("J = {:.8} (beta {:.6}, gamma {:?}), {}", res.value, res.beta, res.gammas, res.status);
    println!("certificate: LMI max eig {:.1e}, P min eig {:.1e}", cert.lmi_max_eig, cert.p_min_eig);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials: Vec<Waveform> = (0..20).map(|_| Waveform::random(&mut rng, 1, 40.0)).collect();
    let rep = validate_bound(&model, &params, &res, &trials, 40.0, 1e-2);
    println!(
        "{} trials, {} violation(s), best achieved/bound {:.3}",
        rep.trials.len(),
        rep.violations,
        rep.best_ratio
    );
    Ok(())
}
