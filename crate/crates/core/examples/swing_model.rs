//! The linearised IEEE 14-bus swing model: spectrum of the state matrix and
//! the reachable dimension from one attacked bus.

use nalgebra::DMatrix;
use secalloc::model::{build_swing_model, load_ieee14};
use secalloc::sets::VertexSet;
use secalloc::wcai::reachable_basis;

fn main() -> secalloc::error::Result<()> {
    let grid = load_ieee14()?;
    let model = build_swing_model(&grid, &VertexSet::from_one_based(&[5], 14)?, &VertexSet::from_one_based(&[4], 14)?)?;
    let eig = DMatrix::<f64>::complex_eigenvalues(&model.a_mat);
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    println!("state dimension {}", model.state_dim);
    println!("slowest real parts {:?}", &re[re.len() - 3..]);
    println!("reachable from bus 5: {}", reachable_basis(&model.a_mat, &model.b_cols).ncols());
    Ok(())
}
