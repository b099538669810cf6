//! Second solver route through the Clarabel conic solver.
//!
//! Clarabel expects `min qᵀx s.t. Ax + s = b, s ∈ K`; with `s = svec(Z)` the
//! LMI `Z = Σ y_i A_i − C` gives `A = −[svec(A_i)]` and `b = −svec(C)`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::{DMatrix, DVector};

use super::{ConicSolver, SdpProblem, SdpSolution, SdpStatus};

#[derive(Debug, Clone, Copy)]
pub struct ClarabelSolver {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for ClarabelSolver {
    fn default() -> Self {
        ClarabelSolver { tol: 1e-10, max_iter: 200 }
    }
}

/// Upper triangle, column by column, off-diagonals scaled by √2.
fn svec_entries(dim: usize) -> impl Iterator<Item = (usize, usize, f64)> {
    (0..dim).flat_map(|j| {
        (0..=j).map(move |i| (i, j, if i == j { 1.0 } else { std::f64::consts::SQRT_2 }))
    })
}

fn slot_count(dim: usize, diagonal: bool) -> usize {
    if diagonal {
        dim
    } else {
        dim * (dim + 1) / 2
    }
}

impl ConicSolver for ClarabelSolver {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve(&self, problem: &SdpProblem) -> SdpSolution {
        let m = problem.num_vars();
        let fail = |msg: String| SdpSolution {
            status: SdpStatus::NumericalFailure,
            y: DVector::zeros(m),
            x: problem.blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect(),
            objective: f64::NAN,
            dual_objective: f64::NAN,
            relative_gap: f64::INFINITY,
            primal_infeasibility: f64::INFINITY,
            dual_infeasibility: f64::INFINITY,
            iterations: 0,
            message: msg,
        };
        if let Err(msg) = problem.validate() {
            return fail(msg);
        }

        let mut rows = Vec::new();
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut rhs = Vec::new();
        let mut cones = Vec::new();
        let mut offset = 0;
        let dense: Vec<Vec<DMatrix<f64>>> = (0..m).map(|i| problem.constraint_matrix(i)).collect();
        for (k, blk) in problem.blocks.iter().enumerate() {
            let entries: Vec<(usize, usize, f64)> = if blk.diagonal {
                (0..blk.dim).map(|i| (i, i, 1.0)).collect()
            } else {
                svec_entries(blk.dim).collect()
            };
            for (slot, &(r, c, w)) in entries.iter().enumerate() {
                rhs.push(-w * blk.constant[(r, c)]);
                for (i, a) in dense.iter().enumerate() {
                    let v = a[k][(r, c)];
                    if v != 0.0 {
                        rows.push(offset + slot);
                        cols.push(i);
                        vals.push(-w * v);
                    }
                }
            }
            cones.push(if blk.diagonal {
                SupportedConeT::NonnegativeConeT(blk.dim)
            } else {
                SupportedConeT::PSDTriangleConeT(blk.dim)
            });
            offset += slot_count(blk.dim, blk.diagonal);
        }

        let a = CscMatrix::new_from_triplets(offset, m, rows, cols, vals);
        let p = CscMatrix::zeros((m, m));
        let q: Vec<f64> = problem.objective.iter().copied().collect();
        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .build()
        {
            Ok(s) => s,
            Err(e) => return fail(format!("clarabel settings: {e:?}")),
        };
        let mut solver = match DefaultSolver::new(&p, &q, &a, &rhs, &cones, settings) {
            Ok(s) => s,
            Err(e) => return fail(format!("clarabel setup: {e:?}")),
        };
        solver.solve();
        let sol = &solver.solution;

        let mut x = Vec::new();
        let mut offset = 0;
        for blk in &problem.blocks {
            let mut xm = DMatrix::zeros(blk.dim, blk.dim);
            if blk.diagonal {
                for i in 0..blk.dim {
                    xm[(i, i)] = sol.z[offset + i];
                }
            } else {
                for (slot, (r, c, w)) in svec_entries(blk.dim).enumerate() {
                    let v = sol.z[offset + slot] / w;
                    xm[(r, c)] = v;
                    xm[(c, r)] = v;
                }
            }
            x.push(xm);
            offset += slot_count(blk.dim, blk.diagonal);
        }
        let status = match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => SdpStatus::Optimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SdpStatus::Infeasible
            }
            _ => SdpStatus::NumericalFailure,
        };
        let (pobj, dobj) = (sol.obj_val, sol.obj_val_dual);
        SdpSolution {
            status,
            y: DVector::from_vec(sol.x.clone()),
            x,
            objective: pobj,
            dual_objective: dobj,
            relative_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            primal_infeasibility: sol.r_prim,
            dual_infeasibility: sol.r_dual,
            iterations: sol.iterations as usize,
            message: format!("{:?}", sol.status),
        }
    }
}
