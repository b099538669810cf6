//! Block-diagonal semidefinite programs in linear-matrix-inequality form
//!
//! ```text
//!     minimize    bᵀy
//!     subject to  Z_k = Σ_i y_i A_i,k − C_k ⪰ 0      for every block k
//! ```
//!
//! and their duals `maximize Σ_k ⟨C_k, X_k⟩ s.t. Σ_k ⟨A_i,k, X_k⟩ = b_i, X ⪰ 0`.
//!
//! Every constraint matrix is stored as a short sum of symmetric rank-two
//! terms `c (u vᵀ + v uᵀ)` whose vectors are columns of a per-block basis.
//! LMIs built from Lyapunov operators have only a handful of such terms per
//! variable, which keeps the Schur complement cheap to form.

#[cfg(feature = "clarabel")]
pub mod clarabel;
pub mod ipm;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use ipm::{InteriorPoint, IpmSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub dim: usize,
    /// `dim × K` matrix whose columns are the vectors referenced by terms.
    pub basis: DMatrix<f64>,
    pub constant: DMatrix<f64>,
    /// Every constraint and the constant are diagonal; solvers may treat the
    /// block as a nonnegative orthant.
    pub diagonal: bool,
}

/// `coef · (V_u V_vᵀ + V_v V_uᵀ)` in block `block`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub block: usize,
    pub u: usize,
    pub v: usize,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub objective: DVector<f64>,
    pub blocks: Vec<Block>,
    /// Terms of `A_i` for every decision variable `i`.
    pub columns: Vec<Vec<Term>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    /// The LMI admits no solution.
    Infeasible,
    NumericalFailure,
}

impl fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::NumericalFailure => "numerical-failure",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub y: DVector<f64>,
    /// Dual (moment) matrices, one per block.
    pub x: Vec<DMatrix<f64>>,
    /// `bᵀy`.
    pub objective: f64,
    /// `Σ ⟨C_k, X_k⟩`.
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub message: String,
}

/// A conic solver behind which the SDP assembly is kept independent.
pub trait ConicSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &SdpProblem) -> SdpSolution;
}

impl SdpProblem {
    pub fn num_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.objective.len() != self.columns.len() {
            return Err(format!(
                "{} objective coefficients for {} variables",
                self.objective.len(),
                self.columns.len()
            ));
        }
        for (k, b) in self.blocks.iter().enumerate() {
            if b.basis.nrows() != b.dim || b.constant.shape() != (b.dim, b.dim) {
                return Err(format!("block {k} has inconsistent shapes"));
            }
            if (&b.constant - b.constant.transpose()).amax() > 0.0 {
                return Err(format!("constant of block {k} is not symmetric"));
            }
        }
        for (i, col) in self.columns.iter().enumerate() {
            for t in col {
                let ok = self
                    .blocks
                    .get(t.block)
                    .is_some_and(|b| t.u < b.basis.ncols() && t.v < b.basis.ncols());
                if !ok {
                    return Err(format!("variable {i} references a missing block or basis vector"));
                }
            }
        }
        Ok(())
    }

    /// Dense `A_i` for every block.
    pub fn constraint_matrix(&self, i: usize) -> Vec<DMatrix<f64>> {
        let mut y = DVector::zeros(self.num_vars());
        y[i] = 1.0;
        self.operator(&y)
    }

    /// `Σ_i y_i A_i` block by block.
    pub fn operator(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut coeffs: Vec<DMatrix<f64>> = self
            .blocks
            .iter()
            .map(|b| DMatrix::zeros(b.basis.ncols(), b.basis.ncols()))
            .collect();
        for (col, &yi) in self.columns.iter().zip(y.iter()) {
            if yi == 0.0 {
                continue;
            }
            for t in col {
                let s = &mut coeffs[t.block];
                s[(t.u, t.v)] += t.coef * yi;
                s[(t.v, t.u)] += t.coef * yi;
            }
        }
        self.blocks
            .iter()
            .zip(coeffs)
            .map(|(b, s)| &b.basis * s * b.basis.transpose())
            .collect()
    }

    /// `Σ_i y_i A_i − C`.
    pub fn slack(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.operator(y)
            .into_iter()
            .zip(&self.blocks)
            .map(|(s, b)| s - &b.constant)
            .collect()
    }

    /// `(⟨A_i, X⟩)_i`.
    pub fn adjoint(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        let grams: Vec<_> = self
            .blocks
            .iter()
            .zip(x)
            .map(|(b, xb)| b.basis.transpose() * xb * &b.basis)
            .collect();
        self.adjoint_from_grams(&grams)
    }

    pub(crate) fn adjoint_from_grams(&self, grams: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.num_vars(),
            self.columns.iter().map(|col| {
                col.iter()
                    .map(|t| {
                        let g = &grams[t.block];
                        t.coef * (g[(t.u, t.v)] + g[(t.v, t.u)])
                    })
                    .sum::<f64>()
            }),
        )
    }
}
