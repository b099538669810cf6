//! Worst-case impact of a stealthy, energy-bounded attack.
//!
//! The impact is bounded by a dissipativity certificate: if `P ⪰ 0`, `β` and
//! `γ_k` satisfy
//!
//! ```text
//! ⎡ AᵀP + PA + CᵀC − Σ γ_k M_kᵀM_k   PB  ⎤
//! ⎣ BᵀP                              −βI ⎦ ⪯ 0
//! ```
//!
//! then `Σ‖y‖² ≤ A_e β + δ Σ γ_k` for every attack with `‖ζ‖² ≤ A_e` whose
//! monitored outputs stay below `δ`. The smallest such bound is an SDP.
//!
//! Trajectories start at `x(0) = 0` and never leave the reachable subspace of
//! `(A, B)`. Modes outside it (e.g. the antisymmetric mode of a path attacked
//! at its centre) make the full-size infimum unattained, so [`solve_wcai`]
//! solves the same program restricted to that subspace and lifts `P` back.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::sdp::{Block, ConicSolver, InteriorPoint, SdpProblem, SdpStatus, Term};
use crate::sim::{simulate, Waveform};

/// Lower bound replacing the strict positivity of `β` and `γ`.
pub const POSITIVITY_FLOOR: f64 = 1e-9;
/// Slack allowed when checking the returned certificate.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Relative slack of the simulated bound check.
pub const BOUND_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Alarm threshold on every monitored output energy.
    pub delta: f64,
    /// Energy budget of the attack signal.
    pub attack_energy: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams { delta: 1.0, attack_energy: 1.0 }
    }
}

impl ScenarioParams {
    pub fn new(delta: f64, attack_energy: f64) -> Result<Self> {
        let p = ScenarioParams { delta, attack_energy };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta > 0.0 && self.attack_energy > 0.0 && self.delta.is_finite() && self.attack_energy.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "delta and attack energy must be positive and finite, got {} and {}",
                self.delta, self.attack_energy
            )))
        }
    }

    pub fn scaled(&self, c: f64) -> ScenarioParams {
        ScenarioParams { delta: c * self.delta, attack_energy: c * self.attack_energy }
    }
}

#[derive(Debug, Clone)]
pub struct WcaiResult {
    /// `A_e β + δ Σγ`.
    pub value: f64,
    pub beta: f64,
    pub gammas: Vec<f64>,
    /// Storage matrix in the model's full state coordinates.
    pub p_mat: DMatrix<f64>,
    pub status: SdpStatus,
    /// Seconds spent in assembly and solve.
    pub solve_time: f64,
    /// Dimension of the reachable subspace the program was solved on.
    pub reduced_dim: usize,
    pub iterations: usize,
    pub relative_gap: f64,
    pub message: String,
}

impl WcaiResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcaiOptions {
    pub floor: f64,
    /// Restrict to the reachable subspace before solving.
    pub reduce: bool,
    /// Diagnostic only: solve with `A − εI` instead of `A`.
    pub ground_epsilon: f64,
}

impl Default for WcaiOptions {
    fn default() -> Self {
        WcaiOptions { floor: POSITIVITY_FLOOR, reduce: true, ground_epsilon: 0.0 }
    }
}

/// Decision-variable layout: the upper triangle of `P` row by row, then `β`,
/// then one `γ` per monitor.
struct Layout {
    r: usize,
    ns: usize,
}

impl Layout {
    fn p_count(&self) -> usize {
        self.r * (self.r + 1) / 2
    }

    fn beta(&self) -> usize {
        self.p_count()
    }

    fn gamma(&self, k: usize) -> usize {
        self.p_count() + 1 + k
    }

    fn p_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.r).flat_map(move |k| (k..self.r).map(move |l| (k, l)))
    }
}

fn assemble(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    cp: &DMatrix<f64>,
    cm: &DMatrix<f64>,
    params: &ScenarioParams,
    floor: f64,
) -> SdpProblem {
    let r = a.nrows();
    let na = b.ncols();
    let ns = cm.nrows();
    let lay = Layout { r, ns };
    let d0 = r + na;

    // basis of the main block: ê_k, rows of [A B], attack axes, monitor rows
    let (e0, g0, f0, m0) = (0, r, 2 * r, 2 * r + na);
    let mut basis = DMatrix::zeros(d0, 2 * r + na + ns);
    for k in 0..r {
        basis[(k, e0 + k)] = 1.0;
        for j in 0..r {
            basis[(j, g0 + k)] = a[(k, j)];
        }
        for c in 0..na {
            basis[(r + c, g0 + k)] = b[(k, c)];
        }
    }
    for c in 0..na {
        basis[(r + c, f0 + c)] = 1.0;
    }
    for k in 0..ns {
        for j in 0..r {
            basis[(j, m0 + k)] = cm[(k, j)];
        }
    }
    let mut c0 = DMatrix::zeros(d0, d0);
    c0.view_mut((0, 0), (r, r)).copy_from(&(cp.transpose() * cp));

    let mut blocks = vec![Block { dim: d0, basis, constant: c0, diagonal: false }];
    let p_block = (r > 0).then(|| {
        blocks.push(Block {
            dim: r,
            basis: DMatrix::identity(r, r),
            constant: DMatrix::zeros(r, r),
            diagonal: false,
        });
        blocks.len() - 1
    });
    let floor_block = blocks.len();
    blocks.push(Block {
        dim: 1 + ns,
        basis: DMatrix::identity(1 + ns, 1 + ns),
        constant: DMatrix::identity(1 + ns, 1 + ns) * floor,
        diagonal: true,
    });

    let term = |block, u, v, coef| Term { block, u, v, coef };
    let mut columns = Vec::with_capacity(lay.p_count() + 1 + ns);
    for (k, l) in lay.p_entries() {
        let mut col = Vec::with_capacity(3);
        if k == l {
            col.push(term(0, e0 + k, g0 + k, -1.0));
        } else {
            col.push(term(0, e0 + k, g0 + l, -1.0));
            col.push(term(0, e0 + l, g0 + k, -1.0));
        }
        if let Some(pb) = p_block {
            col.push(term(pb, k, l, if k == l { 0.5 } else { 1.0 }));
        }
        columns.push(col);
    }
    let mut beta: Vec<Term> = (0..na).map(|c| term(0, f0 + c, f0 + c, 0.5)).collect();
    beta.push(term(floor_block, 0, 0, 0.5));
    columns.push(beta);
    for k in 0..ns {
        columns.push(vec![
            term(0, m0 + k, m0 + k, 0.5),
            term(floor_block, 1 + k, 1 + k, 0.5),
        ]);
    }

    let mut objective = DVector::zeros(columns.len());
    objective[lay.beta()] = params.attack_energy;
    for k in 0..ns {
        objective[lay.gamma(k)] = params.delta;
    }
    SdpProblem { objective, blocks, columns }
}

/// The certificate program on the model's full state space.
pub fn assemble_wcai_sdp(model: &SystemModel, params: &ScenarioParams) -> Result<SdpProblem> {
    model.check_dimensions()?;
    params.validate()?;
    Ok(assemble(
        &model.a_mat,
        &model.b_cols,
        &model.perf_rows,
        &model.monitor_rows,
        params,
        POSITIVITY_FLOOR,
    ))
}

/// Orthonormal basis of the reachable subspace `span[B, AB, A²B, …]`, built
/// by an orthogonal staircase so that repeated powers of `A` never meet in
/// floating point.
pub fn reachable_basis(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let s = a.nrows();
    let tol = 1e-9 * a.norm().max(b.norm()).max(1.0);
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut frontier = b.clone();
    while q.len() < s && frontier.ncols() > 0 {
        for _ in 0..2 {
            for v in &q {
                let proj = frontier.tr_mul(v);
                frontier -= v * proj.transpose();
            }
        }
        let svd = frontier.clone().svd(true, false);
        let u = svd.u.expect("requested left singular vectors");
        let fresh: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &sv)| sv > tol)
            .map(|(i, _)| u.column(i).into_owned())
            .collect();
        if fresh.is_empty() {
            break;
        }
        let new_cols = DMatrix::from_columns(&fresh);
        q.extend(fresh);
        frontier = a * new_cols;
    }
    q.truncate(s);
    if q.is_empty() {
        DMatrix::zeros(s, 0)
    } else {
        DMatrix::from_columns(&q)
    }
}

pub fn solve_wcai(model: &SystemModel, params: &ScenarioParams) -> Result<WcaiResult> {
    solve_wcai_with(model, params, &InteriorPoint::default(), &WcaiOptions::default())
}

pub fn solve_wcai_with(
    model: &SystemModel,
    params: &ScenarioParams,
    solver: &dyn ConicSolver,
    options: &WcaiOptions,
) -> Result<WcaiResult> {
    model.check_dimensions()?;
    params.validate()?;
    let start = Instant::now();
    let s = model.state_dim;
    let mut a = model.a_mat.clone();
    if options.ground_epsilon != 0.0 {
        a -= DMatrix::identity(s, s) * options.ground_epsilon;
    }
    let u = if options.reduce {
        reachable_basis(&a, &model.b_cols)
    } else {
        DMatrix::identity(s, s)
    };
    let r = u.ncols();
    let problem = assemble(
        &(u.transpose() * &a * &u),
        &(u.transpose() * &model.b_cols),
        &(&model.perf_rows * &u),
        &(&model.monitor_rows * &u),
        params,
        options.floor,
    );
    let sol = solver.solve(&problem);

    let lay = Layout { r, ns: model.monitor_count() };
    let mut p_r = DMatrix::zeros(r, r);
    for (idx, (k, l)) in lay.p_entries().enumerate() {
        p_r[(k, l)] = sol.y[idx];
        p_r[(l, k)] = sol.y[idx];
    }
    let beta = sol.y[lay.beta()];
    let gammas: Vec<f64> = (0..lay.ns).map(|k| sol.y[lay.gamma(k)]).collect();
    let value = params.attack_energy * beta + params.delta * gammas.iter().sum::<f64>();
    if sol.status != SdpStatus::Optimal {
        log::warn!("wcai solve ended {} ({})", sol.status, sol.message);
    }
    Ok(WcaiResult {
        value,
        beta,
        gammas,
        p_mat: &u * p_r * u.transpose(),
        status: sol.status,
        solve_time: start.elapsed().as_secs_f64(),
        reduced_dim: r,
        iterations: sol.iterations,
        relative_gap: sol.relative_gap,
        message: sol.message,
    })
}

/// The dissipation matrix (the left-hand side of the LMI) at a candidate
/// certificate, in full coordinates.
pub fn dissipation_matrix(model: &SystemModel, p: &DMatrix<f64>, beta: f64, gammas: &[f64]) -> DMatrix<f64> {
    let s = model.state_dim;
    let na = model.attack_dim();
    let a = &model.a_mat;
    let mut top = a.transpose() * p + p * a + model.perf_rows.transpose() * &model.perf_rows;
    for (k, g) in gammas.iter().enumerate() {
        let row = model.monitor_rows.row(k);
        top -= row.transpose() * row * *g;
    }
    let pb = p * &model.b_cols;
    let mut f = DMatrix::zeros(s + na, s + na);
    f.view_mut((0, 0), (s, s)).copy_from(&top);
    f.view_mut((0, s), (s, na)).copy_from(&pb);
    f.view_mut((s, 0), (na, s)).copy_from(&pb.transpose());
    f.view_mut((s, s), (na, na)).fill_diagonal(-beta);
    f
}

/// Largest eigenvalue of the dissipation matrix restricted to reachable
/// states (and all attack directions), and the smallest eigenvalue of `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    pub lmi_max_eig: f64,
    pub p_min_eig: f64,
}

impl CertificateCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lmi_max_eig <= tol && self.p_min_eig >= -tol
    }
}

pub fn check_certificate(model: &SystemModel, result: &WcaiResult) -> CertificateCheck {
    let u = reachable_basis(&model.a_mat, &model.b_cols);
    let (s, r, na) = (model.state_dim, u.ncols(), model.attack_dim());
    let mut lift = DMatrix::zeros(s + na, r + na);
    lift.view_mut((0, 0), (s, r)).copy_from(&u);
    lift.view_mut((s, r), (na, na)).fill_diagonal(1.0);
    let f = dissipation_matrix(model, &result.p_mat, result.beta, &result.gammas);
    let fr = lift.transpose() * f * &lift;
    let pr = u.transpose() * &result.p_mat * &u;
    CertificateCheck {
        lmi_max_eig: (&fr + fr.transpose()).scale(0.5).symmetric_eigenvalues().max(),
        p_min_eig: if r == 0 { 0.0 } else { pr.symmetric_eigenvalues().min() },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    /// Factor applied to the trial waveform so both budgets hold.
    pub scale: f64,
    /// Time-averaged performance energy after scaling.
    pub achieved: f64,
    pub ratio: f64,
    pub violation: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: f64,
    pub trials: Vec<TrialOutcome>,
    pub violations: usize,
    pub best_ratio: f64,
}

/// Simulates every trial attack, rescales it to the largest multiple that
/// respects both the energy budget and every alarm threshold, and checks the
/// resulting performance energy against the certified bound.
pub fn validate_bound(
    model: &SystemModel,
    params: &ScenarioParams,
    result: &WcaiResult,
    trials: &[Waveform],
    horizon: f64,
    step: f64,
) -> BoundReport {
    let bound = result.value;
    let mut outcomes = Vec::with_capacity(trials.len());
    for w in trials {
        let outcome = match simulate(model, w, horizon, step) {
            Ok(tr) => {
                // energies are quadratic in the scale factor
                let mut c2 = f64::INFINITY;
                if tr.attack_energy > 0.0 {
                    c2 = c2.min(params.attack_energy / tr.attack_energy);
                }
                for e in &tr.monitor_energy {
                    if *e > 0.0 {
                        c2 = c2.min(params.delta / e);
                    }
                }
                let (scale, achieved) = if tr.perf_energy == 0.0 || !c2.is_finite() {
                    (if c2.is_finite() { c2.sqrt() } else { 0.0 }, 0.0)
                } else {
                    (c2.sqrt(), c2 * tr.perf_energy)
                };
                let ratio = if bound > 0.0 { achieved / bound } else { f64::INFINITY };
                TrialOutcome {
                    scale,
                    achieved,
                    ratio,
                    violation: achieved > bound * (1.0 + BOUND_SLACK),
                    error: None,
                }
            }
            Err(e) => TrialOutcome {
                scale: 0.0,
                achieved: 0.0,
                ratio: 0.0,
                violation: false,
                error: Some(e.to_string()),
            },
        };
        outcomes.push(outcome);
    }
    BoundReport {
        bound,
        violations: outcomes.iter().filter(|o| o.violation).count(),
        best_ratio: outcomes.iter().map(|o| o.ratio).fold(0.0, f64::max),
        trials: outcomes,
    }
}
