//! Infeasible primal-dual path-following method with the HKM search direction
//! and Mehrotra's predictor-corrector, specialised to low-rank constraint
//! terms so the Schur complement is formed from small Gram matrices.
//!
//! Problems without strict complementarity, which the dissipation LMIs of
//! this crate frequently are, converge only like √μ and stall in double
//! precision once the slack becomes too ill-conditioned, typically five or
//! six digits short. Such runs are continued from their best iterate in
//! double-double arithmetic, where μ can be driven much further down.

use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use twofloat::TwoFloat;

use super::{ConicSolver, SdpProblem, SdpSolution, SdpStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmSettings {
    pub max_iter: usize,
    /// Target relative duality gap.
    pub gap_tol: f64,
    /// Target relative primal and dual residuals.
    pub feas_tol: f64,
    /// Thresholds under which a run that misses the targets still counts as
    /// optimal: the slack must be feasible to `accept_feas`, while gap and
    /// moment residual may stop at `accept_gap`.
    pub accept_gap: f64,
    pub accept_feas: f64,
    pub step_fraction: f64,
    /// Iterations allowed in double-double arithmetic after a double
    /// precision run stalls; zero disables the continuation.
    pub extended_iter: usize,
}

impl Default for IpmSettings {
    fn default() -> Self {
        IpmSettings {
            max_iter: 150,
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            accept_gap: 1e-6,
            accept_feas: 1e-8,
            step_fraction: 0.98,
            extended_iter: 120,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct InteriorPoint {
    pub settings: IpmSettings,
}

impl InteriorPoint {
    pub fn new(settings: IpmSettings) -> Self {
        InteriorPoint { settings }
    }
}

impl ConicSolver for InteriorPoint {
    fn name(&self) -> &'static str {
        "interior-point"
    }

    fn solve(&self, problem: &SdpProblem) -> SdpSolution {
        if let Err(msg) = problem.validate() {
            return failure(problem, msg);
        }
        // Work with a unit-norm objective so that the iterates, and with them
        // the attained accuracy, do not depend on the scale of b.
        let scale = problem.objective.norm();
        if scale == 0.0 || !scale.is_finite() {
            return solve_scaled(problem, self.settings);
        }
        let mut unit = problem.clone();
        unit.objective /= scale;
        let mut sol = solve_scaled(&unit, self.settings);
        sol.objective *= scale;
        sol.dual_objective *= scale;
        for x in &mut sol.x {
            *x *= scale;
        }
        sol
    }
}

fn solve_scaled(problem: &SdpProblem, st: IpmSettings) -> SdpSolution {
    let fast = Solver::<f64>::new(problem, st);
    let out = fast.run(None, st.max_iter, 15);
    if out.converged || out.infeasible || st.extended_iter == 0 {
        return fast.finish(out);
    }
    let slow = Solver::<TwoFloat>::new(problem, st);
    let (x0, y0, z0) = &out.centred;
    let start = (
        x0.iter().map(|m| m.map(TwoFloat::of)).collect(),
        y0.map(TwoFloat::of),
        z0.iter().map(|m| m.map(TwoFloat::of)).collect(),
    );
    let first = out.iterations;
    // convergence here is linear at best, so allow longer stretches
    // without the merit halving
    let mut polished = slow.run(Some(start), st.extended_iter, 40);
    polished.iterations += first;
    polished.message = format!("{} in extended precision", polished.message);
    let a = fast.finish(out);
    let b = slow.finish(polished);
    if merit(&b) <= merit(&a) {
        b
    } else {
        SdpSolution { iterations: b.iterations, ..a }
    }
}

fn merit(s: &SdpSolution) -> f64 {
    let m = s.relative_gap.max(s.primal_infeasibility).max(s.dual_infeasibility);
    if m.is_nan() {
        f64::INFINITY
    } else {
        m
    }
}

fn failure(problem: &SdpProblem, message: String) -> SdpSolution {
    SdpSolution {
        status: SdpStatus::NumericalFailure,
        y: DVector::zeros(problem.num_vars()),
        x: problem.blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect(),
        objective: f64::NAN,
        dual_objective: f64::NAN,
        relative_gap: f64::INFINITY,
        primal_infeasibility: f64::INFINITY,
        dual_infeasibility: f64::INFINITY,
        iterations: 0,
        message,
    }
}

/// Scalar the solver runs in.
pub(crate) trait Real:
    nalgebra::Scalar + Copy + Float + AddAssign + SubAssign + MulAssign + DivAssign
{
    fn of(v: f64) -> Self;
    fn f(self) -> f64;
    /// Unit roundoff of the working precision.
    fn roundoff() -> Self;
    /// `self − Σ aᵢbᵢ`.
    fn dot_sub(self, a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).fold(self, |s, (&x, &y)| s - x * y)
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn f(self) -> f64 {
        self
    }
    fn roundoff() -> Self {
        f64::EPSILON
    }
}

impl Real for TwoFloat {
    fn of(v: f64) -> Self {
        TwoFloat::from(v)
    }
    fn f(self) -> f64 {
        self.hi() + self.lo()
    }
    fn roundoff() -> Self {
        TwoFloat::from(2f64.powi(-104))
    }
    // Compensated accumulation in plain f64 pairs: error-free products on
    // the leading parts, cross terms and rounding errors summed separately.
    // Several times cheaper than chaining full double-double operations.
    fn dot_sub(self, a: &[Self], b: &[Self]) -> Self {
        #[inline(always)]
        fn acc(hi: &mut f64, lo: &mut f64, x: &TwoFloat, y: &TwoFloat) {
            let (xh, xl, yh, yl) = (x.hi(), x.lo(), y.hi(), y.lo());
            let p = xh * yh;
            let pe = xh.mul_add(yh, -p);
            let t = *hi - p;
            let bb = t - *hi;
            *lo += ((*hi - (t - bb)) - (p + bb)) - (pe + xh * yl + xl * yh);
            *hi = t;
        }
        // four independent chains keep the pipeline busy
        let mut hi = [self.hi(), 0.0, 0.0, 0.0];
        let mut lo = [self.lo(), 0.0, 0.0, 0.0];
        let n = a.len().min(b.len());
        let split = n - n % 4;
        for c in (0..split).step_by(4) {
            for r in 0..4 {
                acc(&mut hi[r], &mut lo[r], &a[c + r], &b[c + r]);
            }
        }
        for c in split..n {
            acc(&mut hi[0], &mut lo[0], &a[c], &b[c]);
        }
        let mut total = TwoFloat::new_add(hi[0], lo[0]);
        for r in 1..4 {
            total += TwoFloat::new_add(hi[r], lo[r]);
        }
        total
    }
}

const REFINE_STEPS: usize = 3;

fn sym<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    (&m + m.transpose()) * T::of(0.5)
}

fn norm<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

fn frob<T: Real>(blocks: &[DMatrix<T>]) -> T {
    blocks
        .iter()
        .fold(T::zero(), |acc, m| acc + m.iter().fold(T::zero(), |a, &v| a + v * v))
        .sqrt()
}

fn vnorm<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn dot<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Lower Cholesky factor, computed on row-major storage so that the inner
/// products run over contiguous memory.
fn cholesky<T: Real>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let (done, rest) = l.split_at_mut(j * n);
        let row_j = &mut rest[..n];
        let d = a[(j, j)];
        for k in 0..j {
            let lk = &done[k * n..k * n + k + 1];
            row_j[k] = a[(j, k)].dot_sub(&row_j[..k], &lk[..k]) / lk[k];
        }
        let d = d.dot_sub(&row_j[..j], &row_j[..j]);
        if !(d > T::zero()) {
            return None;
        }
        row_j[j] = d.sqrt();
    }
    Some(DMatrix::from_row_slice(n, n, &l))
}

/// `L⁻¹ B`.
fn forward<T: Real>(l: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut x = b.clone();
    for c in 0..x.ncols() {
        for i in 0..l.nrows() {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// `L⁻ᵀ B`.
fn backward<T: Real>(l: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

fn spd_inverse<T: Real>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let l = cholesky(a)?;
    let li = forward(&l, &DMatrix::identity(a.nrows(), a.nrows()));
    Some(li.transpose() * li)
}

/// Largest `α` with `x + α dx ⪰ 0`; `None` if `x` itself is not positive
/// definite. The congruence is well scaled, so its spectrum is taken in f64.
fn max_step<T: Real>(x: &DMatrix<T>, dx: &DMatrix<T>) -> Option<f64> {
    let l = cholesky(x)?;
    let left = forward(&l, dx);
    let both = forward(&l, &left.transpose());
    let both = both.map(|v| v.f());
    let lambda = ((&both + both.transpose()) * 0.5).symmetric_eigenvalues().min();
    Some(if lambda < 0.0 { -1.0 / lambda } else { f64::INFINITY })
}

type Triple<T> = (Vec<DMatrix<T>>, DVector<T>, Vec<DMatrix<T>>);

struct Solver<'a, T: Real> {
    p: &'a SdpProblem,
    settings: IpmSettings,
    basis: Vec<DMatrix<T>>,
    constant: Vec<DMatrix<T>>,
    b: DVector<T>,
    /// For every block, the variables touching it with their `(u, v, coef)`.
    touching: Vec<Vec<(usize, Vec<(usize, usize, T)>)>>,
    n_total: T,
    b_norm: T,
    c_norm: T,
}

struct Residuals<T> {
    rd: Vec<DMatrix<T>>,
    rp: DVector<T>,
    pobj: T,
    dobj: T,
    mu: T,
    gap: f64,
    pinf: f64,
    dinf: f64,
}

struct Outcome<T: Real> {
    x: Vec<DMatrix<T>>,
    y: DVector<T>,
    z: Vec<DMatrix<T>>,
    /// Best iterate whose gap is still explained by complementarity, i.e.
    /// one not yet pushed off the central path by rounding.
    centred: Triple<T>,
    iterations: usize,
    message: String,
    converged: bool,
    infeasible: bool,
}

impl<'a, T: Real> Solver<'a, T> {
    fn new(p: &'a SdpProblem, settings: IpmSettings) -> Self {
        let mut touching: Vec<Vec<(usize, Vec<(usize, usize, T)>)>> = vec![Vec::new(); p.blocks.len()];
        for (i, col) in p.columns.iter().enumerate() {
            for (k, list) in touching.iter_mut().enumerate() {
                let terms: Vec<_> = col
                    .iter()
                    .filter(|t| t.block == k)
                    .map(|t| (t.u, t.v, T::of(t.coef)))
                    .collect();
                if !terms.is_empty() {
                    list.push((i, terms));
                }
            }
        }
        let constant: Vec<DMatrix<T>> = p.blocks.iter().map(|b| b.constant.map(T::of)).collect();
        let b = p.objective.map(T::of);
        Solver {
            p,
            settings,
            basis: p.blocks.iter().map(|b| b.basis.map(T::of)).collect(),
            c_norm: frob(&constant),
            b_norm: vnorm(&b),
            constant,
            b,
            touching,
            n_total: T::of(p.total_dim() as f64),
        }
    }

    fn initial_point(&self) -> Triple<T> {
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (k, blk) in self.p.blocks.iter().enumerate() {
            let n = blk.dim as f64;
            let mut xi = 10f64.max(n.sqrt());
            let mut eta = xi.max(blk.constant.norm());
            for (i, terms) in &self.touching[k] {
                let a = norm(&self.dense(k, terms)).f();
                xi = xi.max(n * (1.0 + self.p.objective[*i].abs()) / (1.0 + a));
                eta = eta.max(a);
            }
            xs.push(DMatrix::identity(blk.dim, blk.dim) * T::of(xi));
            zs.push(DMatrix::identity(blk.dim, blk.dim) * T::of(eta));
        }
        (xs, DVector::zeros(self.p.num_vars()), zs)
    }

    fn dense(&self, k: usize, terms: &[(usize, usize, T)]) -> DMatrix<T> {
        let v = &self.basis[k];
        let mut s = DMatrix::zeros(v.ncols(), v.ncols());
        for &(u, w, c) in terms {
            s[(u, w)] += c;
            s[(w, u)] += c;
        }
        v * s * v.transpose()
    }

    /// `Σ_i y_i A_i` block by block.
    fn operator(&self, y: &DVector<T>) -> Vec<DMatrix<T>> {
        (0..self.basis.len())
            .map(|k| {
                let v = &self.basis[k];
                let mut s = DMatrix::zeros(v.ncols(), v.ncols());
                for (i, terms) in &self.touching[k] {
                    let yi = y[*i];
                    for &(u, w, c) in terms {
                        s[(u, w)] += c * yi;
                        s[(w, u)] += c * yi;
                    }
                }
                v * s * v.transpose()
            })
            .collect()
    }

    fn slack(&self, y: &DVector<T>) -> Vec<DMatrix<T>> {
        self.operator(y).into_iter().zip(&self.constant).map(|(s, c)| s - c).collect()
    }

    fn grams(&self, ms: &[DMatrix<T>]) -> Vec<DMatrix<T>> {
        self.basis.iter().zip(ms).map(|(v, m)| v.transpose() * m * v).collect()
    }

    /// `𝒜(G)` for possibly non-symmetric block matrices.
    fn apply(&self, g: &[DMatrix<T>]) -> DVector<T> {
        let grams = self.grams(g);
        let mut out = DVector::zeros(self.p.num_vars());
        for (k, list) in self.touching.iter().enumerate() {
            let g = &grams[k];
            for (i, terms) in list {
                for &(u, v, c) in terms {
                    out[*i] += c * (g[(u, v)] + g[(v, u)]);
                }
            }
        }
        out
    }

    fn residuals(&self, x: &[DMatrix<T>], y: &DVector<T>, z: &[DMatrix<T>]) -> Residuals<T> {
        let rd: Vec<_> = self.slack(y).into_iter().zip(z).map(|(s, zk)| s - zk).collect();
        let rp = &self.b - self.apply(x);
        let pobj = self.b.dot(y);
        let dobj = self.constant.iter().zip(x).fold(T::zero(), |acc, (c, xk)| acc + dot(c, xk));
        let xz = x.iter().zip(z).fold(T::zero(), |acc, (a, b)| acc + dot(a, b));
        let one = T::one();
        Residuals {
            pinf: (frob(&rd) / (one + self.c_norm)).f(),
            dinf: (vnorm(&rp) / (one + self.b_norm)).f(),
            gap: ((pobj - dobj).abs() / (one + pobj.abs() + dobj.abs())).f(),
            mu: xz / self.n_total,
            rd,
            rp,
            pobj,
            dobj,
        }
    }

    /// `M_ij = ⟨A_i, X A_j Z⁻¹⟩`.
    fn schur(&self, gx: &[DMatrix<T>], gw: &[DMatrix<T>]) -> DMatrix<T> {
        let m = self.p.num_vars();
        let mut s = DMatrix::zeros(m, m);
        for (k, list) in self.touching.iter().enumerate() {
            let (gx, gw) = (&gx[k], &gw[k]);
            for (a, (i, ti)) in list.iter().enumerate() {
                for (j, tj) in &list[a..] {
                    let mut acc = T::zero();
                    for &(tu, tv, tc) in ti {
                        for &(ru, rv, rc) in tj {
                            acc += tc
                                * rc
                                * (gx[(tv, ru)] * gw[(rv, tu)]
                                    + gx[(tv, rv)] * gw[(ru, tu)]
                                    + gx[(tu, ru)] * gw[(rv, tv)]
                                    + gx[(tu, rv)] * gw[(ru, tv)]);
                        }
                    }
                    s[(*i, *j)] += acc;
                    if i != j {
                        s[(*j, *i)] += acc;
                    }
                }
            }
        }
        s
    }

    fn run(&self, start: Option<Triple<T>>, max_iter: usize, patience: usize) -> Outcome<T> {
        let st = self.settings;
        let (mut x, mut y, mut z) = start.unwrap_or_else(|| self.initial_point());
        let nb = self.basis.len();
        let mut iterations = 0;
        let mut message = String::from("iteration limit reached");
        let mut converged = false;
        let mut stalls = 0;
        // Near the optimum rounding can make later iterates worse; keep the
        // best one seen by the largest of the three relative residuals.
        let mut best = (x.clone(), y.clone(), z.clone());
        let mut best_merit = f64::INFINITY;
        let mut best_iter = 0;
        let mut centred = best.clone();
        let mut centred_merit = f64::INFINITY;

        loop {
            let res = self.residuals(&x, &y, &z);
            log::trace!(
                "ipm {iterations}: obj {:.12e} / {:.12e}, gap {:.1e}, res {:.1e} {:.1e}, mu {:.1e}",
                res.pobj.f(),
                res.dobj.f(),
                res.gap,
                res.pinf,
                res.dinf,
                res.mu.f()
            );
            if !(res.pobj.is_finite() && res.dobj.is_finite()) || !(res.mu > T::zero()) {
                message = "iterate lost definiteness".into();
                break;
            }
            let merit = res.gap.max(res.pinf).max(res.dinf);
            let slack_gap = (res.pobj - res.dobj).abs().f();
            if merit < centred_merit && slack_gap <= 10.0 * (res.mu * self.n_total).f() {
                centred_merit = merit;
                centred = (x.clone(), y.clone(), z.clone());
            }
            if merit < best_merit {
                if merit < 0.5 * best_merit {
                    best_iter = iterations;
                }
                best_merit = merit;
                best = (x.clone(), y.clone(), z.clone());
            } else if iterations - best_iter >= patience {
                message = "no further progress".into();
                break;
            }
            if res.gap <= st.gap_tol && res.pinf <= st.feas_tol && res.dinf <= st.feas_tol {
                message = "converged".into();
                converged = true;
                break;
            }
            let ax_norm = vnorm(&(&self.b - &res.rp)).f();
            let (dobj, b_norm) = (res.dobj.f(), self.b_norm.f());
            if dobj > 0.0 && ax_norm <= 1e-8 * dobj && dobj > 1e6 * (1.0 + b_norm) {
                return Outcome {
                    centred: (x.clone(), y.clone(), z.clone()),
                    x,
                    y,
                    z,
                    iterations,
                    message: "LMI infeasibility certificate found".into(),
                    converged: false,
                    infeasible: true,
                };
            }
            if iterations >= max_iter {
                break;
            }
            iterations += 1;

            let Some(w) = z.iter().map(spd_inverse).collect::<Option<Vec<_>>>() else {
                message = "slack lost definiteness".into();
                break;
            };
            let gx = self.grams(&x);
            let gw = self.grams(&w);
            let Some(solve) = factor(self.schur(&gx, &gw)) else {
                message = "Schur complement is singular".into();
                break;
            };

            let direction = |sigma_mu: T, corr: Option<&[DMatrix<T>]>| {
                let base: Vec<DMatrix<T>> = (0..nb)
                    .map(|k| {
                        let mut g = &w[k] * sigma_mu - &x[k];
                        if let Some(c) = corr {
                            g -= &c[k] * &w[k];
                        }
                        g
                    })
                    .collect();
                let with_rd: Vec<_> = (0..nb).map(|k| &base[k] - &x[k] * &res.rd[k] * &w[k]).collect();
                let rhs = self.apply(&with_rd) - &res.rp;
                let build = |dy: &DVector<T>| {
                    let dz: Vec<_> = self
                        .operator(dy)
                        .into_iter()
                        .zip(&res.rd)
                        .map(|(o, r)| o + r)
                        .collect();
                    let dx: Vec<_> = (0..nb)
                        .map(|k| sym(&base[k] - &x[k] * &dz[k] * &w[k]))
                        .collect();
                    (dx, dz)
                };
                let mut dy = solve(&rhs);
                let (mut dx, mut dz) = build(&dy);
                // refine against the residual of the assembled step, which
                // also absorbs rounding in the Schur complement itself
                for _ in 0..REFINE_STEPS {
                    let r = &res.rp - self.apply(&dx);
                    let rn = vnorm(&r);
                    if rn <= T::roundoff() * (T::one() + self.b_norm) {
                        break;
                    }
                    let trial = &dy - solve(&r);
                    let (tx, tz) = build(&trial);
                    if vnorm(&(&res.rp - self.apply(&tx))) >= rn {
                        break;
                    }
                    (dy, dx, dz) = (trial, tx, tz);
                }
                (dx, dy, dz)
            };
            let steps = |dx: &[DMatrix<T>], dz: &[DMatrix<T>], frac: f64| {
                let mut ap = f64::INFINITY;
                let mut ad = f64::INFINITY;
                for k in 0..nb {
                    ap = ap.min(max_step(&x[k], &dx[k]).unwrap_or(0.0));
                    ad = ad.min(max_step(&z[k], &dz[k]).unwrap_or(0.0));
                }
                ((frac * ap).min(1.0), (frac * ad).min(1.0))
            };

            let (dx_a, _, dz_a) = direction(T::zero(), None);
            let (ap, ad) = steps(&dx_a, &dz_a, 1.0);
            let (ap_t, ad_t) = (T::of(ap), T::of(ad));
            let mu_aff = (0..nb).fold(T::zero(), |acc, k| {
                acc + dot(&(&x[k] + &dx_a[k] * ap_t), &(&z[k] + &dz_a[k] * ad_t))
            }) / self.n_total;
            let sigma = (mu_aff / res.mu).f().clamp(0.0, 1.0).powi(3);
            let corr: Vec<_> = (0..nb).map(|k| &dx_a[k] * &dz_a[k]).collect();
            let (dx, dy, dz) = direction(T::of(sigma) * res.mu, Some(&corr));
            let (ap, ad) = steps(&dx, &dz, st.step_fraction);
            log::trace!("ipm steps: sigma {sigma:.2e}, primal {ap:.3}, dual {ad:.3}");

            if ap.max(ad) < 1e-10 {
                stalls += 1;
                if stalls >= 3 {
                    message = "step length stalled".into();
                    break;
                }
            } else {
                stalls = 0;
            }
            // the step bound comes from an f64 spectrum; back off until the
            // update factors in the working precision
            let advance = |base: &[DMatrix<T>], d: &[DMatrix<T>], mut a: f64| loop {
                let next: Vec<_> = (0..nb).map(|k| sym(&base[k] + &d[k] * T::of(a))).collect();
                if a < 1e-12 || next.iter().all(|m| cholesky(m).is_some()) {
                    return (next, a);
                }
                a *= 0.8;
            };
            let (next_x, _) = advance(&x, &dx, ap);
            let (next_z, ad) = advance(&z, &dz, ad);
            x = next_x;
            z = next_z;
            y += dy * T::of(ad);
        }
        let (x, y, z) = if converged { (x, y, z) } else { best };
        Outcome { x, y, z, centred, iterations, message, converged, infeasible: false }
    }

    fn finish(&self, out: Outcome<T>) -> SdpSolution {
        let res = self.residuals(&out.x, &out.y, &out.z);
        let st = self.settings;
        let status = if out.infeasible {
            SdpStatus::Infeasible
        } else if res.gap <= st.accept_gap && res.pinf <= st.accept_feas && res.dinf <= st.accept_gap {
            SdpStatus::Optimal
        } else {
            SdpStatus::NumericalFailure
        };
        let message = format!(
            "{} (gap {:.1e}, residuals {:.1e} / {:.1e})",
            out.message, res.gap, res.pinf, res.dinf
        );
        SdpSolution {
            status,
            objective: res.pobj.f(),
            dual_objective: res.dobj.f(),
            relative_gap: res.gap,
            primal_infeasibility: res.pinf,
            dual_infeasibility: res.dinf,
            y: out.y.map(|v| v.f()),
            x: out.x.iter().map(|m| m.map(|v| v.f())).collect(),
            iterations: out.iterations,
            message,
        }
    }
}

type SchurSolve<'s, T> = Box<dyn Fn(&DVector<T>) -> DVector<T> + 's>;

/// Cholesky of the Schur complement, with growing diagonal shifts when
/// rounding destroys definiteness.
fn factor<'s, T: Real + 's>(m: DMatrix<T>) -> Option<SchurSolve<'s, T>> {
    let scale = m.diagonal().iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let mut shift = T::zero();
    while shift <= T::of(1e-6) * scale {
        let mut reg = m.clone();
        for i in 0..reg.nrows() {
            reg[(i, i)] += shift;
        }
        if let Some(l) = cholesky(&reg) {
            return Some(Box::new(move |r: &DVector<T>| {
                let r = DMatrix::from_column_slice(r.len(), 1, r.as_slice());
                DVector::from_column_slice(backward(&l, &forward(&l, &r)).as_slice())
            }));
        }
        shift = if shift == T::zero() { T::roundoff() * T::of(1e3) * scale } else { shift * T::of(1e3) };
    }
    None
}
