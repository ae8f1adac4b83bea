//! PSD-constrained least squares on lifted measurements.
//!
//! `solve` minimizes `f(X) = |A(X) - b|^2` over the PSD cone with an
//! accelerated projected-gradient scheme. Momentum is dropped whenever the
//! objective would increase, and that iteration falls back to a plain
//! projected-gradient step from the last iterate, so the objective sequence is
//! non-increasing.

use num_complex::Complex64 as C64;

use crate::linalg::{
    herm_eig, operator_norm, psd_project, vdot, vec_norm, HermitianMatrix, RANK_TOL,
};
use crate::poly::Signal;
use crate::sensing::{Measurements, SensingSet};
use crate::sylvester::{gcd_degree, tangent_injectivity};
use crate::{Error, Result};

/// Eigenvalue gap below which the top eigenvector is not unique.
pub const DEGENERATE_GAP: f64 = 1e-12;
/// `rank1_gap` above which a noiseless solution is not considered rank one.
pub const RANK1_GAP_TOL: f64 = 1e-6;
const POWER_ITERS: usize = 100;
const DIVERGENCE_RUN: usize = 10;
const REFINE_ITERS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Target for `|A(X) - b| / |b|`.
    pub rel_tol: f64,
    /// Fraction of `1 / L` used as step size.
    pub step_safety: f64,
    /// Forced momentum reset period.
    pub restart_every: Option<usize>,
    /// Polish the extracted rank-one factor in [`recover`] with damped
    /// Gauss-Newton steps on the same objective.
    pub refine: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 20000,
            rel_tol: 1e-10,
            step_safety: 0.95,
            restart_every: None,
            refine: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::OutOfRange("max_iters must be positive".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::OutOfRange(format!(
                "rel_tol {} not in (0, 1)",
                self.rel_tol
            )));
        }
        if !(self.step_safety > 0.0 && self.step_safety <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "step_safety {} not in (0, 1]",
                self.step_safety
            )));
        }
        if self.restart_every == Some(0) {
            return Err(Error::OutOfRange("restart_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub x_mat: HermitianMatrix,
    pub iters: usize,
    /// `|A(X) - b| / |b|` (absolute when `b = 0`).
    pub residual: f64,
    /// `lambda_2 / lambda_1` of `x_mat`, zero when `lambda_1 <= 0`.
    pub rank1_gap: f64,
    pub objective: f64,
    /// Objective after each accepted iterate, starting with `f(0)`.
    pub history: Vec<f64>,
}

/// `f(X) = |A(X) - b|^2` and its residual vector.
fn objective(s: &SensingSet, b: &[C64], x: &HermitianMatrix) -> Result<(f64, Vec<C64>)> {
    let r: Vec<C64> = s.apply(x)?.iter().zip(b).map(|(a, bm)| a - bm).collect();
    Ok((r.iter().map(|z| z.norm_sqr()).sum(), r))
}

/// Gradient of `f` from a residual: `sum_m conj(r_m) A_m + r_m A_m*`.
fn gradient_from_residual(s: &SensingSet, r: &[C64]) -> Result<HermitianMatrix> {
    let conj: Vec<C64> = r.iter().map(|z| z.conj()).collect();
    s.adjoint(&conj)
}

/// Gradient of `f(X) = |A(X) - b|^2` with respect to the real inner product
/// `Re tr(X Y)` on Hermitian matrices.
pub fn gradient(s: &SensingSet, b: &Measurements, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    let bv = b.stacked(s.is_reduced());
    let (_, r) = objective(s, &bv, x)?;
    gradient_from_residual(s, &r)
}

/// Value of `f(X) = |A(X) - b|^2`.
pub fn objective_value(s: &SensingSet, b: &Measurements, x: &HermitianMatrix) -> Result<f64> {
    Ok(objective(s, &b.stacked(s.is_reduced()), x)?.0)
}

/// Lipschitz constant of the gradient: the top eigenvalue of `X -> grad f(X) - grad f(0)`.
pub fn lipschitz(s: &SensingSet) -> f64 {
    operator_norm(
        |x| {
            let ax = s.apply(x).expect("dimension fixed by sensing set");
            gradient_from_residual(s, &ax).expect("length fixed by sensing set")
        },
        s.n(),
        POWER_ITERS,
    )
}

fn check_dims(s: &SensingSet, b: &Measurements) -> Result<()> {
    if b.l1() != s.l1() || b.l2() != s.l2() || b.a12.len() != s.n() - 1 || b.a21.len() != s.n() - 1
    {
        return Err(Error::DimensionMismatch {
            expected: 4 * s.n() - 4,
            got: b.len(),
        });
    }
    Ok(())
}

/// Accelerated projected gradient from `X_0 = 0`.
///
/// Stops when the relative residual reaches `rel_tol`, when a projected
/// gradient step no longer moves the iterate (relative change below
/// `rel_tol`), or after `max_iters`.
pub fn solve(s: &SensingSet, b: &Measurements, opts: &SolverOptions) -> Result<SolverResult> {
    opts.validate()?;
    check_dims(s, b)?;
    let n = s.n();
    let bv = b.stacked(s.is_reduced());
    let b_norm = vec_norm(&bv);
    let rel = |f: f64| {
        if b_norm > 0.0 {
            f.sqrt() / b_norm
        } else {
            f.sqrt()
        }
    };

    let mut x = HermitianMatrix::zeros(n);
    let (mut fx, _) = objective(s, &bv, &x)?;
    let mut history = vec![fx];
    if rel(fx) <= opts.rel_tol {
        return finish(x, 0, rel(fx), history);
    }
    // a projected-gradient step cannot increase f beyond evaluation error
    let round_off = 64.0 * f64::EPSILON * (fx + b_norm * b_norm);
    let lip = lipschitz(s);
    let step = opts.step_safety / lip;

    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut since_restart = 0;
    let mut increases = 0;
    let mut trace = Vec::new();
    for iter in 1..=opts.max_iters {
        let (_, ry) = objective(s, &bv, &y)?;
        let mut next = psd_project(&y.axpy(-step, &gradient_from_residual(s, &ry)?))?;
        let (mut f_next, _) = objective(s, &bv, &next)?;
        if f_next > fx {
            // restart: drop momentum and take a projected-gradient step from x
            t = 1.0;
            since_restart = 0;
            let (_, rx) = objective(s, &bv, &x)?;
            next = psd_project(&x.axpy(-step, &gradient_from_residual(s, &rx)?))?;
            f_next = objective(s, &bv, &next)?.0;
            if f_next > fx + round_off {
                increases += 1;
                trace.push(f_next);
                if increases >= DIVERGENCE_RUN {
                    return Err(Error::Divergence { iters: iter, trace });
                }
                y = x.clone();
                continue;
            }
        }
        increases = 0;
        trace.clear();

        let moved = next.sub(&x).frobenius_norm();
        let scale = next.frobenius_norm().max(f64::MIN_POSITIVE);
        since_restart += 1;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mut beta = (t - 1.0) / t_next;
        t = t_next;
        if opts.restart_every.is_some_and(|p| since_restart >= p) {
            beta = 0.0;
            t = 1.0;
            since_restart = 0;
        }
        y = next.axpy(beta, &next.sub(&x));
        x = next;
        fx = f_next;
        history.push(fx);
        if rel(fx) <= opts.rel_tol || moved <= opts.rel_tol * scale {
            return finish(x, iter, rel(fx), history);
        }
    }
    finish(x, opts.max_iters, rel(fx), history)
}

fn finish(
    x: HermitianMatrix,
    iters: usize,
    residual: f64,
    history: Vec<f64>,
) -> Result<SolverResult> {
    let eig = herm_eig(&x)?;
    let n = eig.values.len();
    let l1 = eig.values[n - 1];
    let rank1_gap = if n > 1 && l1 > 0.0 {
        eig.values[n - 2].max(0.0) / l1
    } else {
        0.0
    };
    Ok(SolverResult {
        x_mat: x,
        iters,
        residual,
        rank1_gap,
        objective: *history.last().unwrap(),
        history,
    })
}

/// Leading rank-one factor of a solver output.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank1 {
    pub signal: Signal,
    pub lambda1: f64,
    /// `lambda_1 <= 0`: the estimate is the zero signal.
    pub nonpositive: bool,
    /// `lambda_1 - lambda_2 < DEGENERATE_GAP`: the eigenvector is not unique.
    pub degenerate: bool,
}

/// `sqrt(lambda_1) v_1` from the top eigenpair of `r.x_mat`.
pub fn extract_rank1(r: &SolverResult) -> Result<Rank1> {
    let eig = herm_eig(&r.x_mat)?;
    let n = eig.values.len();
    let l1 = eig.values[n - 1];
    if l1 <= 0.0 {
        return Ok(Rank1 {
            signal: Signal::zeros(n),
            lambda1: l1,
            nonpositive: true,
            degenerate: false,
        });
    }
    // first column among those tied with the top eigenvalue
    let top = (0..n)
        .find(|&k| l1 - eig.values[k] < DEGENERATE_GAP)
        .unwrap_or(n - 1);
    let degenerate = top != n - 1;
    let sq = l1.sqrt();
    let v: Vec<C64> = (0..n).map(|i| eig.vectors[(i, top)] * sq).collect();
    Ok(Rank1 {
        signal: Signal::new(v)?,
        lambda1: l1,
        nonpositive: false,
        degenerate,
    })
}

/// `min_phi |x - e^{i phi} x_est|^2 / |x|^2` and the minimizing `phi`.
pub fn aligned_mse(x_true: &Signal, x_est: &Signal) -> Result<(f64, f64)> {
    if x_true.len() != x_est.len() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            got: x_est.len(),
        });
    }
    let nx = x_true.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>();
    if nx == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let ne = x_est.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>();
    let ip = vdot(x_true.coeffs(), x_est.coeffs());
    let mse = ((nx + ne - 2.0 * ip.norm()) / nx).max(0.0);
    Ok((mse, ip.arg()))
}

/// Levenberg-Marquardt descent on `g(x) = |A(x x*) - b|^2` from `x0`.
///
/// Returns the refined signal and `g` there. Steps are accepted only when
/// they lower `g`, so the result is never worse than `x0`.
pub fn refine_rank1(s: &SensingSet, b: &Measurements, x0: &Signal) -> Result<(Signal, f64)> {
    check_dims(s, b)?;
    let n = s.n();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let bv = b.stacked(s.is_reduced());
    let value =
        |x: &[C64]| -> Result<(f64, Vec<C64>)> { objective(s, &bv, &HermitianMatrix::outer(x)) };
    let mut x = x0.coeffs().to_vec();
    let (mut gx, mut r) = value(&x)?;
    let mut mu = -1.0;
    for _ in 0..REFINE_ITERS {
        // real Jacobian: columns for the real and imaginary part of each entry
        let mut jac: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
        for k in 0..2 * n {
            let mut u = vec![C64::new(0.0, 0.0); n];
            u[k % n] = if k < n {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 1.0)
            };
            let ux = crate::linalg::ComplexMatrix::from_fn(n, n, |i, j| u[i] * x[j].conj());
            let d = HermitianMatrix::symmetrize(&ux).scale(2.0);
            jac.push(s.apply(&d)?.iter().flat_map(|z| [z.re, z.im]).collect());
        }
        let rr: Vec<f64> = r.iter().flat_map(|z| [z.re, z.im]).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let grad: Vec<f64> = jac.iter().map(|c| dot(c, &rr)).collect();
        let gram = crate::linalg::ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
            C64::new(dot(&jac[i], &jac[j]), 0.0)
        });
        let eig = herm_eig(&HermitianMatrix::symmetrize(&gram))?;
        if mu < 0.0 {
            mu = 1e-8 * eig.values[2 * n - 1];
        }
        let mut improved = false;
        for _ in 0..30 {
            // (J^T J + mu I) delta = -J^T r through the eigendecomposition
            let mut delta = vec![0.0; 2 * n];
            for (k, &lam) in eig.values.iter().enumerate() {
                let coef: C64 = (0..2 * n)
                    .map(|i| eig.vectors[(i, k)].conj() * grad[i])
                    .sum::<C64>()
                    / (lam.max(0.0) + mu);
                for (i, d) in delta.iter_mut().enumerate() {
                    *d -= (eig.vectors[(i, k)] * coef).re;
                }
            }
            let cand: Vec<C64> = (0..n)
                .map(|i| x[i] + C64::new(delta[i], delta[n + i]))
                .collect();
            let (gc, rc) = value(&cand)?;
            if gc < gx {
                let step = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
                x = cand;
                gx = gc;
                r = rc;
                mu = (mu / 3.0).max(f64::MIN_POSITIVE);
                improved = step > f64::EPSILON * vec_norm(&x);
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Ok((Signal::new(x)?, gx))
}

/// Diagnostics of a [`recover`] call.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub iters: usize,
    /// `|A(x x*) - b| / |b|` at the returned estimate.
    pub residual: f64,
    pub rank1_gap: f64,
    pub lambda1: f64,
    pub nonpositive: bool,
    pub degenerate: bool,
    /// Tangent rank of the estimate; `None` if it is not of full degree.
    pub tangent_rank: Option<usize>,
    /// `N - rank` of the Sylvester matrix of the estimate (one when coprime).
    pub gcd_degree: Option<usize>,
    /// The estimate fails a uniqueness check: degenerate top eigenvalue,
    /// `rank1_gap > RANK1_GAP_TOL`, a common factor, or a non-injective
    /// tangent map.
    pub non_unique: bool,
}

/// Solves, extracts the rank-one factor, optionally refines it (see
/// [`SolverOptions::refine`]), and splits it at `L1`.
pub fn recover(
    l1: usize,
    l2: usize,
    s: &SensingSet,
    b: &Measurements,
    opts: &SolverOptions,
) -> Result<(Signal, Signal, Diagnostics)> {
    if s.l1() != l1 || s.l2() != l2 {
        return Err(Error::DimensionMismatch {
            expected: l1 + l2,
            got: s.n(),
        });
    }
    let res = solve(s, b, opts)?;
    let r1 = extract_rank1(&res)?;
    let (est, residual) = if opts.refine && !r1.nonpositive {
        let (x, g) = refine_rank1(s, b, &r1.signal)?;
        let b_norm = vec_norm(&b.stacked(s.is_reduced()));
        (
            x,
            if b_norm > 0.0 {
                g.sqrt() / b_norm
            } else {
                g.sqrt()
            },
        )
    } else {
        (r1.signal.clone(), res.residual)
    };
    let c = est.coeffs();
    let x1 = Signal::new(c[..l1].to_vec())?;
    let x2 = Signal::new(c[l1..].to_vec())?;
    let (tangent_rank, gcd) = if !r1.nonpositive && x1.is_full_degree() && x2.is_full_degree() {
        (
            Some(tangent_injectivity(&x1, &x2, RANK_TOL)?.0),
            Some(gcd_degree(&x1, &x2, RANK_TOL)?),
        )
    } else {
        (None, None)
    };
    let injective = tangent_rank == Some(2 * (l1 + l2) - 1);
    let non_unique = r1.degenerate
        || r1.nonpositive
        || res.rank1_gap > RANK1_GAP_TOL
        || gcd != Some(1)
        || !injective;
    let diag = Diagnostics {
        iters: res.iters,
        residual,
        rank1_gap: res.rank1_gap,
        lambda1: r1.lambda1,
        nonpositive: r1.nonpositive,
        degenerate: r1.degenerate,
        tangent_rank,
        gcd_degree: gcd,
        non_unique,
    };
    Ok((x1, x2, diag))
}
