//! GCD, greatest self-reciprocal divisor and the anti-self-reciprocal
//! solution family.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{conj_time_reverse, convolve, involution, Signal};
use crate::{Error, Result};

/// Relative threshold below which a Euclidean remainder counts as zero.
pub const DEFAULT_GCD_TOL: f64 = 1e-8;

const DIVISION_TOL: f64 = 1e-8;

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Drops high-order coefficients that are negligible against the vector norm.
fn trim_top(mut v: Vec<C64>, rel: f64) -> Vec<C64> {
    let n = norm(&v);
    while v.len() > 1 && v.last().unwrap().norm() <= rel * n {
        v.pop();
    }
    v
}

/// Remainder of `a` divided by `b` as polynomials in `w`; `b` must have a
/// nonzero top coefficient.
fn poly_rem(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let q = r[top] / lead;
        let shift = top - db;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= q * bk;
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(C64::new(0.0, 0.0));
    }
    r
}

fn monic(v: Vec<C64>) -> Signal {
    let lead = *v.last().unwrap();
    Signal::from(v.into_iter().map(|z| z / lead).collect::<Vec<_>>())
}

/// Greatest common divisor, monic in the highest power of `z^-1`.
///
/// Euclidean remainder sequence on unit-normalized operands; a remainder is
/// treated as zero once its norm drops to `tol` (relative to the unit-norm
/// dividend). Exact zeros on the high end are trimmed before each division so
/// the divisor's leading coefficient is never a rounding artifact.
pub fn poly_gcd(x1: &Signal, x2: &Signal, tol: f64) -> Result<Signal> {
    let a0 = x1.coeffs();
    let b0 = x2.coeffs();
    let (na, nb) = (norm(a0), norm(b0));
    match (na == 0.0, nb == 0.0) {
        (true, true) => return Err(Error::ZeroPolynomial),
        (true, false) => return Ok(monic(trim_top(b0.to_vec(), 0.0))),
        (false, true) => return Ok(monic(trim_top(a0.to_vec(), 0.0))),
        _ => {}
    }
    let mut a = trim_top(normalized(a0), tol);
    let mut b = trim_top(normalized(b0), tol);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            // nonzero constant divides everything
            return Ok(Signal::from_re(&[1.0]));
        }
        let r = poly_rem(&a, &b);
        if norm(&r) <= tol {
            return Ok(monic(b));
        }
        a = b;
        b = trim_top(normalized(&r), tol);
    }
}

/// Exact polynomial division `x / g`, failing when the remainder exceeds
/// `1e-8 |x|`.
pub fn deconvolve(x: &Signal, g: &Signal) -> Result<Signal> {
    let g = g.trimmed();
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let gc = g.coeffs();
    let dg = gc.len() - 1;
    if x.len() < gc.len() {
        return Err(Error::DegreeTooLarge {
            degree: dg,
            max: x.len() - 1,
        });
    }
    let mut rem = x.coeffs().to_vec();
    let lq = x.len() - dg;
    let mut q = vec![C64::new(0.0, 0.0); lq];
    for k in (0..lq).rev() {
        let qk = rem[k + dg] / gc[dg];
        q[k] = qk;
        for (j, gj) in gc.iter().enumerate() {
            rem[k + j] -= qk * gj;
        }
    }
    let q = Signal::from(q);
    let residual = x.rel_distance(&convolve(&g, &q));
    if residual > DIVISION_TOL {
        return Err(Error::InexactDivision { residual });
    }
    Ok(q)
}

/// `|x - conj(x^-)| <= tol |x|`.
pub fn is_self_reciprocal(x: &Signal, tol: f64) -> bool {
    x.sub(&conj_time_reverse(x)).norm() <= tol * x.norm()
}

/// Returns the phase `alpha` in `[0, 2 pi)` with `X* = e^{i alpha} X` when it
/// exists within `tol`, `None` otherwise.
pub fn is_self_inversive(x: &Signal, tol: f64) -> Option<f64> {
    let xs = involution(x);
    let ip: C64 = xs
        .coeffs()
        .iter()
        .zip(x.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum();
    if ip.norm() == 0.0 {
        return None;
    }
    let e = ip / ip.norm();
    if xs.sub(&x.scale(e)).norm() > tol * x.norm() {
        return None;
    }
    let mut alpha = ip.arg().rem_euclid(2.0 * PI);
    if 2.0 * PI - alpha < 1e-12 {
        alpha = 0.0;
    }
    Some(alpha)
}

/// Greatest self-reciprocal divisor `g` of `x` with cofactor `r`
/// (`x = g * r`).
///
/// `g` is the GCD of `X` and `X*`, rotated onto the self-reciprocal
/// representative and signed so that its middle (odd length) or first
/// coefficient has non-negative real part.
pub fn gsd(x: &Signal, tol: f64) -> Result<(Signal, Signal)> {
    if x.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g0 = poly_gcd(x, &involution(x), tol)?;
    // the monic GCD is self-inversive; looser check since it carries the
    // accumulated Euclid error
    let alpha = is_self_inversive(&g0, tol.sqrt().max(1e-6)).ok_or(Error::NotSelfReciprocal)?;
    let mut g = g0.scale(C64::from_polar(1.0, alpha / 2.0));
    // project out the residual anti-symmetric part
    g = g.add(&conj_time_reverse(&g)).scale(C64::new(0.5, 0.0));

    let n = g.len();
    let gn = g.norm();
    let pivot = if n % 2 == 1 && g[n / 2].norm() > 1e-12 * gn {
        g[n / 2]
    } else {
        g[0]
    };
    if pivot.re < 0.0 {
        g = g.scale(C64::new(-1.0, 0.0));
    }
    let r = deconvolve(x, &g)?;
    Ok((g, r))
}

/// A member `H = i R S` of the anti-self-reciprocal solution family of
/// `X H* + X* H = 0`, with `(G, R)` the GSD split of `x`.
///
/// `s` must be self-reciprocal with at most `deg G + 1` coefficients; shorter
/// inputs are centered by padding with equal numbers of zeros on each side,
/// which requires `deg G + 1 - len(s)` to be even. The returned `H` has the
/// length of `x`.
pub fn anti_solution(x: &Signal, s: &Signal, tol: f64) -> Result<Signal> {
    if !x.is_full_degree() {
        return Err(Error::NotFullDegree);
    }
    if s.is_zero() || !is_self_reciprocal(s, tol) {
        return Err(Error::NotSelfReciprocal);
    }
    let (g, r) = gsd(x, tol)?;
    let width = g.len();
    if s.len() > width {
        return Err(Error::DegreeTooLarge {
            degree: s.len() - 1,
            max: width - 1,
        });
    }
    let pad = width - s.len();
    if !pad.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!(
            "self-reciprocal factor of length {} cannot be centered in length {width}",
            s.len()
        )));
    }
    let mut centered = vec![C64::new(0.0, 0.0); pad / 2];
    centered.extend_from_slice(s.coeffs());
    centered.resize(width, C64::new(0.0, 0.0));
    let h = convolve(&r, &Signal::from(centered)).scale(C64::new(0.0, 1.0));
    debug_assert_eq!(h.len(), x.len());
    Ok(h)
}

/// Relative size of `X H* + X* H`, both involutions taken at `len(x)`.
pub fn anti_residual(x: &Signal, h: &Signal) -> f64 {
    let h = h.resized(x.len());
    let lhs = convolve(x, &involution(&h)).add(&convolve(&involution(x), &h));
    lhs.norm() / (x.norm() * h.norm()).max(f64::MIN_POSITIVE)
}

/// Random conjugate-symmetric coefficient vector of the given degree.
pub fn random_self_reciprocal<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Signal {
    let len = degree + 1;
    let mut c = vec![C64::new(0.0, 0.0); len];
    for k in 0..len / 2 {
        let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        c[k] = z;
        c[len - 1 - k] = z.conj();
    }
    if len % 2 == 1 {
        c[len / 2] = C64::new(rng.sample(StandardNormal), 0.0);
    }
    Signal::from(c)
}
