use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::Signal;
use crate::{Error, Result};

const MAX_ITERS: usize = 200;
const UPDATE_TOL: f64 = 1e-13;
/// Backward error accepted when the update criterion was not met within the
/// iteration cap (multiple roots converge only linearly).
const ACCEPT_RESIDUAL: f64 = 1e-9;

/// Root-domain form of a nonzero signal:
/// `X(z) = unit * z^{-origin_power} * prod_k (1 - zeta_k z^{-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    /// First nonzero coefficient `x_F`.
    pub unit: C64,
    /// Finite nonzero zeros `zeta_k` of `X(z)`.
    pub zeros: Vec<C64>,
    /// Number of leading zero coefficients `F`.
    pub origin_power: usize,
}

/// Finite zeros of `X(z)`.
///
/// The leading `F` zero coefficients are factored out as `origin_power`, the
/// remaining polynomial in `w = z^-1` is solved by Aberth-Ehrlich iteration,
/// and every root `w` is reported as `zeta = 1 / w`. `tol` scales the update
/// threshold (pass `1.0` for the default `1e-13`).
pub fn roots(x: &Signal, tol: f64) -> Result<RootSet> {
    let first = x.first_nonzero().ok_or(Error::ZeroPolynomial)?;
    let last = x.degree().unwrap();
    let coeffs = &x.coeffs()[first..=last];
    let w = aberth(coeffs, UPDATE_TOL * tol.max(f64::MIN_POSITIVE))?;
    Ok(RootSet {
        unit: coeffs[0],
        zeros: w.into_iter().map(|wk| wk.inv()).collect(),
        origin_power: first,
    })
}

/// Expands a [`RootSet`] back into coefficients.
pub fn from_roots(r: &RootSet) -> Result<Signal> {
    let zero = C64::new(0.0, 0.0);
    if r.zeros.contains(&zero) {
        return Err(Error::ZeroRoot);
    }
    if r.zeros
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
        || !r.unit.re.is_finite()
    {
        return Err(Error::NonFinite);
    }
    let mut c = vec![r.unit];
    for zeta in &r.zeros {
        let mut next = vec![zero; c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= ck * zeta;
        }
        c = next;
    }
    let mut out = vec![zero; r.origin_power];
    out.extend(c);
    Signal::new(out)
}

fn horner_with_derivative(c: &[C64], w: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for ck in c.iter().rev() {
        dp = dp * w + p;
        p = p * w + ck;
    }
    (p, dp)
}

fn backward_error(c: &[C64], w: C64) -> f64 {
    let p = c
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, ck| acc * w + ck);
    let aw = w.norm();
    let scale = c.iter().rev().fold(0.0, |acc, ck| acc * aw + ck.norm());
    p.norm() / scale
}

/// Roots of `sum_k c_k w^k` with `c_0 != 0` and `c_d != 0`.
fn aberth(c: &[C64], update_tol: f64) -> Result<Vec<C64>> {
    let d = c.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }

    // Fujiwara bound on the root moduli
    let lead = c[d].norm();
    let mut bound: f64 = 0.0;
    for k in 1..=d {
        let ratio = c[d - k].norm() / lead;
        let term = if k == d {
            (ratio / 2.0).powf(1.0 / k as f64)
        } else {
            ratio.powf(1.0 / k as f64)
        };
        bound = bound.max(term);
    }
    let radius = bound.max(f64::MIN_POSITIVE);
    let mut z: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITERS {
        let mut max_update: f64 = 0.0;
        for k in 0..d {
            let (p, dp) = horner_with_derivative(c, z[k]);
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_update = max_update.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_update <= update_tol {
            return Ok(z);
        }
        if z.iter()
            .all(|&wk| backward_error(c, wk) <= 4.0 * f64::EPSILON)
        {
            return Ok(z);
        }
    }
    let worst = z
        .iter()
        .map(|&wk| backward_error(c, wk))
        .fold(0.0, f64::max);
    if worst <= ACCEPT_RESIDUAL {
        Ok(z)
    } else {
        Err(Error::RootNoConvergence { residual: worst })
    }
}

/// A group of numerically coincident zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
}

/// Merges zeros closer than `tol * max|zeta|` (single linkage) into clusters,
/// ordered by `(re, im)` of their centers.
pub fn cluster(zeros: &[C64], tol: f64) -> Vec<RootCluster> {
    let n = zeros.len();
    let scale = zeros.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = tol * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (zeros[i] - zeros[j]).norm() <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for (i, &z) in zeros.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((r, z, 1)),
        }
    }
    let mut out: Vec<RootCluster> = groups
        .into_iter()
        .map(|(_, sum, m)| RootCluster {
            center: sum / m as f64,
            multiplicity: m,
        })
        .collect();
    out.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    out
}
