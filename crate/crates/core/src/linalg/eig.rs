use std::cmp::Ordering;

use num_complex::Complex64 as C64;

use super::{vdot, vec_norm, ComplexMatrix, EigDecomposition, HermitianMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAG_TOL: f64 = 1e-14;

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is scaled so that its
/// first largest-magnitude entry is real and positive; exact eigenvalue ties
/// are ordered lexicographically on the eigenvector entries.
pub fn herm_eig(a: &HermitianMatrix) -> Result<EigDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();

    if n > 1 && norm > 0.0 {
        let target = OFF_DIAG_TOL * norm;
        let skip = 1e-17 * norm;
        let mut converged = off_diagonal_norm(&m) <= target;
        let mut sweep = 0;
        while !converged && sweep < MAX_SWEEPS {
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    let mag = apq.norm();
                    if mag <= skip {
                        continue;
                    }
                    rotate(&mut m, &mut v, p, q, apq, mag);
                }
            }
            sweep += 1;
            converged = off_diagonal_norm(&m) <= target;
        }
        if !converged {
            return Err(Error::EigNoConvergence {
                residual: off_diagonal_norm(&m) / norm,
            });
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            normalize_phase(&mut col);
            (m[(k, k)].re, col)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| match la.partial_cmp(lb) {
        Some(Ordering::Equal) | None => lex_cmp(va, vb),
        Some(o) => o,
    });

    let values = pairs.iter().map(|(l, _)| *l).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok(EigDecomposition { values, vectors })
}

/// Applies the unitary `U = [[c, s e], [-s conj(e), c]]` on the `(p, q)` plane
/// so that `(U* A U)[p, q] = 0`, and accumulates `V <- V U`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, mag: f64) {
    let n = m.rows();
    let e = apq / mag;
    let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let se = e * s;
    let se_conj = se.conj();

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * se_conj;
        m[(k, q)] = akp * se + akq * c;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - aqk * se;
        m[(q, k)] = apk * se_conj + aqk * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * se_conj;
        v[(k, q)] = vkp * se + vkq * c;
    }
}

fn normalize_phase(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap();
    let phase = pivot.conj() / pivot.norm();
    for z in col.iter_mut() {
        *z *= phase;
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
        match x.im.partial_cmp(&y.im) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Frobenius-nearest PSD matrix: `V max(L, 0) V*`.
pub fn psd_project(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = herm_eig(a)?;
    if eig.values.first().is_none_or(|&l| l >= 0.0) {
        return Ok(a.clone());
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

fn pseudo_random_start(n: usize, salt: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = (k + 1) as f64;
            let u = (salt + 1) as f64;
            C64::new((0.7 * t + 0.3 * u).cos() + 1.0, (1.3 * t + 0.1 * u).sin())
        })
        .collect()
}

/// Dominant-in-magnitude eigenpair by power iteration.
///
/// Stops once `|A v - l v| <= tol * |A|_F`.
pub fn top_eigpair(a: &HermitianMatrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<C64>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::OutOfRange("empty matrix".into()));
    }
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = C64::new(1.0, 0.0);
        return Ok((0.0, e));
    }

    let mut v = pseudo_random_start(n, 0);
    let vn = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= vn);
    let mut restarts = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let w = a.matvec(&v)?;
        let lambda = vdot(&w, &v).re;
        residual = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - vi * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= tol * norm {
            normalize_phase(&mut v);
            return Ok((lambda, v));
        }
        let wn = vec_norm(&w);
        if wn <= f64::MIN_POSITIVE {
            // start landed in the kernel
            restarts += 1;
            v = pseudo_random_start(n, restarts);
            let vn = vec_norm(&v);
            v.iter_mut().for_each(|z| *z /= vn);
            continue;
        }
        v = w.into_iter().map(|z| z / wn).collect();
    }
    Err(Error::PowerNoConvergence {
        residual: residual / norm,
    })
}

/// Number of singular values above `tol` times the largest one, i.e. the
/// eigenvalues of `a* a` above `tol^2` times its largest.
///
/// The singular values are read off the Hermitian dilation
/// `[[0, A], [A*, 0]]`, whose spectrum is `+-sigma_i` padded with zeros, so the
/// threshold is applied without squaring the data.
pub fn numeric_rank(a: &ComplexMatrix, tol: f64) -> usize {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 || a.max_abs() == 0.0 {
        return 0;
    }
    let dim = m + n;
    let mut d = ComplexMatrix::zeros(dim, dim);
    for i in 0..m {
        for j in 0..n {
            d[(i, m + j)] = a[(i, j)];
            d[(m + j, i)] = a[(i, j)].conj();
        }
    }
    let eig = match herm_eig(&HermitianMatrix(d)) {
        Ok(e) => e,
        Err(_) => return m.min(n),
    };
    let sigma_max = eig.values.last().copied().unwrap_or(0.0);
    if sigma_max <= 0.0 {
        return 0;
    }
    eig.values.iter().filter(|&&s| s > tol * sigma_max).count()
}

/// Largest eigenvalue of a self-adjoint PSD linear map on `dim x dim`
/// Hermitian matrices, by power iteration from a fixed pseudo-random start.
pub fn operator_norm<F>(apply: F, dim: usize, iters: usize) -> f64
where
    F: Fn(&HermitianMatrix) -> HermitianMatrix,
{
    if dim == 0 {
        return 0.0;
    }
    let seed = pseudo_random_start(dim * dim, 3);
    let start = ComplexMatrix::from_fn(dim, dim, |i, j| seed[i * dim + j]);
    let mut x = HermitianMatrix::symmetrize(&start);
    let n0 = x.frobenius_norm();
    x = x.scale(1.0 / n0);
    let mut estimate: f64 = 0.0;
    for _ in 0..iters.max(1) {
        let y = apply(&x);
        let ny = y.frobenius_norm();
        estimate = estimate.max(ny);
        if ny == 0.0 {
            break;
        }
        x = y.scale(1.0 / ny);
    }
    estimate
}
