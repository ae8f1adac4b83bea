//! Sylvester matrices and the dual certificate for unique recovery.
//!
//! For a pair `(x1, x2)` the padded Sylvester matrix `S` maps `(y1, y2)` to
//! `x2 * y1 - x1 * y2` (plus a zero last row), so its kernel holds the
//! convolution-equivalent pairs. `W = S* S` is PSD, annihilates the stacked
//! `x`, has rank `N - 1` exactly when `x1` and `x2` are coprime, and lies in the
//! range of the measurement adjoint; those are the certificate conditions.

use num_complex::Complex64 as C64;

use crate::linalg::{herm_eig, numeric_rank, vec_norm, ComplexMatrix, HermitianMatrix, RANK_TOL};
use crate::poly::Signal;
use crate::sensing::{build_sensing, measure};
use crate::{Error, Result};

/// Null-vector residual bound `|W x| / (|W|_F |x|)`.
pub const NULL_TOL: f64 = 1e-10;
/// Lower bound on `min_eig(W) / |W|_F`.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise bound on `|adjoint(lambda) - S* S| / max|S* S|`.
pub const LAMBDA_TOL: f64 = 1e-10;

/// `(L1 + L2) x (L1 + L2)` Sylvester matrix of coefficient vectors `a`
/// (length `L1 + 1`) and `b` (length `L2 + 1`): the first `L1` columns are
/// down-shifts of `b`, the last `L2` columns down-shifts of `a`.
pub fn build(a: &Signal, b: &Signal) -> ComplexMatrix {
    let l1 = a.len() - 1;
    let l2 = b.len() - 1;
    let n = l1 + l2;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if c < l1 {
            r.checked_sub(c).and_then(|k| b.coeffs().get(k)).copied()
        } else {
            r.checked_sub(c - l1)
                .and_then(|k| a.coeffs().get(k))
                .copied()
        }
        .unwrap_or(C64::new(0.0, 0.0))
    })
}

fn check_pair(x1: &Signal, x2: &Signal) -> Result<()> {
    if !x1.is_full_degree() || !x2.is_full_degree() {
        return Err(Error::NotFullDegree);
    }
    Ok(())
}

/// `S_{-x1^0, x2^0}`: the Sylvester matrix of `-x1` and `x2`, each padded with
/// one trailing zero.
pub fn build_padded(x1: &Signal, x2: &Signal) -> Result<ComplexMatrix> {
    check_pair(x1, x2)?;
    let a = x1.resized(x1.len() + 1).scale(C64::new(-1.0, 0.0));
    let b = x2.resized(x2.len() + 1);
    Ok(build(&a, &b))
}

/// `N - rank(S)`; equals one plus the degree of `gcd(X1, X2)` because the
/// padding contributes the shared factor `z^-1`.
pub fn gcd_degree(x1: &Signal, x2: &Signal, tol: f64) -> Result<usize> {
    let s = build_padded(x1, x2)?;
    Ok(s.rows() - numeric_rank(&s, tol))
}

/// `W = S* S`.
pub fn dual_certificate(x1: &Signal, x2: &Signal) -> Result<HermitianMatrix> {
    let s = build_padded(x1, x2)?;
    Ok(HermitianMatrix::symmetrize(&s.adjoint().matmul(&s)?))
}

/// Coefficients `lambda` (stacked like the measurements) with
/// `adjoint(lambda) = S* S`.
///
/// The diagonal blocks of `S* S` are banded Toeplitz in the autocorrelation of
/// the *other* signal, read backwards and cut or zero-padded to the block
/// size; the off-diagonal blocks carry the reversed cross-correlations. Fails
/// if the reconstruction deviates by more than [`LAMBDA_TOL`].
pub fn lambda_decomposition(x1: &Signal, x2: &Signal) -> Result<Vec<C64>> {
    let (lam, deviation) = lambda_with_deviation(x1, x2)?;
    if deviation > LAMBDA_TOL {
        return Err(Error::CertificateMismatch { deviation });
    }
    Ok(lam)
}

fn lambda_with_deviation(x1: &Signal, x2: &Signal) -> Result<(Vec<C64>, f64)> {
    check_pair(x1, x2)?;
    let (l1, l2) = (x1.len(), x2.len());
    let n = l1 + l2;
    let m = measure(x1, x2);
    let half = 0.5;
    let at = |v: &[C64], idx: isize| -> C64 {
        if idx >= 0 && (idx as usize) < v.len() {
            v[idx as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let top = (n - 2) as isize;
    let mut lam = Vec::with_capacity(4 * n - 4);
    lam.extend((0..2 * l1 - 1).map(|k| at(&m.a22, top - k as isize) * half));
    lam.extend((0..2 * l2 - 1).map(|k| at(&m.a11, top - k as isize) * half));
    lam.extend(m.a21.iter().rev().map(|z| -z * half));
    lam.extend(m.a12.iter().rev().map(|z| -z * half));

    let w = dual_certificate(x1, x2)?;
    let s = build_sensing(l1, l2)?;
    let recon = s.adjoint(&lam)?;
    let scale = w.as_matrix().max_abs().max(f64::MIN_POSITIVE);
    let deviation = recon.as_matrix().sub(w.as_matrix()).max_abs() / scale;
    Ok((lam, deviation))
}

/// Real rank of `h -> A(x h* + h x*)` on `C^N` (real dimension `2N`), and
/// whether it reaches `2N - 1`. The direction `h = i x` always lies in the
/// kernel since it produces `H = 0`.
pub fn tangent_injectivity(x1: &Signal, x2: &Signal, tol: f64) -> Result<(usize, bool)> {
    let m = tangent_map(x1, x2)?;
    let rank = numeric_rank(&m, tol);
    let n = x1.len() + x2.len();
    Ok((rank, rank == 2 * n - 1))
}

/// Dense real matrix (stored as complex with zero imaginary parts) of the
/// tangent map, shape `2(4N - 4) x 2N`; rows are `[Re b; Im b]`, columns the
/// real then imaginary coordinate directions of `h`.
pub fn tangent_map(x1: &Signal, x2: &Signal) -> Result<ComplexMatrix> {
    check_pair(x1, x2)?;
    let (l1, l2) = (x1.len(), x2.len());
    let n = l1 + l2;
    let s = build_sensing(l1, l2)?;
    let mut x = x1.coeffs().to_vec();
    x.extend_from_slice(x2.coeffs());
    let mut m = ComplexMatrix::zeros(2 * s.len(), 2 * n);
    for col in 0..2 * n {
        let mut h = vec![C64::new(0.0, 0.0); n];
        h[col % n] = if col < n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 1.0)
        };
        let lifted = ComplexMatrix::from_fn(n, n, |i, j| x[i] * h[j].conj() + h[i] * x[j].conj());
        let b = s.apply(&HermitianMatrix::symmetrize(&lifted))?;
        for (r, bm) in b.iter().enumerate() {
            m[(r, col)] = C64::new(bm.re, 0.0);
            m[(s.len() + r, col)] = C64::new(bm.im, 0.0);
        }
    }
    Ok(m)
}

/// Numerical verification data for the certificate `W = S* S`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub n: usize,
    /// `|W x| / (|W|_F |x|)`.
    pub null_residual: f64,
    pub min_eig: f64,
    pub w_norm: f64,
    pub rank: usize,
    /// `adjoint(lambda)` reproduces `W` within [`LAMBDA_TOL`].
    pub in_range: bool,
    pub lambda_deviation: f64,
    pub lambda: Vec<C64>,
    pub tangent_rank: usize,
    pub injective: bool,
}

impl CertificateReport {
    /// All certificate conditions plus tangent injectivity.
    pub fn certifies(&self) -> bool {
        self.null_residual <= NULL_TOL
            && self.min_eig >= -PSD_TOL * self.w_norm
            && self.rank == self.n - 1
            && self.in_range
            && self.injective
    }
}

/// Runs every certificate check for the pair at the shared rank tolerance.
pub fn certify(x1: &Signal, x2: &Signal) -> Result<CertificateReport> {
    let w = dual_certificate(x1, x2)?;
    let n = w.dim();
    let mut x = x1.coeffs().to_vec();
    x.extend_from_slice(x2.coeffs());
    let w_norm = w.frobenius_norm();
    let null_residual = vec_norm(&w.matvec(&x)?) / (w_norm * vec_norm(&x));
    let min_eig = herm_eig(&w)?.values[0];
    let rank = numeric_rank(w.as_matrix(), RANK_TOL);
    let (lambda, lambda_deviation) = lambda_with_deviation(x1, x2)?;
    let (tangent_rank, injective) = tangent_injectivity(x1, x2, RANK_TOL)?;
    Ok(CertificateReport {
        n,
        null_residual,
        min_eig,
        w_norm,
        rank,
        in_range: lambda_deviation <= LAMBDA_TOL,
        lambda_deviation,
        lambda,
        tangent_rank,
        injective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::convolve;

    #[test]
    fn minimal_sylvester() {
        let s = build(&Signal::from_re(&[1., 2.]), &Signal::from_re(&[3., 4.]));
        assert_eq!(s, ComplexMatrix::from_real_rows(&[&[3., 1.], &[4., 2.]]));
    }

    #[test]
    fn padded_kernel_and_zero_row() {
        let x1 = Signal::new(vec![C64::new(1., 0.5), C64::new(-1., 2.)]).unwrap();
        let x2 = Signal::from_re(&[2., 0.5, -1.]);
        let s = build_padded(&x1, &x2).unwrap();
        assert_eq!(s.rows(), 5);
        for c in 0..5 {
            assert_eq!(s[(4, c)], C64::new(0., 0.));
        }
        let mut x = x1.coeffs().to_vec();
        x.extend_from_slice(x2.coeffs());
        assert!(vec_norm(&s.matvec(&x).unwrap()) < 1e-14);

        let y1 = Signal::from_re(&[0.3, -0.7]);
        let y2 = Signal::new(vec![C64::new(0., 1.), C64::new(1., 0.), C64::new(0.2, 0.2)]).unwrap();
        let mut y = y1.coeffs().to_vec();
        y.extend_from_slice(y2.coeffs());
        let got = s.matvec(&y).unwrap();
        let want = convolve(&x2, &y1).sub(&convolve(&x1, &y2));
        for k in 0..4 {
            assert!((got[k] - want[k]).norm() < 1e-14);
        }
        assert_eq!(
            build_padded(&Signal::from_re(&[0., 1.]), &x2),
            Err(Error::NotFullDegree)
        );
    }

    #[test]
    fn gcd_degree_examples() {
        let g = gcd_degree(
            &Signal::from_re(&[1., -1.]),
            &Signal::from_re(&[1., -2.]),
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(g, 1);
        let g = gcd_degree(
            &Signal::from_re(&[1., -1.]),
            &Signal::from_re(&[1., -1.]),
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(g, 2);
    }

    #[test]
    fn coprime_pair_certifies() {
        let x1 = Signal::new(vec![C64::new(1., 0.5), C64::new(-1., 2.)]).unwrap();
        let x2 = Signal::new(vec![
            C64::new(0.4, -1.),
            C64::new(1., 1.),
            C64::new(-0.5, 0.),
        ])
        .unwrap();
        let rep = certify(&x1, &x2).unwrap();
        assert!(rep.certifies(), "{rep:?}");
        assert_eq!(rep.lambda.len(), 4 * 5 - 4);
        assert_eq!(rep.tangent_rank, 9);
    }

    #[test]
    fn unit_circle_common_factor_breaks_injectivity() {
        let f = Signal::new(vec![C64::new(1., 0.), -C64::from_polar(1.0, 0.7)]).unwrap();
        let x1 = convolve(
            &f,
            &Signal::new(vec![C64::new(1., 0.3), C64::new(0.2, -1.)]).unwrap(),
        );
        let x2 = convolve(&f, &Signal::from_re(&[0.5, 1.5]));
        let (rank, inj) = tangent_injectivity(&x1, &x2, RANK_TOL).unwrap();
        assert!(!inj);
        assert!(rank < 2 * 6 - 1);
        assert!(!certify(&x1, &x2).unwrap().certifies());
    }

    #[test]
    fn off_circle_common_factor_fails_only_the_rank_condition() {
        // the shared zero at 2 can be flipped to 1/2 in both signals at once,
        // which is a discrete ambiguity, not a tangent direction
        let f = Signal::from_re(&[1., -2.]);
        let x1 = convolve(
            &f,
            &Signal::new(vec![C64::new(1., 0.3), C64::new(0.2, -1.)]).unwrap(),
        );
        let x2 = convolve(&f, &Signal::from_re(&[0.5, 1.5]));
        let rep = certify(&x1, &x2).unwrap();
        assert!(rep.injective);
        assert_eq!(rep.rank, 6 - 2);
        assert!(!rep.certifies());
    }

    #[test]
    fn i_x_is_in_the_tangent_kernel() {
        let x1 = Signal::new(vec![C64::new(1., 0.5), C64::new(-1., 2.)]).unwrap();
        let x2 = Signal::from_re(&[2., 0.5, -1.]);
        let m = tangent_map(&x1, &x2).unwrap();
        let n = 5;
        let mut x = x1.coeffs().to_vec();
        x.extend_from_slice(x2.coeffs());
        // h = i x in real coordinates: Re h = -Im x, Im h = Re x
        let mut coords = vec![C64::new(0., 0.); 2 * n];
        for k in 0..n {
            coords[k] = C64::new(-x[k].im, 0.);
            coords[n + k] = C64::new(x[k].re, 0.);
        }
        assert!(vec_norm(&m.matvec(&coords).unwrap()) < 1e-13);
    }
}
