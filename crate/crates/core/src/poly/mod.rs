//! Finite signals as polynomials in `z^-1`.
//!
//! Coefficient `c_k` of a [`Signal`] multiplies `z^-k`. Working in the variable
//! `w = z^-1` makes every signal an ordinary polynomial `sum_k c_k w^k`, which
//! is how the root finder and the Euclidean algorithm see it. A zero `zeta` of
//! `X(z)` corresponds to the root `w = 1/zeta`.

mod factor;
mod roots;

pub use factor::{
    anti_residual, anti_solution, deconvolve, gsd, is_self_inversive, is_self_reciprocal, poly_gcd,
    random_self_reciprocal, DEFAULT_GCD_TOL,
};
pub use roots::{cluster, from_roots, roots, RootCluster, RootSet};

use std::ops::Index;

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Coefficient sequence `c_0 .. c_{L-1}` of a finite signal.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal(Vec<C64>);

impl Signal {
    /// Rejects empty or non-finite coefficient lists.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySignal);
        }
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self(coeffs))
    }

    /// Real-coefficient signal. Panics on empty input.
    pub fn from_re(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
            .expect("non-empty real signal")
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); len.max(1)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index `F` of the first nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|z| *z != C64::new(0.0, 0.0))
    }

    /// Degree `D`: index of the last nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|z| *z != C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    /// Membership in `C^L_{0,0}`: first and last coefficient nonzero.
    pub fn is_full_degree(&self) -> bool {
        let zero = C64::new(0.0, 0.0);
        self.0[0] != zero && self.0[self.0.len() - 1] != zero
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Entrywise difference; the shorter operand is zero-padded.
    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.len().max(rhs.len());
        let zero = C64::new(0.0, 0.0);
        Self(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or(zero) - rhs.0.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.sub(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    /// `|self - rhs| / |self|`, zero-padding the shorter side.
    pub fn rel_distance(&self, rhs: &Self) -> f64 {
        let d = self.sub(rhs).norm();
        let n = self.norm();
        if n == 0.0 {
            d
        } else {
            d / n
        }
    }

    /// Zero-pads (or truncates) to `len` coefficients.
    pub fn resized(&self, len: usize) -> Self {
        let mut c = self.0.clone();
        c.resize(len.max(1), C64::new(0.0, 0.0));
        Self(c)
    }

    /// Drops trailing exact zeros, keeping at least one coefficient.
    pub fn trimmed(&self) -> Self {
        let d = self.degree().unwrap_or(0);
        Self(self.0[..=d].to_vec())
    }

    /// Evaluates `sum_k c_k w^k`.
    pub fn eval_w(&self, w: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * w + c)
    }
}

impl Index<usize> for Signal {
    type Output = C64;

    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl From<Vec<C64>> for Signal {
    /// Panics on empty input; use [`Signal::new`] for validated construction.
    fn from(v: Vec<C64>) -> Self {
        Self::new(v).expect("valid signal coefficients")
    }
}

/// Linear convolution, length `L1 + L2 - 1`.
pub fn convolve(x1: &Signal, x2: &Signal) -> Signal {
    let (a, b) = (x1.coeffs(), x2.coeffs());
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    Signal(out)
}

/// Entry `k` is `conj(x_{L-1-k})`.
pub fn conj_time_reverse(x: &Signal) -> Signal {
    Signal(x.coeffs().iter().rev().map(|z| z.conj()).collect())
}

/// `x_i * conj(x_j^-)`, length `Li + Lj - 1`.
pub fn correlate(xi: &Signal, xj: &Signal) -> Signal {
    convolve(xi, &conj_time_reverse(xj))
}

/// The ring involution `X*(z) = z^{1-L} conj(X(1 / conj z))` at the signal's own
/// length; on coefficients it coincides with [`conj_time_reverse`].
pub fn involution(x: &Signal) -> Signal {
    conj_time_reverse(x)
}
