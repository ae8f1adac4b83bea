//! Lifted correlation measurements.
//!
//! With `x = (x1, x2)` stacked into `C^N`, `N = L1 + L2`, each correlation
//! entry `(x_i * conj(x_j^-))_k` equals `tr(A_{i,j,k} x x*)` for a 0/1 sensing
//! matrix supported on one band of one block. The stacked order is
//! `a11 (2L1-1) | a22 (2L2-1) | a12 (N-1) | a21 (N-1)`, `4N - 4` entries in
//! total; the reduced layout drops `a21`, which is the conjugate time reversal
//! of `a12`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::poly::{correlate, Signal};
use crate::{Error, Result};

/// One of the four correlation blocks `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    B11,
    B22,
    B12,
    B21,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::B11, Block::B22, Block::B12, Block::B21];

    /// `(i, j)` with 1-based signal indices.
    pub fn pair(self) -> (usize, usize) {
        match self {
            Block::B11 => (1, 1),
            Block::B22 => (2, 2),
            Block::B12 => (1, 2),
            Block::B21 => (2, 1),
        }
    }
}

/// Geometry of one block: row offset and length of signal `i`, same for `j`.
#[derive(Clone, Copy, Debug)]
struct BlockGeom {
    off_i: usize,
    li: usize,
    off_j: usize,
    lj: usize,
}

impl BlockGeom {
    fn count(&self) -> usize {
        self.li + self.lj - 1
    }
}

fn geometry(l1: usize, l2: usize, b: Block) -> BlockGeom {
    let (i, j) = b.pair();
    let part = |s: usize| if s == 1 { (0, l1) } else { (l1, l2) };
    let ((off_i, li), (off_j, lj)) = (part(i), part(j));
    BlockGeom {
        off_i,
        li,
        off_j,
        lj,
    }
}

/// `n x n` down-shift: ones on the first subdiagonal.
pub fn downshift(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `T_n^l`, with negative powers meaning `(T_n^{-l})^T`.
pub fn shift_power(n: usize, l: isize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r as isize - c as isize == l {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `n x l` embedding: identity on top of zeros.
pub fn embedding(n: usize, l: usize) -> Result<ComplexMatrix> {
    if l > n {
        return Err(Error::OutOfRange(format!(
            "embedding width {l} exceeds height {n}"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, l, |r, c| {
        if r == c {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// The `lj x li` rectangular shift `T^{(k)}_{lj,li}`, defined through its
/// transpose `Pi_{N,li}^T T_N^{k-lj+1} Pi_{N,lj}` with `N = li + lj`.
pub fn rect_shift(lj: usize, li: usize, k: usize) -> Result<ComplexMatrix> {
    if li == 0 || lj == 0 || k > li + lj - 2 {
        return Err(Error::OutOfRange(format!(
            "shift index {k} outside [0, {}]",
            (li + lj).saturating_sub(2)
        )));
    }
    let n = li + lj;
    let t = shift_power(n, k as isize - lj as isize + 1);
    let transposed = embedding(n, li)?
        .transpose()
        .matmul(&t)?
        .matmul(&embedding(n, lj)?)?;
    Ok(transposed.transpose())
}

/// One sensing matrix `A_{i,j,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingMatrix {
    pub block: Block,
    pub k: usize,
    pub matrix: ComplexMatrix,
}

/// The family `{A_{i,j,k}}` for lengths `(l1, l2)`.
#[derive(Clone, Debug)]
pub struct SensingSet {
    l1: usize,
    l2: usize,
    reduced: bool,
    matrices: Vec<SensingMatrix>,
}

/// Builds all `4(l1 + l2) - 4` sensing matrices in stacked order.
pub fn build_sensing(l1: usize, l2: usize) -> Result<SensingSet> {
    if l1 == 0 || l2 == 0 {
        return Err(Error::OutOfRange("signal lengths must be positive".into()));
    }
    let n = l1 + l2;
    let mut matrices = Vec::with_capacity(4 * n - 4);
    for b in Block::ALL {
        let g = geometry(l1, l2, b);
        for k in 0..g.count() {
            let t = rect_shift(g.lj, g.li, k)?;
            let mut a = ComplexMatrix::zeros(n, n);
            for r in 0..g.lj {
                for c in 0..g.li {
                    a[(g.off_j + r, g.off_i + c)] = t[(r, c)];
                }
            }
            matrices.push(SensingMatrix {
                block: b,
                k,
                matrix: a,
            });
        }
    }
    debug_assert_eq!(matrices.len(), 4 * n - 4);
    Ok(SensingSet {
        l1,
        l2,
        reduced: false,
        matrices,
    })
}

impl SensingSet {
    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    pub fn n(&self) -> usize {
        self.l1 + self.l2
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// The same family without the `a21` block (`3N - 3` measurements).
    pub fn reduced(&self) -> Self {
        Self {
            l1: self.l1,
            l2: self.l2,
            reduced: true,
            matrices: self
                .matrices
                .iter()
                .filter(|m| m.block != Block::B21)
                .cloned()
                .collect(),
        }
    }

    /// Active sensing matrices in stacked order.
    pub fn matrices(&self) -> &[SensingMatrix] {
        &self.matrices
    }

    /// Number of active measurements.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    fn active_blocks(&self) -> &'static [Block] {
        if self.reduced {
            &Block::ALL[..3]
        } else {
            &Block::ALL
        }
    }

    /// Stacked active measurements `tr(A_m X)` by banded sums over the blocks
    /// of `X`.
    pub fn apply(&self, x: &HermitianMatrix) -> Result<Vec<C64>> {
        let n = self.n();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.dim(),
            });
        }
        let mut out = Vec::with_capacity(self.len());
        for &b in self.active_blocks() {
            let g = geometry(self.l1, self.l2, b);
            for k in 0..g.count() {
                // entries with p - q = k - lj + 1
                let shift = k as isize - g.lj as isize + 1;
                let mut acc = C64::new(0.0, 0.0);
                for q in 0..g.lj {
                    let p = q as isize + shift;
                    if p >= 0 && (p as usize) < g.li {
                        acc += x[(g.off_i + p as usize, g.off_j + q)];
                    }
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// `sum_m lam_m A_m + conj(lam_m) A_m*` over the active measurements.
    pub fn adjoint(&self, lam: &[C64]) -> Result<HermitianMatrix> {
        if lam.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: lam.len(),
            });
        }
        let n = self.n();
        let mut w = ComplexMatrix::zeros(n, n);
        let mut m = 0;
        for &b in self.active_blocks() {
            let g = geometry(self.l1, self.l2, b);
            for k in 0..g.count() {
                let shift = k as isize - g.lj as isize + 1;
                let l = lam[m];
                m += 1;
                for q in 0..g.lj {
                    let p = q as isize + shift;
                    if p >= 0 && (p as usize) < g.li {
                        let (r, c) = (g.off_j + q, g.off_i + p as usize);
                        w[(r, c)] += l;
                        w[(c, r)] += l.conj();
                    }
                }
            }
        }
        Ok(HermitianMatrix::symmetrize(&w))
    }
}

/// Correlation segments `a11, a22, a12, a21`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurements {
    pub a11: Vec<C64>,
    pub a22: Vec<C64>,
    pub a12: Vec<C64>,
    pub a21: Vec<C64>,
}

impl Measurements {
    pub fn l1(&self) -> usize {
        self.a11.len().div_ceil(2)
    }

    pub fn l2(&self) -> usize {
        self.a22.len().div_ceil(2)
    }

    /// Splits a stacked vector of length `4N - 4`, or `3N - 3` (then `a21` is
    /// filled in as the conjugate time reversal of `a12`).
    pub fn from_stacked(l1: usize, l2: usize, b: &[C64]) -> Result<Self> {
        let n = l1 + l2;
        let (s11, s22, s12) = (2 * l1 - 1, 2 * l2 - 1, n - 1);
        let full = 4 * n - 4;
        let reduced = 3 * n - 3;
        if b.len() != full && b.len() != reduced {
            return Err(Error::DimensionMismatch {
                expected: full,
                got: b.len(),
            });
        }
        let a11 = b[..s11].to_vec();
        let a22 = b[s11..s11 + s22].to_vec();
        let a12 = b[s11 + s22..s11 + s22 + s12].to_vec();
        let a21 = if b.len() == full {
            b[s11 + s22 + s12..].to_vec()
        } else {
            reverse_conj(&a12)
        };
        Ok(Self { a11, a22, a12, a21 })
    }

    /// Stacked vector, `3N - 3` entries when `reduced`.
    pub fn stacked(&self, reduced: bool) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.a11.len() + self.a22.len() + 2 * self.a12.len());
        v.extend_from_slice(&self.a11);
        v.extend_from_slice(&self.a22);
        v.extend_from_slice(&self.a12);
        if !reduced {
            v.extend_from_slice(&self.a21);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.a11.len() + self.a22.len() + self.a12.len() + self.a21.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|b|^2` over all four segments.
    pub fn norm_sqr(&self) -> f64 {
        [&self.a11, &self.a22, &self.a12, &self.a21]
            .iter()
            .flat_map(|s| s.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let f = |v: &Vec<C64>| v.iter().map(|z| z * s).collect();
        Self {
            a11: f(&self.a11),
            a22: f(&self.a22),
            a12: f(&self.a12),
            a21: f(&self.a21),
        }
    }
}

fn reverse_conj(v: &[C64]) -> Vec<C64> {
    v.iter().rev().map(|z| z.conj()).collect()
}

/// Lifted variable `x x*` for the stacked pair.
pub fn lift(x1: &Signal, x2: &Signal) -> HermitianMatrix {
    let mut x = x1.coeffs().to_vec();
    x.extend_from_slice(x2.coeffs());
    HermitianMatrix::outer(&x)
}

/// Measurements of `x_mat` in all four blocks (banded evaluation).
pub fn forward(s: &SensingSet, x_mat: &HermitianMatrix) -> Result<Measurements> {
    let full = if s.is_reduced() {
        build_sensing(s.l1(), s.l2())?
    } else {
        s.clone()
    };
    let b = full.apply(x_mat)?;
    Measurements::from_stacked(s.l1(), s.l2(), &b)
}

/// Reference evaluation of [`forward`] by dense traces `tr(A_m X)`.
pub fn forward_dense(s: &SensingSet, x_mat: &HermitianMatrix) -> Result<Vec<C64>> {
    if x_mat.dim() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            got: x_mat.dim(),
        });
    }
    Ok(s.matrices()
        .iter()
        .map(|m| m.matrix.trace_product(x_mat.as_matrix()))
        .collect())
}

/// `W = sum_m lam_m A_m + conj(lam_m) A_m*`.
///
/// Pairing: `tr(W X) = 2 Re sum_m lam_m tr(A_m X)` for Hermitian `X`.
pub fn adjoint(s: &SensingSet, lam: &[C64]) -> Result<HermitianMatrix> {
    s.adjoint(lam)
}

/// Hermitian parts `((A + A*) / 2, (A - A*) / 2i)` of each active sensing
/// matrix; their traces against Hermitian `X` give `Re b_m` and `Im b_m`.
pub fn hermitian_split(s: &SensingSet) -> Vec<(HermitianMatrix, HermitianMatrix)> {
    let half = C64::new(0.5, 0.0);
    let half_over_i = C64::new(0.0, -0.5);
    s.matrices()
        .iter()
        .map(|m| {
            let a = &m.matrix;
            let ah = a.adjoint();
            (
                HermitianMatrix::symmetrize(&a.add(&ah).scale(half)),
                HermitianMatrix::symmetrize(&a.sub(&ah).scale(half_over_i)),
            )
        })
        .collect()
}

/// Direct correlations of the pair.
pub fn measure(x1: &Signal, x2: &Signal) -> Measurements {
    Measurements {
        a11: correlate(x1, x1).into_coeffs(),
        a22: correlate(x2, x2).into_coeffs(),
        a12: correlate(x1, x2).into_coeffs(),
        a21: correlate(x2, x1).into_coeffs(),
    }
}

/// Per-component complex Gaussian noise level and its seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::OutOfRange(format!("noise level {sigma}")));
        }
        Ok(Self { sigma, seed })
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> C64 {
    let s = sigma / std::f64::consts::SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Adds circular complex Gaussian noise of variance `sigma^2` to `a11`, `a22`
/// and `a12`; `a21` receives the conjugate time reversal of the `a12` noise.
pub fn add_noise(m: &Measurements, model: &NoiseModel) -> Measurements {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    add_noise_with(m, model.sigma, &mut rng)
}

/// [`add_noise`] drawing from a caller-owned generator.
pub fn add_noise_with<R: Rng + ?Sized>(m: &Measurements, sigma: f64, rng: &mut R) -> Measurements {
    if sigma == 0.0 {
        return m.clone();
    }
    let mut noisy = |v: &[C64]| -> (Vec<C64>, Vec<C64>) {
        let n: Vec<C64> = v.iter().map(|_| complex_gaussian(rng, sigma)).collect();
        (v.iter().zip(&n).map(|(a, b)| a + b).collect(), n)
    };
    let (a11, _) = noisy(&m.a11);
    let (a22, _) = noisy(&m.a22);
    let (a12, n12) = noisy(&m.a12);
    let n21 = reverse_conj(&n12);
    let a21 = m.a21.iter().zip(&n21).map(|(a, b)| a + b).collect();
    Measurements { a11, a22, a12, a21 }
}

/// Number of noise-bearing components: every entry of the full stack carries
/// noise (the `a21` part mirrored), so `4N - 4`.
pub fn noise_bearing_count(y: &Measurements) -> usize {
    y.len()
}

/// Received SNR `|y|^2 / (M_b sigma^2)`; infinite when `sigma = 0`.
pub fn rsnr(y: &Measurements, model: &NoiseModel) -> f64 {
    if model.sigma == 0.0 {
        return f64::INFINITY;
    }
    y.norm_sqr() / (noise_bearing_count(y) as f64 * model.sigma * model.sigma)
}

/// Noise level that realizes the target linear rSNR for `y`.
pub fn sigma_for_rsnr(y: &Measurements, rsnr_linear: f64) -> f64 {
    (y.norm_sqr() / (noise_bearing_count(y) as f64 * rsnr_linear)).sqrt()
}
