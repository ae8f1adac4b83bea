#![allow(dead_code)]

use corrlift::{ComplexMatrix, HermitianMatrix, Signal, C64};
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&random_matrix(n, n, rng))
}

pub fn random_psd(n: usize, rank: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let b = random_matrix(n, rank, rng);
    HermitianMatrix::symmetrize(&b.matmul(&b.adjoint()).unwrap())
}

pub fn random_signal(l: usize, rng: &mut impl Rng) -> Signal {
    Signal::new((0..l).map(|_| random_complex(rng)).collect()).unwrap()
}

pub fn stack(x1: &Signal, x2: &Signal) -> Vec<C64> {
    let mut x = x1.coeffs().to_vec();
    x.extend_from_slice(x2.coeffs());
    x
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the Hermitian matrices under `Re tr(X Y)`.
pub fn hermitian_basis(n: usize) -> Vec<HermitianMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j {
                let mut m = ComplexMatrix::zeros(n, n);
                m[(i, i)] = c(1., 0.);
                out.push(HermitianMatrix::symmetrize(&m));
            } else {
                let mut re = ComplexMatrix::zeros(n, n);
                re[(i, j)] = c(s, 0.);
                re[(j, i)] = c(s, 0.);
                out.push(HermitianMatrix::symmetrize(&re));
                let mut im = ComplexMatrix::zeros(n, n);
                im[(i, j)] = c(0., s);
                im[(j, i)] = c(0., -s);
                out.push(HermitianMatrix::symmetrize(&im));
            }
        }
    }
    out
}
