//! Random signal generators for experiments and test corpora.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::poly::{convolve, roots, Signal};

/// Smallest accepted magnitude of the first and last coefficient.
pub const EDGE_MIN: f64 = 0.1;

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Circularly-symmetric standard complex Gaussian coefficients (unit variance
/// per entry), redrawn until `|c_0|` and `|c_{L-1}|` are at least [`EDGE_MIN`].
pub fn gen_signal<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Signal {
    assert!(l >= 1, "signal length must be positive");
    loop {
        let c: Vec<C64> = (0..l).map(|_| complex_normal(rng)).collect();
        if c[0].norm() >= EDGE_MIN && c[l - 1].norm() >= EDGE_MIN {
            return Signal::new(c).expect("finite gaussian draw");
        }
    }
}

/// Smallest distance between a zero of `x1` and a zero of `x2`, relative to
/// the larger modulus of the two; infinite if either has no zeros.
pub fn zero_separation(x1: &Signal, x2: &Signal) -> f64 {
    let (Ok(r1), Ok(r2)) = (roots(x1, 1.0), roots(x2, 1.0)) else {
        return 0.0;
    };
    let mut best = f64::INFINITY;
    for a in &r1.zeros {
        for b in &r2.zeros {
            best = best.min((a - b).norm() / a.norm().max(b.norm()).max(1.0));
        }
    }
    best
}

/// Pair of independent [`gen_signal`] draws whose zero sets are at least
/// `min_sep` apart (see [`zero_separation`]).
pub fn coprime_pair<R: Rng + ?Sized>(
    l1: usize,
    l2: usize,
    min_sep: f64,
    rng: &mut R,
) -> (Signal, Signal) {
    loop {
        let x1 = gen_signal(l1, rng);
        let x2 = gen_signal(l2, rng);
        if zero_separation(&x1, &x2) >= min_sep {
            return (x1, x2);
        }
    }
}

/// Pair sharing the factor `f`: `(f * a, f * b)` with `(a, b)` a
/// [`coprime_pair`] of lengths `l1 - deg f`, `l2 - deg f`.
pub fn planted_pair<R: Rng + ?Sized>(
    f: &Signal,
    l1: usize,
    l2: usize,
    min_sep: f64,
    rng: &mut R,
) -> (Signal, Signal) {
    let d = f.len() - 1;
    assert!(l1 > d && l2 > d, "factor longer than the signals");
    let (a, b) = coprime_pair(l1 - d, l2 - d, min_sep, rng);
    (convolve(f, &a), convolve(f, &b))
}

/// Random common factor of the given degree with Gaussian coefficients.
pub fn random_factor<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Signal {
    gen_signal(degree + 1, rng)
}

/// `1 - e^{i theta} z^-1` for a uniform random `theta`: a factor with its zero
/// on the unit circle, hence self-inversive.
pub fn unit_circle_factor<R: Rng + ?Sized>(rng: &mut R) -> Signal {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Signal::new(vec![C64::new(1.0, 0.0), -C64::from_polar(1.0, theta)]).expect("finite factor")
}
