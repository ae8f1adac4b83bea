//! Convolution and autocorrelation ambiguities.
//!
//! Both are enumerated in the root domain: the zeros of the observed product
//! (or autocorrelation) are clustered into a multiset, and each admissible way
//! of handing zeros to the factors gives one candidate signal.

use num_complex::Complex64 as C64;

use crate::poly::{cluster, convolve, correlate, from_roots, roots, RootCluster, RootSet, Signal};
use crate::{Error, Result};

/// Largest total zero count accepted by [`enumerate_convolution_ambiguities`].
pub const MAX_CONV_ZEROS: usize = 16;
/// Largest `N - 1` accepted by [`enumerate_autocorr_ambiguities`].
pub const MAX_AUTOCORR_ZEROS: usize = 12;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Zeros handed to the left factor, as indices into the canonical zero list:
/// cluster centers in [`cluster`] order, each repeated by its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub assigned: Vec<usize>,
}

/// Left-scaled representative of one convolution ambiguity class.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbiguityClass {
    pub partition: PartitionSpec,
    pub x1_rep: Signal,
    pub x2_rep: Signal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionAmbiguities {
    pub zeros: Vec<RootCluster>,
    pub classes: Vec<AmbiguityClass>,
    /// Two distinct clusters lie within twice the merge distance.
    pub unstable: bool,
}

fn check_pair(x1: &Signal, x2: &Signal) -> Result<()> {
    if !x1.is_full_degree() || !x2.is_full_degree() {
        return Err(Error::NotFullDegree);
    }
    Ok(())
}

fn unstable(clusters: &[RootCluster], threshold: f64) -> bool {
    clusters.iter().enumerate().any(|(i, a)| {
        clusters[i + 1..]
            .iter()
            .any(|b| (a.center - b.center).norm() <= 2.0 * threshold)
    })
}

fn threshold(zeros: &[C64], tol: f64) -> f64 {
    tol * zeros.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All count vectors `c` with `0 <= c_j <= bound_j`, last index fastest.
fn count_vectors(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// One representative per admissible split of the product's zeros.
///
/// A split hands `|P|` zeros to the left factor with
/// `D - L2 + 1 <= |P| <= L1 - 1`, so both factors fit their lengths. The left
/// factor carries the unit `x1[0] x2[0]`, the right factor is monic in the
/// root form. Splits are deduplicated as multisets and listed in lexicographic
/// order of their index sets.
pub fn enumerate_convolution_ambiguities(
    x1: &Signal,
    x2: &Signal,
    cluster_tol: f64,
) -> Result<ConvolutionAmbiguities> {
    check_pair(x1, x2)?;
    let (l1, l2) = (x1.len(), x2.len());
    let d = l1 + l2 - 2;
    if d > MAX_CONV_ZEROS {
        return Err(Error::TooManyZeros {
            count: d,
            max: MAX_CONV_ZEROS,
        });
    }
    let product = convolve(x1, x2);
    let rs = roots(&product, 1.0)?;
    let clusters = cluster(&rs.zeros, cluster_tol);
    let flag = unstable(&clusters, threshold(&rs.zeros, cluster_tol));

    let lo = (d + 1).saturating_sub(l2);
    let hi = l1 - 1;
    let mults: Vec<usize> = clusters.iter().map(|c| c.multiplicity).collect();
    let starts: Vec<usize> = mults
        .iter()
        .scan(0, |acc, &m| {
            let s = *acc;
            *acc += m;
            Some(s)
        })
        .collect();

    let unit = x1[0] * x2[0];
    let mut classes = Vec::new();
    for counts in count_vectors(&mults) {
        let size: usize = counts.iter().sum();
        if size < lo || size > hi {
            continue;
        }
        let mut assigned = Vec::with_capacity(size);
        let mut left = Vec::with_capacity(size);
        let mut right = Vec::with_capacity(d - size);
        for (j, &cj) in counts.iter().enumerate() {
            assigned.extend(starts[j]..starts[j] + cj);
            left.extend(std::iter::repeat_n(clusters[j].center, cj));
            right.extend(std::iter::repeat_n(clusters[j].center, mults[j] - cj));
        }
        let x1_rep = from_roots(&RootSet {
            unit,
            zeros: left,
            origin_power: 0,
        })?
        .resized(l1);
        let x2_rep = from_roots(&RootSet {
            unit: C64::new(1.0, 0.0),
            zeros: right,
            origin_power: 0,
        })?
        .resized(l2);
        classes.push(AmbiguityClass {
            partition: PartitionSpec { assigned },
            x1_rep,
            x2_rep,
        });
    }
    classes.sort_by(|a, b| a.partition.assigned.cmp(&b.partition.assigned));
    Ok(ConvolutionAmbiguities {
        zeros: clusters,
        classes,
        unstable: flag,
    })
}

/// `(min{D + 1, L1, L2}, 2^D)` with `D` the degree of the product.
pub fn count_bounds(x1: &Signal, x2: &Signal) -> (usize, u64) {
    let d = convolve(x1, x2).degree().unwrap_or(0);
    let lower = (d + 1).min(x1.len()).min(x2.len());
    let upper = if d >= 64 { u64::MAX } else { 1u64 << d };
    (lower, upper)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrAmbiguities {
    /// Canonical-phase signals sharing the autocorrelation of the input.
    pub signals: Vec<Signal>,
    /// A unit-circle zero with odd multiplicity, or an unmatched
    /// conjugate-inverse pair, was found.
    pub flagged: bool,
}

/// Rotates so the first nonzero coefficient is real positive.
pub fn canonical_phase(x: &Signal) -> Signal {
    match x.first_nonzero() {
        Some(f) => {
            let c = x[f];
            x.scale(c.conj() / c.norm())
        }
        None => x.clone(),
    }
}

/// Signals of length `N` whose autocorrelation equals that of `x`, one per
/// choice of a zero from each conjugate-inverse pair `(zeta, 1/conj zeta)` of
/// the autocorrelation, scaled to `|x|` and phase-canonicalized.
pub fn enumerate_autocorr_ambiguities(x: &Signal, cluster_tol: f64) -> Result<AutocorrAmbiguities> {
    if !x.is_full_degree() {
        return Err(Error::NotFullDegree);
    }
    let n = x.len();
    if n - 1 > MAX_AUTOCORR_ZEROS {
        return Err(Error::TooManyZeros {
            count: n - 1,
            max: MAX_AUTOCORR_ZEROS,
        });
    }
    let a = correlate(x, x);
    let energy = a[n - 1].re;
    let rs = roots(&a, 1.0)?;
    let clusters = cluster(&rs.zeros, cluster_tol);
    let thr = threshold(&rs.zeros, cluster_tol);

    // (center chosen "inside", partner, number of pairs); on-circle clusters
    // contribute half their multiplicity with no choice
    let mut flagged = false;
    let mut fixed: Vec<C64> = Vec::new();
    let mut pairs: Vec<(C64, C64, usize)> = Vec::new();
    let mut used = vec![false; clusters.len()];
    for i in 0..clusters.len() {
        if used[i] {
            continue;
        }
        let c = clusters[i].center;
        let mirror = c.conj().inv();
        if (c - mirror).norm() <= 2.0 * thr.max(cluster_tol) {
            used[i] = true;
            let m = clusters[i].multiplicity;
            if m % 2 == 1 {
                flagged = true;
            }
            fixed.extend(std::iter::repeat_n(c, m / 2));
            continue;
        }
        let partner = (0..clusters.len())
            .filter(|&j| j != i && !used[j])
            .min_by(|&p, &q| {
                (clusters[p].center - mirror)
                    .norm()
                    .total_cmp(&(clusters[q].center - mirror).norm())
            });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
                let (mi, mj) = (clusters[i].multiplicity, clusters[j].multiplicity);
                let rel = (clusters[j].center - mirror).norm() / mirror.norm().max(1.0);
                if mi != mj || rel > 1e-4 {
                    flagged = true;
                }
                pairs.push((c, clusters[j].center, mi.min(mj)));
            }
            None => {
                used[i] = true;
                flagged = true;
            }
        }
    }

    let bounds: Vec<usize> = pairs.iter().map(|p| p.2).collect();
    let mut signals: Vec<Signal> = Vec::new();
    for counts in count_vectors(&bounds) {
        let mut zeros = fixed.clone();
        for (&(c, partner, m), &k) in pairs.iter().zip(&counts) {
            zeros.extend(std::iter::repeat_n(c, k));
            zeros.extend(std::iter::repeat_n(partner, m - k));
        }
        let y = from_roots(&RootSet {
            unit: C64::new(1.0, 0.0),
            zeros,
            origin_power: 0,
        })?
        .resized(n);
        let y = y.scale(C64::new((energy / y.norm().powi(2)).sqrt(), 0.0));
        let y = canonical_phase(&y);
        if !signals.iter().any(|s| s.rel_distance(&y) <= 1e-9) {
            signals.push(y);
        }
    }
    Ok(AutocorrAmbiguities { signals, flagged })
}

/// Scaling equivalence: `q1 = l p1` and `q2 = p2 / l` for some `l != 0`,
/// each within `tol` relative.
pub fn are_equivalent(p: (&Signal, &Signal), q: (&Signal, &Signal), tol: f64) -> bool {
    if p.0.len() != q.0.len() || p.1.len() != q.1.len() {
        return false;
    }
    let k = match (0..p.0.len()).max_by(|&i, &j| p.0[i].norm().total_cmp(&p.0[j].norm())) {
        Some(k) if p.0[k].norm() > 0.0 => k,
        _ => return false,
    };
    let lambda = q.0[k] / p.0[k];
    if lambda.norm() == 0.0 || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return false;
    }
    let close = |a: &Signal, b: &Signal| a.sub(b).norm() <= tol * a.norm().max(b.norm());
    close(q.0, &p.0.scale(lambda)) && close(q.1, &p.1.scale(lambda.inv()))
}
