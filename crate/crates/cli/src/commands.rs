use std::collections::HashMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use corrlift::ambiguity::{count_bounds, enumerate_convolution_ambiguities, DEFAULT_CLUSTER_TOL};
use corrlift::poly::{cluster, convolve, roots};
use corrlift::sensing::{add_noise_with, build_sensing, measure, sigma_for_rsnr};
use corrlift::solver::{aligned_mse, recover};
use corrlift::sylvester::certify;
use corrlift::{CertificateReport, Signal, SolverOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::parse::{format_complex, format_signal, parse_complex};

/// CSV `which,re,im,multiplicity` for the zeros of `x1`, `x2` (if given) and
/// their product.
pub fn cmd_zeros(x1: &Signal, x2: Option<&Signal>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["which", "re", "im", "multiplicity"])?;
    let mut parts = vec![("x1", x1.clone())];
    if let Some(x2) = x2 {
        parts.push(("x2", x2.clone()));
        parts.push(("product", convolve(x1, x2)));
    }
    for (which, x) in parts {
        let rs = roots(&x, 1.0)?;
        for c in cluster(&rs.zeros, DEFAULT_CLUSTER_TOL) {
            let (re, im) = (c.center.re + 0.0, c.center.im + 0.0);
            w.write_record([
                which,
                &format!("{re:?}"),
                &format!("{im:?}"),
                &c.multiplicity.to_string(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Certificate report as `key=value` lines; an input the checks reject
/// renders as a single `error=` line.
pub fn cmd_certify(x1: &Signal, x2: &Signal) -> String {
    let r = match certify(x1, x2) {
        Ok(r) => r,
        Err(e) => return format!("error={e}\n"),
    };
    let lambda = r
        .lambda
        .iter()
        .map(|z| format_complex(*z))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "n={}\nnull_residual={:?}\nmin_eig={:?}\nw_norm={:?}\nrank={}\nin_range={}\nlambda_deviation={:?}\n\
         tangent_rank={}\ninjective={}\ncertifies={}\nlambda={}\n",
        r.n,
        r.null_residual,
        r.min_eig,
        r.w_norm,
        r.rank,
        r.in_range,
        r.lambda_deviation,
        r.tangent_rank,
        r.injective,
        r.certifies(),
        lambda
    )
}

/// Inverse of [`cmd_certify`].
pub fn parse_report(text: &str) -> Result<CertificateReport> {
    let kv: HashMap<&str, &str> = text.lines().filter_map(|l| l.split_once('=')).collect();
    if let Some(e) = kv.get("error") {
        bail!("report carries an error: {e}");
    }
    fn field<T: std::str::FromStr>(kv: &HashMap<&str, &str>, k: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        let v = kv.get(k).ok_or_else(|| anyhow!("missing field `{k}`"))?;
        v.parse().with_context(|| format!("bad value for `{k}`"))
    }
    let lambda = match kv.get("lambda") {
        Some(v) if !v.is_empty() => v.split(',').map(parse_complex).collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let r = CertificateReport {
        n: field(&kv, "n")?,
        null_residual: field(&kv, "null_residual")?,
        min_eig: field(&kv, "min_eig")?,
        w_norm: field(&kv, "w_norm")?,
        rank: field(&kv, "rank")?,
        in_range: field(&kv, "in_range")?,
        lambda_deviation: field(&kv, "lambda_deviation")?,
        lambda,
        tangent_rank: field(&kv, "tangent_rank")?,
        injective: field(&kv, "injective")?,
    };
    if r.certifies() != field::<bool>(&kv, "certifies")? {
        bail!("`certifies` disagrees with the other fields");
    }
    Ok(r)
}

/// Bounds and one line per convolution ambiguity class. Every representative
/// is checked to reconvolve to `x1 * x2` before anything is printed.
pub fn cmd_ambiguities(x1: &Signal, x2: &Signal) -> Result<String> {
    let amb = enumerate_convolution_ambiguities(x1, x2, DEFAULT_CLUSTER_TOL)?;
    let target = convolve(x1, x2);
    for (k, c) in amb.classes.iter().enumerate() {
        let dev = convolve(&c.x1_rep, &c.x2_rep).rel_distance(&target);
        if dev > 1e-7 {
            bail!("class {k} reconvolves with relative error {dev:e}");
        }
    }
    let (lower, upper) = count_bounds(x1, x2);
    let mut out = String::new();
    writeln!(out, "zeros={}", x1.len() + x2.len() - 2)?;
    writeln!(
        out,
        "lower={lower}\nupper={upper}\nunstable={}\nclasses={}",
        amb.unstable,
        amb.classes.len()
    )?;
    for (k, c) in amb.classes.iter().enumerate() {
        let assigned = c
            .partition
            .assigned
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "class={k} assigned={assigned} x1={} x2={}",
            format_signal(&c.x1_rep),
            format_signal(&c.x2_rep)
        )?;
    }
    Ok(out)
}

/// Ground truth and measurement settings for [`cmd_recover`].
#[derive(Clone, Debug)]
pub struct RecoverInput {
    pub x1: Signal,
    pub x2: Signal,
    /// `f64::INFINITY` for noiseless measurements.
    pub snr_db: f64,
    /// Seeds the measurement noise.
    pub seed: u64,
    pub reduced: bool,
    pub solver: SolverOptions,
}

/// Measures the pair, recovers it and reports the estimate as `key=value`
/// lines.
pub fn cmd_recover(input: &RecoverInput) -> Result<String> {
    let (x1, x2) = (&input.x1, &input.x2);
    let (l1, l2) = (x1.len(), x2.len());
    let y = measure(x1, x2);
    let sigma = if input.snr_db == f64::INFINITY {
        0.0
    } else {
        sigma_for_rsnr(&y, 10f64.powf(input.snr_db / 10.0))
    };
    let b = add_noise_with(&y, sigma, &mut ChaCha8Rng::seed_from_u64(input.seed));
    let mut s = build_sensing(l1, l2)?;
    if input.reduced {
        s = s.reduced();
    }
    let (e1, e2, d) = recover(l1, l2, &s, &b, &input.solver)?;
    let truth = Signal::new([x1.coeffs(), x2.coeffs()].concat())?;
    let est = Signal::new([e1.coeffs(), e2.coeffs()].concat())?;
    let (mse, phi) = aligned_mse(&truth, &est)?;
    let mut out = String::new();
    writeln!(
        out,
        "l1={l1}\nl2={l2}\nmeasurements={}\nsigma={sigma:?}",
        s.len()
    )?;
    writeln!(
        out,
        "mse={mse:?}\nphase={phi:?}\niters={}\nresidual={:?}",
        d.iters, d.residual
    )?;
    writeln!(
        out,
        "rank1_gap={:?}\nnon_unique={}",
        d.rank1_gap, d.non_unique
    )?;
    writeln!(out, "x1={}\nx2={}", format_signal(&e1), format_signal(&e2))?;
    Ok(out)
}
