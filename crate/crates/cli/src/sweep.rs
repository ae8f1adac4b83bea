use std::io::{Read, Write};

use anyhow::{bail, Result};
use corrlift::corpus;
use corrlift::sensing::{add_noise_with, build_sensing, measure, sigma_for_rsnr};
use corrlift::solver::{aligned_mse, recover};
use corrlift::{Error, Signal, SolverOptions};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "trial,l1,l2,rsnr_db,sigma,mse,mse_per_dim_db,iters,residual,rank1_gap,seed,failed";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub l1: usize,
    pub l2: usize,
    /// Target rSNR values in dB; `f64::INFINITY` runs noiseless trials.
    pub snr_db_list: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Drop the `a21` block (3N - 3 measurements).
    pub reduced: bool,
    pub solver: SolverOptions,
    pub out_path: Option<std::path::PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l1 == 0 || self.l2 == 0 {
            bail!("signal lengths must be positive");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.snr_db_list.is_empty() {
            bail!("empty rSNR list");
        }
        if let Some(v) = self
            .snr_db_list
            .iter()
            .find(|v| v.is_nan() || **v == f64::NEG_INFINITY)
        {
            bail!("rSNR value {v} out of range");
        }
        self.solver.validate()?;
        Ok(())
    }
}

/// One CSV row. Failed trials report `mse = residual = 1` (the zero estimate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub l1: usize,
    pub l2: usize,
    pub rsnr_db: f64,
    pub sigma: f64,
    pub mse: f64,
    pub mse_per_dim_db: f64,
    pub iters: usize,
    pub residual: f64,
    pub rank1_gap: f64,
    pub seed: u64,
    pub failed: bool,
}

/// Standard complex Gaussian coefficients with both edge coefficients at
/// least 0.1 in magnitude.
pub fn gen_signal<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Signal {
    corpus::gen_signal(l, rng)
}

/// Seed of trial `trial` at rSNR index `snr_index`: the first output of the
/// ChaCha stream `(snr_index, trial)` keyed by `seed`.
pub fn trial_seed(seed: u64, snr_index: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 32) | trial as u64);
    rng.next_u64()
}

fn run_trial(cfg: &ExperimentConfig, snr_index: usize, trial: usize) -> TrialRecord {
    let (l1, l2) = (cfg.l1, cfg.l2);
    let n = (l1 + l2) as f64;
    let rsnr_db = cfg.snr_db_list[snr_index];
    let seed = trial_seed(cfg.seed, snr_index, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x1 = gen_signal(l1, &mut rng);
    let x2 = gen_signal(l2, &mut rng);
    let y = measure(&x1, &x2);
    let sigma = if rsnr_db == f64::INFINITY {
        0.0
    } else {
        sigma_for_rsnr(&y, 10f64.powf(rsnr_db / 10.0))
    };
    let b = add_noise_with(&y, sigma, &mut rng);
    let record = |mse: f64, iters, residual, rank1_gap, failed| TrialRecord {
        trial,
        l1,
        l2,
        rsnr_db,
        sigma,
        mse,
        mse_per_dim_db: 10.0 * (mse / n).log10(),
        iters,
        residual,
        rank1_gap,
        seed,
        failed,
    };
    let sensing = build_sensing(l1, l2).map(|s| if cfg.reduced { s.reduced() } else { s });
    let outcome = sensing
        .and_then(|s| recover(l1, l2, &s, &b, &cfg.solver))
        .and_then(|(e1, e2, diag)| {
            let truth = Signal::new([x1.coeffs(), x2.coeffs()].concat())?;
            let est = Signal::new([e1.coeffs(), e2.coeffs()].concat())?;
            Ok((aligned_mse(&truth, &est)?.0, diag))
        });
    match outcome {
        Ok((mse, d)) => record(mse, d.iters, d.residual, d.rank1_gap, false),
        Err(Error::Divergence { iters, .. }) => record(1.0, iters, 1.0, 0.0, true),
        Err(_) => record(1.0, 0, 1.0, 0.0, true),
    }
}

/// All trials in `(snr, trial)` order. Trials run in parallel; every trial
/// owns a generator derived by [`trial_seed`], so the rows do not depend on
/// scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_db_list.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(s, t)| run_trial(cfg, s, t))
        .collect())
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Median MSE over the successful trials of one rSNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct SnrSummary {
    pub rsnr_db: f64,
    pub median_mse: f64,
    pub failed: usize,
}

/// One summary per rSNR value, in first-appearance order.
pub fn summarize(records: &[TrialRecord]) -> Vec<SnrSummary> {
    let mut points: Vec<f64> = Vec::new();
    for r in records {
        if !points.iter().any(|p| p.to_bits() == r.rsnr_db.to_bits()) {
            points.push(r.rsnr_db);
        }
    }
    points
        .into_iter()
        .map(|p| {
            let rows: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.rsnr_db.to_bits() == p.to_bits())
                .collect();
            let mut mses: Vec<f64> = rows.iter().filter(|r| !r.failed).map(|r| r.mse).collect();
            mses.sort_by(f64::total_cmp);
            let k = mses.len();
            let median_mse = match k {
                0 => f64::NAN,
                _ if k % 2 == 1 => mses[k / 2],
                _ => 0.5 * (mses[k / 2 - 1] + mses[k / 2]),
            };
            SnrSummary {
                rsnr_db: p,
                median_mse,
                failed: rows.iter().filter(|r| r.failed).count(),
            }
        })
        .collect()
}
