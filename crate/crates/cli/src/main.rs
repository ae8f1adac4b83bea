use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use corrlift::SolverOptions;
use corrlift_cli::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "corrlift",
    version,
    about = "Signal pair recovery from correlations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noisy recovery trials over an rSNR grid, written as CSV.
    Sweep(SweepArgs),
    /// Zero locations of x1, x2 and their product as CSV.
    Zeros(SignalArgs),
    /// Dual certificate and tangent checks as key=value lines.
    Certify(SignalArgs),
    /// Convolution ambiguity classes and count bounds.
    Ambiguities(SignalArgs),
    /// Recover one pair (given by --signal or drawn from --seed).
    Recover(RecoverArgs),
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 20000)]
    max_iters: usize,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            max_iters: self.max_iters,
            rel_tol: self.tol,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    l1: usize,
    #[arg(long, default_value_t = 3)]
    l2: usize,
    /// Comma-separated rSNR values in dB (`inf` for noiseless).
    #[arg(long, default_value = "10,20,30,40")]
    snr_db: String,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use 3N-3 measurements.
    #[arg(long)]
    reduced: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// CSV destination (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SignalArgs {
    /// Comma-separated complex coefficients such as `1,-0.5+2i`; give twice
    /// for x1 and x2.
    #[arg(long = "signal", required = true)]
    signals: Vec<String>,
}

impl SignalArgs {
    fn pair(&self) -> Result<(corrlift::Signal, corrlift::Signal)> {
        match self.signals.as_slice() {
            [a, b] => Ok((parse_signal(a)?, parse_signal(b)?)),
            _ => bail!("expected --signal twice (x1 and x2)"),
        }
    }
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long = "signal")]
    signals: Vec<String>,
    #[arg(long, default_value_t = 3)]
    l1: usize,
    #[arg(long, default_value_t = 3)]
    l2: usize,
    /// Single rSNR value in dB; noiseless if omitted.
    #[arg(long)]
    snr_db: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    reduced: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    match cli.cmd {
        Command::Sweep(a) => {
            let cfg = ExperimentConfig {
                l1: a.l1,
                l2: a.l2,
                snr_db_list: parse_snr_list(&a.snr_db)?,
                trials: a.trials,
                seed: a.seed,
                reduced: a.reduced,
                solver: a.solver.options(),
                out_path: a.out,
            };
            let records = run_sweep(&cfg)?;
            match &cfg.out_path {
                Some(p) => {
                    let f = File::create(p)
                        .with_context(|| format!("cannot create {}", p.display()))?;
                    write_csv(&records, BufWriter::new(f))?;
                }
                None => write_csv(&records, stdout.lock())?,
            }
            for s in summarize(&records) {
                eprintln!(
                    "l1={} l2={} rsnr_db={} median_mse={:e} failed={}",
                    cfg.l1, cfg.l2, s.rsnr_db, s.median_mse, s.failed
                );
            }
        }
        Command::Zeros(a) => {
            let x1 = parse_signal(&a.signals[0])?;
            let x2 = match a.signals.as_slice() {
                [_] => None,
                [_, b] => Some(parse_signal(b)?),
                _ => bail!("expected one or two --signal values"),
            };
            write!(stdout.lock(), "{}", cmd_zeros(&x1, x2.as_ref())?)?;
        }
        Command::Certify(a) => {
            let (x1, x2) = a.pair()?;
            write!(stdout.lock(), "{}", cmd_certify(&x1, &x2))?;
        }
        Command::Ambiguities(a) => {
            let (x1, x2) = a.pair()?;
            write!(stdout.lock(), "{}", cmd_ambiguities(&x1, &x2)?)?;
        }
        Command::Recover(a) => {
            let (x1, x2) = match a.signals.as_slice() {
                [] => {
                    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                    (gen_signal(a.l1, &mut rng), gen_signal(a.l2, &mut rng))
                }
                [p, q] => (parse_signal(p)?, parse_signal(q)?),
                _ => bail!("expected --signal twice or not at all"),
            };
            let snr_db = match &a.snr_db {
                Some(v) => *parse_snr_list(v)?.first().context("empty rSNR")?,
                None => f64::INFINITY,
            };
            let input = RecoverInput {
                x1,
                x2,
                snr_db,
                seed: a.seed,
                reduced: a.reduced,
                solver: a.solver.options(),
            };
            write!(stdout.lock(), "{}", cmd_recover(&input)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
