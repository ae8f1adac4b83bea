//! Experiment runner and inspection commands built on [`corrlift`].
//!
//! [`run_sweep`] reproduces the noisy recovery protocol and writes one CSV
//! row per trial. The `cmd_*` functions render zero tables, certificate
//! reports and ambiguity classes as plain text.

mod commands;
mod parse;
mod sweep;

pub use commands::{
    cmd_ambiguities, cmd_certify, cmd_recover, cmd_zeros, parse_report, RecoverInput,
};
pub use parse::{format_complex, format_signal, parse_complex, parse_signal, parse_snr_list};
pub use sweep::{
    gen_signal, read_csv, run_sweep, summarize, trial_seed, write_csv, ExperimentConfig,
    SnrSummary, TrialRecord, CSV_HEADER,
};
