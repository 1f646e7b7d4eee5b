//! Argument parsing for the `mfsec` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{Command, Overrides, RunSpec};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "mfsec", version, about = "Secrecy outage of relay security schemes: closed forms, Monte Carlo, protocol demo")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Analytic and Monte Carlo outage of all schemes at one operating point
    Point(Flags),
    /// Sweep one SNR (dB) or the rate over start:step:stop
    Sweep(Flags),
    /// Outage vs eavesdropper SNR gamma_se, R = 0.1
    Fig2(Flags),
    /// Outage vs source-relay SNR gamma_sr, R = 0.1
    Fig3(Flags),
    /// Outage vs target secrecy rate R
    Fig4(Flags),
    /// Monte Carlo estimate for one scheme (or `all`)
    Mc(Flags),
    /// Per-trial BER of the channel-keyed modification protocol
    Protocol(Flags),
    /// Cross-check closed forms against Monte Carlo and write a report
    Validate(Flags),
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// JSON file with any RunSpec fields; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_sd_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_sr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_rd_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_se_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_re_db: Option<f64>,
    /// Target secrecy rate in b/s/Hz (relay decoding rate for `protocol`)
    #[arg(long, allow_hyphen_values = true)]
    pub rate: Option<f64>,
    /// gamma_sd, gamma_sr, gamma_rd, gamma_se, gamma_re or rate
    #[arg(long)]
    pub sweep_var: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub step: Option<f64>,
    /// Monte Carlo trials per point (protocol: number of blocks)
    #[arg(long = "trials", short = 'n')]
    pub n_trials: Option<u64>,
    #[arg(long, short = 's')]
    pub seed: Option<u64>,
    /// mf, dt, df, cj or all
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub block_len: Option<usize>,
    #[arg(long)]
    pub psk_order: Option<u32>,
    #[arg(long)]
    pub phase_levels: Option<u32>,
    #[arg(long)]
    pub magnitude_levels: Option<u32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub noiseless: Option<bool>,
    /// CSV destination; stdout when omitted
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Markdown report destination for `validate`
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Worker threads, 0 for all cores; never changes the output
    #[arg(long, short = 'j')]
    pub workers: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            command: None,
            gamma_sd_db: self.gamma_sd_db,
            gamma_sr_db: self.gamma_sr_db,
            gamma_rd_db: self.gamma_rd_db,
            gamma_se_db: self.gamma_se_db,
            gamma_re_db: self.gamma_re_db,
            rate: self.rate,
            sweep_var: self.sweep_var.clone(),
            start: self.start,
            stop: self.stop,
            step: self.step,
            n_trials: self.n_trials,
            seed: self.seed,
            scheme: self.scheme.clone(),
            block_len: self.block_len,
            psk_order: self.psk_order,
            phase_levels: self.phase_levels,
            magnitude_levels: self.magnitude_levels,
            noiseless: self.noiseless,
            output: self.output.clone(),
            report: self.report.clone(),
            workers: self.workers,
        }
    }
}

impl CliCommand {
    fn split(&self) -> (Command, &Flags) {
        match self {
            CliCommand::Point(f) => (Command::Point, f),
            CliCommand::Sweep(f) => (Command::Sweep, f),
            CliCommand::Fig2(f) => (Command::Fig2, f),
            CliCommand::Fig3(f) => (Command::Fig3, f),
            CliCommand::Fig4(f) => (Command::Fig4, f),
            CliCommand::Mc(f) => (Command::Mc, f),
            CliCommand::Protocol(f) => (Command::Protocol, f),
            CliCommand::Validate(f) => (Command::Validate, f),
        }
    }
}

pub fn resolve(cli: &Cli) -> Result<RunSpec> {
    let (command, flags) = cli.command.split();
    let config = flags.config.as_deref().map(Overrides::from_file).transpose()?;
    RunSpec::resolve(Some(command), config.as_ref(), &flags.overrides())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match resolve(&cli).and_then(|spec| commands::run(&spec)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mfsec: {e}");
            e.exit_code()
        }
    }
}

