//! Run specification: built-in defaults, then an optional JSON config,
//! then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mfsec_core::montecarlo::{Sweep, SweepParameter};
use mfsec_core::protocol::{ProtocolConfig, QuantizerConfig};
use mfsec_core::{Scheme, SnrProfile, TargetRate};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Point,
    Sweep,
    Fig2,
    Fig3,
    Fig4,
    Mc,
    Protocol,
    Validate,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Point,
        Command::Sweep,
        Command::Fig2,
        Command::Fig3,
        Command::Fig4,
        Command::Mc,
        Command::Protocol,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::Sweep => "sweep",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Mc => "mc",
            Command::Protocol => "protocol",
            Command::Validate => "validate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Parse(format!("unknown command `{s}`")))
    }
}

/// Fully resolved run. Serialized into the CSV provenance line, so fields
/// that do not affect the data (paths, worker count) are skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub command: Command,
    pub gamma_sd_db: f64,
    pub gamma_sr_db: f64,
    pub gamma_rd_db: f64,
    pub gamma_se_db: f64,
    pub gamma_re_db: f64,
    /// Target secrecy rate in b/s/Hz; nominal relay rate for `protocol`.
    pub rate: f64,
    pub sweep_var: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub scheme: String,
    pub block_len: usize,
    pub psk_order: u32,
    pub phase_levels: u32,
    pub magnitude_levels: u32,
    pub noiseless: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub report: Option<PathBuf>,
    #[serde(skip)]
    pub workers: usize,
}

/// Partial spec as read from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub command: Option<Command>,
    pub gamma_sd_db: Option<f64>,
    pub gamma_sr_db: Option<f64>,
    pub gamma_rd_db: Option<f64>,
    pub gamma_se_db: Option<f64>,
    pub gamma_re_db: Option<f64>,
    pub rate: Option<f64>,
    pub sweep_var: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub scheme: Option<String>,
    pub block_len: Option<usize>,
    pub psk_order: Option<u32>,
    pub phase_levels: Option<u32>,
    pub magnitude_levels: Option<u32>,
    pub noiseless: Option<bool>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

pub const DEFAULT_SEED: u64 = 20_130_601;

impl RunSpec {
    /// Defaults for `command`; the figure presets carry their caption profiles.
    pub fn defaults(command: Command) -> Self {
        let mut s = RunSpec {
            command,
            gamma_sd_db: 10.0,
            gamma_sr_db: 20.0,
            gamma_rd_db: 20.0,
            gamma_se_db: 10.0,
            gamma_re_db: 15.0,
            rate: 0.1,
            sweep_var: SweepParameter::GammaSe.name().into(),
            start: 0.0,
            stop: 20.0,
            step: 2.0,
            n_trials: 1_000_000,
            seed: DEFAULT_SEED,
            scheme: "mf".into(),
            block_len: 1024,
            psk_order: 2,
            phase_levels: 16,
            magnitude_levels: 4,
            noiseless: false,
            output: None,
            report: None,
            workers: 0,
        };
        match command {
            Command::Fig2 => {
                s.start = 0.0;
                s.stop = 20.0;
                s.step = 1.0;
            }
            Command::Fig3 => {
                s.sweep_var = SweepParameter::GammaSr.name().into();
                s.start = 0.0;
                s.stop = 30.0;
                s.step = 1.0;
            }
            Command::Fig4 => {
                s.sweep_var = SweepParameter::Rate.name().into();
                s.start = 0.1;
                s.stop = 2.0;
                s.step = 0.1;
            }
            Command::Protocol => s.n_trials = 1000,
            _ => {}
        }
        s
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = &o.$f { self.$f = v.clone(); })*};
        }
        take!(
            gamma_sd_db, gamma_sr_db, gamma_rd_db, gamma_se_db, gamma_re_db, rate, sweep_var, start, stop, step,
            n_trials, seed, scheme, block_len, psk_order, phase_levels, magnitude_levels, noiseless, workers
        );
        if o.output.is_some() {
            self.output.clone_from(&o.output);
        }
        if o.report.is_some() {
            self.report.clone_from(&o.report);
        }
    }

    /// `command` from flags wins over the config file's.
    pub fn resolve(command: Option<Command>, config: Option<&Overrides>, flags: &Overrides) -> Result<Self> {
        let command = command
            .or(flags.command)
            .or(config.and_then(|c| c.command))
            .ok_or_else(|| CliError::Parse("no command given".into()))?;
        let mut spec = RunSpec::defaults(command);
        if let Some(c) = config {
            spec.apply(c);
        }
        spec.apply(flags);
        spec.validate()?;
        Ok(spec)
    }

    pub fn profile(&self) -> Result<SnrProfile> {
        Ok(SnrProfile::from_db(
            self.gamma_sd_db,
            self.gamma_sr_db,
            self.gamma_rd_db,
            self.gamma_se_db,
            self.gamma_re_db,
        )?)
    }

    pub fn target_rate(&self) -> Result<TargetRate> {
        Ok(TargetRate::new(self.rate)?)
    }

    pub fn sweep_parameter(&self) -> Result<SweepParameter> {
        Ok(self.sweep_var.parse()?)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        Ok(self.scheme.parse()?)
    }

    /// Grid values in interface units (dB for SNRs, b/s/Hz for the rate).
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::Invalid("sweep range must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(CliError::Invalid(format!("step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(CliError::Invalid(format!("empty range [{}, {}]", self.start, self.stop)));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }

    /// Sweep in core units (linear SNR).
    pub fn sweep(&self) -> Result<Sweep> {
        let parameter = self.sweep_parameter()?;
        let grid = self.grid()?;
        let grid = if parameter.is_snr() {
            grid.into_iter().map(mfsec_core::db_to_linear).collect()
        } else {
            grid
        };
        Ok(Sweep::new(parameter, grid)?)
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            quantizer: QuantizerConfig {
                phase_levels: self.phase_levels,
                magnitude_levels: self.magnitude_levels,
                ..QuantizerConfig::default()
            },
            block_len: self.block_len,
            psk_order: self.psk_order,
            nominal_rate: self.rate,
            noiseless: self.noiseless,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile()?;
        self.target_rate()?;
        if self.n_trials == 0 {
            return Err(CliError::Invalid("n_trials must be at least 1".into()));
        }
        match self.command {
            Command::Sweep | Command::Fig2 | Command::Fig3 | Command::Fig4 => {
                let parameter = self.sweep_parameter()?;
                let grid = self.grid()?;
                if parameter.is_snr() {
                    if let Some(&bad) = grid.iter().find(|v| !mfsec_core::db_to_linear(**v).is_normal()) {
                        return Err(CliError::Invalid(format!("{parameter} = {bad} dB is not a usable SNR")));
                    }
                }
                self.sweep()?;
            }
            Command::Mc => {
                if self.scheme != "all" {
                    self.scheme()?;
                }
            }
            Command::Protocol => {
                if self.block_len == 0 {
                    return Err(CliError::Invalid("block_len must be at least 1".into()));
                }
                self.protocol_config().quantizer.validate()?;
                mfsec_core::protocol::Psk::new(self.psk_order, 1.0)?;
            }
            Command::Point | Command::Validate => {}
        }
        Ok(())
    }

    pub fn provenance(&self) -> String {
        format!("# mfsec {}", serde_json::to_string(self).expect("spec serializes"))
    }
}
