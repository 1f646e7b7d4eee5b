//! Seeded Monte Carlo estimation of `P(C_s < R)` over quasi-static Rayleigh
//! fading.
//!
//! Trial `i` under seed `s` always sees the same [`ChannelDraw`]; outage
//! counts are integers, so any partition of `0..n` into ranges, evaluated in
//! any order and summed, gives the same estimate.

use core::fmt;
use core::ops::{Add, AddAssign, Range};
use core::str::FromStr;

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{mix64, CounterStream, Domain};
use crate::schemes::Scheme;
use crate::types::{ChannelDraw, OutageEstimate, SnrProfile, TargetRate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub profile: SnrProfile,
    pub rate: TargetRate,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::NoTrials);
        }
        self.profile.validate()
    }
}

/// Five independent exponential SNRs for trial `trial_index`. Slot `k` of
/// the draw (sd, sr, rd, se, re order) is the `k`-th word of the trial's
/// keystream.
pub fn draw_channel(profile: &SnrProfile, trial_index: u64, seed: u64) -> ChannelDraw {
    let mut s = CounterStream::new(seed, Domain::Fading, trial_index);
    ChannelDraw {
        x_sd: s.exponential(profile.gamma_sd),
        x_sr: s.exponential(profile.gamma_sr),
        x_rd: s.exponential(profile.gamma_rd),
        x_se: s.exponential(profile.gamma_se),
        x_re: s.exponential(profile.gamma_re),
    }
}

/// Outage count of one scheme over a trial range.
pub fn count_outages(cfg: &McConfig, trials: Range<u64>) -> u64 {
    let r = cfg.rate.value();
    trials
        .filter(|&i| cfg.scheme.capacity(&draw_channel(&cfg.profile, i, cfg.seed)) < r)
        .count() as u64
}

pub fn estimate_outage(cfg: &McConfig) -> Result<OutageEstimate> {
    cfg.validate()?;
    let outages = count_outages(cfg, 0..cfg.n_trials);
    OutageEstimate::from_count(outages, cfg.n_trials, cfg.seed)
}

/// Outage counts of all four schemes on a shared draw stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SchemeCounts {
    pub mf: u64,
    pub dt: u64,
    pub df: u64,
    pub cj: u64,
}

impl SchemeCounts {
    pub fn get(&self, scheme: Scheme) -> u64 {
        match scheme {
            Scheme::Mf => self.mf,
            Scheme::Dt => self.dt,
            Scheme::Df => self.df,
            Scheme::Cj => self.cj,
        }
    }
}

impl Add for SchemeCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self { mf: self.mf + o.mf, dt: self.dt + o.dt, df: self.df + o.df, cj: self.cj + o.cj }
    }
}

impl AddAssign for SchemeCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Paired-draw counting: every scheme is evaluated on the same channel
/// realizations, so `df >= mf` holds exactly.
pub fn count_paired(profile: &SnrProfile, rate: TargetRate, seed: u64, trials: Range<u64>) -> SchemeCounts {
    let r = rate.value();
    let mut c = SchemeCounts::default();
    for i in trials {
        let d = draw_channel(profile, i, seed);
        c.mf += u64::from(crate::schemes::capacity_mf(&d) < r);
        c.dt += u64::from(crate::schemes::capacity_dt(&d) < r);
        c.df += u64::from(crate::schemes::capacity_df(&d) < r);
        c.cj += u64::from(crate::schemes::capacity_cj(&d) < r);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedEstimate {
    pub mf: OutageEstimate,
    pub dt: OutageEstimate,
    pub df: OutageEstimate,
    pub cj: OutageEstimate,
}

impl PairedEstimate {
    pub fn from_counts(c: &SchemeCounts, n_trials: u64, seed: u64) -> Result<Self> {
        Ok(Self {
            mf: OutageEstimate::from_count(c.mf, n_trials, seed)?,
            dt: OutageEstimate::from_count(c.dt, n_trials, seed)?,
            df: OutageEstimate::from_count(c.df, n_trials, seed)?,
            cj: OutageEstimate::from_count(c.cj, n_trials, seed)?,
        })
    }

    pub fn get(&self, scheme: Scheme) -> &OutageEstimate {
        match scheme {
            Scheme::Mf => &self.mf,
            Scheme::Dt => &self.dt,
            Scheme::Df => &self.df,
            Scheme::Cj => &self.cj,
        }
    }
}

pub fn estimate_paired(profile: &SnrProfile, rate: TargetRate, n_trials: u64, seed: u64) -> Result<PairedEstimate> {
    profile.validate()?;
    let c = count_paired(profile, rate, seed, 0..n_trials);
    PairedEstimate::from_counts(&c, n_trials, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    GammaSd,
    GammaSr,
    GammaRd,
    GammaSe,
    GammaRe,
    Rate,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 6] = [
        SweepParameter::GammaSd,
        SweepParameter::GammaSr,
        SweepParameter::GammaRd,
        SweepParameter::GammaSe,
        SweepParameter::GammaRe,
        SweepParameter::Rate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::GammaSd => "gamma_sd",
            SweepParameter::GammaSr => "gamma_sr",
            SweepParameter::GammaRd => "gamma_rd",
            SweepParameter::GammaSe => "gamma_se",
            SweepParameter::GammaRe => "gamma_re",
            SweepParameter::Rate => "rate",
        }
    }

    pub fn is_snr(self) -> bool {
        self != SweepParameter::Rate
    }

    /// Replaces the swept quantity (linear SNR or b/s/Hz) in a base point.
    pub fn apply(self, profile: &SnrProfile, rate: TargetRate, value: f64) -> Result<(SnrProfile, TargetRate)> {
        let mut p = *profile;
        let mut r = rate;
        match self {
            SweepParameter::GammaSd => p.gamma_sd = value,
            SweepParameter::GammaSr => p.gamma_sr = value,
            SweepParameter::GammaRd => p.gamma_rd = value,
            SweepParameter::GammaSe => p.gamma_se = value,
            SweepParameter::GammaRe => p.gamma_re = value,
            SweepParameter::Rate => r = TargetRate::new(value)?,
        }
        p.validate()?;
        Ok((p, r))
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownSweepParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    /// Values in linear SNR, or b/s/Hz for [`SweepParameter::Rate`].
    pub grid: Vec<f64>,
}

impl Sweep {
    pub fn new(parameter: SweepParameter, grid: Vec<f64>) -> Result<Self> {
        let ok = !grid.is_empty() && grid.iter().all(|v| v.is_finite()) && grid.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { parameter, grid })
    }

    pub fn parse(parameter: &str, grid: Vec<f64>) -> Result<Self> {
        Self::new(parameter.parse()?, grid)
    }
}

/// Seed of grid point `index`, derived from the run seed.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    mix64(seed ^ mix64(index as u64 + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<(f64, OutageEstimate)>,
}

/// Per-point configurations of a sweep, in grid order.
pub fn sweep_configs(cfg: &McConfig, sweep: &Sweep) -> Result<Vec<McConfig>> {
    sweep
        .grid
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (profile, rate) = sweep.parameter.apply(&cfg.profile, cfg.rate, v)?;
            Ok(McConfig { profile, rate, seed: point_seed(cfg.seed, i), ..*cfg })
        })
        .collect()
}

pub fn outage_curve_mc(cfg: &McConfig, sweep: &Sweep) -> Result<SweepResult> {
    cfg.validate()?;
    let rows = sweep_configs(cfg, sweep)?
        .iter()
        .zip(&sweep.grid)
        .map(|(c, &v)| estimate_outage(c).map(|e| (v, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { parameter: sweep.parameter, rows })
}
