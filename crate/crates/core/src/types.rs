//! Shared domain types: average SNR profiles, target rates, fading draws and
//! Monte Carlo estimates. All SNRs are linear; dB only exists at the edges.

use crate::error::{Error, Result};

/// Relative gap below which two average SNRs are treated as coincident.
pub(crate) const DEGENERATE_GAP: f64 = 1e-6;

/// `10^(x_db / 10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    libm::pow(10.0, x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Average SNRs `E[|h_ij|^2] P / sigma_n^2` of the five links, linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrProfile {
    pub gamma_sd: f64,
    pub gamma_sr: f64,
    pub gamma_rd: f64,
    pub gamma_se: f64,
    pub gamma_re: f64,
}

impl SnrProfile {
    pub fn new(gamma_sd: f64, gamma_sr: f64, gamma_rd: f64, gamma_se: f64, gamma_re: f64) -> Result<Self> {
        let p = Self { gamma_sd, gamma_sr, gamma_rd, gamma_se, gamma_re };
        p.validate()?;
        Ok(p)
    }

    pub fn from_db(sd_db: f64, sr_db: f64, rd_db: f64, se_db: f64, re_db: f64) -> Result<Self> {
        Self::new(
            db_to_linear(sd_db),
            db_to_linear(sr_db),
            db_to_linear(rd_db),
            db_to_linear(se_db),
            db_to_linear(re_db),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in self.fields() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidProfile { field, value });
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("gamma_sd", self.gamma_sd),
            ("gamma_sr", self.gamma_sr),
            ("gamma_rd", self.gamma_rd),
            ("gamma_se", self.gamma_se),
            ("gamma_re", self.gamma_re),
        ]
    }

    /// Nudges `gamma_sd` by a relative 1e-6 when it (nearly) coincides with
    /// `gamma_rd`, which is a removable singularity of the hypoexponential
    /// density of `x_sd + x_rd`.
    pub fn separate_sd_rd(mut self) -> Self {
        if (self.gamma_rd - self.gamma_sd).abs() < DEGENERATE_GAP * self.gamma_sd {
            self.gamma_sd *= 1.0 + DEGENERATE_GAP;
        }
        self
    }

    /// Same rule for the two eavesdropper links, used where `x_se + x_re`
    /// appears.
    pub fn separate_se_re(mut self) -> Self {
        if (self.gamma_re - self.gamma_se).abs() < DEGENERATE_GAP * self.gamma_se {
            self.gamma_se *= 1.0 + DEGENERATE_GAP;
        }
        self
    }
}

/// Target secrecy rate in b/s/Hz.
///
/// Zero is accepted: closed forms then return `P(C_d < C_e)` while the
/// empirical estimator of `P(C_s < 0)` is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TargetRate(f64);

impl TargetRate {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r >= 0.0 {
            Ok(Self(r))
        } else {
            Err(Error::InvalidRate(r))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// One quasi-static fading realization: the instantaneous SNRs
/// `|h_ij|^2 P / sigma_n^2` of the five links.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelDraw {
    pub x_sd: f64,
    pub x_sr: f64,
    pub x_rd: f64,
    pub x_se: f64,
    pub x_re: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub std_err: f64,
    pub n_trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_count(outages: u64, n_trials: u64, seed: u64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::NoTrials);
        }
        let n = n_trials as f64;
        let p_hat = outages as f64 / n;
        let std_err = libm::sqrt(p_hat * (1.0 - p_hat) / n);
        Ok(Self { p_hat, std_err, n_trials, seed })
    }
}
