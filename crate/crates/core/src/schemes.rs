//! Instantaneous secrecy capacity of each relaying scheme for a single
//! fading realization. These are the ground truth the Monte Carlo
//! estimator counts against.

use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::error::Error;
use crate::types::ChannelDraw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Modify-and-forward.
    Mf,
    /// Direct transmission at power 2P.
    Dt,
    /// Decode-and-forward, relay repeats the source codeword.
    Df,
    /// Cooperative jamming by the relay.
    Cj,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Mf, Scheme::Dt, Scheme::Df, Scheme::Cj];

    pub fn capacity(self, d: &ChannelDraw) -> f64 {
        match self {
            Scheme::Mf => capacity_mf(d),
            Scheme::Dt => capacity_dt(d),
            Scheme::Df => capacity_df(d),
            Scheme::Cj => capacity_cj(d),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mf => "mf",
            Scheme::Dt => "dt",
            Scheme::Df => "df",
            Scheme::Cj => "cj",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mf" => Ok(Scheme::Mf),
            "dt" => Ok(Scheme::Dt),
            "df" => Ok(Scheme::Df),
            "cj" => Ok(Scheme::Cj),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

#[inline]
fn half_log2_1p(x: f64) -> f64 {
    0.5 * libm::log2(1.0 + x)
}

/// Rate at which both relay and destination decode the source: the
/// source-relay hop and the combined two-phase link, each over two slots.
#[inline]
fn two_phase_rate(d: &ChannelDraw) -> f64 {
    half_log2_1p(d.x_sr).min(half_log2_1p(d.x_sd + d.x_rd))
}

/// Eavesdropper only uses the source phase; the modified relay block
/// carries nothing it can use.
pub fn capacity_mf(d: &ChannelDraw) -> f64 {
    (two_phase_rate(d) - half_log2_1p(d.x_se)).max(0.0)
}

/// Single phase with the whole 2P budget at the source.
pub fn capacity_dt(d: &ChannelDraw) -> f64 {
    (libm::log2(1.0 + 2.0 * d.x_sd) - libm::log2(1.0 + 2.0 * d.x_se)).max(0.0)
}

/// Eavesdropper combines both phases (maximal ratio) because the relay
/// resends the source codeword.
pub fn capacity_df(d: &ChannelDraw) -> f64 {
    (two_phase_rate(d) - half_log2_1p(d.x_se + d.x_re)).max(0.0)
}

/// Relay noise lands on D and E as interference with SNRs `x_rd`, `x_re`.
pub fn capacity_cj(d: &ChannelDraw) -> f64 {
    (half_log2_1p(d.x_sd / (1.0 + d.x_rd)) - half_log2_1p(d.x_se / (1.0 + d.x_re))).max(0.0)
}
