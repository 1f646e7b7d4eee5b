//! Secrecy outage analysis of cooperative relaying under quasi-static
//! Rayleigh fading.
//!
//! Four schemes are covered: modify-and-forward (MF), direct transmission
//! (DT), decode-and-forward (DF) and cooperative jamming (CJ). Each has an
//! instantaneous secrecy capacity ([`schemes`]), a closed-form outage
//! probability ([`analytic`]) and a seeded Monte Carlo estimate
//! ([`montecarlo`]). [`protocol`] models the reciprocity-keyed
//! modification at symbol level.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod protocol;
pub mod quadrature;
pub mod rng;
pub mod schemes;
pub mod specfun;
pub mod types;

pub use error::{Error, Result};
pub use schemes::Scheme;
pub use types::{db_to_linear, linear_to_db, ChannelDraw, OutageEstimate, SnrProfile, TargetRate};
