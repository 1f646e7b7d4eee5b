//! Symbol-level model of modify-and-forward.
//!
//! Relay and destination quantize their (reciprocal) estimate of `h_rd` into
//! a [`ModificationKey`], expand it into per-symbol phase rotations, and the
//! relay forwards the rotated block `x'_k = x_k e^{j theta_k}`. The
//! destination undoes the rotation on its received samples, after which the
//! relay phase looks like `h_rd x + n`. An eavesdropper without the key sees
//! a phase-scrambled block.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::{Add, AddAssign, Range};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{CounterStream, Domain};
use crate::types::SnrProfile;

/// Complex channel coefficient as estimated at one end of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexChannelState(pub Complex64);

impl ComplexChannelState {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerConfig {
    pub phase_levels: u32,
    pub magnitude_levels: u32,
    /// `E[|h|^2]`; magnitude bins are equiprobable under Rayleigh fading
    /// with this mean power.
    pub mean_power: f64,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        Self { phase_levels: 16, magnitude_levels: 4, mean_power: 1.0 }
    }
}

impl QuantizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.phase_levels < 2 || !self.phase_levels.is_power_of_two() {
            return Err(Error::InvalidQuantizer("phase_levels must be a power of two, at least 2"));
        }
        if self.magnitude_levels == 0 || !self.magnitude_levels.is_power_of_two() {
            return Err(Error::InvalidQuantizer("magnitude_levels must be a power of two"));
        }
        if self.phase_levels.trailing_zeros() + self.magnitude_levels.trailing_zeros() > 64 {
            return Err(Error::InvalidQuantizer("key longer than 64 bits"));
        }
        if !(self.mean_power.is_finite() && self.mean_power > 0.0) {
            return Err(Error::InvalidQuantizer("mean_power must be positive and finite"));
        }
        Ok(())
    }

    pub fn key_len(&self) -> u32 {
        self.phase_levels.trailing_zeros() + self.magnitude_levels.trailing_zeros()
    }
}

/// Shared secret bits, most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModificationKey {
    value: u64,
    len: u32,
}

impl ModificationKey {
    pub fn new(value: u64, len: u32) -> Self {
        let mask = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
        Self { value: value & mask, len }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).rev().map(move |i| (self.value >> i) & 1 == 1)
    }

    pub fn to_bit_string(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Copy with bit `i` (counted from the most significant end) flipped.
    pub fn with_flipped_bit(&self, i: u32) -> Self {
        Self::new(self.value ^ (1u64 << (self.len - 1 - i)), self.len)
    }
}

/// Phase bin `floor(P (arg h + pi) / 2pi) mod P`, then an equiprobable
/// magnitude bin; packed phase first.
pub fn quantize_channel(h: &ComplexChannelState, q: &QuantizerConfig) -> Result<ModificationKey> {
    q.validate()?;
    let power = h.0.norm_sqr();
    if !power.is_finite() || power <= 0.0 {
        return Err(Error::UnusableKey);
    }
    let levels = q.phase_levels as f64;
    let phase_bin = (libm::floor(levels * (h.0.arg() + PI) / TAU) as u64) % q.phase_levels as u64;
    let mag_levels = q.magnitude_levels as u64;
    let cdf = 1.0 - libm::exp(-power / q.mean_power);
    let mag_bin = ((libm::floor(cdf * mag_levels as f64)) as u64).min(mag_levels - 1);
    let mag_bits = q.magnitude_levels.trailing_zeros();
    Ok(ModificationKey::new((phase_bin << mag_bits) | mag_bin, q.key_len()))
}

/// Expands a key into `n` phase rotations in `[0, 2pi)`.
pub fn derive_modification(key: &ModificationKey, n: usize) -> Vec<f64> {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&key.value.to_le_bytes());
    seed[8..12].copy_from_slice(&key.len.to_le_bytes());
    seed[16..24].copy_from_slice(&(Domain::Modification as u64).to_le_bytes());
    let mut s = CounterStream::from_key(seed, 0);
    (0..n).map(|_| TAU * s.uniform()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub symbols: Vec<Complex64>,
    /// Per-symbol power P.
    pub power: f64,
}

impl SymbolBlock {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn average_power(&self) -> f64 {
        if self.symbols.is_empty() {
            return 0.0;
        }
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.symbols.len() as f64
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// `x'_k = x_k e^{j theta_k}`.
pub fn relay_modify(x: &SymbolBlock, rotations: &[f64]) -> Result<SymbolBlock> {
    check_len(x.len(), rotations.len())?;
    let symbols = x
        .symbols
        .iter()
        .zip(rotations)
        .map(|(s, &theta)| s * Complex64::cis(theta))
        .collect();
    Ok(SymbolBlock { symbols, power: x.power })
}

/// De-rotates the relay-phase samples: `y_k e^{-j theta_k}`. With the
/// matching key this leaves `h_rd x_k` plus rotated (still circular white)
/// noise.
pub fn destination_restore(y_rd: &[Complex64], rotations: &[f64]) -> Result<Vec<Complex64>> {
    check_len(y_rd.len(), rotations.len())?;
    Ok(y_rd.iter().zip(rotations).map(|(y, &theta)| y * Complex64::cis(-theta)).collect())
}

/// Gray-labelled M-PSK with points `sqrt(P) e^{j 2 pi k / M}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psk {
    order: u32,
    power: f64,
}

impl Psk {
    pub fn new(order: u32, power: f64) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::InvalidConstellation(order));
        }
        Ok(Self { order, power })
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    fn point(&self, index: u32) -> Complex64 {
        Complex64::from_polar(libm::sqrt(self.power), TAU * index as f64 / self.order as f64)
    }

    /// Maps `bits` (length a multiple of `bits_per_symbol`) onto symbols.
    pub fn modulate(&self, bits: &[bool]) -> SymbolBlock {
        let m = self.bits_per_symbol();
        let symbols = bits
            .chunks(m)
            .map(|chunk| {
                let label = chunk.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
                self.point(gray_decode(label))
            })
            .collect();
        SymbolBlock { symbols, power: self.power }
    }

    /// Nearest-phase hard decisions on equalized samples.
    pub fn detect(&self, samples: &[Complex64]) -> Vec<bool> {
        let m = self.bits_per_symbol();
        let order = self.order as f64;
        let mut out = Vec::with_capacity(samples.len() * m);
        for z in samples {
            let sector = libm::round(z.arg() * order / TAU) as i64;
            let index = sector.rem_euclid(self.order as i64) as u32;
            let label = index ^ (index >> 1);
            out.extend((0..m).rev().map(|i| (label >> i) & 1 == 1));
        }
        out
    }
}

fn gray_decode(mut g: u32) -> u32 {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

pub fn count_bit_errors(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Plug-in estimate of `I(X; Y)` in bits between two binary sequences.
pub fn bit_mutual_information(tx: &[bool], rx: &[bool]) -> f64 {
    let n = tx.len().min(rx.len());
    if n == 0 {
        return 0.0;
    }
    let mut joint = [[0u64; 2]; 2];
    for (&a, &b) in tx.iter().zip(rx) {
        joint[usize::from(a)][usize::from(b)] += 1;
    }
    let n = n as f64;
    let px = [(joint[0][0] + joint[0][1]) as f64 / n, (joint[1][0] + joint[1][1]) as f64 / n];
    let py = [(joint[0][0] + joint[1][0]) as f64 / n, (joint[0][1] + joint[1][1]) as f64 / n];
    let mut mi = 0.0;
    for (a, row) in joint.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                let pxy = c as f64 / n;
                mi += pxy * libm::log2(pxy / (px[a] * py[b]));
            }
        }
    }
    mi.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub quantizer: QuantizerConfig,
    pub block_len: usize,
    pub psk_order: u32,
    /// Rate (b/s/Hz) the relay must support to decode; it participates only
    /// when `log2(1 + x_sr) / 2` exceeds it.
    pub nominal_rate: f64,
    pub noiseless: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            quantizer: QuantizerConfig::default(),
            block_len: 1024,
            psk_order: 2,
            nominal_rate: 0.1,
            noiseless: false,
        }
    }
}

/// Everything observed in one trial, bit vectors included.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub relay_failure: bool,
    pub key: ModificationKey,
    pub tx_bits: Vec<bool>,
    /// Destination decisions on the restored relay block.
    pub destination_bits: Vec<bool>,
    /// Decisions on `h_rd x + n e^{-j theta}` without any modification: the
    /// same noise realization the restored block carries.
    pub unmodified_bits: Vec<bool>,
    /// Eavesdropper decisions on the relay block (no key).
    pub eavesdropper_bits: Vec<bool>,
    /// Eavesdropper decisions on the source phase.
    pub eavesdropper_source_bits: Vec<bool>,
}

fn complex_gaussian(s: &mut CounterStream, variance: f64) -> Complex64 {
    let (a, b) = s.normal_pair();
    Complex64::new(a, b) * libm::sqrt(variance / 2.0)
}

/// Simulates both phases of one block. Channel coefficients are circular
/// Gaussian with `E|h_ij|^2 = gamma_ij`; noise has unit variance and P = 1.
pub fn trace_protocol_trial(profile: &SnrProfile, cfg: &ProtocolConfig, seed: u64, trial_index: u64) -> Result<TrialTrace> {
    profile.validate()?;
    cfg.quantizer.validate()?;
    let psk = Psk::new(cfg.psk_order, 1.0)?;
    let mut s = CounterStream::new(seed, Domain::Protocol, trial_index);

    // h_sd is drawn to fix the stream layout; the destination decodes the
    // relay block only
    let _h_sd = complex_gaussian(&mut s, profile.gamma_sd);
    let h_sr = complex_gaussian(&mut s, profile.gamma_sr);
    let h_rd = ComplexChannelState(complex_gaussian(&mut s, profile.gamma_rd));
    let h_se = complex_gaussian(&mut s, profile.gamma_se);
    let h_re = complex_gaussian(&mut s, profile.gamma_re);

    let n_bits = cfg.block_len * psk.bits_per_symbol();
    let mut tx_bits = Vec::with_capacity(n_bits);
    while tx_bits.len() < n_bits {
        let word = s.next_u64();
        let take = (n_bits - tx_bits.len()).min(64);
        tx_bits.extend((0..take).map(|i| (word >> i) & 1 == 1));
    }
    let x = psk.modulate(&tx_bits);
    let noise_var = if cfg.noiseless { 0.0 } else { 1.0 };
    let mut noise = |len: usize| -> Vec<Complex64> { (0..len).map(|_| complex_gaussian(&mut s, noise_var)).collect() };

    // phase 1: the eavesdropper listens to the source
    let n_se = noise(x.len());
    let y_se: Vec<Complex64> = x.symbols.iter().zip(&n_se).map(|(xs, n)| h_se * xs + n).collect();
    let eavesdropper_source_bits = psk.detect(&equalize(&y_se, h_se));

    let key = quantize_channel(&h_rd, &cfg.quantizer)?;
    let relay_failure = 0.5 * libm::log2(1.0 + h_sr.norm_sqr()) <= cfg.nominal_rate;
    if relay_failure {
        return Ok(TrialTrace {
            relay_failure,
            key,
            tx_bits,
            destination_bits: Vec::new(),
            unmodified_bits: Vec::new(),
            eavesdropper_bits: Vec::new(),
            eavesdropper_source_bits,
        });
    }

    // phase 2: relay forwards the modified block
    let rotations = derive_modification(&key, x.len());
    let x_mod = relay_modify(&x, &rotations)?;
    let n_rd = noise(x.len());
    let n_re = noise(x.len());
    let y_rd: Vec<Complex64> = x_mod.symbols.iter().zip(&n_rd).map(|(xs, n)| h_rd.0 * xs + n).collect();
    let y_re: Vec<Complex64> = x_mod.symbols.iter().zip(&n_re).map(|(xs, n)| h_re * xs + n).collect();

    // destination derives the same key from its own estimate of h_rd
    let dest_key = quantize_channel(&h_rd, &cfg.quantizer)?;
    let dest_rotations = derive_modification(&dest_key, x.len());
    let restored = destination_restore(&y_rd, &dest_rotations)?;
    let destination_bits = psk.detect(&equalize(&restored, h_rd.0));

    let reference: Vec<Complex64> = x
        .symbols
        .iter()
        .zip(&n_rd)
        .zip(&dest_rotations)
        .map(|((xs, n), &theta)| h_rd.0 * xs + n * Complex64::cis(-theta))
        .collect();
    let unmodified_bits = psk.detect(&equalize(&reference, h_rd.0));

    let eavesdropper_bits = psk.detect(&equalize(&y_re, h_re));

    Ok(TrialTrace {
        relay_failure,
        key,
        tx_bits,
        destination_bits,
        unmodified_bits,
        eavesdropper_bits,
        eavesdropper_source_bits,
    })
}

fn equalize(y: &[Complex64], h: Complex64) -> Vec<Complex64> {
    let c = h.conj();
    y.iter().map(|v| v * c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialOutcome {
    /// `log2(1 + x_sr)/2` did not exceed the nominal rate; the relay stays
    /// silent and the trial carries no relay-phase statistics.
    RelayFailure,
    Completed { destination_ber: f64, eavesdropper_ber: f64, eavesdropper_source_ber: f64 },
}

fn ratio(errors: u64, bits: usize) -> f64 {
    if bits == 0 {
        0.0
    } else {
        errors as f64 / bits as f64
    }
}

pub fn run_protocol_trial(profile: &SnrProfile, cfg: &ProtocolConfig, seed: u64, trial_index: u64) -> Result<TrialOutcome> {
    let t = trace_protocol_trial(profile, cfg, seed, trial_index)?;
    if t.relay_failure {
        return Ok(TrialOutcome::RelayFailure);
    }
    let n = t.tx_bits.len();
    Ok(TrialOutcome::Completed {
        destination_ber: ratio(count_bit_errors(&t.tx_bits, &t.destination_bits), n),
        eavesdropper_ber: ratio(count_bit_errors(&t.tx_bits, &t.eavesdropper_bits), n),
        eavesdropper_source_ber: ratio(count_bit_errors(&t.tx_bits, &t.eavesdropper_source_bits), n),
    })
}

/// Integer tallies over many trials; sums are order independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProtocolTally {
    pub trials: u64,
    pub relay_failures: u64,
    /// Bits sent in trials where the relay participated.
    pub relay_bits: u64,
    pub destination_errors: u64,
    pub eavesdropper_errors: u64,
    pub source_bits: u64,
    pub eavesdropper_source_errors: u64,
}

impl ProtocolTally {
    pub fn destination_ber(&self) -> f64 {
        ratio(self.destination_errors, self.relay_bits as usize)
    }

    pub fn eavesdropper_ber(&self) -> f64 {
        ratio(self.eavesdropper_errors, self.relay_bits as usize)
    }

    pub fn eavesdropper_source_ber(&self) -> f64 {
        ratio(self.eavesdropper_source_errors, self.source_bits as usize)
    }

    pub fn relay_failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.relay_failures as f64 / self.trials as f64
        }
    }
}

impl Add for ProtocolTally {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            relay_failures: self.relay_failures + o.relay_failures,
            relay_bits: self.relay_bits + o.relay_bits,
            destination_errors: self.destination_errors + o.destination_errors,
            eavesdropper_errors: self.eavesdropper_errors + o.eavesdropper_errors,
            source_bits: self.source_bits + o.source_bits,
            eavesdropper_source_errors: self.eavesdropper_source_errors + o.eavesdropper_source_errors,
        }
    }
}

impl AddAssign for ProtocolTally {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

pub fn tally_trial(t: &TrialTrace) -> ProtocolTally {
    let n = t.tx_bits.len() as u64;
    let mut tally = ProtocolTally {
        trials: 1,
        source_bits: n,
        eavesdropper_source_errors: count_bit_errors(&t.tx_bits, &t.eavesdropper_source_bits),
        ..ProtocolTally::default()
    };
    if t.relay_failure {
        tally.relay_failures = 1;
    } else {
        tally.relay_bits = n;
        tally.destination_errors = count_bit_errors(&t.tx_bits, &t.destination_bits);
        tally.eavesdropper_errors = count_bit_errors(&t.tx_bits, &t.eavesdropper_bits);
    }
    tally
}

pub fn tally_trials(profile: &SnrProfile, cfg: &ProtocolConfig, seed: u64, trials: Range<u64>) -> Result<ProtocolTally> {
    let mut total = ProtocolTally::default();
    for i in trials {
        total += tally_trial(&trace_protocol_trial(profile, cfg, seed, i)?);
    }
    Ok(total)
}
