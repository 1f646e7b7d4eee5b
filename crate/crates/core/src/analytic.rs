//! Closed-form secrecy outage probabilities and the quadrature oracles used
//! to check them.
//!
//! The closed forms are evaluated exactly as published, including two
//! variants where the published expression is suspect:
//!
//! * DF: the exponent of the helper `a(x)` reads `-(2^{-2R} - 1)/x`, which is
//!   positive for `R > 0`. [`DfVariant::Corrected`] uses `-(2^{2R} - 1)/x`.
//! * CJ: the prefactor reads `2^{-kappa}`. [`CjVariant::Corrected`] uses
//!   `e^{-kappa}`.
//!
//! Monte Carlo decides which variant describes the capacity model; see the
//! validation command of the CLI.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_exp_tail, QuadOptions};
use crate::specfun::omega;
use crate::types::{SnrProfile, TargetRate};

/// Round-off allowance before a closed form is declared inconsistent.
pub const CLAMP_TOL: f64 = 1e-12;
/// Looser allowance for the DF expression.
pub const DF_CLAMP_TOL: f64 = 1e-9;
/// Absolute tolerance of the quadrature oracles.
pub const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DfVariant {
    AsPrinted,
    Corrected,
}

impl DfVariant {
    pub const ALL: [DfVariant; 2] = [DfVariant::AsPrinted, DfVariant::Corrected];

    pub fn name(self) -> &'static str {
        match self {
            DfVariant::AsPrinted => "as_printed",
            DfVariant::Corrected => "corrected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CjVariant {
    AsPrinted,
    Corrected,
}

impl CjVariant {
    pub const ALL: [CjVariant; 2] = [CjVariant::AsPrinted, CjVariant::Corrected];

    pub fn name(self) -> &'static str {
        match self {
            CjVariant::AsPrinted => "as_printed",
            CjVariant::Corrected => "corrected",
        }
    }
}

fn finish(scheme: &'static str, value: f64, tol: f64) -> Result<f64> {
    if !value.is_finite() || value < -tol || value > 1.0 + tol {
        return Err(Error::FormulaInconsistency { scheme, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn validated(p: &SnrProfile) -> Result<()> {
    p.validate()
}

/// Density of `X = x_sd + x_rd` (sum of two independent exponentials).
pub fn density_x(x: f64, p: &SnrProfile) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let p = p.separate_sd_rd();
    (libm::exp(-x / p.gamma_rd) - libm::exp(-x / p.gamma_sd)) / (p.gamma_rd - p.gamma_sd)
}

/// `P(X > x)` for the same hypoexponential variable.
fn survival_x(x: f64, p: &SnrProfile) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    (p.gamma_rd * libm::exp(-x / p.gamma_rd) - p.gamma_sd * libm::exp(-x / p.gamma_sd)) / (p.gamma_rd - p.gamma_sd)
}

/// Modify-and-forward secrecy outage probability, closed form.
pub fn outage_mf(p: &SnrProfile, r: TargetRate) -> Result<f64> {
    validated(p)?;
    let p = p.separate_sd_rd();
    let (sd, sr, rd, se) = (p.gamma_sd, p.gamma_sr, p.gamma_rd, p.gamma_se);
    let r = r.value();
    let threshold = libm::exp2(2.0 * r) - 1.0;
    let scaled_eve = libm::exp2(-2.0 * r) / se;

    let branch = |g: f64| {
        let rate = 1.0 / sr + 1.0 / g;
        (1.0 + g / sr) * libm::exp(-threshold * rate) * (1.0 / rate - 1.0 / (scaled_eve + rate))
    };
    let value = 1.0 - branch(rd) / (rd - sd) + branch(sd) / (rd - sd);
    finish("MF", value, CLAMP_TOL)
}

/// Modify-and-forward outage by direct numerical integration of
/// `P(2^{-2R}(1 + min(X, Z)) - 1 < Y)`, split on which of X, Z is smaller and
/// on whether the threshold is below zero.
///
/// The tail of the X density is integrated numerically as well, so the only
/// closed-form ingredients are the three densities themselves.
pub fn outage_mf_quadrature(p: &SnrProfile, r: TargetRate) -> Result<f64> {
    validated(p)?;
    let p = p.separate_sd_rd();
    let (sd, sr, rd, se) = (p.gamma_sd, p.gamma_sr, p.gamma_rd, p.gamma_se);
    let r = r.value();
    let threshold = libm::exp2(2.0 * r) - 1.0;
    let q = libm::exp2(-2.0 * r);

    let f_x = |x: f64| density_x(x, &p);
    let f_z = |z: f64| libm::exp(-z / sr) / sr;
    let tail_y = |y: f64| if y <= 0.0 { 1.0 } else { libm::exp(-y / se) };
    let tail_z = |z: f64| libm::exp(-z / sr);
    let x_scale = sd.max(rd);
    let inner = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-9, max_intervals: 2000 };
    let tail_x = |z: f64| {
        integrate_exp_tail(f_x, z, f64::INFINITY, x_scale, &inner)
            .map(|res| res.value)
            .unwrap_or(f64::NAN)
    };

    let opts = QuadOptions::absolute(QUAD_TOL / 4.0);
    // decay lengths: slowest exponential present in each integrand
    let head_scale = 1.0 / (1.0 / x_scale + 1.0 / sr);
    let tail_scale = 1.0 / (1.0 / x_scale + 1.0 / sr + q / se);

    // Z > X = x
    let t1 = integrate_exp_tail(|x| f_x(x) * tail_z(x), 0.0, threshold, head_scale, &opts)?;
    let t2 = integrate_exp_tail(
        |x| f_x(x) * tail_y(q * (1.0 + x) - 1.0) * tail_z(x),
        threshold,
        f64::INFINITY,
        tail_scale,
        &opts,
    )?;
    // X > Z = z
    let t3 = integrate_exp_tail(|z| f_z(z) * tail_x(z), 0.0, threshold, head_scale, &opts)?;
    let t4 = integrate_exp_tail(
        |z| f_z(z) * tail_y(q * (1.0 + z) - 1.0) * tail_x(z),
        threshold,
        f64::INFINITY,
        tail_scale,
        &opts,
    )?;
    let value = t1.value + t2.value + t3.value + t4.value;
    let error = t1.error + t2.error + t3.error + t4.error;
    if !value.is_finite() {
        return Err(Error::Quadrature { achieved: f64::NAN, requested: QUAD_TOL });
    }
    if error > QUAD_TOL {
        return Err(Error::Quadrature { achieved: error, requested: QUAD_TOL });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Direct transmission at power 2P; depends only on `gamma_sd`, `gamma_se`.
pub fn outage_dt(p: &SnrProfile, r: TargetRate) -> Result<f64> {
    validated(p)?;
    let (sd, se) = (p.gamma_sd, p.gamma_se);
    let g = libm::exp2(r.value());
    let value = 1.0 - sd / (sd + g * se) * libm::exp(-(g - 1.0) / (2.0 * sd));
    finish("DT", value, CLAMP_TOL)
}

/// Decode-and-forward secrecy outage probability, published three-term
/// expression with helpers `a(x)` and `h(x, y)`.
pub fn outage_df(p: &SnrProfile, r: TargetRate, variant: DfVariant) -> Result<f64> {
    validated(p)?;
    let p = p.separate_sd_rd().separate_se_re();
    let (sd, sr, rd, se, re) = (p.gamma_sd, p.gamma_sr, p.gamma_rd, p.gamma_se, p.gamma_re);
    let r = r.value();
    let q = libm::exp2(-2.0 * r);
    let exponent_numerator = match variant {
        DfVariant::AsPrinted => q - 1.0,
        DfVariant::Corrected => libm::exp2(2.0 * r) - 1.0,
    };
    let h = |x: f64, y: f64| sr / (x * (1.0 + sr / y) + sr * q);
    let a = |x: f64| x * x / (sr * q + x) * libm::exp(-exponent_numerator / x);

    let denom = (re - se) * (rd - sd);
    let value = (a(re) - a(se)) / (re - se) + sr * q * a(se) * (h(se, sd) - h(se, rd)) / denom
        - sr * q * a(re) * (h(re, sd) - h(re, rd)) / denom;
    let scheme = match variant {
        DfVariant::AsPrinted => "DF (as printed)",
        DfVariant::Corrected => "DF (corrected)",
    };
    finish(scheme, value, DF_CLAMP_TOL)
}

/// Exact outage of the DF capacity model (maximal-ratio eavesdropper) by
/// one-dimensional quadrature over `s = x_se + x_re`.
pub fn outage_df_quadrature(p: &SnrProfile, r: TargetRate) -> Result<f64> {
    validated(p)?;
    let p = p.separate_sd_rd().separate_se_re();
    let (sr, se, re) = (p.gamma_sr, p.gamma_se, p.gamma_re);
    let r = r.value();
    let g = libm::exp2(2.0 * r);
    let threshold = g - 1.0;
    let f_eve = |s: f64| (libm::exp(-s / re) - libm::exp(-s / se)) / (re - se);
    let success = |s: f64| {
        let t = threshold + g * s;
        survival_x(t, &p) * libm::exp(-t / sr) * f_eve(s)
    };
    let scale = 1.0 / (1.0 / se.max(re) + g * (1.0 / p.gamma_sd.max(p.gamma_rd) + 1.0 / sr));
    let res = integrate_exp_tail(success, 0.0, f64::INFINITY, scale, &QuadOptions::absolute(QUAD_TOL))?;
    Ok((1.0 - res.value).clamp(0.0, 1.0))
}

/// Relative half-width of the band around the CJ double pole
/// `kappa + 1/gamma_rd = beta/gamma_re` in which the expression is
/// interpolated instead of evaluated. Round-off near the pole grows like
/// `eps / d^2`.
const CJ_POLE_GUARD: f64 = 1e-2;

/// Cooperative jamming secrecy outage probability, published expression
/// with `kappa = (2^{2R}-1)/gamma_sd`, `beta = 2^{2R} gamma_se/gamma_sd`.
///
/// The expression has a removable double pole; inside the guard band the
/// value is a cubic interpolant in `d = kappa + 1/gamma_rd - beta/gamma_re`
/// through evaluations at `d/base = +-1, +-2` guard widths.
pub fn outage_cj(p: &SnrProfile, r: TargetRate, variant: CjVariant) -> Result<f64> {
    validated(p)?;
    let (sd, rd, se) = (p.gamma_sd, p.gamma_rd, p.gamma_se);
    let g = libm::exp2(2.0 * r.value());
    let kappa = (g - 1.0) / sd;
    let beta = g * se / sd;
    let base = kappa + 1.0 / rd;
    let pre = match variant {
        CjVariant::AsPrinted => libm::exp2(-kappa),
        CjVariant::Corrected => libm::exp(-kappa),
    };
    let eval = |re: f64| -> Result<f64> {
        let d = base - beta / re;
        let pre = pre / (rd * re);
        let bracket = beta * (d + 1.0) * omega((1.0 + beta) / re)? + (d - beta) * omega((1.0 + beta) / beta * base)?;
        Ok(1.0 - pre * re / d + pre / (d * d) * bracket)
    };
    let t = 1.0 - beta / (p.gamma_re * base);
    let value = if t.abs() < CJ_POLE_GUARD {
        let nodes = [-2.0, -1.0, 1.0, 2.0].map(|k| k * CJ_POLE_GUARD);
        let mut values = [0.0; 4];
        for (v, &tn) in values.iter_mut().zip(&nodes) {
            *v = eval(beta / (base * (1.0 - tn)))?;
        }
        lagrange(&nodes, &values, t)
    } else {
        eval(p.gamma_re)?
    };
    let scheme = match variant {
        CjVariant::AsPrinted => "CJ (as printed)",
        CjVariant::Corrected => "CJ (corrected)",
    };
    finish(scheme, value, CLAMP_TOL)
}

fn lagrange(nodes: &[f64; 4], values: &[f64; 4], t: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        acc += w * values[i];
    }
    acc
}

/// Exact outage of the CJ capacity model by two-dimensional quadrature over
/// the eavesdropper's signal and jamming SNRs; the destination-side
/// variables are integrated in closed form.
pub fn outage_cj_quadrature(p: &SnrProfile, r: TargetRate) -> Result<f64> {
    validated(p)?;
    let (sd, rd, se, re) = (p.gamma_sd, p.gamma_rd, p.gamma_se, p.gamma_re);
    let g = libm::exp2(2.0 * r.value());
    let kappa = (g - 1.0) / sd;
    let slope = g / sd;
    // P(success | x_se = b, x_re = k) after averaging over x_sd and x_rd
    let conditional = |b: f64, k: f64| {
        let s = kappa + slope * b / (1.0 + k);
        libm::exp(-s) / (1.0 + rd * s)
    };
    let inner_opts = QuadOptions { abs_tol: 1e-12, rel_tol: 0.0, max_intervals: 2000 };
    let over_b = |k: f64| {
        integrate_exp_tail(|b| conditional(b, k) * libm::exp(-b / se) / se, 0.0, f64::INFINITY, se, &inner_opts)
            .map(|res| res.value)
            .unwrap_or(f64::NAN)
    };
    let res = integrate_exp_tail(|k| over_b(k) * libm::exp(-k / re) / re, 0.0, f64::INFINITY, re, &QuadOptions::absolute(1e-10))?;
    if !res.value.is_finite() {
        return Err(Error::Quadrature { achieved: f64::NAN, requested: 1e-10 });
    }
    Ok((1.0 - res.value).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(r: f64) -> TargetRate {
        TargetRate::new(r).unwrap()
    }

    /// Probability that the two-phase destination rate drops below that of an
    /// eavesdropper with zero SNR, i.e. `P(min(X, Z) < 2^{2R} - 1)`.
    fn outage_mf_no_eavesdropper(p: &SnrProfile, r: TargetRate) -> f64 {
        let p = p.separate_sd_rd();
        let t = libm::exp2(2.0 * r.value()) - 1.0;
        1.0 - (p.gamma_rd * libm::exp(-t / p.gamma_rd) - p.gamma_sd * libm::exp(-t / p.gamma_sd)) / (p.gamma_rd - p.gamma_sd) * libm::exp(-t / p.gamma_sr)
    }

    fn fig2(se_db: f64) -> SnrProfile {
        SnrProfile::from_db(10.0, 20.0, 20.0, se_db, 15.0).unwrap()
    }

    #[test]
    fn density_examples() {
        let p = SnrProfile::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(density_x(0.0, &p), 0.0);
        assert!((density_x(1.0, &p) - 0.23865121854119093).abs() < 1e-15);
        assert_eq!(density_x(-1.0, &p), 0.0);
    }

    #[test]
    fn density_normalizes() {
        let p = SnrProfile::new(3.0, 1.0, 40.0, 1.0, 1.0).unwrap();
        let total = integrate_exp_tail(|x| density_x(x, &p), 0.0, f64::INFINITY, 40.0, &QuadOptions::absolute(1e-12)).unwrap();
        assert!((total.value - 1.0).abs() < 1e-9);
        // degenerate profile goes through the separation rule
        let p = SnrProfile::new(5.0, 1.0, 5.0, 1.0, 1.0).unwrap();
        let total = integrate_exp_tail(|x| density_x(x, &p), 0.0, f64::INFINITY, 5.0, &QuadOptions::absolute(1e-10)).unwrap();
        assert!((total.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mf_limits() {
        let strong_eve = SnrProfile { gamma_se: 1e12, ..fig2(10.0) };
        assert!((outage_mf(&strong_eve, rate(0.1)).unwrap() - 1.0).abs() < 1e-6);
        assert!((outage_mf(&fig2(10.0), rate(50.0)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mf_matches_quadrature_on_figure_profile() {
        for se_db in [0.0, 10.0, 20.0] {
            let p = fig2(se_db);
            let a = outage_mf(&p, rate(0.1)).unwrap();
            let b = outage_mf_quadrature(&p, rate(0.1)).unwrap();
            assert!((a - b).abs() < 1e-6, "{se_db}: {a} vs {b}");
        }
    }

    #[test]
    fn mf_quadrature_without_eavesdropper() {
        let p = SnrProfile { gamma_se: 1e-12, ..fig2(0.0) };
        for r in [0.05, 0.5, 1.5] {
            let expected = outage_mf_no_eavesdropper(&p, rate(r));
            let got = outage_mf_quadrature(&p, rate(r)).unwrap();
            assert!((got - expected).abs() < 1e-7, "R={r}: {got} vs {expected}");
        }
    }

    #[test]
    fn mf_quadrature_unreachable_rate() {
        let v = outage_mf_quadrature(&fig2(10.0), rate(20.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dt_examples() {
        let p = SnrProfile::new(10.0, 1.0, 1.0, 10.0, 1.0).unwrap();
        let expected = 1.0 - (10.0 / 30.0) * libm::exp(-1.0 / 20.0);
        assert!((outage_dt(&p, rate(1.0)).unwrap() - expected).abs() < 1e-12);
        assert!((outage_dt(&p, rate(1.0)).unwrap() - 0.6829235251664287).abs() < 1e-12);
        let quiet = SnrProfile { gamma_se: 1e-12, ..p };
        assert!(outage_dt(&quiet, rate(1e-12)).unwrap() < 1e-9);
    }

    #[test]
    fn df_variants_agree_at_small_rate() {
        let p = fig2(10.0);
        for r in [1e-3, 1e-4] {
            let a = outage_df(&p, rate(r), DfVariant::AsPrinted).unwrap();
            let b = outage_df(&p, rate(r), DfVariant::Corrected).unwrap();
            assert!((a - b).abs() < 10.0 * r, "R={r}: {a} vs {b}");
        }
    }

    #[test]
    fn df_inconsistency_is_reported() {
        // weak eavesdropper-relay link: the printed exponent blows up
        let p = SnrProfile::new(0.5, 30.0, 2.0, 9.0, 1e-3).unwrap();
        assert!(matches!(
            outage_df(&p, rate(1.7), DfVariant::AsPrinted),
            Err(Error::FormulaInconsistency { .. })
        ));
    }

    #[test]
    fn df_quadrature_dominates_mf() {
        for se_db in [0.0, 6.0, 12.0, 20.0] {
            let p = fig2(se_db);
            let mf = outage_mf(&p, rate(0.3)).unwrap();
            let df = outage_df_quadrature(&p, rate(0.3)).unwrap();
            assert!(mf <= df + 1e-9);
        }
    }

    #[test]
    fn cj_limits() {
        let strong_eve = SnrProfile { gamma_se: 1e12, ..fig2(10.0) };
        for v in CjVariant::ALL {
            assert!((outage_cj(&strong_eve, rate(0.1), v).unwrap() - 1.0).abs() < 1e-4);
            let a = outage_cj(&fig2(10.0), rate(0.1), v).unwrap();
            let b = outage_cj(&SnrProfile { gamma_sr: 1e-3, ..fig2(10.0) }, rate(0.1), v).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cj_corrected_matches_model_quadrature() {
        for (p, r) in [
            (fig2(10.0), 0.1),
            (fig2(0.0), 0.1),
            (fig2(20.0), 1.0),
            (SnrProfile::new(3.0, 1.0, 7.0, 2.0, 5.0).unwrap(), 0.5),
        ] {
            let closed = outage_cj(&p, rate(r), CjVariant::Corrected).unwrap();
            let quad = outage_cj_quadrature(&p, rate(r)).unwrap();
            assert!((closed - quad).abs() < 1e-8, "{p:?}: {closed} vs {quad}");
        }
    }

    #[test]
    fn cj_double_pole_is_guarded() {
        // gamma_re such that kappa + 1/gamma_rd = beta/gamma_re, then walk away
        let (sd, rd, se) = (10.0, 100.0, 10.0);
        let g = libm::exp2(0.2);
        let kappa = (g - 1.0) / sd;
        let beta = g * se / sd;
        let re = beta / (kappa + 1.0 / rd);
        for off in [0.0, 1e-12, 1e-8, -1e-6, 1e-4, 3e-3, -9.9e-3, 1e-2, 1.01e-2, 3e-2] {
            let p = SnrProfile::new(sd, 100.0, rd, se, re * (1.0 + off)).unwrap();
            let closed = outage_cj(&p, rate(0.1), CjVariant::Corrected).unwrap();
            let quad = outage_cj_quadrature(&p, rate(0.1)).unwrap();
            assert!((closed - quad).abs() < 1e-8, "offset {off}: {closed} vs {quad}");
        }
    }
}
