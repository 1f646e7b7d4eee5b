//! Cross-checks of the closed forms and samplers against independent
//! oracles: quadrature, empirical distributions and binomial coverage.

use mfsec_core::analytic::{density_x, outage_dt, outage_mf, outage_mf_quadrature};
use mfsec_core::montecarlo::{draw_channel, estimate_outage, McConfig};
use mfsec_core::quadrature::{integrate, integrate_exp_tail, QuadOptions};
use mfsec_core::rng::{CounterStream, Domain};
use mfsec_core::specfun::{exp_integral_e1, omega};
use mfsec_core::{Scheme, SnrProfile, TargetRate};

/// `e^x E1(x) = int_0^inf e^-t / (x + t) dt`, split at geometric
/// breakpoints so the near-singular head at small x is resolved.
fn omega_by_quadrature(x: f64) -> f64 {
    let f = |t: f64| (-t).exp() / (x + t);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-14, max_intervals: 4000 };
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut hi = x;
    while hi < 1.0 {
        total += integrate(f, lo, hi, &opts).unwrap().value;
        lo = hi;
        hi *= 8.0;
    }
    total + integrate_exp_tail(f, lo, f64::INFINITY, 1.0, &opts).unwrap().value
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[test]
fn e1_against_quadrature_oracle() {
    for x in log_grid(1e-6, 700.0, 200) {
        let oracle = (-x).exp() * omega_by_quadrature(x);
        let got = exp_integral_e1(x).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-10, "x = {x}: {got} vs {oracle}");
    }
    // frozen values of the same oracle
    assert!((omega_by_quadrature(1.0) * (-1.0f64).exp() - 0.2193839343955203).abs() < 1e-15);
    assert!((omega_by_quadrature(0.5) * (-0.5f64).exp() - 0.5597735947761607).abs() < 1e-15);
}

#[test]
fn omega_bounds_consistency_and_monotonicity() {
    let grid = log_grid(1e-6, 700.0, 400);
    let mut prev_e1 = f64::INFINITY;
    let mut prev_omega = f64::INFINITY;
    for &x in &grid {
        let w = omega(x).unwrap();
        let e1 = exp_integral_e1(x).unwrap();
        assert!(x / (x + 1.0) < x * w && x * w < 1.0, "bounds fail at {x}");
        assert!(((w * (-x).exp() - e1) / e1).abs() < 1e-12, "scaling mismatch at {x}");
        assert!(e1 < prev_e1 && w < prev_omega, "not decreasing at {x}");
        prev_e1 = e1;
        prev_omega = w;
    }
}

fn random_profiles(n: usize, seed: u64) -> Vec<(SnrProfile, TargetRate)> {
    let mut s = CounterStream::new(seed, Domain::Sampling, 0);
    (0..n)
        .map(|_| {
            let mut g = || 10f64.powf(-1.0 + 4.0 * s.uniform());
            let p = SnrProfile::new(g(), g(), g(), g(), g()).unwrap();
            let r = 0.05 + 1.95 * s.uniform();
            (p, TargetRate::new(r).unwrap())
        })
        .collect()
}

#[test]
fn mf_closed_form_matches_derivation_quadrature() {
    for (p, r) in random_profiles(40, 17) {
        let closed = outage_mf(&p, r).unwrap();
        let quad = outage_mf_quadrature(&p, r).unwrap();
        assert!((closed - quad).abs() < 1e-6, "{p:?} R={r:?}: {closed} vs {quad}");
    }
}

#[test]
fn mf_near_degenerate_profiles() {
    for gap in [0.0, 1e-9, 1e-7, 1e-5] {
        let p = SnrProfile::new(30.0, 80.0, 30.0 * (1.0 + gap), 5.0, 12.0).unwrap();
        let r = TargetRate::new(0.4).unwrap();
        let closed = outage_mf(&p, r).unwrap();
        let quad = outage_mf_quadrature(&p, r).unwrap();
        assert!((closed - quad).abs() < 1e-6, "gap {gap}: {closed} vs {quad}");
    }
}

fn fig2() -> SnrProfile {
    SnrProfile::from_db(10.0, 20.0, 20.0, 10.0, 15.0).unwrap()
}

#[test]
fn exponential_draws_have_the_right_law() {
    let p = SnrProfile { gamma_sd: 10.0, ..fig2() };
    let n = 1_000_000u64;
    let mut xs: Vec<f64> = (0..n).map(|i| draw_channel(&p, i, 2024).x_sd).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    assert!((mean - 10.0).abs() < 0.05, "mean {mean}");

    xs.sort_by(f64::total_cmp);
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x / 10.0).exp();
            (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.002, "KS statistic {ks}");
}

#[test]
fn hypoexponential_cdf_matches_empirical_sum() {
    let p = SnrProfile::new(3.0, 1.0, 12.0, 1.0, 1.0).unwrap();
    let n = 1_000_000u64;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            let d = draw_channel(&p, i, 99);
            d.x_sd + d.x_rd
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    // analytic CDF by integrating the density between successive checkpoints
    let opts = QuadOptions::absolute(1e-12);
    let mut cdf = 0.0;
    let mut last = 0.0;
    let mut sup = 0.0f64;
    for k in 1..200 {
        let idx = k * (n as usize / 200);
        let x = xs[idx];
        cdf += integrate(|t| density_x(t, &p), last, x, &opts).unwrap().value;
        last = x;
        sup = sup.max((cdf - idx as f64 / n as f64).abs());
    }
    assert!(sup < 0.005, "sup-norm {sup}");
}

#[test]
fn estimator_covers_closed_forms() {
    let r = TargetRate::new(0.1).unwrap();
    for (scheme, closed) in [(Scheme::Mf, outage_mf(&fig2(), r).unwrap()), (Scheme::Dt, outage_dt(&fig2(), r).unwrap())] {
        let experiments = 200;
        let covered = (0..experiments)
            .filter(|&seed| {
                let cfg = McConfig { n_trials: 20_000, seed, scheme, profile: fig2(), rate: r };
                let e = estimate_outage(&cfg).unwrap();
                (e.p_hat - closed).abs() < 3.0 * e.std_err
            })
            .count();
        assert!(covered * 100 >= experiments as usize * 99 - 100, "{scheme}: {covered}/{experiments}");
    }
}
