//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Semi-infinite and long exponential-tailed ranges go through the
//! substitution `x = a - scale * ln(u)`, which maps `[a, b]` onto
//! `[exp(-(b - a)/scale), 1]` and turns `exp(-x/scale)` tails into
//! polynomials in `u`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208896508822,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    pub fn relative(rel_tol: f64) -> Self {
        Self { abs_tol: 0.0, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the per-interval `|K21 - G10|` estimates.
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(kronrod21(&f, a, b));
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if !(value.is_finite() && error.is_finite()) {
            return Err(Error::Quadrature { achieved: error, requested: tol });
        }
        if error <= tol {
            return Ok(QuadResult { value, error, intervals: segments.len() });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature { achieved: error, requested: tol });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            return Err(Error::Quadrature { achieved: error, requested: tol });
        }
        segments.push(kronrod21(&f, s.a, mid));
        segments.push(kronrod21(&f, mid, s.b));
    }
}

/// Integrates `f` over `[a, b]` with `b` possibly `+inf`, after the
/// substitution `x = a - scale ln u`.
///
/// `scale` should be at least the slowest exponential decay length of the
/// integrand so that the transformed integrand stays bounded at `u = 0`.
pub fn integrate_exp_tail<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, scale: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if b <= a {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let u_lo = if b.is_infinite() { 0.0 } else { libm::exp(-(b - a) / scale) };
    let g = |u: f64| {
        let x = a - scale * libm::log(u);
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * scale / u
        }
    };
    integrate(g, u_lo, 1.0, opts)
}
