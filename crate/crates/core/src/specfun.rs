//! Exponential integral `E1` and its scaled form `Omega(x) = e^x E1(x)`.
//!
//! Power series for `x <= 1`, modified Lentz evaluation of the continued
//! fraction `e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))` above that.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, 0.57721566490153286061.
#[allow(clippy::excessive_precision)]
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const MAX_ITER: usize = 1000;
const TINY: f64 = 1e-300;

fn check(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(x))
    }
}

/// `E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)`.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        let k = k as f64;
        term *= -x / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() <= 0.5 * f64::EPSILON * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - libm::log(x) - sum
}

/// `e^x E1(x)` by continued fraction; converges for any x > 0 but slowly
/// near zero, so only used above 1.
fn scaled_e1_cf(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// Exponential integral `E1(x) = int_x^inf e^-u / u du` for `x > 0`.
///
/// Underflows gracefully to zero past x ~ 745.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check(x)?;
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(libm::exp(-x) * scaled_e1_cf(x))
    }
}

/// `Omega(x) = e^x E1(x)`, evaluated without forming `e^x` for large x.
pub fn omega(x: f64) -> Result<f64> {
    check(x)?;
    if x <= 1.0 {
        Ok(libm::exp(x) * e1_series(x))
    } else {
        Ok(scaled_e1_cf(x))
    }
}
