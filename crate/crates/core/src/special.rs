//! Special functions for the thermal-noise capacity bounds.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Bosonic entropy `h(x) = (x+1) log2(x+1) - x log2(x)`, with `h(0) = 0`.
pub fn entropy_h(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("h(x) requires x >= 0, got {x}")));
    }
    Ok(entropy_h_unchecked(x))
}

pub(crate) fn entropy_h_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    // (x+1) ln(x+1) - x ln x = ln(1+x) + x ln(1 + 1/x)
    (x.ln_1p() + x * (1.0 / x).ln_1p()) / LN_2
}

/// `k(x) = (1+x)(1+1/x)^x - 1`, extended by `k(0) = 0`.
///
/// `2^{h(x)} = k(x) + 1`, so `k` is the threshold of `u = (1 - eta)/eta` below
/// which the two-way lower bound is positive.
pub fn k_of(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("k(x) requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((entropy_h_unchecked(x) * LN_2).exp_m1())
}

const SERIES_BUDGET: usize = 2000;

/// `2F1(a, a; a + 1; w)` for `0 < a < 1`, `0 <= w <= 1/2`.
///
/// The term ratio is `(a+n)^2 / ((a+1+n)(n+1)) * w <= w`, so the tail after the
/// last term `t` is at most `t w / (1 - w)`.
fn equal_parameter_series(a: f64, w: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_BUDGET {
        let nf = n as f64;
        term *= (a + nf) * (a + nf) / ((a + 1.0 + nf) * (nf + 1.0)) * w;
        sum += term;
        if term * w / (1.0 - w) <= f64::EPSILON * 0.25 * sum {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("2F1 series did not converge in {SERIES_BUDGET} terms (a = {a}, w = {w})")))
}

/// `2F1(1, b; 1 + b; -y)` for `0 < b < 1`, `0 <= y <= 1`, via the Pfaff
/// transformation `(1+y)^{-b} 2F1(b, b; 1+b; y/(1+y))`.
fn pfaff(b: f64, y: f64) -> Result<f64> {
    Ok((1.0 + y).powf(-b) * equal_parameter_series(b, y / (1.0 + y))?)
}

/// Gauss hypergeometric `2F1(1, s; 1 + s; -z)` for `0 < s < 1`, `z >= 0`.
///
/// Equals `s * integral_0^1 t^(s-1) / (1 + z t) dt`. For `z <= 1` the
/// Pfaff-transformed series is summed directly; for `z > 1` the argument is
/// first inverted,
///
/// ```text
/// 2F1(1, s; 1+s; -z) = (pi s / sin(pi s)) z^{-s} - s / ((1-s) z) * 2F1(1, 1-s; 2-s; -1/z),
/// ```
///
/// so every series runs at an argument of at most 1/2.
pub fn hyp2f1_special(s: f64, z: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("2F1(1,s;1+s;-z) requires 0 < s < 1, got {s}")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("2F1(1,s;1+s;-z) requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= 1.0 {
        return pfaff(s, z);
    }
    let reflected = PI * s / (PI * s).sin() * z.powf(-s);
    let correction = s / ((1.0 - s) * z) * pfaff(1.0 - s, 1.0 / z)?;
    Ok(reflected - correction)
}
