//! Dense polynomial helpers used by the chain and design modules.
//!
//! Coefficients are stored lowest order first.

use num_complex::Complex64;

/// Three-term continuant of a tridiagonal matrix whose diagonal entries are
/// linear polynomials `diag[j].0 + diag[j].1 * x` and whose off-diagonal
/// products `b_j c_j` equal `-offdiag_sq[j]`.
///
/// Returns the coefficients of the determinant as a polynomial in `x`.
pub(crate) fn continuant_poly(diag: &[(Complex64, Complex64)], offdiag_sq: &[f64]) -> Vec<Complex64> {
    debug_assert_eq!(diag.len(), offdiag_sq.len() + 1);
    let mut prev2 = vec![Complex64::new(1.0, 0.0)];
    let mut prev1 = vec![diag[0].0, diag[0].1];
    for j in 1..diag.len() {
        let (c0, c1) = diag[j];
        let gsq = offdiag_sq[j - 1];
        let mut next = vec![Complex64::new(0.0, 0.0); prev1.len() + 1];
        for (k, &p) in prev1.iter().enumerate() {
            next[k] += c0 * p;
            next[k + 1] += c1 * p;
        }
        for (k, &p) in prev2.iter().enumerate() {
            next[k] += gsq * p;
        }
        prev2 = prev1;
        prev1 = next;
    }
    prev1
}

pub(crate) fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `|p(t)|^2` for real `t`, as a real polynomial in `t`.
pub(crate) fn abs_sq_on_real_line(p: &[Complex64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * p.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            out[i + j] += (a * b.conj()).re;
        }
    }
    out
}

/// First `n` Taylor coefficients of `1 / p(t)` about `t = 0`. Requires `p[0] != 0`.
pub(crate) fn series_reciprocal(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    out[0] = 1.0 / p[0];
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k.min(p.len() - 1) {
            acc += p[j] * out[k - j];
        }
        out[k] = -acc / p[0];
    }
    out
}
