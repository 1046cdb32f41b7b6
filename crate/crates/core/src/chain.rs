//! Frequency response of an N-stage bosonic chain.
//!
//! The chain has `N + 2` modes. The two end modes couple to the external ports
//! at rates `kappa_a` and `kappa_b`; neighbouring modes are coupled by
//! beam-splitter rates `g_j`. The conversion efficiency is
//!
//! ```text
//! eta_N(w) = | sqrt(kappa_a kappa_b) prod_j g_j / D_N(w) |^2
//! ```
//!
//! where `D_N(w)` is the determinant of the `(N+2) x (N+2)` tridiagonal matrix
//! with diagonal `1/chi_j = i(w + Delta_j) + kappa_j / 2` and off-diagonals
//! `i g_j`. All rates are in units of the coupling bound `g_max`.
//!
//! Only `|.|^2` quantities are exposed; channel phases are irrelevant here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Allowed excess of the raw efficiency above one before it is reported as an
/// internal-consistency failure.
pub const EFFICIENCY_EXCESS_TOL: f64 = 1e-9;

/// Relative size below which a matching-polynomial coefficient is treated as a
/// rounding residual of an exactly matched design.
pub const MATCHING_SNAP_TOL: f64 = 1e-11;

/// Physical description of an N-stage transducer chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransducerParams {
    pub n_stages: usize,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// `Delta_1 ..= Delta_{N+2}`.
    pub detunings: Vec<f64>,
    /// `g_1 ..= g_{N+1}`.
    pub couplings: Vec<f64>,
    /// Nominal unity-conversion frequency; used as the integration split point
    /// and the expansion point of the matching polynomial.
    #[serde(default)]
    pub omega_c: f64,
}

impl TransducerParams {
    /// All detunings set to `-omega_c`.
    pub fn resonant(kappa_a: f64, kappa_b: f64, couplings: Vec<f64>, omega_c: f64) -> Result<Self> {
        let n_stages = couplings
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidParams("at least one coupling is required".into()))?;
        // avoid emitting -0.0 in the default frame
        let detuning = if omega_c == 0.0 { 0.0 } else { -omega_c };
        let params = Self { n_stages, kappa_a, kappa_b, detunings: vec![detuning; n_stages + 2], couplings, omega_c };
        params.validate()?;
        Ok(params)
    }

    pub fn n_modes(&self) -> usize {
        self.n_stages + 2
    }

    /// Checks the structural invariants.
    ///
    /// A zero external rate is accepted and describes a disconnected port; the
    /// efficiency is then identically zero.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_stages;
        if self.couplings.len() != n + 1 {
            return Err(Error::InvalidParams(format!(
                "expected {} couplings for {} stages, got {}",
                n + 1,
                n,
                self.couplings.len()
            )));
        }
        if self.detunings.len() != n + 2 {
            return Err(Error::InvalidParams(format!(
                "expected {} detunings for {} stages, got {}",
                n + 2,
                n,
                self.detunings.len()
            )));
        }
        if let Some(g) = self.couplings.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidParams(format!("couplings must be positive, got {g}")));
        }
        for (name, k) in [("kappa_a", self.kappa_a), ("kappa_b", self.kappa_b)] {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be non-negative, got {k}")));
            }
        }
        if let Some(d) = self.detunings.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite detuning {d}")));
        }
        if !self.omega_c.is_finite() {
            return Err(Error::InvalidParams("omega_c must be finite".into()));
        }
        Ok(())
    }

    /// External damping of mode `j` (0-based): `kappa_a`, `kappa_b` at the ends, zero inside.
    pub fn damping(&self, j: usize) -> f64 {
        if j == 0 {
            self.kappa_a
        } else if j == self.n_stages + 1 {
            self.kappa_b
        } else {
            0.0
        }
    }

    /// `sqrt(kappa_a kappa_b) prod_j g_j`, the numerator amplitude of the efficiency.
    pub fn transfer_numerator(&self) -> f64 {
        (self.kappa_a * self.kappa_b).sqrt() * self.couplings.iter().product::<f64>()
    }

    /// Geometric-mean rate `(sqrt(kappa_a kappa_b) prod g_j)^(1/(N+2))`; equals the
    /// bandwidth for maximally flat designs and sets the decay scale of the
    /// efficiency tails in general.
    pub fn mean_rate(&self) -> f64 {
        let m = self.n_modes() as f64;
        let log = 0.5 * (self.kappa_a.ln() + self.kappa_b.ln()) + self.couplings.iter().map(|g| g.ln()).sum::<f64>();
        (log / m).exp()
    }

    /// Radius about `omega_c` containing every zero of `D_N` (Gershgorin bound).
    pub fn root_radius(&self) -> f64 {
        (0..self.n_modes())
            .map(|j| {
                let left = if j > 0 { self.couplings[j - 1] } else { 0.0 };
                let right = self.couplings.get(j).copied().unwrap_or(0.0);
                (self.detunings[j] + self.omega_c).abs() + 0.5 * self.damping(j) + left + right
            })
            .fold(0.0, f64::max)
    }

    fn coupling_squares(&self) -> Vec<f64> {
        self.couplings.iter().map(|g| g * g).collect()
    }

    /// True when all detunings equal `-omega_c` to rounding.
    pub fn is_resonant(&self) -> bool {
        let scale = self.omega_c.abs().max(self.mean_rate()).max(1.0);
        self.detunings.iter().all(|d| (d + self.omega_c).abs() <= 1e-14 * scale)
    }
}

/// Response of the chain at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexResponse {
    pub frequency: f64,
    pub determinant: Complex64,
    pub efficiency: f64,
    /// `|reflection numerator|^2 / |D_N|^2`, computed independently of `efficiency`.
    pub reflectance: f64,
}

/// Susceptibility `1 / (i(omega + detuning) + kappa / 2)` of a single mode.
pub fn susceptibility(omega: f64, detuning: f64, kappa: f64) -> Result<Complex64> {
    if kappa < 0.0 {
        return Err(Error::Domain(format!("damping must be non-negative, got {kappa}")));
    }
    let inv = Complex64::new(0.5 * kappa, omega + detuning);
    if inv.re == 0.0 && inv.im == 0.0 {
        return Err(Error::Pole);
    }
    Ok(ONE / inv)
}

/// Continuant value kept as `mantissa * exp(log_scale)` so that it cannot overflow.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: Complex64,
    log_scale: f64,
}

impl Scaled {
    fn ln_abs(self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}

const RESCALE_AT: f64 = 1e150;

/// `d_j = a_j d_{j-1} + g_{j-1}^2 d_{j-2}`, rescaling whenever the iterate grows large.
fn scaled_continuant(diag: impl Iterator<Item = Complex64>, gsq: &[f64]) -> Scaled {
    let mut prev2 = ONE;
    let mut prev1 = ONE;
    let mut log_scale = 0.0;
    for (j, a) in diag.enumerate() {
        let next = if j == 0 { a } else { a * prev1 + gsq[j - 1] * prev2 };
        prev2 = prev1;
        prev1 = next;
        let size = prev1.norm();
        if size > RESCALE_AT && size.is_finite() {
            prev1 /= size;
            prev2 /= size;
            log_scale += size.ln();
        }
    }
    Scaled { mantissa: prev1, log_scale }
}

fn inverse_susceptibilities(params: &TransducerParams, omega: f64) -> impl Iterator<Item = Complex64> + '_ {
    (0..params.n_modes()).map(move |j| Complex64::new(0.5 * params.damping(j), omega + params.detunings[j]))
}

fn determinant_scaled(params: &TransducerParams, omega: f64) -> Scaled {
    scaled_continuant(inverse_susceptibilities(params, omega), &params.coupling_squares())
}

/// `D_N(omega)` by the continuant recurrence.
///
/// Returns an infinite value if the determinant exceeds the `f64` range; use
/// [`log_abs_determinant`] for very large `|omega|`.
pub fn chain_determinant(params: &TransducerParams, omega: f64) -> Result<Complex64> {
    params.validate()?;
    let s = determinant_scaled(params, omega);
    Ok(s.mantissa * s.log_scale.exp())
}

/// `ln |D_N(omega)|`, finite for any finite `omega`.
pub fn log_abs_determinant(params: &TransducerParams, omega: f64) -> Result<f64> {
    params.validate()?;
    Ok(determinant_scaled(params, omega).ln_abs())
}

fn efficiency_unchecked(params: &TransducerParams, omega: f64) -> Result<f64> {
    if params.kappa_a == 0.0 || params.kappa_b == 0.0 {
        return Ok(0.0);
    }
    let det = determinant_scaled(params, omega);
    let numerator = params.transfer_numerator();
    let raw = if det.log_scale == 0.0 && numerator.is_finite() {
        let ratio = numerator / det.mantissa.norm();
        ratio * ratio
    } else {
        let ln_num =
            0.5 * (params.kappa_a.ln() + params.kappa_b.ln()) + params.couplings.iter().map(|g| g.ln()).sum::<f64>();
        (2.0 * (ln_num - det.ln_abs())).exp()
    };
    clamp_efficiency(raw)
}

fn clamp_efficiency(raw: f64) -> Result<f64> {
    if raw.is_nan() || raw > 1.0 + EFFICIENCY_EXCESS_TOL {
        return Err(Error::InternalConsistency(format!("conversion efficiency {raw} exceeds unity")));
    }
    Ok(raw.min(1.0))
}

/// Conversion efficiency `eta_N(omega)` in `[0, 1]`.
pub fn conversion_efficiency(params: &TransducerParams, omega: f64) -> Result<f64> {
    params.validate()?;
    efficiency_unchecked(params, omega)
}

/// `det(i(omega - omega_c) I - F)`, where `F` carries `kappa_a/2, 0, .., 0, -kappa_b/2`
/// on its diagonal and `-i g_j` off it. Detunings are not part of `F`; for a
/// chain with every `Delta_j = -omega_c` this is the reflection numerator.
pub fn matching_polynomial(params: &TransducerParams, omega: f64, omega_c: f64) -> Result<Complex64> {
    params.validate()?;
    let lambda = I * (omega - omega_c);
    let last = params.n_modes() - 1;
    let diag = (0..params.n_modes()).map(|j| {
        if j == 0 {
            lambda - 0.5 * params.kappa_a
        } else if j == last {
            lambda + 0.5 * params.kappa_b
        } else {
            lambda
        }
    });
    let s = scaled_continuant(diag, &params.coupling_squares());
    Ok(s.mantissa * s.log_scale.exp())
}

/// Real coefficients (lowest order first) of the characteristic polynomial
/// `det(lambda I - F)` of the matching matrix `F`.
pub fn matching_coefficients(params: &TransducerParams) -> Result<Vec<f64>> {
    params.validate()?;
    let last = params.n_modes() - 1;
    let diag: Vec<(Complex64, Complex64)> = (0..params.n_modes())
        .map(|j| {
            let f = if j == 0 {
                0.5 * params.kappa_a
            } else if j == last {
                -0.5 * params.kappa_b
            } else {
                0.0
            };
            (Complex64::new(-f, 0.0), ONE)
        })
        .collect();
    Ok(poly::continuant_poly(&diag, &params.coupling_squares()).into_iter().map(|c| c.re).collect())
}

/// Reflection numerator for arbitrary detunings: `D_N` with the sign of
/// `kappa_a / 2` flipped in the first diagonal entry.
fn reflection_numerator_scaled(params: &TransducerParams, omega: f64) -> Scaled {
    let diag = (0..params.n_modes()).map(|j| {
        let sign = if j == 0 { -1.0 } else { 1.0 };
        Complex64::new(sign * 0.5 * params.damping(j), omega + params.detunings[j])
    });
    scaled_continuant(diag, &params.coupling_squares())
}

/// Reflectance `1 - eta_N(omega)`.
pub fn reflectance(params: &TransducerParams, omega: f64) -> Result<f64> {
    Ok(1.0 - conversion_efficiency(params, omega)?)
}

/// Determinant, efficiency and an independently computed reflectance.
pub fn response(params: &TransducerParams, omega: f64) -> Result<ComplexResponse> {
    params.validate()?;
    let det = determinant_scaled(params, omega);
    let efficiency = efficiency_unchecked(params, omega)?;
    let refl = reflection_numerator_scaled(params, omega);
    let reflectance = if params.kappa_a == 0.0 || params.kappa_b == 0.0 {
        1.0
    } else {
        let ratio = (refl.ln_abs() - det.ln_abs()).exp();
        ratio * ratio
    };
    Ok(ComplexResponse { frequency: omega, determinant: det.mantissa * det.log_scale.exp(), efficiency, reflectance })
}

/// Uniform samples of the efficiency on `[omega_min, omega_max]`.
pub fn efficiency_spectrum(
    params: &TransducerParams,
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    if n_points < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n_points}")));
    }
    if !(omega_min < omega_max) {
        return Err(Error::Domain(format!("empty window [{omega_min}, {omega_max}]")));
    }
    let step = (omega_max - omega_min) / (n_points - 1) as f64;
    (0..n_points)
        .map(|k| {
            let omega = if k == n_points - 1 { omega_max } else { omega_min + step * k as f64 };
            Ok((omega, efficiency_unchecked(params, omega)?))
        })
        .collect()
}

/// Writes a spectrum as CSV with header `omega,efficiency`.
pub fn spectrum_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("omega,efficiency\n");
    for (w, eta) in samples {
        out.push_str(&format!("{w:?},{eta:?}\n"));
    }
    out
}

#[derive(Debug, Clone)]
enum ReflectionRoute {
    /// Characteristic polynomial of `F` in `lambda = i(omega - center)`.
    Factored {
        center: f64,
        coeffs: Vec<Complex64>,
    },
    Continuant,
}

/// Evaluates `(eta, 1 - eta)` with full relative accuracy in both parts.
///
/// Near a unity-efficiency frequency `1 - eta` is far below rounding of `eta`,
/// so it is computed from the reflection numerator instead of by subtraction.
/// For resonant chains the numerator is the characteristic polynomial of the
/// matching matrix, whose coefficients below `MATCHING_SNAP_TOL` (relative to
/// their natural scale) are treated as exact zeros.
#[derive(Debug, Clone)]
pub struct ResponseEvaluator {
    params: TransducerParams,
    numerator_sq: f64,
    route: ReflectionRoute,
}

impl ResponseEvaluator {
    pub fn new(params: &TransducerParams) -> Result<Self> {
        params.validate()?;
        let route = if params.is_resonant() {
            let coeffs = matching_coefficients(params)?;
            let m = coeffs.len() - 1;
            let scale = params
                .couplings
                .iter()
                .copied()
                .chain([0.5 * params.kappa_a, 0.5 * params.kappa_b])
                .fold(0.0, f64::max);
            let snapped = coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let natural = scale.powi((m - k) as i32);
                    let v = if k < m && c.abs() <= MATCHING_SNAP_TOL * natural { 0.0 } else { c };
                    Complex64::new(v, 0.0)
                })
                .collect();
            ReflectionRoute::Factored { center: params.omega_c, coeffs: snapped }
        } else {
            ReflectionRoute::Continuant
        };
        let n = params.transfer_numerator();
        Ok(Self { params: params.clone(), numerator_sq: n * n, route })
    }

    pub fn params(&self) -> &TransducerParams {
        &self.params
    }

    /// Returns `(eta, 1 - eta)`.
    pub fn efficiency_and_loss(&self, omega: f64) -> Result<(f64, f64)> {
        let p = &self.params;
        if p.kappa_a == 0.0 || p.kappa_b == 0.0 {
            return Ok((0.0, 1.0));
        }
        let det = determinant_scaled(p, omega);
        if det.log_scale != 0.0 || !self.numerator_sq.is_finite() {
            let eta = efficiency_unchecked(p, omega)?;
            return Ok((eta, 1.0 - eta));
        }
        let det_sq = det.mantissa.norm_sqr();
        let eta = clamp_efficiency(self.numerator_sq / det_sq)?;
        let refl_sq = match &self.route {
            ReflectionRoute::Factored { center, coeffs } => poly::horner(coeffs, I * (omega - center)).norm_sqr(),
            ReflectionRoute::Continuant => {
                let r = reflection_numerator_scaled(p, omega);
                if r.log_scale != 0.0 {
                    return Ok((eta, 1.0 - eta));
                }
                r.mantissa.norm_sqr()
            }
        };
        let loss = (refl_sq / det_sq).min(1.0);
        if !loss.is_finite() {
            return Ok((eta, 1.0 - eta));
        }
        Ok((eta, loss))
    }
}
