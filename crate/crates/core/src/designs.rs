//! Closed-form transducer designs and their defining identities.
//!
//! The maximally flat (MF) design of an N-stage chain under the constraint
//! `g_j <= g_max` uses
//!
//! ```text
//! kappa_a = kappa_b = 2 sqrt(sin(3a) / sin(a)) g_max,
//! g_j = sqrt(sin(a) sin(3a) / (sin((2j-1)a) sin((2j+1)a))) g_max,   a = pi / (2(N+2)),
//! ```
//!
//! with every detuning at `-omega_c`. Its efficiency is the Butterworth shape
//! `1 / (((w - omega_c) / g_N)^{2(N+2)} + 1)` of half-width
//! `g_N = 2 sqrt(sin(a) sin(3a)) g_max`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::TransducerParams;
use crate::error::{Error, Result};
use crate::poly;

/// `sin(k pi / (2m))`, evaluated on the reduced angle so that
/// `sin_frac(k, m) == sin_frac(2m - k, m)` holds bit for bit.
fn sin_frac(k: usize, m: usize) -> f64 {
    let k = k % (4 * m);
    let reduced = if k <= m {
        k
    } else if k <= 2 * m {
        2 * m - k
    } else {
        unreachable!("angle in (pi, 2pi)")
    };
    (reduced as f64 * PI / (2 * m) as f64).sin()
}

/// A maximally flat design and the chain parameters that realize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MFDesign {
    pub n_stages: usize,
    pub g_max: f64,
    pub omega_c: f64,
    pub bandwidth: f64,
    pub params: TransducerParams,
}

fn check_gmax(g_max: f64) -> Result<()> {
    if !(g_max > 0.0 && g_max.is_finite()) {
        return Err(Error::Domain(format!("g_max must be positive, got {g_max}")));
    }
    Ok(())
}

/// Half-width at half maximum `g_N = 2 sqrt(sin(a) sin(3a)) g_max` of the MF efficiency.
pub fn mf_bandwidth(n_stages: usize, g_max: f64) -> f64 {
    let m = n_stages + 2;
    2.0 * (sin_frac(1, m) * sin_frac(3, m)).sqrt() * g_max
}

/// Optimal external rate of the MF design.
pub fn mf_kappa(n_stages: usize, g_max: f64) -> f64 {
    let m = n_stages + 2;
    2.0 * (sin_frac(3, m) / sin_frac(1, m)).sqrt() * g_max
}

/// MF couplings `g_1 ..= g_{N+1}`; symmetric and saturating `g_max` at both ends.
pub fn mf_couplings(n_stages: usize, g_max: f64) -> Vec<f64> {
    let m = n_stages + 2;
    let base = sin_frac(1, m) * sin_frac(3, m);
    (1..=n_stages + 1)
        .map(|j| {
            // mirror so g_j == g_{N+2-j} exactly
            let j = j.min(n_stages + 2 - j);
            if j == 1 {
                g_max
            } else {
                (base / (sin_frac(2 * j - 1, m) * sin_frac(2 * j + 1, m))).sqrt() * g_max
            }
        })
        .collect()
}

/// Maximally flat design with unity conversion at `omega_c`.
pub fn maximally_flat_params(n_stages: usize, g_max: f64, omega_c: f64) -> Result<MFDesign> {
    check_gmax(g_max)?;
    let kappa = mf_kappa(n_stages, g_max);
    let params = TransducerParams::resonant(kappa, kappa, mf_couplings(n_stages, g_max), omega_c)?;
    Ok(MFDesign { n_stages, g_max, omega_c, bandwidth: mf_bandwidth(n_stages, g_max), params })
}

/// Butterworth-shaped MF efficiency.
pub fn mf_efficiency_closed_form(n_stages: usize, g_max: f64, omega_c: f64, omega: f64) -> f64 {
    let x = (omega - omega_c) / mf_bandwidth(n_stages, g_max);
    1.0 / (x.powi(2 * (n_stages as i32 + 2)) + 1.0)
}

/// Optimized uniform-coupling design: every `g_j = g_max`, every detuning at
/// `-omega_c`, and `kappa = 2 g_max` (even N) or `2 sqrt((N+3)/(N+1)) g_max` (odd N).
pub fn uniform_params(n_stages: usize, g_max: f64, omega_c: f64) -> Result<TransducerParams> {
    check_gmax(g_max)?;
    let kappa = if n_stages.is_multiple_of(2) {
        2.0 * g_max
    } else {
        2.0 * ((n_stages as f64 + 3.0) / (n_stages as f64 + 1.0)).sqrt() * g_max
    };
    TransducerParams::resonant(kappa, kappa, vec![g_max; n_stages + 1], omega_c)
}

/// Highest derivative order accepted by [`flatness_order`].
pub const MAX_FLATNESS_ORDER: usize = 12;

/// Scaled derivative magnitude below which a derivative counts as zero.
const VANISH_TOL: f64 = 1e-9;
/// Scaled derivative magnitude above which it counts as nonzero.
const NONZERO_TOL: f64 = 1e-6;

/// Taylor coefficients `c_0 ..= c_order` of `eta(omega_c + t)` in `t`.
///
/// Built from exact polynomial arithmetic on `|D_N(omega_c + t)|^2`; the k-th
/// derivative is `k! c_k`.
pub fn efficiency_taylor(params: &TransducerParams, omega_c: f64, order: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let diag: Vec<(Complex64, Complex64)> = (0..params.n_modes())
        .map(|j| (Complex64::new(0.5 * params.damping(j), omega_c + params.detunings[j]), Complex64::new(0.0, 1.0)))
        .collect();
    let gsq: Vec<f64> = params.couplings.iter().map(|g| g * g).collect();
    let det = poly::continuant_poly(&diag, &gsq);
    let det_sq = poly::abs_sq_on_real_line(&det);
    if det_sq[0] == 0.0 {
        return Err(Error::Pole);
    }
    let k_sq = params.transfer_numerator().powi(2);
    Ok(poly::series_reciprocal(&det_sq, order + 1).into_iter().map(|c| k_sq * c).collect())
}

/// Largest `k <= max_order` such that derivatives `1..=k` of `eta` vanish at `omega_c`.
///
/// Derivatives are scaled by the chain's mean rate so that the test is
/// dimensionless; a scaled derivative between the vanishing and nonzero
/// thresholds is reported as a conditioning error.
pub fn flatness_order(params: &TransducerParams, omega_c: f64, max_order: usize) -> Result<usize> {
    if max_order > MAX_FLATNESS_ORDER {
        return Err(Error::Domain(format!("max_order {max_order} exceeds supported {MAX_FLATNESS_ORDER}")));
    }
    let coeffs = efficiency_taylor(params, omega_c, max_order)?;
    let scale = params.mean_rate();
    let mut order = 0;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        let scaled = (c * scale.powi(k as i32)).abs();
        if scaled <= VANISH_TOL {
            order = k;
        } else if scaled >= NONZERO_TOL {
            break;
        } else {
            return Err(Error::Conditioning(format!(
                "scaled derivative of order {k} is {scaled:.3e}, between {VANISH_TOL:e} and {NONZERO_TOL:e}"
            )));
        }
    }
    Ok(order)
}

/// Derivatives `1..=max_order` of `eta` at `omega_c` by central finite
/// differences with step `h0 = g_mean / 10`, refined by Richardson extrapolation.
///
/// Loses roughly two digits per order; meant for low orders.
pub fn efficiency_derivatives_fd(params: &TransducerParams, omega_c: f64, max_order: usize) -> Result<Vec<f64>> {
    params.validate()?;
    const LEVELS: usize = 4;
    let h0 = 0.1 * params.mean_rate();
    let eta = |w: f64| crate::chain::conversion_efficiency(params, w);
    let mut out = Vec::with_capacity(max_order);
    for k in 1..=max_order {
        let mut table = Vec::with_capacity(LEVELS);
        for level in 0..LEVELS {
            let h = h0 / (1 << level) as f64;
            table.push(central_difference(&eta, omega_c, k, h)?);
        }
        for m in 1..LEVELS {
            let factor = 4f64.powi(m as i32);
            for i in (m..LEVELS).rev() {
                table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
            }
        }
        out.push(table[LEVELS - 1]);
    }
    Ok(out)
}

fn central_difference(f: &impl Fn(f64) -> Result<f64>, x: f64, k: usize, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f(x + (k as f64 / 2.0 - i as f64) * h)?;
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    Ok(acc / h.powi(k as i32))
}

/// Normalized doubly terminated LC ladder, series inductor first.
///
/// Element `j` (1-based) is an inductor for odd `j` and a capacitor for even `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderNetwork {
    pub order: usize,
    /// Source and load resistances `(R_1, R_{order})`.
    pub resistances: (f64, f64),
    /// Inductor values at odd positions, in order.
    pub inductances: Vec<f64>,
    /// Capacitor values at even positions, in order.
    pub capacitances: Vec<f64>,
}

/// Which ladder position carries the first inductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderConvention {
    SeriesInductorFirst,
    ShuntCapacitorFirst,
}

impl LadderNetwork {
    /// Value of element `j` (1-based), whatever its kind.
    pub fn element(&self, j: usize) -> f64 {
        if j % 2 == 1 {
            self.inductances[(j - 1) / 2]
        } else {
            self.capacitances[j / 2 - 1]
        }
    }

    fn inductance(&self, j: usize, convention: LadderConvention) -> Option<f64> {
        let odd_is_l = convention == LadderConvention::SeriesInductorFirst;
        (j >= 1 && j <= self.order && (j % 2 == 1) == odd_is_l).then(|| self.element(j))
    }

    fn capacitance(&self, j: usize, convention: LadderConvention) -> Option<f64> {
        let odd_is_l = convention == LadderConvention::SeriesInductorFirst;
        (j >= 1 && j <= self.order && (j % 2 == 1) != odd_is_l).then(|| self.element(j))
    }

    /// Power transmission `|S21|^2` at angular frequency `omega`, from the
    /// product of series-impedance and shunt-admittance ABCD matrices.
    pub fn power_transmission(&self, omega: f64) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (mut a, mut b, mut c, mut d) = (one, zero, zero, one);
        for j in 1..=self.order {
            let x = Complex64::new(0.0, omega * self.element(j));
            if j % 2 == 1 {
                // series impedance
                b += a * x;
                d += c * x;
            } else {
                // shunt admittance
                a += b * x;
                c += d * x;
            }
        }
        let (rs, rl) = self.resistances;
        let denom = a * rl + b + c * rs * rl + d * rs;
        4.0 * rs * rl / denom.norm_sqr()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "R": [self.resistances.0, self.resistances.1],
            "L": self.inductances,
            "C": self.capacitances,
        })
    }
}

/// Normalized Butterworth ladder of the given order with cutoff 1:
/// element `j` has value `2 sin((2j - 1) pi / (2 order))`.
pub fn butterworth_elements(order: usize) -> Result<LadderNetwork> {
    if order < 2 {
        return Err(Error::Domain(format!("ladder order must be at least 2, got {order}")));
    }
    let value = |j: usize| 2.0 * sin_frac(2 * j - 1, order);
    Ok(LadderNetwork {
        order,
        resistances: (1.0, 1.0),
        inductances: (1..=order).step_by(2).map(value).collect(),
        capacitances: (2..=order).step_by(2).map(value).collect(),
    })
}

/// Butterworth power gain `1 / ((omega / omega_cut)^{2 order} + 1)`.
pub fn butterworth_gain(order: usize, omega: f64, omega_cut: f64) -> f64 {
    1.0 / ((omega / omega_cut).powi(2 * order as i32) + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub mismatch: f64,
}

/// Outcome of checking the MF-transducer / Butterworth-ladder correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub n_stages: usize,
    pub convention: LadderConvention,
    pub identities: Vec<IdentityCheck>,
    pub max_mismatch: f64,
    /// Largest gap between the ladder's `|S21|^2` at `omega / g_N`, the MF
    /// closed form and the chain efficiency, over a frequency grid.
    pub response_max_mismatch: f64,
}

/// Tolerance on the element identities before the alternate ladder convention is tried.
pub const CORRESPONDENCE_TOL: f64 = 1e-12;

fn identities_for(n_stages: usize, ladder: &LadderNetwork, convention: LadderConvention) -> Vec<IdentityCheck> {
    let design = maximally_flat_params(n_stages, 1.0, 0.0).expect("g_max = 1 is valid");
    let p = &design.params;
    let gbar = design.bandwidth;
    let m = n_stages + 2;
    let (r1, rm) = ladder.resistances;
    let inv = |x: Option<f64>| x.map_or(f64::NAN, |v| 1.0 / v);
    let mut out = Vec::new();
    let mut push = |name: String, lhs: f64, rhs: f64| {
        let mismatch = if rhs.is_nan() { f64::INFINITY } else { (lhs - rhs).abs() };
        out.push(IdentityCheck { name, lhs, rhs, mismatch });
    };
    push("kappa_a/(2 g_N) = R_1/L_1".into(), p.kappa_a / gbar / 2.0, r1 * inv(ladder.inductance(1, convention)));
    for j in 1..=n_stages + 1 {
        let lhs = (p.couplings[j - 1] / gbar).powi(2);
        if j % 2 == 1 {
            let rhs = inv(ladder.inductance(j, convention)) * inv(ladder.capacitance(j + 1, convention));
            push(format!("g_{j}^2/g_N^2 = 1/(L_{j} C_{})", j + 1), lhs, rhs);
        } else {
            let rhs = inv(ladder.capacitance(j, convention)) * inv(ladder.inductance(j + 1, convention));
            push(format!("g_{j}^2/g_N^2 = 1/(C_{j} L_{})", j + 1), lhs, rhs);
        }
    }
    if n_stages % 2 == 1 {
        push(
            format!("kappa_b/(2 g_N) = R_{m}/L_{m}"),
            p.kappa_b / gbar / 2.0,
            rm * inv(ladder.inductance(m, convention)),
        );
    } else {
        push(
            format!("kappa_b/(2 g_N) = 1/(R_{m} C_{m})"),
            p.kappa_b / gbar / 2.0,
            inv(Some(rm)) * inv(ladder.capacitance(m, convention)),
        );
    }
    out
}

/// Evaluates both sides of every element identity linking the `N`-stage MF
/// design to the order-`(N+2)` Butterworth ladder, and compares frequency
/// responses. Tries the series-inductor-first ladder, falling back to the
/// dual convention if any identity misses [`CORRESPONDENCE_TOL`].
pub fn verify_butterworth_correspondence(n_stages: usize) -> Result<CorrespondenceReport> {
    let ladder = butterworth_elements(n_stages + 2)?;
    let max_of = |ids: &[IdentityCheck]| ids.iter().map(|c| c.mismatch).fold(0.0, f64::max);
    let mut convention = LadderConvention::SeriesInductorFirst;
    let mut identities = identities_for(n_stages, &ladder, convention);
    if max_of(&identities) > CORRESPONDENCE_TOL {
        let alt = identities_for(n_stages, &ladder, LadderConvention::ShuntCapacitorFirst);
        if max_of(&alt) < max_of(&identities) {
            convention = LadderConvention::ShuntCapacitorFirst;
            identities = alt;
        }
    }
    let design = maximally_flat_params(n_stages, 1.0, 0.0)?;
    let gbar = design.bandwidth;
    let mut response_max_mismatch: f64 = 0.0;
    for i in 0..=400 {
        let omega = gbar * (-5.0 + 10.0 * i as f64 / 400.0);
        let circuit = ladder.power_transmission(omega / gbar);
        let gain = butterworth_gain(n_stages + 2, omega, gbar);
        let closed = mf_efficiency_closed_form(n_stages, 1.0, 0.0, omega);
        let chain = crate::chain::conversion_efficiency(&design.params, omega)?;
        response_max_mismatch =
            response_max_mismatch.max((circuit - closed).abs()).max((gain - closed).abs()).max((chain - closed).abs());
    }
    Ok(CorrespondenceReport {
        n_stages,
        convention,
        max_mismatch: max_of(&identities),
        identities,
        response_max_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_and_one_stage_designs() {
        let d0 = maximally_flat_params(0, 1.0, 0.0).unwrap();
        assert_eq!(d0.params.kappa_a, 2.0);
        assert_eq!(d0.params.couplings, vec![1.0]);
        assert_relative_eq!(d0.bandwidth, 2f64.sqrt(), max_relative = 1e-15);

        let d1 = maximally_flat_params(1, 1.0, 0.0).unwrap();
        assert_relative_eq!(d1.params.kappa_a, 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(d1.params.couplings, vec![1.0, 1.0]);
    }

    #[test]
    fn three_stage_inner_coupling() {
        let d = maximally_flat_params(3, 1.0, 0.0).unwrap();
        let expected = (PI / 10.0).sin().sqrt();
        assert_relative_eq!(d.params.couplings[1], expected, max_relative = 1e-14);
        assert_relative_eq!(d.params.couplings[2], expected, max_relative = 1e-14);
    }

    #[test]
    fn couplings_are_feasible_and_symmetric() {
        for n in 0..=50 {
            let g = mf_couplings(n, 1.0);
            assert_eq!(g[0], 1.0);
            assert_eq!(g[n], 1.0);
            for j in 0..=n {
                assert!(g[j] <= 1.0, "N={n} j={j} g={}", g[j]);
                assert_eq!(g[j], g[n - j]);
            }
        }
    }

    #[test]
    fn detunings_follow_omega_c() {
        let d = maximally_flat_params(2, 1.5, 0.7).unwrap();
        assert!(d.params.detunings.iter().all(|&x| x == -0.7));
        assert_eq!(d.params.omega_c, 0.7);
        assert!(maximally_flat_params(2, 0.0, 0.0).is_err());
    }

    #[test]
    fn bandwidth_is_geometric_mean_and_decreasing() {
        let mut prev = f64::INFINITY;
        for n in 0..30 {
            let d = maximally_flat_params(n, 1.0, 0.0).unwrap();
            assert_relative_eq!(d.bandwidth, d.params.mean_rate(), max_relative = 1e-13);
            // g_0 = g_1 = sqrt(2)
            if n >= 2 {
                assert!(d.bandwidth < prev);
            } else {
                assert_relative_eq!(d.bandwidth, 2f64.sqrt(), max_relative = 1e-15);
            }
            prev = d.bandwidth;
        }
    }

    #[test]
    fn closed_form_half_maximum() {
        for n in 0..6 {
            let gbar = mf_bandwidth(n, 1.0);
            assert_eq!(mf_efficiency_closed_form(n, 1.0, 0.3, 0.3), 1.0);
            assert_relative_eq!(mf_efficiency_closed_form(n, 1.0, 0.3, 0.3 + gbar), 0.5, epsilon = 1e-15);
            assert_relative_eq!(mf_efficiency_closed_form(n, 1.0, 0.3, 0.3 - gbar), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn uniform_kappa_rule() {
        assert_eq!(uniform_params(2, 1.0, 0.0).unwrap().kappa_a, 2.0);
        assert_relative_eq!(uniform_params(1, 1.0, 0.0).unwrap().kappa_a, 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(uniform_params(3, 1.0, 0.0).unwrap().kappa_a, 6f64.sqrt(), max_relative = 1e-15);
        assert_eq!(uniform_params(4, 1.0, 0.0).unwrap().couplings, vec![1.0; 5]);
    }

    #[test]
    fn mf_flatness_orders() {
        for n in 0..=3 {
            let d = maximally_flat_params(n, 1.0, 0.0).unwrap();
            let max_order = (2 * n + 5).min(MAX_FLATNESS_ORDER);
            let order = flatness_order(&d.params, 0.0, max_order).unwrap();
            assert_eq!(order, (2 * n + 3).min(max_order), "N={n}");
        }
    }

    #[test]
    fn uniform_flatness_orders() {
        assert_eq!(flatness_order(&uniform_params(2, 1.0, 0.0).unwrap(), 0.0, 5).unwrap(), 3);
        assert_eq!(flatness_order(&uniform_params(3, 1.0, 0.0).unwrap(), 0.0, 7).unwrap(), 5);
    }

    #[test]
    fn flatness_of_generic_chain_is_zero() {
        let p = TransducerParams::resonant(1.0, 3.0, vec![0.7, 0.2], 0.0).unwrap();
        // asymmetric, so the first derivative does not vanish once detuned
        let mut q = p.clone();
        q.detunings = vec![0.1, -0.3, 0.2];
        assert_eq!(flatness_order(&q, 0.0, 4).unwrap(), 0);
        assert!(flatness_order(&p, 0.0, 13).is_err());
    }

    #[test]
    fn finite_differences_agree_with_taylor() {
        let p = uniform_params(2, 1.0, 0.0).unwrap();
        let mut q = p.clone();
        q.detunings = vec![0.05, -0.1, 0.0, 0.1];
        let taylor = efficiency_taylor(&q, 0.0, 4).unwrap();
        let fd = efficiency_derivatives_fd(&q, 0.0, 4).unwrap();
        let mut fact = 1.0;
        for k in 1..=4 {
            fact *= k as f64;
            let exact = fact * taylor[k];
            assert!((fd[k - 1] - exact).abs() <= 1e-4 * exact.abs().max(1.0), "k={k}: {} vs {exact}", fd[k - 1]);
        }
    }

    #[test]
    fn butterworth_values() {
        let l2 = butterworth_elements(2).unwrap();
        assert_relative_eq!(l2.inductances[0], 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(l2.capacitances[0], 2f64.sqrt(), max_relative = 1e-15);
        let l3 = butterworth_elements(3).unwrap();
        let vals: Vec<f64> = (1..=3).map(|j| l3.element(j)).collect();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(vals[1], 2.0, max_relative = 1e-15);
        assert_relative_eq!(vals[2], 1.0, max_relative = 1e-15);
        assert!(butterworth_elements(1).is_err());
        for order in 2..20 {
            let l = butterworth_elements(order).unwrap();
            for j in 1..=order {
                assert_eq!(l.element(j), l.element(order + 1 - j));
            }
        }
    }

    #[test]
    fn ladder_json_shape() {
        let v = butterworth_elements(3).unwrap().to_json_value();
        assert_eq!(v["order"], 3);
        assert_eq!(v["R"].as_array().unwrap().len(), 2);
        assert_eq!(v["L"].as_array().unwrap().len(), 2);
        assert_eq!(v["C"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn correspondence_zero_stage() {
        let r = verify_butterworth_correspondence(0).unwrap();
        assert_eq!(r.convention, LadderConvention::SeriesInductorFirst);
        assert!(r.max_mismatch <= 1e-12);
        assert_relative_eq!(r.identities[0].lhs, 1.0 / 2f64.sqrt(), max_relative = 1e-15);
        assert!(r.response_max_mismatch <= 1e-9);
    }
}
