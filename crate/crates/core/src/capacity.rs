//! Discrete-time capacities of the thermal-loss channel and their
//! continuous-time integrals over the transducer band.
//!
//! A transducer at frequency `w` acts as a thermal-loss channel with
//! transmittance `eta(w)` and environment occupation `nbar`. Per-frequency
//! capacities are in qubits per channel use; integrating them over `w` gives
//! qubits per second in units of `g_max`.
//!
//! Every pointwise formula takes the transmittance together with its
//! complement `1 - eta` so that the logarithmic divergence at unit efficiency
//! is resolved without cancellation.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::chain::{ResponseEvaluator, TransducerParams};
use crate::designs::mf_bandwidth;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{entropy_h_unchecked, hyp2f1_special, k_of};

/// A single-frequency thermal-loss channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPoint {
    pub eta: f64,
    pub nbar: f64,
    loss: f64,
}

impl ChannelPoint {
    pub fn new(eta: f64, nbar: f64) -> Result<Self> {
        Self::with_loss(eta, 1.0 - eta, nbar)
    }

    /// Channel whose loss `1 - eta` is known more accurately than `eta`'s rounding.
    pub fn with_loss(eta: f64, loss: f64, nbar: f64) -> Result<Self> {
        check_eta(eta)?;
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::Domain(format!("loss must lie in [0, 1], got {loss}")));
        }
        if !(nbar >= 0.0) || nbar.is_infinite() {
            return Err(Error::Domain(format!("nbar must be finite and >= 0, got {nbar}")));
        }
        Ok(Self { eta, nbar, loss })
    }

    /// `1 - eta`.
    pub fn loss(&self) -> f64 {
        self.loss
    }

    /// Pure-loss channel.
    pub fn pure(&self) -> Self {
        Self { nbar: 0.0, ..*self }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("transmittance must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

fn floor0(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// One-way pure-loss capacity `max{log2(eta / (1 - eta)), 0}`; `+inf` at `eta = 1`.
pub fn q1(eta: f64) -> Result<f64> {
    Ok(q1_pure(&ChannelPoint::new(eta, 0.0)?))
}

/// Two-way pure-loss capacity `-log2(1 - eta)`; `+inf` at `eta = 1`.
pub fn q2(eta: f64) -> Result<f64> {
    Ok(q2_pure(&ChannelPoint::new(eta, 0.0)?))
}

fn q1_pure(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    if ch.eta == 0.0 {
        return 0.0;
    }
    floor0((ch.eta / ch.loss).log2())
}

fn q2_pure(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    floor0(-ch.loss.log2())
}

/// `max{log2(eta / (1 - eta)) - h(nbar), 0}`.
pub fn q1_thermal_lower(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    if ch.eta == 0.0 {
        return 0.0;
    }
    floor0((ch.eta / ch.loss).log2() - entropy_h_unchecked(ch.nbar))
}

/// Upper bound from the twisted attenuator/amplifier decomposition:
/// `max{log2[(eta - (1-eta) nbar) / ((1-eta)(nbar+1))], 0}`.
pub fn q1_twist_upper(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    let numerator = ch.eta - ch.loss * ch.nbar;
    if numerator <= 0.0 {
        return 0.0;
    }
    floor0((numerator / (ch.loss * (ch.nbar + 1.0))).log2())
}

/// Placement of the entropy terms in the degradable-extension bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegradableForm {
    /// `log2(eta/(1-eta)) + h((1-eta) nbar) - h(eta nbar)`.
    #[default]
    EntropyOutsideLog,
    /// `log2(eta/(1-eta) + h((1-eta) nbar) - h(eta nbar))`.
    EntropyInsideLog,
}

/// Upper bound from degradable extensions of the thermal-loss channel.
pub fn q1_degradable_upper(ch: &ChannelPoint, form: DegradableForm) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    if ch.eta == 0.0 {
        return 0.0;
    }
    let entropy_gap = entropy_h_unchecked(ch.loss * ch.nbar) - entropy_h_unchecked(ch.eta * ch.nbar);
    match form {
        DegradableForm::EntropyOutsideLog => floor0((ch.eta / ch.loss).log2() + entropy_gap),
        DegradableForm::EntropyInsideLog => {
            let arg = ch.eta / ch.loss + entropy_gap;
            if arg <= 0.0 {
                0.0
            } else {
                floor0(arg.log2())
            }
        }
    }
}

/// One-way upper bound: the smallest of the twist, degradable-extension and
/// two-way upper bounds.
pub fn q1_thermal_upper(ch: &ChannelPoint) -> f64 {
    q1_thermal_upper_with(ch, DegradableForm::default())
}

pub fn q1_thermal_upper_with(ch: &ChannelPoint, form: DegradableForm) -> f64 {
    q1_twist_upper(ch).min(q1_degradable_upper(ch, form)).min(q2_thermal_upper(ch))
}

/// `max{-log2(1 - eta) - h(nbar), 0}`.
pub fn q2_thermal_lower(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    floor0(-ch.loss.log2() - entropy_h_unchecked(ch.nbar))
}

/// `max{-log2[(1 - eta) eta^nbar] - h(nbar), 0}` for `nbar < eta / (1 - eta)`,
/// and zero for entanglement-breaking channels (`nbar >= eta / (1 - eta)`),
/// where the bound is continuous and vanishes.
pub fn q2_thermal_upper(ch: &ChannelPoint) -> f64 {
    if ch.loss == 0.0 {
        return f64::INFINITY;
    }
    if ch.eta <= ch.nbar * ch.loss {
        return 0.0;
    }
    let log_eta = if ch.nbar == 0.0 { 0.0 } else { ch.nbar * ch.eta.log2() };
    floor0(-ch.loss.log2() - log_eta - entropy_h_unchecked(ch.nbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    OneWay,
    TwoWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Pure,
    ThermalLower,
    ThermalUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NumericQuadrature,
    ClosedForm,
}

/// Per-frequency capacity selected by protocol and bound.
pub fn pointwise_capacity(protocol: Protocol, bound: Bound, ch: &ChannelPoint, form: DegradableForm) -> f64 {
    match (protocol, bound) {
        (Protocol::OneWay, Bound::Pure) => q1_pure(ch),
        (Protocol::TwoWay, Bound::Pure) => q2_pure(ch),
        (Protocol::OneWay, Bound::ThermalLower) => q1_thermal_lower(ch),
        (Protocol::OneWay, Bound::ThermalUpper) => q1_thermal_upper_with(ch, form),
        (Protocol::TwoWay, Bound::ThermalLower) => q2_thermal_lower(ch),
        (Protocol::TwoWay, Bound::ThermalUpper) => q2_thermal_upper(ch),
    }
}

/// Smallest transmittance at which the selected integrand can be positive.
fn support_threshold(protocol: Protocol, bound: Bound, nbar: f64) -> f64 {
    let nbar = if bound == Bound::Pure { 0.0 } else { nbar };
    match (protocol, bound) {
        (Protocol::OneWay, Bound::Pure) => 0.5,
        (Protocol::OneWay, Bound::ThermalLower) => {
            // eta / (1 - eta) > 2^h(nbar) = k + 1
            let r = entropy_h_unchecked(nbar).exp2();
            r / (1.0 + r)
        }
        // bounded by the twist form, positive only for eta/(1-eta) > 2 nbar + 1
        (Protocol::OneWay, Bound::ThermalUpper) => (2.0 * nbar + 1.0) / (2.0 * nbar + 2.0),
        (Protocol::TwoWay, Bound::Pure) => 0.0,
        (Protocol::TwoWay, Bound::ThermalLower) => {
            let r = entropy_h_unchecked(nbar).exp2();
            1.0 - 1.0 / r
        }
        (Protocol::TwoWay, Bound::ThermalUpper) => nbar / (nbar + 1.0),
    }
}

/// Settings of the capacity integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Half-width of the truncation window for integrands with unbounded
    /// support, in units of the chain's mean rate.
    pub window_halfwidth_bandwidths: f64,
    /// Place a breakpoint at `omega_c`, where the integrand diverges for matched chains.
    pub singularity_split: bool,
    pub max_intervals: usize,
    pub degradable_form: DegradableForm,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            window_halfwidth_bandwidths: 50.0,
            singularity_split: true,
            max_intervals: 4000,
            degradable_form: DegradableForm::default(),
        }
    }
}

impl QuadratureConfig {
    /// Looser tolerances for parameter sweeps.
    pub fn sweep() -> Self {
        Self { rel_tol: 1e-5, abs_tol: 1e-7, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if !(self.window_halfwidth_bandwidths > 0.0) {
            return Err(Error::Domain("truncation window must be positive".into()));
        }
        if self.max_intervals == 0 {
            return Err(Error::Domain("interval budget must be positive".into()));
        }
        Ok(())
    }
}

/// A continuous-time capacity in qubits per second (units of `g_max`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

/// Serialized form of a capacity result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    pub protocol: Protocol,
    pub bound: Bound,
    pub nbar: f64,
}

impl CapacityReport {
    pub fn new(estimate: CapacityEstimate, protocol: Protocol, bound: Bound, nbar: f64) -> Self {
        Self { value: estimate.value, abs_error: estimate.abs_error, method: estimate.method, protocol, bound, nbar }
    }
}

/// Integrates the selected per-frequency capacity over all frequencies.
///
/// The domain is split at `omega_c` and truncated to `omega_c +- L`. For
/// integrands that vanish below a transmittance threshold, `L` is chosen from
/// a rigorous bound on `eta` so that the truncation is exact. Otherwise
/// `L = rho + W * g_mean` (with `rho` a radius enclosing every zero of
/// `D_N`), and the tails are estimated by `eta / ln 2 ~ K^2 w^{-2(N+2)} / ln 2`
/// and bracketed using `(|t| - rho)^{N+2} <= |D_N(omega_c + t)| <= (|t| + rho)^{N+2}`;
/// the bracket width enters `abs_error`.
pub fn integrate_capacity(
    params: &TransducerParams,
    protocol: Protocol,
    bound: Bound,
    nbar: f64,
    cfg: &QuadratureConfig,
) -> Result<CapacityEstimate> {
    cfg.validate()?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("nbar must be finite and >= 0, got {nbar}")));
    }
    let nbar = if bound == Bound::Pure { 0.0 } else { nbar };
    let evaluator = ResponseEvaluator::new(params)?;
    if params.kappa_a == 0.0 || params.kappa_b == 0.0 {
        return Ok(CapacityEstimate { value: 0.0, abs_error: 0.0, method: Method::NumericQuadrature });
    }

    let modes = params.n_modes() as i32;
    let center = params.omega_c;
    let rho = params.root_radius();
    let k_sq = params.transfer_numerator().powi(2);
    let threshold = support_threshold(protocol, bound, nbar);

    let (half_width, tail_value, tail_error) = if threshold > 0.0 {
        let reach = (k_sq / threshold).powf(1.0 / (2 * modes) as f64);
        ((rho + reach) * (1.0 + 1e-12), 0.0, 0.0)
    } else {
        let width = rho + cfg.window_halfwidth_bandwidths * params.mean_rate();
        let gap = width - rho;
        let power = (2 * modes - 1) as f64;
        let eta_edge = (k_sq / gap.powi(2 * modes)).min(0.5);
        let bound = 2.0 * k_sq * gap.powf(-power) / (power * LN_2 * (1.0 - eta_edge));
        let estimate = 2.0 * k_sq * width.powf(-power) / (power * LN_2);
        let lower = 2.0 * k_sq * (width + rho).powf(-power) / (power * LN_2);
        (width, estimate, (bound - estimate).max(estimate - lower))
    };

    let points: Vec<f64> = if cfg.singularity_split {
        vec![center - half_width, center, center + half_width]
    } else {
        vec![center - half_width, center + half_width]
    };

    let form = cfg.degradable_form;
    let integrand = |omega: f64| -> Result<f64> {
        let (eta, loss) = evaluator.efficiency_and_loss(omega)?;
        // a node landing exactly on a reflection zero away from omega_c
        let loss = if loss == 0.0 && omega != center { f64::MIN_POSITIVE } else { loss };
        let ch = ChannelPoint::with_loss(eta, loss, nbar)?;
        Ok(pointwise_capacity(protocol, bound, &ch, form))
    };
    let res = quadrature::integrate(integrand, &points, cfg.rel_tol, cfg.abs_tol, cfg.max_intervals)?;
    Ok(CapacityEstimate {
        value: (res.value + tail_value).max(0.0),
        abs_error: res.abs_error + tail_error,
        method: Method::NumericQuadrature,
    })
}

fn modes_f(n_stages: usize) -> f64 {
    (n_stages + 2) as f64
}

/// `4 (N+2) g_N / ln 2`, the one-way pure-loss capacity of the maximally flat design.
pub fn mf_q1_closed(n_stages: usize) -> f64 {
    4.0 * modes_f(n_stages) * mf_bandwidth(n_stages, 1.0) / LN_2
}

/// `2 pi g_N / (ln 2 sin(pi / 2(N+2)))`, the two-way pure-loss capacity of the
/// maximally flat design.
pub fn mf_q2_closed(n_stages: usize) -> f64 {
    let half_angle = PI / (2.0 * modes_f(n_stages));
    2.0 * PI * mf_bandwidth(n_stages, 1.0) / (LN_2 * half_angle.sin())
}

/// Large-N limit `4 sqrt(3) pi / ln 2` shared by both pure-loss capacities.
pub fn q_max() -> f64 {
    4.0 * 3f64.sqrt() * PI / LN_2
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("nbar must be finite and >= 0, got {nbar}")));
    }
    Ok(())
}

/// One-way thermal lower bound of the maximally flat design,
/// `4(N+2)/ln 2 * [(1 + 1/nbar)^nbar (1 + nbar)]^{-1/(2(N+2))} g_N`.
pub fn mf_q1_thermal_lower_closed(n_stages: usize, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    let s = 1.0 / (2.0 * modes_f(n_stages));
    // the bracket equals 2^{h(nbar)}
    let bracket = entropy_h_unchecked(nbar).exp2();
    Ok(mf_q1_closed(n_stages) * bracket.powf(-s))
}

/// Two-way thermal lower bound of the maximally flat design,
/// `4(N+2) / (ln 2 k^s) 2F1(1, s; 1+s; -1/k) g_N` with `s = 1/(2(N+2))`.
pub fn mf_q2_thermal_lower_closed(n_stages: usize, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if nbar == 0.0 {
        return Ok(mf_q2_closed(n_stages));
    }
    let m = modes_f(n_stages);
    let s = 1.0 / (2.0 * m);
    let k = k_of(nbar)?;
    let f = hyp2f1_special(s, 1.0 / k)?;
    Ok(4.0 * m / (LN_2 * k.powf(s)) * f * mf_bandwidth(n_stages, 1.0))
}

/// Two-way thermal upper bound of the maximally flat design,
/// `4(N+2) / (ln 2 nbar^s) {(nbar+1) 2F1(1, s; 1+s; -1/nbar) - nbar} g_N`.
pub fn mf_q2_thermal_upper_closed(n_stages: usize, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if nbar == 0.0 {
        return Ok(mf_q2_closed(n_stages));
    }
    let m = modes_f(n_stages);
    let s = 1.0 / (2.0 * m);
    let f = hyp2f1_special(s, 1.0 / nbar)?;
    Ok(4.0 * m / (LN_2 * nbar.powf(s)) * ((nbar + 1.0) * f - nbar) * mf_bandwidth(n_stages, 1.0))
}

/// Closed form for the maximally flat design when one is known.
pub fn mf_closed_form(n_stages: usize, protocol: Protocol, bound: Bound, nbar: f64) -> Option<Result<f64>> {
    match (protocol, bound) {
        (Protocol::OneWay, Bound::Pure) => Some(Ok(mf_q1_closed(n_stages))),
        (Protocol::TwoWay, Bound::Pure) => Some(Ok(mf_q2_closed(n_stages))),
        (Protocol::OneWay, Bound::ThermalLower) => Some(mf_q1_thermal_lower_closed(n_stages, nbar)),
        (Protocol::TwoWay, Bound::ThermalLower) => Some(mf_q2_thermal_lower_closed(n_stages, nbar)),
        (Protocol::TwoWay, Bound::ThermalUpper) => Some(mf_q2_thermal_upper_closed(n_stages, nbar)),
        (Protocol::OneWay, Bound::ThermalUpper) if nbar == 0.0 => Some(Ok(mf_q1_closed(n_stages))),
        (Protocol::OneWay, Bound::ThermalUpper) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ch(eta: f64, nbar: f64) -> ChannelPoint {
        ChannelPoint::new(eta, nbar).unwrap()
    }

    #[test]
    fn pure_loss_values() {
        assert_eq!(q1(0.5).unwrap(), 0.0);
        assert_relative_eq!(q1(0.8).unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(q1(1.0).unwrap(), f64::INFINITY);
        assert_eq!(q1(0.0).unwrap(), 0.0);
        assert_eq!(q2(0.0).unwrap(), 0.0);
        assert_eq!(q2(0.5).unwrap(), 1.0);
        assert_eq!(q2(0.75).unwrap(), 2.0);
        assert_eq!(q2(1.0).unwrap(), f64::INFINITY);
        assert!(q1(1.1).is_err());
        assert!(q2(-0.1).is_err());
    }

    #[test]
    fn one_way_thermal_lower_values() {
        assert_relative_eq!(q1_thermal_lower(&ch(0.9, 0.0)), 9f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(q1_thermal_lower(&ch(0.9, 1.0)), 9f64.log2() - 2.0, max_relative = 1e-13);
        assert_eq!(q1_thermal_lower(&ch(0.6, 10.0)), 0.0);
    }

    #[test]
    fn one_way_thermal_upper_components() {
        let c = ch(0.9, 1.0);
        // twist: log2[(0.9 - 0.1) / (0.1 * 2)] = log2 4
        assert_relative_eq!(q1_twist_upper(&c), 2.0, max_relative = 1e-13);
        // degradable: log2 9 + h(0.1) - h(0.9)
        let h = |x: f64| (x + 1.0) * (x + 1.0).log2() - x * x.log2();
        let de = 9f64.log2() + h(0.1) - h(0.9);
        assert_relative_eq!(q1_degradable_upper(&c, DegradableForm::EntropyOutsideLog), de, max_relative = 1e-13);
        let de_inside = (9.0 + h(0.1) - h(0.9)).log2();
        assert_relative_eq!(q1_degradable_upper(&c, DegradableForm::EntropyInsideLog), de_inside, max_relative = 1e-13);
        // two-way upper: -log2(0.1 * 0.9) - 2
        let two_way = -(0.1f64 * 0.9).log2() - 2.0;
        assert_relative_eq!(q2_thermal_upper(&c), two_way, max_relative = 1e-13);
        assert_relative_eq!(q1_thermal_upper(&c), de.min(2.0).min(two_way), max_relative = 1e-13);

        assert_eq!(q1_twist_upper(&ch(0.4, 5.0)), 0.0);
        assert_eq!(q1_thermal_upper(&ch(0.4, 5.0)), 0.0);
    }

    #[test]
    fn thermal_bounds_reduce_at_zero_occupation() {
        for eta in [0.1, 0.5, 0.73, 0.99] {
            let c = ch(eta, 0.0);
            assert_relative_eq!(q1_thermal_upper(&c), q1(eta).unwrap(), epsilon = 1e-12);
            assert_relative_eq!(q1_thermal_lower(&c), q1(eta).unwrap(), epsilon = 1e-12);
            assert_relative_eq!(q2_thermal_upper(&c), q2(eta).unwrap(), epsilon = 1e-12);
            assert_relative_eq!(q2_thermal_lower(&c), q2(eta).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn two_way_thermal_values() {
        assert_relative_eq!(q2_thermal_lower(&ch(0.5, 0.0)), 1.0, epsilon = 1e-14);
        assert_relative_eq!(q2_thermal_lower(&ch(0.75, 1.0)), 0.0, epsilon = 1e-14);
        assert_relative_eq!(q2_thermal_lower(&ch(0.9375, 1.0)), 2.0, epsilon = 1e-13);
        assert_eq!(q2_thermal_upper(&ch(0.5, 1.0)), 0.0);
        assert_eq!(q2_thermal_upper(&ch(1e-12, 1.0)), 0.0);
        assert_eq!(q2_thermal_upper(&ch(0.0, 1.0)), 0.0);
    }

    #[test]
    fn two_way_upper_is_continuous_at_entanglement_breaking_edge() {
        let nbar = 3.0;
        let edge = nbar / (nbar + 1.0);
        let just_above = q2_thermal_upper(&ch(edge + 1e-9, nbar));
        assert!(just_above < 1e-7, "{just_above}");
    }

    #[test]
    fn closed_forms_at_zero_stages() {
        assert_relative_eq!(mf_q1_closed(0), 8.0 * 2f64.sqrt() / LN_2, max_relative = 1e-15);
        assert_relative_eq!(mf_q2_closed(0), 4.0 * PI / LN_2, max_relative = 1e-15);
        assert_relative_eq!(q_max(), 31.401_112_175_379_126, max_relative = 1e-15);
    }

    #[test]
    fn thermal_closed_forms_reduce() {
        for n in [0, 3, 7] {
            assert_relative_eq!(mf_q1_thermal_lower_closed(n, 0.0).unwrap(), mf_q1_closed(n), max_relative = 1e-15);
            assert_relative_eq!(mf_q2_thermal_lower_closed(n, 0.0).unwrap(), mf_q2_closed(n), max_relative = 1e-15);
            assert_relative_eq!(mf_q2_thermal_upper_closed(n, 0.0).unwrap(), mf_q2_closed(n), max_relative = 1e-15);
            assert_relative_eq!(mf_q2_thermal_lower_closed(n, 1e-8).unwrap(), mf_q2_closed(n), max_relative = 1e-3);
        }
        assert!(mf_q2_thermal_lower_closed(4, 10.0).unwrap() < mf_q2_thermal_upper_closed(4, 10.0).unwrap());
    }

    #[test]
    fn thermal_closed_forms_match_high_precision_values() {
        // mpmath: 30-digit quadrature of the pointwise bounds over the MF spectrum
        assert_relative_eq!(mf_q1_thermal_lower_closed(0, 1.0).unwrap(), 11.541_560_327_111_707, max_relative = 1e-13);
        assert_relative_eq!(mf_q2_thermal_lower_closed(2, 10.0).unwrap(), 18.065_529_026_067_99, max_relative = 1e-12);
        assert_relative_eq!(mf_q2_thermal_upper_closed(4, 1.0).unwrap(), 26.512_456_973_009_684, max_relative = 1e-12);
    }

    #[test]
    fn upper_closed_form_decreases_with_occupation() {
        let vals: Vec<f64> = [1.0, 2.0, 5.0, 10.0].iter().map(|&n| mf_q2_thermal_upper_closed(4, n).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn report_json_shape() {
        let est = CapacityEstimate { value: 1.5, abs_error: 1e-9, method: Method::NumericQuadrature };
        let json =
            serde_json::to_string(&CapacityReport::new(est, Protocol::TwoWay, Bound::ThermalLower, 1.0)).unwrap();
        assert_eq!(
            json,
            r#"{"value":1.5,"abs_error":1e-9,"method":"numeric-quadrature","protocol":"two-way","bound":"thermal-lower","nbar":1.0}"#
        );
    }

    #[test]
    fn channel_point_validation() {
        assert!(ChannelPoint::new(1.2, 0.0).is_err());
        assert!(ChannelPoint::new(0.5, -1.0).is_err());
        assert!(ChannelPoint::with_loss(0.5, 1.5, 0.0).is_err());
    }
}
