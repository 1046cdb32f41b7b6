//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! The 15-point rule never samples interval endpoints, so integrable endpoint
//! singularities (the logarithmic divergence of the capacity at unit
//! efficiency) are handled by placing them on a breakpoint.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::NonConvergence(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[points[0], points[last]]`, initially splitting at every
/// interior point. Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F>(mut f: F, points: &[f64], rel_tol: f64, abs_tol: f64, max_intervals: usize) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        let p = kronrod15(&mut f, w[0], w[1])?;
        evaluations += 15;
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    // Panels too narrow to bisect in floating point keep their error here.
    let mut frozen_error = 0.0;
    let mut frozen_value = 0.0;
    loop {
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            break;
        }
        if heap.len() >= max_intervals {
            return Err(Error::NonConvergence(format!(
                "error estimate {error:.3e} above tolerance {tol:.3e} after {max_intervals} intervals"
            )));
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergence(format!(
                "error estimate {error:.3e} above tolerance {tol:.3e} at rounding resolution"
            )));
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            frozen_error += worst.error;
            frozen_value += worst.value;
            continue;
        }
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let abs_error = panels.iter().map(|p| p.error).sum::<f64>() + frozen_error;
    Ok(Integral { value, abs_error, evaluations, intervals: panels.len() })
}
