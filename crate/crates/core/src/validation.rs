//! Self-checks of the numerical pipeline against closed forms and identities.

use serde::{Deserialize, Serialize};

use crate::capacity::{
    self, integrate_capacity, mf_closed_form, mf_q1_closed, mf_q2_closed, q_max, Bound, ChannelPoint, DegradableForm,
    Protocol, QuadratureConfig,
};
use crate::chain::{conversion_efficiency, matching_coefficients};
use crate::designs::{
    flatness_order, maximally_flat_params, mf_bandwidth, mf_efficiency_closed_form, uniform_params,
    verify_butterworth_correspondence, MAX_FLATNESS_ORDER,
};
use crate::error::{Error, Result};
use crate::optimize::{grid_search_0stage, grid_search_1stage, Axis, Objective, SearchSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub max_stages: usize,
    /// Multiplies both external rates of every MF design before checking it.
    /// Anything other than 1 should make the identity checks fail.
    pub kappa_scale: f64,
    /// Include the (slower) optimizer recovery checks.
    pub search: bool,
}

impl ValidationOptions {
    pub fn new(max_stages: usize) -> Self {
        Self { max_stages, kappa_scale: 1.0, search: true }
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn push(
        &mut self,
        name: String,
        anchor: &str,
        computed: Vec<f64>,
        reference: Vec<f64>,
        tolerance: f64,
        passed: bool,
    ) {
        self.checks.push(Check { name, anchor: anchor.to_string(), computed, reference, tolerance, passed });
    }

    /// Passes when every `|computed - reference| <= tol * max(1, |reference|)` (relative) or `<= tol` (absolute).
    fn compare(
        &mut self,
        name: String,
        anchor: &str,
        computed: Vec<f64>,
        reference: Vec<f64>,
        tol: f64,
        relative: bool,
    ) {
        let passed = computed.len() == reference.len()
            && computed.iter().zip(&reference).all(|(c, r)| {
                let scale = if relative { r.abs() } else { 1.0 };
                (c - r).abs() <= tol * scale
            });
        self.push(name, anchor, computed, reference, tol, passed);
    }
}

fn mf_params(n: usize, kappa_scale: f64) -> Result<crate::chain::TransducerParams> {
    let mut p = maximally_flat_params(n, 1.0, 0.0)?.params;
    p.kappa_a *= kappa_scale;
    p.kappa_b *= kappa_scale;
    Ok(p)
}

/// Runs every cross-check for designs with up to `max_stages` stages.
pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    if opts.max_stages < 2 {
        return Err(Error::InvalidParams(format!("max_stages must be at least 2, got {}", opts.max_stages)));
    }
    let nmax = opts.max_stages;
    let cfg = QuadratureConfig::default();
    let mut b = Builder { checks: Vec::new() };

    for n in 0..=nmax {
        let p = mf_params(n, opts.kappa_scale)?;
        let gbar = mf_bandwidth(n, 1.0);
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let w = gbar * (-5.0 + i as f64 * 0.01);
            worst = worst.max((conversion_efficiency(&p, w)? - mf_efficiency_closed_form(n, 1.0, 0.0, w)).abs());
        }
        b.compare(
            format!("efficiency identity N={n}"),
            "MF Butterworth efficiency",
            vec![worst],
            vec![0.0],
            1e-9,
            false,
        );
    }

    for n in 0..=nmax {
        let p = mf_params(n, opts.kappa_scale)?;
        let coeffs = matching_coefficients(&p)?;
        let lead = coeffs[coeffs.len() - 1];
        let sub: Vec<f64> = coeffs[..coeffs.len() - 1].iter().map(|c| (c / lead).abs()).collect();
        let zeros = vec![0.0; sub.len()];
        b.compare(format!("nilpotency N={n}"), "matching matrix nilpotent", sub, zeros, 1e-8, false);
    }

    for n in 0..=nmax {
        let p = mf_params(n, opts.kappa_scale)?;
        let q1 = integrate_capacity(&p, Protocol::OneWay, Bound::Pure, 0.0, &cfg)?.value;
        let q2 = integrate_capacity(&p, Protocol::TwoWay, Bound::Pure, 0.0, &cfg)?.value;
        b.compare(
            format!("pure-loss closed forms N={n}"),
            "Q1 = 4(N+2) g_N / ln2, Q2 = 2 pi g_N / (ln2 sin(pi/(2N+4)))",
            vec![q1, q2],
            vec![mf_q1_closed(n), mf_q2_closed(n)],
            1e-6,
            true,
        );
    }

    {
        let (a, c) = (mf_q1_closed(200), mf_q2_closed(200));
        let monotone =
            (1..=200).all(|n| mf_q1_closed(n) > mf_q1_closed(n - 1) && mf_q2_closed(n) > mf_q2_closed(n - 1));
        let near = ((a - q_max()) / q_max()).abs() <= 1e-3 && ((c - q_max()) / q_max()).abs() <= 1e-3;
        b.push(
            "capacity limit N=200".into(),
            "Q_max = 4 sqrt(3) pi / ln2",
            vec![a, c],
            vec![q_max(), q_max()],
            1e-3,
            near && monotone,
        );
    }

    for n in [0, 2, 4].into_iter().filter(|&n| n <= nmax) {
        let p = mf_params(n, opts.kappa_scale)?;
        for nbar in [1.0, 10.0] {
            let mut computed = Vec::new();
            let mut reference = Vec::new();
            for (protocol, bound) in [
                (Protocol::OneWay, Bound::ThermalLower),
                (Protocol::TwoWay, Bound::ThermalLower),
                (Protocol::TwoWay, Bound::ThermalUpper),
            ] {
                computed.push(integrate_capacity(&p, protocol, bound, nbar, &cfg)?.value);
                reference.push(mf_closed_form(n, protocol, bound, nbar).expect("closed form exists")?);
            }
            b.compare(
                format!("thermal closed forms N={n} nbar={nbar}"),
                "MF thermal bounds",
                computed,
                reference,
                1e-5,
                true,
            );
        }
    }

    for n in 0..=nmax {
        let r = verify_butterworth_correspondence(n)?;
        let passed = r.max_mismatch <= 1e-12 && r.response_max_mismatch <= 1e-9;
        b.push(
            format!("Butterworth correspondence N={n} ({:?})", r.convention),
            "ladder element identities",
            vec![r.max_mismatch, r.response_max_mismatch],
            vec![0.0, 0.0],
            1e-12,
            passed,
        );
    }

    for n in 0..=3.min(nmax) {
        let p = mf_params(n, opts.kappa_scale)?;
        let want = 2 * n + 3;
        let order = flatness_order(&p, 0.0, (want + 1).min(MAX_FLATNESS_ORDER)).unwrap_or(0);
        b.push(
            format!("MF flatness N={n}"),
            "first 2N+3 derivatives vanish",
            vec![order as f64],
            vec![want as f64],
            0.0,
            order >= want,
        );
    }
    for (n, want) in [(2, 3usize), (3, 5usize)] {
        let p = uniform_params(n, 1.0, 0.0)?;
        let order = flatness_order(&p, 0.0, want + 2).unwrap_or(usize::MAX);
        b.push(
            format!("uniform flatness N={n}"),
            "uniform flatness order",
            vec![order as f64],
            vec![want as f64],
            0.0,
            order == want,
        );
    }

    {
        let mut computed = Vec::new();
        let mut reference = Vec::new();
        let mut passed = true;
        for n in 0..=nmax {
            let mf = integrate_capacity(&mf_params(n, 1.0)?, Protocol::OneWay, Bound::Pure, 0.0, &cfg)?.value;
            let uni =
                integrate_capacity(&uniform_params(n, 1.0, 0.0)?, Protocol::OneWay, Bound::Pure, 0.0, &cfg)?.value;
            let slack = 1e-6 * mf;
            passed &= if n == 1 { (mf - uni).abs() <= slack } else { mf >= uni - slack };
            computed.push(mf);
            reference.push(uni);
        }
        if nmax >= 10 {
            passed &= computed[10] / reference[10] > 1.3;
        }
        b.push("MF vs uniform Q1".into(), "MF dominates uniform", computed, reference, 1e-6, passed);
    }

    {
        let violations = bound_ordering_violations(DegradableForm::default());
        b.push(
            "bound ordering".into(),
            "thermal bound properties",
            vec![violations as f64],
            vec![0.0],
            0.0,
            violations == 0,
        );
    }

    {
        let p = mf_params(0, 1.0)?;
        let mut computed = Vec::new();
        for form in [DegradableForm::EntropyOutsideLog, DegradableForm::EntropyInsideLog] {
            let c = QuadratureConfig { degradable_form: form, ..cfg };
            computed.push(integrate_capacity(&p, Protocol::OneWay, Bound::ThermalUpper, 1.0, &c)?.value);
        }
        let lower = capacity::mf_q1_thermal_lower_closed(0, 1.0)?;
        let passed = computed.iter().all(|&u| u >= lower);
        b.push(
            "one-way upper bound, both degradable-extension forms N=0 nbar=1".into(),
            "entropy outside / inside the log",
            computed,
            vec![lower, lower],
            0.0,
            passed,
        );
    }

    if opts.search {
        let sweep = QuadratureConfig::sweep();
        let space0 = SearchSpace::new(vec![
            Axis::new("kappa_a", 0.5, 4.0, 11),
            Axis::new("kappa_b", 0.5, 4.0, 11),
            Axis::new("delta", -2.0, 2.0, 11),
        ]);
        let space1 = SearchSpace::new(vec![
            Axis::new("kappa_a", 1.0, 5.0, 11),
            Axis::new("kappa_b", 1.0, 5.0, 11),
            Axis::new("g_b", 0.2, 1.0, 11),
        ]);
        let s2 = 2f64.sqrt();
        for objective in [Objective::Q1, Objective::Q2] {
            for (n, space, target) in [(0, &space0, [2.0, 2.0, 0.0]), (1, &space1, [2.0 * s2, 2.0 * s2, 1.0])] {
                let r = if n == 0 {
                    grid_search_0stage(objective, space, 1, &sweep)?
                } else {
                    grid_search_1stage(objective, space, 1, &sweep)?
                };
                let best = r.best_coordinates();
                let cell = &r.refinement_history.last().expect("one round").spacing;
                let passed = best.iter().zip(&target).zip(cell).all(|((x, t), h)| (x - t).abs() <= h * (1.0 + 1e-9));
                b.push(
                    format!("grid search recovers MF point N={n} {objective:?}"),
                    "numerical optimum at the MF design",
                    best,
                    target.to_vec(),
                    cell.iter().cloned().fold(0.0, f64::max),
                    passed,
                );
            }
        }
    }

    let passed = b.checks.iter().filter(|c| c.passed).count();
    let failed = b.checks.len() - passed;
    Ok(ValidationReport { checks: b.checks, summary: Summary { passed, failed } })
}

/// Counts violations of bound ordering, pure-loss reduction and monotonicity
/// over a 100 x 20 grid of `(eta, nbar)`.
pub fn bound_ordering_violations(form: DegradableForm) -> usize {
    use capacity::{q1, q1_thermal_lower, q1_thermal_upper_with, q2, q2_thermal_lower, q2_thermal_upper};
    let etas: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
    let nbars: Vec<f64> = (0..20).map(|j| if j == 0 { 0.0 } else { 0.05 * 1.5f64.powi(j) }).collect();
    let tol = 1e-12;
    let mut violations = 0;
    let bounds = |eta: f64, nbar: f64| {
        let ch = ChannelPoint::new(eta, nbar).expect("grid point valid");
        [q1_thermal_lower(&ch), q1_thermal_upper_with(&ch, form), q2_thermal_lower(&ch), q2_thermal_upper(&ch)]
    };
    for (i, &eta) in etas.iter().enumerate() {
        for (j, &nbar) in nbars.iter().enumerate() {
            let [l1, u1, l2, u2] = bounds(eta, nbar);
            violations += usize::from(l1 > u1 + tol) + usize::from(l2 > u2 + tol);
            violations += usize::from(l1 > l2 + tol) + usize::from(u1 > u2 + tol);
            if nbar == 0.0 {
                let (p1, p2) = (q1(eta).unwrap(), q2(eta).unwrap());
                for (v, p) in [(l1, p1), (u1, p1), (l2, p2), (u2, p2)] {
                    violations += usize::from((v - p).abs() > tol * p.abs().max(1.0));
                }
            }
            if i > 0 {
                let prev = bounds(etas[i - 1], nbar);
                violations += prev.iter().zip([l1, u1, l2, u2]).filter(|(a, b)| **a > *b + tol).count();
            }
            if j > 0 {
                let prev = bounds(eta, nbars[j - 1]);
                violations += prev.iter().zip([l1, u1, l2, u2]).filter(|(a, b)| **a + tol < *b).count();
            }
        }
    }
    violations
}
