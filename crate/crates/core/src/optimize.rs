//! Exhaustive grid searches over transducer parameters, and design-family sweeps.
//!
//! Parameters are addressed by name:
//!
//! | name | meaning |
//! |------|---------|
//! | `kappa` | sets `kappa_a` and `kappa_b` together |
//! | `kappa_a`, `kappa_b` | external coupling rates |
//! | `delta` | relative end-mode detuning `Delta_a - Delta_b`, split as `+-delta/2` |
//! | `delta_a`, `delta_b`, `delta_<j>` | detuning of the first, last or j-th mode (0-based) |
//! | `g<j>` | coupling `g_j`, `1 <= j <= N+1` |
//! | `g_a`, `g_b` | first and last coupling |
//!
//! Every rate is in units of `g_max = 1`; couplings outside `(0, 1]` are rejected.
//! Unnamed couplings default to `g_max`, unnamed detunings to zero.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{integrate_capacity, mf_closed_form, Bound, Protocol, QuadratureConfig};
use crate::chain::TransducerParams;
use crate::designs::{maximally_flat_params, uniform_params};
use crate::error::{Error, Result};

/// Pure-loss capacity to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Q1,
    Q2,
}

impl Objective {
    pub fn protocol(self) -> Protocol {
        match self {
            Objective::Q1 => Protocol::OneWay,
            Objective::Q2 => Protocol::TwoWay,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q1" => Ok(Objective::Q1),
            "q2" => Ok(Objective::Q2),
            _ => Err(Error::InvalidSearch(format!("unknown objective '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, n_points: usize) -> Self {
        Self { name: name.to_string(), min, max, n_points }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    /// Parses `name:min:max:points`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidSearch(format!("axis '{s}' is not name:min:max:points"));
        if parts.len() != 4 || parts[0].is_empty() {
            return Err(bad());
        }
        Ok(Axis {
            name: parts[0].to_string(),
            min: parts[1].parse().map_err(|_| bad())?,
            max: parts[2].parse().map_err(|_| bad())?,
            n_points: parts[3].parse().map_err(|_| bad())?,
        })
    }
}

/// Parses `name=value`.
pub fn parse_fixed(s: &str) -> Result<(String, f64)> {
    let bad = || Error::InvalidSearch(format!("'{s}' is not name=value"));
    let (name, value) = s.split_once('=').ok_or_else(bad)?;
    if name.is_empty() {
        return Err(bad());
    }
    Ok((name.to_string(), value.parse().map_err(|_| bad())?))
}

/// A rectangular grid of named parameters plus fixed values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchSpace {
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
}

impl SearchSpace {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes, fixed: BTreeMap::new() }
    }

    pub fn with_fixed(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_string(), value);
        self
    }

    pub fn n_samples(&self) -> usize {
        self.axes.iter().map(|a| a.n_points).product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidSearch("search space has no axes".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.n_points < 2 {
                return Err(Error::InvalidSearch(format!("axis {} needs at least 2 points", a.name)));
            }
            if !(a.min < a.max) || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::InvalidSearch(format!("axis {} needs finite min < max", a.name)));
            }
            if self.axes[..i].iter().any(|b| b.name == a.name) || self.fixed.contains_key(&a.name) {
                return Err(Error::InvalidSearch(format!("parameter {} given twice", a.name)));
            }
        }
        Ok(())
    }

    fn point(&self, mut index: usize) -> Vec<f64> {
        let mut point = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            point[k] = a.value(index % a.n_points);
            index /= a.n_points;
        }
        point
    }

    /// The same grid shrunk `factor` times around `center`, clipped to `self`.
    fn shrunk(&self, center: &[f64], factor: f64) -> SearchSpace {
        let axes = self
            .axes
            .iter()
            .zip(center)
            .map(|(a, &c)| {
                let half = 0.5 * (a.max - a.min) / factor;
                let (mut lo, mut hi) = (c - half, c + half);
                if lo < a.min {
                    hi += a.min - lo;
                    lo = a.min;
                }
                if hi > a.max {
                    lo -= hi - a.max;
                    hi = a.max;
                }
                Axis { name: a.name.clone(), min: lo.max(a.min), max: hi, n_points: a.n_points }
            })
            .collect();
        SearchSpace { axes, fixed: self.fixed.clone() }
    }
}

/// How named values map onto a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    None,
    /// `g_j = g_{N+2-j}`: only the first half of the couplings is named.
    Mirror,
}

fn build_params(n_stages: usize, values: &BTreeMap<String, f64>, symmetry: Symmetry) -> Result<TransducerParams> {
    let modes = n_stages + 2;
    let mut kappa_a = None;
    let mut kappa_b = None;
    let mut detunings = vec![0.0; modes];
    let mut couplings = vec![1.0; n_stages + 1];
    let unknown = |name: &str| Error::InvalidSearch(format!("unknown parameter '{name}' for N = {n_stages}"));
    for (name, &v) in values {
        match name.as_str() {
            "kappa" => {
                kappa_a = Some(v);
                kappa_b = Some(v);
            }
            "kappa_a" => kappa_a = Some(v),
            "kappa_b" => kappa_b = Some(v),
            "delta" => {
                detunings[0] += 0.5 * v;
                detunings[modes - 1] -= 0.5 * v;
            }
            "delta_a" => detunings[0] += v,
            "delta_b" => detunings[modes - 1] += v,
            "g_a" => couplings[0] = v,
            "g_b" => couplings[n_stages] = v,
            other => {
                if let Some(j) = other.strip_prefix("delta_").and_then(|j| j.parse::<usize>().ok()) {
                    *detunings.get_mut(j).ok_or_else(|| unknown(other))? += v;
                } else if let Some(j) = other.strip_prefix('g').and_then(|j| j.parse::<usize>().ok()) {
                    if j == 0 || j > n_stages + 1 {
                        return Err(unknown(other));
                    }
                    couplings[j - 1] = v;
                    if symmetry == Symmetry::Mirror {
                        couplings[n_stages + 1 - j] = v;
                    }
                } else {
                    return Err(unknown(other));
                }
            }
        }
    }
    if let Some(g) = couplings.iter().find(|g| !(**g > 0.0 && **g <= 1.0)) {
        return Err(Error::InvalidSearch(format!("coupling {g} outside (0, g_max]")));
    }
    let (Some(kappa_a), Some(kappa_b)) = (kappa_a, kappa_b) else {
        return Err(Error::InvalidSearch("kappa_a and kappa_b must be set (or kappa)".into()));
    };
    let params = TransducerParams { n_stages, kappa_a, kappa_b, detunings, couplings, omega_c: 0.0 };
    params.validate().map_err(|e| Error::InvalidSearch(e.to_string()))?;
    Ok(params)
}

/// One evaluated grid point; `value` is `None` when quadrature failed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub point: Vec<f64>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub spacing: Vec<f64>,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n_stages: usize,
    pub objective: Objective,
    pub axis_names: Vec<String>,
    pub best_point: BTreeMap<String, f64>,
    pub best_value: f64,
    /// Objective at `best_point` recomputed with the default (tight) tolerances.
    pub verified_value: f64,
    pub grid_samples: Vec<GridSample>,
    pub refinement_history: Vec<RefinementStep>,
}

impl SearchResult {
    /// Coordinates of the best point along the searched axes.
    pub fn best_coordinates(&self) -> Vec<f64> {
        self.axis_names.iter().map(|n| self.best_point[n]).collect()
    }

    pub fn missing_samples(&self) -> usize {
        self.grid_samples.iter().filter(|s| s.value.is_none()).count()
    }

    /// `param1,...,paramK,Q`; failed samples are written as `NaN`.
    pub fn samples_csv(&self) -> String {
        let mut out = self.axis_names.join(",");
        out.push_str(",Q\n");
        for s in &self.grid_samples {
            for x in &s.point {
                out.push_str(&format!("{x:?},"));
            }
            match s.value {
                Some(v) => out.push_str(&format!("{v:?}\n")),
                None => out.push_str("NaN\n"),
            }
        }
        out
    }
}

/// Shrink factor of each refinement round.
pub const REFINEMENT_FACTOR: f64 = 5.0;

fn evaluate(
    n_stages: usize,
    objective: Objective,
    space: &SearchSpace,
    point: &[f64],
    symmetry: Symmetry,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut values = space.fixed.clone();
    for (a, &x) in space.axes.iter().zip(point) {
        values.insert(a.name.clone(), x);
    }
    let params = build_params(n_stages, &values, symmetry)?;
    Ok(integrate_capacity(&params, objective.protocol(), Bound::Pure, 0.0, cfg)?.value)
}

fn better(value: f64, point: &[f64], best: Option<(f64, &[f64])>) -> bool {
    match best {
        None => true,
        Some((bv, bp)) => {
            value > bv
                || (value == bv
                    && point.iter().zip(bp).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
                        == Some(std::cmp::Ordering::Less))
        }
    }
}

fn run_search(
    n_stages: usize,
    objective: Objective,
    space: &SearchSpace,
    refine: usize,
    symmetry: Symmetry,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    space.validate()?;
    cfg.validate()?;
    // surface bad names or bounds before spending any quadrature
    for corner in [0, space.n_samples() - 1] {
        let mut values = space.fixed.clone();
        for (a, x) in space.axes.iter().zip(space.point(corner)) {
            values.insert(a.name.clone(), x);
        }
        build_params(n_stages, &values, symmetry)?;
    }

    let mut samples: Vec<GridSample> = Vec::new();
    let mut history = Vec::new();
    let mut grid = space.clone();
    for _ in 0..=refine {
        let round: Vec<GridSample> = (0..grid.n_samples())
            .into_par_iter()
            .map(|i| {
                let point = grid.point(i);
                let value = evaluate(n_stages, objective, &grid, &point, symmetry, cfg).ok();
                GridSample { point, value }
            })
            .collect();
        samples.extend(round);
        let mut best: Option<(f64, &[f64])> = None;
        for s in &samples {
            if let Some(v) = s.value {
                if better(v, &s.point, best) {
                    best = Some((v, &s.point));
                }
            }
        }
        let Some((best_value, best_point)) = best else {
            return Err(Error::NonConvergence("no grid point could be evaluated".into()));
        };
        history.push(RefinementStep { spacing: grid.axes.iter().map(Axis::spacing).collect(), best_value });
        grid = grid.shrunk(best_point, REFINEMENT_FACTOR);
        // keep refined grids inside the caller's box
        for (g, a) in grid.axes.iter_mut().zip(&space.axes) {
            g.min = g.min.max(a.min);
            g.max = g.max.min(a.max);
        }
    }

    let mut best: Option<(f64, &[f64])> = None;
    for s in &samples {
        if let Some(v) = s.value {
            if better(v, &s.point, best) {
                best = Some((v, &s.point));
            }
        }
    }
    let (best_value, best_coords) = best.expect("at least one sample evaluated");
    let best_coords = best_coords.to_vec();
    let verified_value = evaluate(n_stages, objective, space, &best_coords, symmetry, &QuadratureConfig::default())?;
    let mut best_point = space.fixed.clone();
    for (a, &x) in space.axes.iter().zip(&best_coords) {
        best_point.insert(a.name.clone(), x);
    }
    Ok(SearchResult {
        n_stages,
        objective,
        axis_names: space.axes.iter().map(|a| a.name.clone()).collect(),
        best_point,
        best_value,
        verified_value,
        grid_samples: samples,
        refinement_history: history,
    })
}

/// Exhaustive search over any named parameters of an `N`-stage chain, with
/// `refine` rounds of local refinement around the incumbent.
pub fn grid_search(
    n_stages: usize,
    objective: Objective,
    space: &SearchSpace,
    refine: usize,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    run_search(n_stages, objective, space, refine, Symmetry::None, cfg)
}

fn require_axes(space: &SearchSpace, allowed: &[&str]) -> Result<()> {
    for name in space.axes.iter().map(|a| &a.name).chain(space.fixed.keys()) {
        if !allowed.contains(&name.as_str()) {
            return Err(Error::InvalidSearch(format!(
                "parameter '{name}' not part of this search (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

/// Search over `(kappa_a, kappa_b, delta)` of a 0-stage transducer with `g_a = g_max`.
pub fn grid_search_0stage(
    objective: Objective,
    space: &SearchSpace,
    refine: usize,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    require_axes(space, &["kappa_a", "kappa_b", "kappa", "delta"])?;
    grid_search(0, objective, space, refine, cfg)
}

/// Search over `(kappa_a, kappa_b, g_b)` of an all-resonant 1-stage transducer
/// with `g_a = g_max`. Detuning axes (`delta_a`, `delta_b`) may be added for the
/// five-parameter search.
pub fn grid_search_1stage(
    objective: Objective,
    space: &SearchSpace,
    refine: usize,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    require_axes(space, &["kappa_a", "kappa_b", "kappa", "g_b", "g2", "delta_a", "delta_b"])?;
    grid_search(1, objective, space, refine, cfg)
}

/// Search over symmetric resonant chains: one `kappa` axis plus couplings
/// `g1 ..= g_ceil((N+1)/2)`, mirrored onto the second half.
pub fn symmetric_resonant_search(
    n_stages: usize,
    objective: Objective,
    space: &SearchSpace,
    refine: usize,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    let half = (n_stages + 2) / 2;
    let mut allowed = vec!["kappa".to_string()];
    allowed.extend((1..=half).map(|j| format!("g{j}")));
    let allowed: Vec<&str> = allowed.iter().map(String::as_str).collect();
    require_axes(space, &allowed)?;
    run_search(n_stages, objective, space, refine, Symmetry::Mirror, cfg)
}

/// The `(kappa, g1, ..)` coordinates of the MF design in a symmetric search.
pub fn mf_symmetric_point(n_stages: usize) -> BTreeMap<String, f64> {
    let d = maximally_flat_params(n_stages, 1.0, 0.0).expect("g_max = 1 is valid");
    let mut point = BTreeMap::new();
    point.insert("kappa".to_string(), d.params.kappa_a);
    for j in 1..=(n_stages + 2) / 2 {
        point.insert(format!("g{j}"), d.params.couplings[j - 1]);
    }
    point
}

/// Design family used by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Mf,
    Uniform,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mf" => Ok(Family::Mf),
            "uniform" => Ok(Family::Uniform),
            _ => Err(Error::InvalidParams(format!("unknown design family '{s}'"))),
        }
    }
}

impl Family {
    pub fn params(self, n_stages: usize, g_max: f64, omega_c: f64) -> Result<TransducerParams> {
        match self {
            Family::Mf => Ok(maximally_flat_params(n_stages, g_max, omega_c)?.params),
            Family::Uniform => uniform_params(n_stages, g_max, omega_c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_stages: usize,
    pub value: f64,
    pub abs_error: f64,
    pub closed_form: Option<f64>,
}

/// Capacity of each design in a family for `N = n_min ..= n_max`.
pub fn family_sweep(
    family: Family,
    n_min: usize,
    n_max: usize,
    protocol: Protocol,
    bound: Bound,
    nbar: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<SweepRow>> {
    if n_min > n_max {
        return Err(Error::InvalidParams(format!("n_min {n_min} exceeds n_max {n_max}")));
    }
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let params = family.params(n, 1.0, 0.0)?;
            let est = integrate_capacity(&params, protocol, bound, nbar, cfg)?;
            let closed_form = match family {
                Family::Mf => mf_closed_form(n, protocol, bound, nbar).transpose()?,
                Family::Uniform => None,
            };
            Ok(SweepRow { n_stages: n, value: est.value, abs_error: est.abs_error, closed_form })
        })
        .collect()
}

/// `N,Q,abs_error`, plus `closed_form` when every row has one.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let with_closed = !rows.is_empty() && rows.iter().all(|r| r.closed_form.is_some());
    let mut out = String::from(if with_closed { "N,Q,abs_error,closed_form\n" } else { "N,Q,abs_error\n" });
    for r in rows {
        out.push_str(&format!("{},{:?},{:?}", r.n_stages, r.value, r.abs_error));
        if with_closed {
            out.push_str(&format!(",{:?}", r.closed_form.unwrap()));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyComparison {
    pub n_stages: usize,
    pub q_mf: f64,
    pub q_uniform: f64,
}

/// Pure-loss capacities of the MF and uniform designs for `N = 0 ..= n_max`.
pub fn uniform_capacity_sweep(
    n_max: usize,
    objective: Objective,
    cfg: &QuadratureConfig,
) -> Result<Vec<FamilyComparison>> {
    if n_max > 20 {
        return Err(Error::InvalidParams(format!("n_max {n_max} exceeds 20")));
    }
    let protocol = objective.protocol();
    let mf = family_sweep(Family::Mf, 0, n_max, protocol, Bound::Pure, 0.0, cfg)?;
    let uni = family_sweep(Family::Uniform, 0, n_max, protocol, Bound::Pure, 0.0, cfg)?;
    Ok(mf
        .iter()
        .zip(&uni)
        .map(|(a, b)| FamilyComparison { n_stages: a.n_stages, q_mf: a.value, q_uniform: b.value })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_0stage() -> SearchSpace {
        SearchSpace::new(vec![
            Axis::new("kappa_a", 1.0, 3.0, 5),
            Axis::new("kappa_b", 1.0, 3.0, 5),
            Axis::new("delta", -1.0, 1.0, 5),
        ])
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "kappa_a:0.5:4:21".parse().unwrap();
        assert_eq!(a, Axis::new("kappa_a", 0.5, 4.0, 21));
        assert_eq!(a.value(20), 4.0);
        assert!("kappa_a:0.5:4".parse::<Axis>().is_err());
        assert!(":0:1:2".parse::<Axis>().is_err());
        assert_eq!(parse_fixed("g_a=0.5").unwrap(), ("g_a".to_string(), 0.5));
        assert!(parse_fixed("g_a").is_err());
    }

    #[test]
    fn space_validation() {
        assert!(SearchSpace::new(vec![Axis::new("kappa", 1.0, 1.0, 3)]).validate().is_err());
        assert!(SearchSpace::new(vec![Axis::new("kappa", 1.0, 2.0, 1)]).validate().is_err());
        assert!(SearchSpace::new(vec![Axis::new("kappa", 1.0, 2.0, 2)]).with_fixed("kappa", 1.0).validate().is_err());
    }

    #[test]
    fn build_maps_names() {
        let mut v = BTreeMap::new();
        v.insert("kappa".to_string(), 2.0);
        v.insert("delta".to_string(), 1.0);
        v.insert("g_b".to_string(), 0.5);
        let p = build_params(1, &v, Symmetry::None).unwrap();
        assert_eq!(p.kappa_a, 2.0);
        assert_eq!(p.detunings, vec![0.5, 0.0, -0.5]);
        assert_eq!(p.couplings, vec![1.0, 0.5]);

        let mut w = BTreeMap::new();
        w.insert("kappa".to_string(), 2.0);
        w.insert("g2".to_string(), 0.7);
        let p = build_params(3, &w, Symmetry::Mirror).unwrap();
        assert_eq!(p.couplings, vec![1.0, 0.7, 0.7, 1.0]);

        w.insert("g7".to_string(), 0.7);
        assert!(build_params(3, &w, Symmetry::None).is_err());
        let mut over = BTreeMap::new();
        over.insert("kappa".to_string(), 2.0);
        over.insert("g1".to_string(), 1.5);
        assert!(build_params(0, &over, Symmetry::None).is_err());
    }

    #[test]
    fn degenerate_axes_take_corner_max() {
        let space = SearchSpace::new(vec![
            Axis::new("kappa_a", 1.0, 3.0, 2),
            Axis::new("kappa_b", 1.0, 3.0, 2),
            Axis::new("delta", -1.0, 1.0, 2),
        ]);
        let cfg = QuadratureConfig::sweep();
        let r = grid_search_0stage(Objective::Q2, &space, 0, &cfg).unwrap();
        assert_eq!(r.grid_samples.len(), 8);
        let max = r.grid_samples.iter().filter_map(|s| s.value).fold(f64::MIN, f64::max);
        assert_eq!(r.best_value, max);
    }

    #[test]
    fn refinement_is_monotone_and_deterministic() {
        let cfg = QuadratureConfig::sweep();
        let a = grid_search_0stage(Objective::Q1, &small_0stage(), 2, &cfg).unwrap();
        let b = grid_search_0stage(Objective::Q1, &small_0stage(), 2, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.refinement_history.len(), 3);
        for w in a.refinement_history.windows(2) {
            assert!(w[1].best_value >= w[0].best_value);
        }
        let max = a.grid_samples.iter().filter_map(|s| s.value).fold(f64::MIN, f64::max);
        assert_eq!(a.best_value, max);
    }

    #[test]
    fn wrong_parameters_are_rejected() {
        let space = SearchSpace::new(vec![Axis::new("g_b", 0.1, 1.0, 3)]);
        assert!(matches!(
            grid_search_0stage(Objective::Q1, &space, 0, &QuadratureConfig::sweep()),
            Err(Error::InvalidSearch(_))
        ));
        let over = SearchSpace::new(vec![Axis::new("kappa", 1.0, 3.0, 3), Axis::new("g_b", 0.5, 1.5, 3)]);
        assert!(grid_search_1stage(Objective::Q1, &over, 0, &QuadratureConfig::sweep()).is_err());
    }

    #[test]
    fn sweep_csv_shape() {
        let rows =
            family_sweep(Family::Mf, 0, 0, Protocol::OneWay, Bound::Pure, 0.0, &QuadratureConfig::default()).unwrap();
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,Q,abs_error,closed_form");
        assert_eq!(lines.len(), 2);
        assert!(
            family_sweep(Family::Mf, 2, 1, Protocol::OneWay, Bound::Pure, 0.0, &QuadratureConfig::default()).is_err()
        );
        let uni = family_sweep(Family::Uniform, 0, 1, Protocol::OneWay, Bound::Pure, 0.0, &QuadratureConfig::default())
            .unwrap();
        assert!(sweep_csv(&uni).starts_with("N,Q,abs_error\n"));
    }

    #[test]
    fn mf_symmetric_point_names() {
        let p = mf_symmetric_point(2);
        assert_eq!(p.keys().cloned().collect::<Vec<_>>(), vec!["g1", "g2", "kappa"]);
        assert_eq!(p["g1"], 1.0);
    }
}
