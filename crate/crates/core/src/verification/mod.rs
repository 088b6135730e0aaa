//! Inequality suite for the family and the JSON report that aggregates it.
//!
//! Every check compares a measured quantity against a closed-form bound with
//! a relative slack of [`SLACK`]. Margins are relative and signed so that a
//! non-negative margin means the inequality holds:
//! `(measured − bound)/|bound|` for lower bounds and
//! `(bound − measured)/|bound|` for upper bounds.

mod checks;
pub mod limits;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use checks::*;

/// Relative slack on the bound side of every inequality.
pub const SLACK: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// measured ≥ bound
    Lower,
    /// measured ≤ bound
    Upper,
    /// measured is reported, nothing is claimed
    Report,
}

/// Outcome for one value of `N` inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NResult {
    pub n: u32,
    #[serde(with = "nan_as_null")]
    pub measured: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub passed: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub direction: Direction,
    pub params: BTreeMap<String, Value>,
    /// Measured value at the worst sample.
    #[serde(with = "nan_as_null")]
    pub measured: f64,
    /// Bound at the worst sample.
    pub bound: Option<f64>,
    /// Worst relative margin (non-negative when the inequality holds).
    pub margin: Option<f64>,
    pub passed: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_n: Vec<NResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn failed_with(name: &str, params: BTreeMap<String, Value>, err: &crate::CoreError) -> Self {
        Self {
            name: name.to_owned(),
            direction: Direction::Report,
            params,
            measured: f64::NAN,
            bound: None,
            margin: None,
            passed: false,
            samples: 0,
            per_n: Vec::new(),
            note: Some(format!("error: {err}")),
        }
    }
}

/// Relative margin of `measured` against `bound` in the given direction.
pub fn relative_margin(direction: Direction, measured: f64, bound: f64) -> f64 {
    let scale = if bound == 0.0 { 1.0 } else { bound.abs() };
    match direction {
        Direction::Lower => (measured - bound) / scale,
        Direction::Upper => (bound - measured) / scale,
        Direction::Report => 0.0,
    }
}

pub fn margin_passes(margin: f64) -> bool {
    margin >= -SLACK
}

/// Worst-case accumulator over the samples of a check.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    direction: Direction,
    worst: Option<(f64, f64, f64)>,
    samples: usize,
    all_pass: bool,
}

impl Tally {
    pub(crate) fn new(direction: Direction) -> Self {
        Self { direction, worst: None, samples: 0, all_pass: true }
    }

    pub(crate) fn push(&mut self, measured: f64, bound: f64) {
        let margin = relative_margin(self.direction, measured, bound);
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.samples += 1;
        self.all_pass &= margin_passes(margin);
        if self.worst.map_or(true, |(m, _, _)| margin < m) {
            self.worst = Some((margin, measured, bound));
        }
    }

    /// A sample that fails outright regardless of margins.
    pub(crate) fn fail(&mut self) {
        self.all_pass = false;
    }

    pub(crate) fn merge(&mut self, other: &Tally) {
        self.samples += other.samples;
        self.all_pass &= other.all_pass;
        if let Some((m, meas, b)) = other.worst {
            if self.worst.map_or(true, |(w, _, _)| m < w) {
                self.worst = Some((m, meas, b));
            }
        }
    }

    pub(crate) fn passed(&self) -> bool {
        self.all_pass && self.samples > 0
    }

    pub(crate) fn n_result(&self, n: u32) -> NResult {
        let (margin, measured, bound) = self.worst.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        NResult { n, measured, bound: Some(bound), margin: Some(margin), passed: self.passed(), samples: self.samples }
    }

    pub(crate) fn into_check(self, name: &str, params: BTreeMap<String, Value>, per_n: Vec<NResult>) -> CheckResult {
        let (margin, measured, bound) = self.worst.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        CheckResult {
            name: name.to_owned(),
            direction: self.direction,
            params,
            measured,
            bound: Some(bound),
            margin: Some(margin),
            passed: self.passed(),
            samples: self.samples,
            per_n,
            note: None,
        }
    }
}

/// Runs a per-`N` closure in parallel and folds the tallies in ladder order.
pub(crate) fn per_n_tallies<F>(n_list: &[u32], direction: Direction, f: F) -> crate::Result<(Tally, Vec<NResult>)>
where
    F: Fn(u32) -> crate::Result<Tally> + Sync,
{
    let tallies: Vec<crate::Result<Tally>> = n_list.par_iter().map(|&n| f(n)).collect();
    let mut total = Tally::new(direction);
    let mut per_n = Vec::with_capacity(n_list.len());
    for (n, t) in n_list.iter().zip(tallies) {
        let t = t?;
        per_n.push(t.n_result(*n));
        total.merge(&t);
    }
    Ok((total, per_n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Main ladder for slice, boundary and growth checks.
    pub n_list: Vec<u32>,
    /// Points on `t ∈ [−1/2, 0]` for the axis blow-up check.
    pub t_points: usize,
    /// Number of slice heights `x` in `[−1/2, 1/2]`.
    pub slices: usize,
    /// Samples per slice (odd).
    pub m: usize,
    /// x-grid size for boundary separation.
    pub boundary_points: usize,
    pub tol: f64,
    pub seed: u64,
    /// Random points for structural identities.
    pub random_points: usize,
    /// Largest `N` used for random structural samples.
    pub random_n_max: u32,
    pub delta: f64,
    pub offsegment_n_list: Vec<u32>,
    pub pole_n_max: u32,
    pub spiral_t: f64,
    pub spiral_n_list: Vec<u32>,
    pub epsilon_t: f64,
    pub epsilon_n_list: Vec<u32>,
    pub flatten_n_list: Vec<u32>,
    pub flatten_x: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_list: vec![2, 4, 8, 16, 32, 64],
            t_points: 101,
            slices: 65,
            m: 257,
            boundary_points: 129,
            tol: crate::quadrature::DEFAULT_TOL,
            seed: DEFAULT_SEED,
            random_points: 1000,
            random_n_max: 64,
            delta: 0.3,
            offsegment_n_list: vec![2, 4, 8, 16, 32, 64, 128, 256, 512],
            pole_n_max: 512,
            spiral_t: 0.2,
            spiral_n_list: vec![32, 64, 128, 256],
            epsilon_t: -0.25,
            epsilon_n_list: vec![8, 16, 32],
            flatten_n_list: vec![4, 8, 16],
            flatten_x: vec![-0.4, -0.25, -0.1],
        }
    }
}

impl VerifyConfig {
    /// Same grids, with every `N` ladder replaced by `n_list`.
    pub fn with_n_list(n_list: Vec<u32>) -> Self {
        let max = n_list.iter().copied().max().unwrap_or(2);
        Self {
            offsegment_n_list: n_list.clone(),
            spiral_n_list: n_list.clone(),
            epsilon_n_list: n_list.clone(),
            flatten_n_list: n_list.clone(),
            random_n_max: max,
            pole_n_max: max,
            n_list,
            ..Self::default()
        }
    }

    /// Every `N` that appears anywhere in the configuration except the pole
    /// sweep, which always covers `2..=pole_n_max`.
    pub fn validate(&self) -> crate::Result<()> {
        use crate::CoreError::InvalidParameter as Bad;
        let ladders = [&self.n_list, &self.offsegment_n_list, &self.spiral_n_list, &self.epsilon_n_list, &self.flatten_n_list];
        for l in ladders {
            if l.is_empty() {
                return Err(Bad("empty N ladder".into()));
            }
            for &n in l.iter() {
                crate::DomainSpec::new(n)?;
            }
        }
        crate::DomainSpec::new(self.pole_n_max)?;
        crate::DomainSpec::new(self.random_n_max.max(2))?;
        if self.m < 3 || self.m % 2 == 0 {
            return Err(Bad(format!("m = {} must be odd and >= 3", self.m)));
        }
        if self.t_points < 2 || self.slices < 2 || self.boundary_points < 2 {
            return Err(Bad("grids need at least two points".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Bad("tolerance must be positive".into()));
        }
        if !(self.delta > 0.0) {
            return Err(Bad("delta must be positive".into()));
        }
        if !(self.spiral_t > 0.0 && self.spiral_t <= 0.25) {
            return Err(Bad("spiral t must lie in (0, 1/4]".into()));
        }
        if !(-0.5..=0.0).contains(&self.epsilon_t) {
            return Err(Bad("epsilon t must lie in [-1/2, 0]".into()));
        }
        if self.flatten_x.iter().any(|x| !(-0.5..=0.0).contains(x)) {
            return Err(Bad("flattening x values must lie in [-1/2, 0]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
    /// Smallest measured slice-endpoint separation.
    pub r0_hat: Option<f64>,
    /// `min(r̂₀/2, 1/4)`.
    pub r_hat: Option<f64>,
    /// Measured supremum of `|A|²` outside `B_δ`.
    pub c_delta: Option<f64>,
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

type CheckFn = fn(&VerifyConfig) -> crate::Result<CheckResult>;

/// The fixed, ordered list of checks run by [`run_report`].
pub fn check_suite() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("axis_blowup", check_blowup_config as CheckFn),
        ("curvature_increasing_in_n", check_blowup_monotone_config),
        ("axis_derivative_positive", check_dxu_positive_config),
        ("offsegment_bound", check_offsegment_config),
        ("curvature_outside_b_delta", check_outside_b_delta_config),
        ("graphical_du", check_graphical_du_config),
        ("graph_margin", check_graph_margin_config),
        ("transverse_growth_upper", check_growth_upper_config),
        ("transverse_growth_lower", check_growth_lower_config),
        ("outer_half_v", check_outer_half_v_config),
        ("boundary_separation", check_boundary_config),
        ("spiral_rate", check_spiral_config),
        ("winding_sheets", check_winding_sheets_config),
        ("sheet_separation", check_sheet_separation_config),
        ("slab_thickness", check_slab_config),
        ("flattening", check_flattening_config),
        ("structural_identities", check_structural_config),
        ("pole_exclusion", check_poles_config),
        ("uniform_bound_compact", check_uniform_bound_config),
        ("cauchy_riemann", check_cauchy_riemann_config),
        ("minimality", check_minimality_config),
    ]
}

/// Runs the whole suite. A check that errors is recorded as failed and the
/// run continues.
pub fn run_report(config: &VerifyConfig) -> crate::Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let suite = check_suite();
    let checks: Vec<CheckResult> = suite
        .par_iter()
        .map(|(name, f)| match f(config) {
            Ok(mut c) => {
                c.name = (*name).to_owned();
                c
            }
            Err(e) => CheckResult::failed_with(name, BTreeMap::new(), &e),
        })
        .collect();

    let informational = checks.iter().filter(|c| c.direction == Direction::Report && c.passed).count();
    let passed = checks.iter().filter(|c| c.passed).count();
    let summary = Summary { total: checks.len(), passed, failed: checks.len() - passed, informational };
    let r0_hat = checks
        .iter()
        .find(|c| c.name == "boundary_separation")
        .and_then(|c| c.params.get("r0_hat"))
        .and_then(Value::as_f64)
        .filter(|v| v.is_finite());
    let c_delta = checks.iter().find(|c| c.name == "curvature_outside_b_delta").map(|c| c.measured).filter(|v| v.is_finite());
    Ok(VerificationReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config: config.clone(),
        checks,
        summary,
        r0_hat,
        r_hat: r0_hat.map(|r| (r / 2.0).min(0.25)),
        c_delta,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// JSON has no NaN; an undefined measurement is written as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

pub(crate) fn params<const K: usize>(pairs: [(&str, Value); K]) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}
