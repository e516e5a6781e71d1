//! Seeded verification suites reproducing every printed threshold and
//! sweeping every implication over random draws.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    find_threshold, gen_bell_bounds, gen_bell_terms, isotropic_bounds, isotropic_cr2e_crossing,
    isotropic_cr2e_threshold, isotropic_cvne_crossing, isotropic_cvne_fef_bound,
    rank_deficient_thresholds, werner2_cvne_upper, werner2_renyi_bounds, werner_d_identities,
    weyl2_bounds, BoundReport,
};
use crate::entropy::{
    cond_entropy, cond_entropy_closed, rank_deficient_cr2e, werner2_cvne, EntropyKind,
};
use crate::error::{Error, Result};
use crate::fef::{
    corr_tensor_det, fef_closed, fef_corr_tensor, fef_optimize_with, fef_trace_norm,
    OptimizeOptions,
};
use crate::multicopy::{
    isotropic_steering, kcopy_steer_threshold, min_k_steerable, noisy_kcopy_nonlocal,
    noisy_p_nonlocal, noisy_thresholds, nonweyl_kcopy_nonlocal, nonweyl_thresholds, nonweyl_x_star,
    reference_schmidt_vectors, weyl2_kcopy_nonlocal, NonlocalVerdict,
};
use crate::report::kmax_for;
use crate::sampling::{
    alpha_gt_one, angle, any_spec, closed_form_spec, density, rng_for, schmidt, simplex, weyl2_t,
};
use crate::spec::{Family, StateSpec};
use crate::states::{make_state, DensityMatrix};
use crate::workcost::{genbell_work_gain, werner2_work_gain, work_gain_lower, ThermoContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Table1,
    Thresholds,
    Theorems,
    Identities,
    FefOracle,
    Entropy,
    Workcost,
    Discrepancies,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Table1,
        Suite::Thresholds,
        Suite::Theorems,
        Suite::Identities,
        Suite::FefOracle,
        Suite::Entropy,
        Suite::Workcost,
        Suite::Discrepancies,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Thresholds => "thresholds",
            Suite::Theorems => "theorems",
            Suite::Identities => "identities",
            Suite::FefOracle => "fef_oracle",
            Suite::Entropy => "entropy",
            Suite::Workcost => "workcost",
            Suite::Discrepancies => "discrepancies",
            Suite::All => "all",
        }
    }

    /// The concrete suites this selection runs.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            one => vec![one],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .copied()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random draws per theorem and per closed-form comparison.
    pub draws: usize,
    /// Optimizer restarts for the FEF oracle fixtures.
    pub restarts: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            draws: 10_000,
            restarts: 16,
        }
    }
}

/// One verified quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
    /// Reported but never failing.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `|value − expected| ≤ tol`.
    pub fn close(id: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            value,
            expected: Some(expected),
            tolerance: Some(tol),
            passed: (value - expected).abs() <= tol,
            informational: false,
            detail: None,
        }
    }

    /// `|value − expected| ≤ tol·|expected|`.
    pub fn relative(id: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        let mut c = Self::close(id, value, expected, tol);
        c.passed = (value - expected).abs() <= tol * expected.abs();
        c.detail = Some("relative tolerance".into());
        c
    }

    /// `value ≤ tol`.
    pub fn at_most(id: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            value,
            expected: None,
            tolerance: Some(tol),
            passed: value <= tol,
            informational: false,
            detail: None,
        }
    }

    pub fn flag(id: impl Into<String>, value: f64, passed: bool) -> Self {
        Self {
            id: id.into(),
            value,
            expected: None,
            tolerance: None,
            passed,
            informational: false,
            detail: None,
        }
    }

    pub fn failure(id: impl Into<String>, err: &Error) -> Self {
        Self::flag(id, f64::NAN, false).with_detail(err.to_string())
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Whether this check can fail its suite.
    pub fn ok(&self) -> bool {
        self.informational || self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub draws: usize,
    pub restarts: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check and a closing tally.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "[{}] {}\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.name
            ));
            for c in &s.checks {
                let tag = match (c.informational, c.passed) {
                    (true, _) => "info",
                    (false, true) => "ok",
                    (false, false) => "FAIL",
                };
                out.push_str(&format!("  {tag:<4} {} = {}", c.id, fmt_num(c.value)));
                if let Some(e) = c.expected {
                    out.push_str(&format!(" (expected {}", fmt_num(e)));
                    if let Some(t) = c.tolerance {
                        out.push_str(&format!(" ± {t:e}"));
                    }
                    out.push(')');
                } else if let Some(t) = c.tolerance {
                    out.push_str(&format!(" (≤ {t:e})"));
                }
                if let Some(d) = &c.detail {
                    out.push_str(&format!("  {d}"));
                }
                out.push('\n');
            }
        }
        let failed: usize = self
            .suites
            .iter()
            .map(|s| s.checks.iter().filter(|c| !c.ok()).count())
            .sum();
        let total: usize = self.suites.iter().map(|s| s.checks.len()).sum();
        out.push_str(&format!(
            "{}: {} checks, {failed} failed, seed {}\n",
            if self.passed { "PASS" } else { "FAIL" },
            total,
            self.seed
        ));
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:.10e}")
    }
}

/// Run one suite, or all of them.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> VerifyReport {
    let suites: Vec<SuiteReport> = suite
        .expand()
        .into_iter()
        .map(|s| run_suite(s, cfg))
        .collect();
    VerifyReport {
        seed: cfg.seed,
        draws: cfg.draws,
        restarts: cfg.restarts,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    let checks = match suite {
        Suite::Table1 => table1(),
        Suite::Thresholds => thresholds(),
        Suite::Theorems => theorems(cfg),
        Suite::Identities => identities(),
        Suite::FefOracle => fef_oracle(cfg),
        Suite::Entropy => entropy_checks(cfg),
        Suite::Workcost => workcost(cfg),
        Suite::Discrepancies => discrepancies(),
        Suite::All => Suite::EACH
            .iter()
            .flat_map(|&s| run_suite(s, cfg).checks)
            .collect(),
    };
    SuiteReport {
        name: suite.name().into(),
        passed: checks.iter().all(Check::ok),
        checks,
    }
}

fn guard(id: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::failure(id, &e)])
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

// Suite ids use one random stream each so that suites are independent of run order.
const STREAM_THEOREMS: u64 = 1;
const STREAM_FEF: u64 = 2;
const STREAM_ENTROPY: u64 = 3;
const STREAM_WORKCOST: u64 = 4;

pub const TABLE1: [(usize, f64); 5] = [
    (2, 0.666667),
    (3, 0.241217),
    (4, 0.0409511),
    (5, 0.00433229),
    (6, 0.000349461),
];

fn table1() -> Vec<Check> {
    TABLE1
        .iter()
        .flat_map(|&(d, printed)| {
            guard(&format!("rank_deficient_cvne_threshold[d={d}]"), || {
                let t = rank_deficient_thresholds(d)?;
                let tol = if d >= 5 { 1e-5 } else { 1e-4 };
                Ok(vec![Check::close(
                    format!("rank_deficient_cvne_threshold[d={d}]"),
                    t.p_cvne,
                    printed,
                    tol,
                )])
            })
        })
        .collect()
}

/// Partial harmonic sum by reversed direct summation, or the asymptotic series above 1000 terms.
pub fn harmonic_oracle(n: u64) -> f64 {
    if n <= 1000 {
        return (1..=n).rev().map(|m| 1.0 / m as f64).sum();
    }
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let x = n as f64;
    let x2 = x * x;
    x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
        - 1.0 / (252.0 * x2 * x2 * x2)
}

/// Right side of the k-copy steering condition from the oracle harmonic sum.
pub fn steer_rhs_oracle(d: usize, k: usize) -> f64 {
    let n = (d as f64).powi(k as i32);
    let h = harmonic_oracle(n as u64);
    ((1.0 + n) * (h - 1.0) - n) / (n * n)
}

fn thresholds() -> Vec<Check> {
    let mut out = Vec::new();
    out.extend(guard("werner2_cvne_crossing", || {
        let p = find_threshold(werner2_cvne, 0.5, 0.9, 1e-9)?;
        Ok(vec![Check::close(
            "werner2_cvne_crossing",
            p,
            0.747614,
            1e-5,
        )])
    }));
    for (d, printed) in [(2, 0.81071), (6, 0.673671)] {
        out.extend(guard(&format!("isotropic_cvne_crossing[d={d}]"), || {
            Ok(vec![Check::close(
                format!("isotropic_cvne_crossing[d={d}]"),
                isotropic_cvne_crossing(d)?,
                printed,
                1e-4,
            )])
        }));
    }
    for (d, printed, independent) in [
        (2, 0.683013, (1.0 + 3f64.sqrt()) / 4.0),
        (6, 0.395243, (1.0 + 175f64.sqrt()) / 36.0),
    ] {
        let thr = isotropic_cr2e_threshold(d);
        out.push(Check::close(
            format!("isotropic_cr2e_threshold[d={d}]"),
            thr,
            printed,
            1e-6,
        ));
        out.push(Check::close(
            format!("isotropic_cr2e_threshold_formula[d={d}]"),
            thr,
            independent,
            1e-9,
        ));
        out.extend(guard(&format!("isotropic_cr2e_bisection[d={d}]"), || {
            Ok(vec![Check::close(
                format!("isotropic_cr2e_bisection[d={d}]"),
                isotropic_cr2e_crossing(d)?,
                thr,
                1e-6,
            )])
        }));
    }
    for d in 2..=8 {
        out.extend(guard(
            &format!("isotropic_cr2e_formula_vs_root[d={d}]"),
            || {
                let root = isotropic_cr2e_crossing(d)?;
                Ok(vec![Check::close(
                    format!("isotropic_cr2e_formula_vs_root[d={d}]"),
                    root,
                    isotropic_cr2e_threshold(d),
                    1e-9,
                )])
            },
        ));
    }
    for d in 2..=6 {
        out.extend(guard(
            &format!("rank_deficient_cr2e_threshold[d={d}]"),
            || {
                let t = rank_deficient_thresholds(d)?;
                let root = find_threshold(|p| rank_deficient_cr2e(d, p), 1e-9, 1.0, 1e-12)?;
                Ok(vec![Check::close(
                    format!("rank_deficient_cr2e_threshold[d={d}]"),
                    root,
                    t.p_cr2e,
                    1e-9,
                )])
            },
        ));
    }
    out.extend(noisy_checks());
    out.extend(steering_checks());
    out.extend(non_weyl_checks());
    out
}

const NOISY_PRINTED: [(f64, f64, f64); 3] = [
    (0.263305, 0.516398, 0.728901),
    (0.206292, 0.45399, 0.699086),
    (0.174342, 0.415577, 0.685898),
];

fn noisy_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (lambdas, &(pn, pc, pv)) in reference_schmidt_vectors().iter().zip(&NOISY_PRINTED) {
        let d = lambdas.len();
        out.extend(guard(&format!("noisy[d={d}]"), || {
            let t = noisy_thresholds(lambdas)?;
            let spectral = find_threshold(
                |p| {
                    make_state::<f64>(&StateSpec::noisy_schmidt(lambdas, p))
                        .and_then(|r| cond_entropy(&r, EntropyKind::Renyi(2.0)))
                        .unwrap_or(f64::NAN)
                },
                0.0,
                1.0,
                1e-12,
            )?;
            Ok(vec![
                Check::close(format!("noisy_p_nonlocal[d={d}]"), t.p_nonlocal, pn, 1e-6),
                Check::close(format!("noisy_p_cr2e[d={d}]"), t.p_cr2e, pc, 1e-5),
                Check::close(format!("noisy_p_cvne[d={d}]"), t.p_cvne, pv, 1e-4),
                Check::close(
                    format!("noisy_p_cr2e_vs_spectral_root[d={d}]"),
                    spectral,
                    t.p_cr2e,
                    1e-9,
                ),
                Check::flag(
                    format!("noisy_order_cr2e_ge_nonlocal[d={d}]"),
                    t.p_cr2e - t.p_nonlocal,
                    t.p_cr2e >= t.p_nonlocal,
                ),
                Check::flag(
                    format!("noisy_order_cvne_ge_cr2e[d={d}]"),
                    t.p_cvne - t.p_cr2e,
                    t.p_cvne >= t.p_cr2e,
                ),
            ])
        }));
    }
    for d in 2..=6 {
        let flat = vec![1.0 / (d as f64).sqrt(); d];
        out.push(Check::close(
            format!("noisy_p_nonlocal_max_entangled[d={d}]"),
            noisy_p_nonlocal(&flat),
            1.0 / (d as f64 + 1.0),
            1e-12,
        ));
    }
    out
}

fn steering_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> = (2..=6).flat_map(|d| (1..=8).map(move |k| (d, k))).collect();
    let evaluated: Vec<Result<(f64, f64)>> = pairs
        .par_iter()
        .map(|&(d, k)| Ok((kcopy_steer_threshold(d, k)?.rhs, steer_rhs_oracle(d, k))))
        .collect();
    for (&(d, k), r) in pairs.iter().zip(evaluated) {
        let id = format!("steer_rhs_vs_oracle[d={d},k={k}]");
        match r {
            Ok((v, o)) => out.push(Check::relative(id, v, o, 1e-9)),
            Err(e) => out.push(Check::failure(id, &e)),
        }
    }
    for (d, k, printed) in [(2, 7, 0.600034), (6, 2, 0.257221)] {
        out.extend(guard(
            &format!("steer_threshold_printed[d={d},k={k}]"),
            || {
                let t = kcopy_steer_threshold(d, k)?.threshold;
                Ok(vec![Check::close(
                    format!("steer_threshold_printed[d={d},k={k}]"),
                    t,
                    printed,
                    7e-3,
                )
                .informational()
                .with_detail(
                    "printed value differs from the literal harmonic-sum evaluation",
                )])
            },
        ));
    }
    out.extend(guard("steer_threshold[d=2,k=2]", || {
        let h4 = 25.0 / 12.0;
        let exact = ((5.0 * (h4 - 1.0) - 4.0) / 16.0f64).sqrt();
        Ok(vec![Check::close(
            "steer_threshold[d=2,k=2]",
            kcopy_steer_threshold(2, 2)?.threshold,
            exact,
            1e-12,
        )])
    }));
    out.extend(guard("min_k_steerable", || {
        let none = min_k_steerable(2, 0.25, 10)?;
        let two = min_k_steerable(2, 0.99, 10)?;
        Ok(vec![
            Check::flag(
                "min_k_steerable[d=2,F=0.25]",
                none.map_or(0.0, |k| k as f64),
                none.is_none(),
            ),
            Check::close(
                "min_k_steerable[d=2,F=0.99]",
                two.map_or(0.0, |k| k as f64),
                2.0,
                0.0,
            ),
        ])
    }));
    for d in 2..=6 {
        for (kind, name) in [
            (EntropyKind::VonNeumann, "cvne"),
            (EntropyKind::Renyi(2.0), "cr2e"),
        ] {
            let id = format!("isotropic_negative_{name}_implies_steerable[d={d}]");
            out.extend(guard(&id, || {
                let mut first = None;
                for k in 1..=kmax_for(d) {
                    if isotropic_steering(d, k, kind)?.implication_holds {
                        first = Some(k);
                        break;
                    }
                }
                Ok(vec![Check::flag(id.clone(), first.map_or(0.0, |k| k as f64), first.is_some())
                    .with_detail("value is the smallest k whose steering threshold lies below the entropy threshold")])
            }));
        }
    }
    out
}

fn non_weyl_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (label, x) in [("pi/16", PI / 16.0), ("pi/8", PI / 8.0), ("pi/4", PI / 4.0)] {
        let id = format!("non_weyl_cr2e_root[x={label}]");
        out.extend(guard(&id, || {
            let root = find_threshold(
                |p| {
                    make_state::<f64>(&StateSpec::non_weyl(x, p))
                        .and_then(|r| cond_entropy(&r, EntropyKind::Renyi(2.0)))
                        .unwrap_or(f64::NAN)
                },
                0.0,
                1.0,
                1e-12,
            )?;
            Ok(vec![Check::close(
                id.clone(),
                root,
                nonweyl_thresholds(x)?.p_cr2e,
                1e-6,
            )])
        }));
    }
    out.extend(guard("non_weyl_p_fef[x=pi/4]", || {
        Ok(vec![Check::close(
            "non_weyl_p_fef[x=pi/4]",
            nonweyl_thresholds(PI / 4.0)?.p_fef,
            1.0 / 3.0,
            1e-12,
        )])
    }));
    out
}

/// Hypothesis and conclusion counts for one implication.
#[derive(Debug, Clone, Default)]
struct Tally {
    draws: usize,
    hypotheses: usize,
    counterexamples: usize,
    witness: Option<String>,
}

type Outcome = Result<Vec<(String, bool, bool)>>;

fn from_reports(v: Vec<BoundReport>) -> Vec<(String, bool, bool)> {
    v.into_iter()
        .map(|r| (r.theorem, r.hypothesis, r.conclusion))
        .collect()
}

fn from_verdict(id: &str, v: NonlocalVerdict) -> (String, bool, bool) {
    (id.to_string(), v.hypothesis, v.conclusion)
}

#[derive(Debug, Clone)]
enum Draw {
    Werner2 {
        p: f64,
        alpha: f64,
    },
    Weyl2 {
        t: [f64; 3],
    },
    Isotropic {
        d: usize,
        f: f64,
    },
    GenBell {
        d: usize,
        probs: Vec<f64>,
        alpha: f64,
    },
    NonWeyl {
        x: f64,
        p: f64,
    },
    Noisy {
        lambdas: Vec<f64>,
        p: f64,
    },
}

impl Draw {
    fn label(&self) -> String {
        format!("{self:?}")
    }

    fn evaluate(&self) -> Outcome {
        Ok(match self {
            Draw::Werner2 { p, alpha } => {
                let mut v = vec![werner2_cvne_upper(*p)?];
                v.extend(werner2_renyi_bounds(*p, *alpha)?);
                from_reports(v)
            }
            Draw::Weyl2 { t } => {
                let mut v = from_reports(weyl2_bounds(*t)?);
                v.push(from_verdict(
                    "weyl2_kcopy_nonlocal",
                    weyl2_kcopy_nonlocal(*t)?,
                ));
                v
            }
            Draw::Isotropic { d, f } => from_reports(isotropic_bounds(*d, *f)?),
            Draw::GenBell { d, probs, alpha } => from_reports(gen_bell_bounds(*d, probs, *alpha)?),
            Draw::NonWeyl { x, p } => vec![from_verdict(
                "non_weyl_kcopy_nonlocal",
                nonweyl_kcopy_nonlocal(*x, *p)?,
            )],
            Draw::Noisy { lambdas, p } => vec![
                from_verdict(
                    "noisy_cvne_kcopy_nonlocal",
                    noisy_kcopy_nonlocal(lambdas, *p, EntropyKind::VonNeumann)?,
                ),
                from_verdict(
                    "noisy_cr2e_kcopy_nonlocal",
                    noisy_kcopy_nonlocal(lambdas, *p, EntropyKind::Renyi(2.0))?,
                ),
            ],
        })
    }
}

fn theorem_draws(n: usize, rng: &mut impl Rng) -> Vec<Draw> {
    let mut draws = Vec::with_capacity(6 * n);
    draws.extend((0..n).map(|_| Draw::Werner2 {
        p: rng.gen_range(0.0..=1.0),
        alpha: alpha_gt_one(rng),
    }));
    draws.extend((0..n).map(|_| Draw::Weyl2 { t: weyl2_t(rng) }));
    draws.extend((0..n).map(|_| Draw::Isotropic {
        d: rng.gen_range(2..=8),
        f: rng.gen_range(0.0..=1.0),
    }));
    draws.extend((0..n).map(|_| {
        let d = rng.gen_range(2..=4);
        Draw::GenBell {
            d,
            probs: simplex(d * d, rng),
            alpha: alpha_gt_one(rng),
        }
    }));
    draws.extend((0..n).map(|_| Draw::NonWeyl {
        x: angle(rng),
        p: rng.gen_range(0.0..=1.0),
    }));
    draws.extend((0..n).map(|_| {
        let d = rng.gen_range(2..=5);
        Draw::Noisy {
            lambdas: schmidt(d, rng),
            p: rng.gen_range(0.0..=1.0),
        }
    }));
    draws
}

fn theorems(cfg: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng_for(cfg.seed, STREAM_THEOREMS);
    let draws = theorem_draws(cfg.draws, &mut rng);
    let outcomes: Vec<Outcome> = draws.par_iter().map(Draw::evaluate).collect();
    let mut order: Vec<String> = Vec::new();
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    let mut errors = Vec::new();
    for (draw, outcome) in draws.iter().zip(outcomes) {
        match outcome {
            Ok(rows) => {
                for (id, hyp, concl) in rows {
                    let t = tallies.entry(id.clone()).or_insert_with(|| {
                        order.push(id.clone());
                        Tally::default()
                    });
                    t.draws += 1;
                    if hyp {
                        t.hypotheses += 1;
                        if !concl {
                            t.counterexamples += 1;
                            t.witness.get_or_insert_with(|| draw.label());
                        }
                    }
                }
            }
            Err(e) => errors.push(format!("{}: {e}", draw.label())),
        }
    }
    let mut out: Vec<Check> = order
        .iter()
        .map(|id| {
            let t = &tallies[id];
            let mut c = Check::flag(
                format!("counterexamples[{id}]"),
                t.counterexamples as f64,
                t.counterexamples == 0 && t.hypotheses > 0,
            )
            .with_detail(format!(
                "{} draws, hypothesis held on {}",
                t.draws, t.hypotheses
            ));
            if let Some(w) = &t.witness {
                c = c.with_detail(format!(
                    "{} draws, hypothesis held on {}, first counterexample {w}",
                    t.draws, t.hypotheses
                ));
            }
            c
        })
        .collect();
    let mut errs = Check::flag("evaluation_errors", errors.len() as f64, errors.is_empty());
    if let Some(first) = errors.first() {
        errs = errs.with_detail(first.clone());
    }
    out.push(errs);
    out
}

fn identities() -> Vec<Check> {
    let mut jobs: Vec<(usize, &'static str, f64)> = Vec::new();
    for d in 2..=6usize {
        let inv = 1.0 / d as f64;
        for x in grid(inv, 1.0, 100) {
            jobs.push((d, "symmetric", x));
        }
        if d % 2 == 0 {
            for i in 0..100 {
                jobs.push((d, "antisymmetric", -1.0 + (inv + 1.0) * i as f64 / 100.0));
            }
        }
    }
    let alphas = [1.5, 2.0, 3.0];
    let results: Vec<Result<Vec<(String, f64)>>> = jobs
        .par_iter()
        .map(|&(d, branch, x)| {
            let mut rows = Vec::new();
            for &a in &alphas {
                for r in werner_d_identities(d, x, a)? {
                    let key = if r.theorem.contains("renyi") {
                        format!("{}[d={d},{branch},alpha={a}]", r.theorem)
                    } else {
                        format!("{}[d={d},{branch}]", r.theorem)
                    };
                    rows.push((key, r.residual()));
                }
            }
            Ok(rows)
        })
        .collect();
    let mut order: Vec<String> = Vec::new();
    let mut worst: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut out = Vec::new();
    for r in results {
        match r {
            Ok(rows) => {
                for (key, res) in rows {
                    let e = worst.entry(key.clone()).or_insert_with(|| {
                        order.push(key.clone());
                        (0.0, 0)
                    });
                    e.0 = if res.is_nan() { f64::NAN } else { e.0.max(res) };
                    e.1 += 1;
                }
            }
            Err(e) => out.push(Check::failure("werner_d_identities", &e)),
        }
    }
    for key in order {
        let (res, n) = worst[&key];
        let mut c = Check::at_most(format!("max_residual[{key}]"), res, 1e-9)
            .with_detail(format!("{n} grid points"));
        if key.contains("_pure") {
            c = c
                .informational()
                .with_detail("endpoint form F = 2^{-S}/d, reported as a residual");
        }
        out.push(c);
    }
    out
}

fn fef_fixtures() -> Vec<StateSpec> {
    let mut v = vec![
        StateSpec::isotropic(2, 0.3),
        StateSpec::isotropic(2, 0.9),
        StateSpec::isotropic(3, 0.6),
        StateSpec::isotropic(3, 0.2),
        StateSpec::isotropic(4, 0.5),
        StateSpec::isotropic(5, 0.7),
        StateSpec::werner_d(2, 0.8),
        StateSpec::werner_d(2, -0.5),
        StateSpec::werner_d(3, 1.0),
        StateSpec::werner_d(3, -1.0),
        StateSpec::werner_d(3, 0.5),
        StateSpec::werner_d(4, 0.0),
        StateSpec::werner_d(4, -1.0),
        StateSpec::werner_d(5, 0.6),
        StateSpec::werner_d(5, -0.3),
        StateSpec::gen_bell(2, vec![0.7, 0.1, 0.1, 0.1]),
        StateSpec::gen_bell(2, vec![0.1, 0.2, 0.3, 0.4]),
        StateSpec::gen_bell(
            3,
            vec![0.62, 0.08, 0.05, 0.05, 0.04, 0.06, 0.03, 0.04, 0.03],
        ),
        StateSpec::gen_bell(3, vec![0.05, 0.1, 0.15, 0.05, 0.3, 0.1, 0.1, 0.1, 0.05]),
    ];
    let mut g4 = vec![0.02; 16];
    g4[0] = 0.7;
    v.push(StateSpec::gen_bell(4, g4));
    let mut g4b = vec![0.05; 16];
    g4b[9] = 0.25;
    v.push(StateSpec::gen_bell(4, g4b));
    let mut g5 = vec![0.02; 25];
    g5[7] = 0.52;
    v.push(StateSpec::gen_bell(5, g5));
    v.extend([
        StateSpec::werner2(0.0),
        StateSpec::werner2(1.0 / 3.0),
        StateSpec::werner2(0.8),
        StateSpec::werner2(1.0),
        StateSpec::weyl2([0.8, -0.5, 0.4]),
        StateSpec::weyl2([1.0, -1.0, 1.0]),
        StateSpec::weyl2([-0.3, -0.2, -0.1]),
        StateSpec::weyl2([0.5, -0.3, 0.1]),
    ]);
    v
}

fn fef_oracle(cfg: &VerifyConfig) -> Vec<Check> {
    let opts = OptimizeOptions {
        restarts: cfg.restarts.max(1),
        seed: cfg.seed,
        ..OptimizeOptions::default()
    };
    let mut out: Vec<Check> = fef_fixtures()
        .par_iter()
        .map(|spec| {
            let id = format!("fef_optimizer_vs_closed[{spec}]");
            guard(&id, || {
                let closed = fef_closed(&spec)?.value;
                let rho = make_state::<f64>(&spec)?;
                let opt = fef_optimize_with(&rho, &opts)?.result.value;
                let tol = if spec.d <= 3 { 1e-4 } else { 5e-4 };
                let mut c = Check::close(id.clone(), opt, closed, tol);
                if opt > closed + 1e-6 {
                    c.passed = false;
                    c = c.with_detail("optimizer exceeded the closed form");
                }
                Ok(vec![c])
            })
        })
        .flatten()
        .collect();

    let mut rng = rng_for(cfg.seed, STREAM_FEF);
    let states: Vec<[f64; 3]> = (0..50).map(|_| weyl2_t(&mut rng)).collect();
    let rows: Vec<Result<(f64, f64, f64, f64)>> = states
        .par_iter()
        .map(|&t| {
            let rho = make_state::<f64>(&StateSpec::weyl2(t))?;
            let corr = fef_corr_tensor(&rho)?.value;
            let literal = fef_trace_norm(&rho)?.value;
            let det = corr_tensor_det(&rho)?;
            let opt = fef_optimize_with(&rho, &opts)?.result.value;
            Ok((corr, literal, det, opt))
        })
        .collect();
    let mut worst = 0.0f64;
    let mut worst_literal = 0.0f64;
    let mut positive_det = 0usize;
    let mut failed = None;
    for r in rows {
        match r {
            Ok((corr, literal, det, opt)) => {
                worst = worst.max((corr - opt).abs());
                worst_literal = worst_literal.max((literal - opt).abs());
                positive_det += usize::from(det > 0.0);
            }
            Err(e) => failed = Some(e),
        }
    }
    match failed {
        Some(e) => out.push(Check::failure(
            "fef_corr_tensor_vs_optimizer[weyl2 x50]",
            &e,
        )),
        None => {
            out.push(Check::at_most(
                "fef_corr_tensor_vs_optimizer[weyl2 x50]",
                worst,
                1e-4,
            ));
            out.push(
                Check::flag("fef_trace_norm_formula_vs_optimizer[weyl2 x50]", worst_literal, worst_literal <= 1e-4)
                    .informational()
                    .with_detail(format!(
                        "(1 + Tr|T|)/4 overshoots by s3/2 when det T > 0; {positive_det} of 50 draws have det T > 0"
                    )),
            );
        }
    }
    out
}

/// Sign with a dead band around zero.
fn sign(v: f64) -> i8 {
    if v > 1e-12 {
        1
    } else if v < -1e-12 {
        -1
    } else {
        0
    }
}

fn entropy_checks(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = rng_for(cfg.seed, STREAM_ENTROPY);

    let limit_states: Vec<DensityMatrix<f64>> = (0..50)
        .map(|i| match i % 3 {
            0 => density(2, 2, &mut rng),
            1 => density(2, 3, &mut rng),
            _ => make_state::<f64>(&any_spec(&mut rng)).expect("sampler yields valid states"),
        })
        .collect();
    let gaps: Vec<Result<f64>> = limit_states
        .par_iter()
        .map(|rho| {
            let vn = cond_entropy(rho, EntropyKind::VonNeumann)?;
            let lo = cond_entropy(rho, EntropyKind::Renyi(1.0 - 1e-4))?;
            let hi = cond_entropy(rho, EntropyKind::Renyi(1.0 + 1e-4))?;
            Ok((lo - vn).abs().max((hi - vn).abs()))
        })
        .collect();
    out.push(fold_max("renyi_to_von_neumann_limit_gap", gaps, 1e-3));

    let sign_states: Vec<DensityMatrix<f64>> = (0..1000)
        .map(|i| {
            if i % 4 == 0 {
                density(2, 2, &mut rng)
            } else {
                make_state::<f64>(&any_spec(&mut rng)).expect("sampler yields valid states")
            }
        })
        .collect();
    for alpha in [1.5, 2.0, 3.0] {
        let rows: Vec<Result<bool>> = sign_states
            .par_iter()
            .map(|rho| {
                let r = cond_entropy(rho, EntropyKind::Renyi(alpha))?;
                let t = cond_entropy(rho, EntropyKind::Tsallis(alpha))?;
                Ok(sign(r) == sign(t))
            })
            .collect();
        let mut disagreements = 0usize;
        let mut err = None;
        for r in rows {
            match r {
                Ok(agree) => disagreements += usize::from(!agree),
                Err(e) => err = Some(e),
            }
        }
        let id = format!("renyi_tsallis_sign_disagreements[alpha={alpha}]");
        out.push(match err {
            Some(e) => Check::failure(id, &e),
            None => {
                Check::flag(id, disagreements as f64, disagreements == 0).with_detail("1000 states")
            }
        });
    }

    let specs: Vec<(StateSpec, f64)> = (0..cfg.draws)
        .map(|_| (closed_form_spec(&mut rng), alpha_gt_one(&mut rng)))
        .collect();
    let rows: Vec<Result<Vec<(Family, f64)>>> = specs
        .par_iter()
        .map(|(spec, alpha)| {
            let rho = make_state::<f64>(spec)?;
            let mut diffs = Vec::new();
            for kind in [
                EntropyKind::VonNeumann,
                EntropyKind::Renyi(*alpha),
                EntropyKind::Renyi(2.0),
            ] {
                match cond_entropy_closed(spec, kind) {
                    Ok(c) => diffs.push((spec.family, (c - cond_entropy(&rho, kind)?).abs())),
                    Err(Error::Unsupported(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(diffs)
        })
        .collect();
    let mut per_family: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut err = None;
    for r in rows {
        match r {
            Ok(diffs) => {
                for (fam, diff) in diffs {
                    let e = per_family.entry(fam.name().to_string()).or_insert((0.0, 0));
                    e.0 = if diff.is_nan() {
                        f64::NAN
                    } else {
                        e.0.max(diff)
                    };
                    e.1 += 1;
                }
            }
            Err(e) => err = Some(e),
        }
    }
    if let Some(e) = err {
        out.push(Check::failure("closed_vs_spectral", &e));
    }
    for fam in [
        "werner2",
        "weyl2",
        "isotropic",
        "werner_d",
        "rank_deficient",
        "gen_bell",
    ] {
        let id = format!("closed_vs_spectral[{fam}]");
        out.push(match per_family.get(fam) {
            Some(&(diff, n)) => {
                Check::at_most(id, diff, 1e-9).with_detail(format!("{n} comparisons"))
            }
            None => Check::flag(id, f64::NAN, false).with_detail("family never drawn"),
        });
    }
    out
}

fn fold_max(id: &str, rows: Vec<Result<f64>>, tol: f64) -> Check {
    let mut worst = 0.0f64;
    for r in rows {
        match r {
            Ok(v) => worst = if v.is_nan() { f64::NAN } else { worst.max(v) },
            Err(e) => return Check::failure(id, &e),
        }
    }
    Check::at_most(id, worst, tol)
}

fn workcost(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = ThermoContext::natural();
    let ps: Vec<f64> = (1..=1000)
        .map(|i| 1.0 / 3.0 + (2.0 / 3.0) * i as f64 / 1000.0)
        .collect();
    let rows: Vec<Result<f64>> = ps
        .par_iter()
        .map(|&p| {
            let rho = make_state::<f64>(&StateSpec::werner2(p))?;
            let lower = work_gain_lower(cond_entropy(&rho, EntropyKind::VonNeumann)?, &ctx)?;
            let bound = werner2_work_gain(p, &ctx)?
                .value()
                .ok_or_else(|| Error::InvalidParameter(format!("premise failed at p={p}")))?;
            Ok(bound - lower)
        })
        .collect();
    let mut out = vec![fold_max(
        "werner2_work_gain_minus_lower[1000 p]",
        rows,
        1e-9,
    )];

    let mut rng = rng_for(cfg.seed, STREAM_WORKCOST);
    let mut draws = Vec::with_capacity(1000);
    while draws.len() < 1000 {
        let d = rng.gen_range(2..=4);
        let probs = simplex(d * d, &mut rng);
        if gen_bell_terms(&probs, 2.0).fef > 1.0 / d as f64 {
            draws.push((d, probs));
        }
    }
    let rows: Vec<Result<f64>> = draws
        .par_iter()
        .map(|(d, probs)| {
            let rho = make_state::<f64>(&StateSpec::gen_bell(*d, probs.clone()))?;
            let lower = work_gain_lower(cond_entropy(&rho, EntropyKind::VonNeumann)?, &ctx)?;
            match genbell_work_gain(*d, probs, &ctx)?.value() {
                Some(b) => Ok(b - lower),
                None => Ok(f64::NEG_INFINITY),
            }
        })
        .collect();
    out.push(fold_max(
        "genbell_work_gain_minus_lower[1000 draws]",
        rows,
        1e-9,
    ));
    out
}

fn discrepancies() -> Vec<Check> {
    let info = |id: &str, value: f64, expected: f64, detail: &str| {
        Check::close(id, value, expected, 0.0)
            .informational()
            .with_detail(detail.to_string())
    };
    let mut out = Vec::new();
    out.push(info(
        "isotropic_fef_lower_cvne_rhs[d=3]",
        isotropic_cvne_fef_bound(3),
        0.471605,
        "log base (d^2-1) of (d^2-1)/d evaluates to 0.471679",
    ));
    if let Ok(t) = kcopy_steer_threshold(2, 7) {
        out.push(info(
            "steer_threshold[d=2,k=7]",
            t.threshold,
            0.597217,
            "literal harmonic-sum value; printed 0.600034",
        ));
    }
    if let Ok(t) = kcopy_steer_threshold(6, 2) {
        out.push(info(
            "steer_threshold[d=6,k=2]",
            t.threshold,
            0.257221,
            "literal harmonic-sum value",
        ));
    }
    if let Ok(Some(k)) = min_k_steerable(6, 0.26, 5) {
        out.push(info(
            "min_k_steerable[d=6,F=0.26]",
            k as f64,
            2.0,
            "k=1 already has a positive threshold 0.1153",
        ));
    }
    if let Ok(Some(k)) = min_k_steerable(2, 1.0, 20) {
        out.push(info(
            "min_k_steerable[d=2,F=1]",
            k as f64,
            7.0,
            "smallest k with a positive right side",
        ));
    }
    out.push(info(
        "non_weyl_x_star",
        nonweyl_x_star(),
        0.187786,
        "0.5*asin((sqrt(3)-1)/2)",
    ));
    if let Ok(v) = genbell_work_gain(2, &[0.9, 0.05, 0.03, 0.02], &ThermoContext::natural()) {
        out.push(info(
            "genbell_work_gain[0.9,0.05,0.03,0.02]",
            v.value().unwrap_or(f64::NAN),
            -0.264912,
            "ln(0.716609 * 2^0.1) = ln(0.768043) = -0.263909",
        ));
    }
    if let Ok(v) = werner_d_identities(2, 1.0, 2.0) {
        if let Some(r) = v.iter().find(|r| r.theorem == "werner_d_cvne_sym_pure") {
            out.push(info(
                "werner_d_endpoint_note[d=2,x=1]",
                r.lhs,
                r.rhs,
                "S(A|B) = log2(3) - 1 at x=1, so the note holds",
            ));
        }
    }
    if let Ok(rho) = make_state::<f64>(&StateSpec::weyl2([0.3, 0.2, 0.1])) {
        if let (Ok(a), Ok(b)) = (fef_trace_norm(&rho), fef_corr_tensor(&rho)) {
            out.push(info(
                "trace_norm_formula[weyl2(0.3,0.2,0.1)]",
                a.value,
                b.value,
                "det T > 0, exact FEF is 0.35",
            ));
        }
    }
    out.push(
        Check::flag(
            "weyl2(0.8,0.5,0.4)_is_a_state",
            crate::states::weyl2_bell_weights(0.8, 0.5, 0.4)
                .iter()
                .map(|(_, w)| *w)
                .fold(f64::INFINITY, f64::min),
            make_state::<f64>(&StateSpec::weyl2([0.8, 0.5, 0.4])).is_ok(),
        )
        .informational()
        .with_detail("value is the smallest Bell weight"),
    );
    if let Ok(v) = gen_bell_bounds(2, &[0.8, 0.1, 0.05, 0.05], 2.0) {
        if let Some(r) = v.iter().find(|r| r.theorem == "gen_bell_renyi_upper") {
            let mut c = Check::flag("gen_bell_renyi_upper_prefactor", r.rhs, true).informational();
            if let Some(n) = &r.note {
                c = c.with_detail(n.clone());
            }
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            seed: 7,
            draws: 200,
            restarts: 8,
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn harmonic_oracle_matches_library() {
        for n in [1u64, 7, 1000, 1001, 46656, 1_679_616] {
            let a = crate::multicopy::harmonic(n);
            assert!((a - harmonic_oracle(n)).abs() < 1e-12 * a, "n={n}");
        }
    }

    #[test]
    fn fast_suites_pass() {
        for s in [
            Suite::Table1,
            Suite::Thresholds,
            Suite::Identities,
            Suite::Workcost,
            Suite::Discrepancies,
        ] {
            let r = run_suite(s, &small());
            assert!(
                r.passed,
                "{}",
                VerifyReport {
                    seed: 7,
                    draws: 200,
                    restarts: 8,
                    passed: false,
                    suites: vec![r]
                }
                .to_text()
            );
        }
    }

    #[test]
    fn theorem_sweep_has_no_counterexamples() {
        let r = run_suite(Suite::Theorems, &small());
        assert!(
            r.passed,
            "{:#?}",
            r.checks.iter().filter(|c| !c.ok()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run(Suite::Theorems, &small()).to_json();
        let b = run(Suite::Theorems, &small()).to_json();
        assert_eq!(a, b);
    }
}
