//! Single-state analysis reports and parameter sweeps.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{applicable_bounds, BoundReport};
use crate::entropy::{cond_entropy, cond_entropy_closed, entropy, EntropyKind};
use crate::error::{Error, Result};
use crate::fef::{
    fef_closed, fef_corr_tensor, fef_optimize_with, fef_trace_norm, FefResult, OptimizeOptions,
};
use crate::multicopy::{
    kcopy_steer_threshold, min_k_steerable, noisy_kcopy_nonlocal, noisy_thresholds,
    nonweyl_kcopy_nonlocal, nonweyl_thresholds, weyl2_kcopy_nonlocal, NoisyThresholds,
    NonWeylThresholds, NonlocalVerdict, HARMONIC_BUDGET, MAX_COPIES,
};
use crate::spec::{Family, StateSpec};
use crate::states::{make_state, DensityMatrix};
use crate::workcost::{
    genbell_work_gain, werner2_work_gain, work_gain_lower, ThermoContext, WorkVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub alpha: f64,
    pub optimize: OptimizeOptions,
    pub thermo: ThermoContext,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            optimize: OptimizeOptions::default(),
            thermo: ThermoContext::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub alpha: f64,
    pub von_neumann: f64,
    pub cvne: f64,
    pub crae_alpha: f64,
    pub cr2e: f64,
    pub ctae_alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cvne_closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crae_alpha_closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cr2e_closed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FefSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed: Option<FefResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corr_tensor: Option<FefResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_norm: Option<FefResult>,
    pub optimized: FefResult,
    /// Closed form when available, else the optimizer.
    pub value: f64,
    /// `value > 1/d`.
    pub useful_for_teleportation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticopySection {
    pub kmax: usize,
    pub min_k_steerable: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steer_threshold_at_min_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl2_nonlocal: Option<NonlocalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_weyl_thresholds: Option<NonWeylThresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_weyl_nonlocal: Option<NonlocalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy_thresholds: Option<NoisyThresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy_cr2e_nonlocal: Option<NonlocalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy_cvne_nonlocal: Option<NonlocalVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkcostSection {
    pub context: ThermoContext,
    pub work_gain_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub werner2: Option<WorkVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen_bell: Option<WorkVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: StateSpec,
    pub eigenvalues: Vec<f64>,
    pub entropies: Entropies,
    pub fef: FefSection,
    pub bounds: Vec<BoundReport>,
    pub multicopy: MulticopySection,
    pub workcost: WorkcostSection,
}

fn closed_or_none(spec: &StateSpec, kind: EntropyKind) -> Result<Option<f64>> {
    match cond_entropy_closed(spec, kind) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn unsupported_as_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Largest `k ≤ 20` whose harmonic sum fits the budget.
pub fn kmax_for(d: usize) -> usize {
    let mut k = 0;
    let mut n: u64 = 1;
    while k < MAX_COPIES {
        match n.checked_mul(d as u64) {
            Some(next) if next <= HARMONIC_BUDGET => {
                n = next;
                k += 1;
            }
            _ => break,
        }
    }
    k
}

pub fn entropies(rho: &DensityMatrix<f64>, spec: &StateSpec, alpha: f64) -> Result<Entropies> {
    let renyi = EntropyKind::renyi(alpha)?;
    let tsallis = EntropyKind::tsallis(alpha)?;
    Ok(Entropies {
        alpha,
        von_neumann: entropy(rho, EntropyKind::VonNeumann)?,
        cvne: cond_entropy(rho, EntropyKind::VonNeumann)?,
        crae_alpha: cond_entropy(rho, renyi)?,
        cr2e: cond_entropy(rho, EntropyKind::Renyi(2.0))?,
        ctae_alpha: cond_entropy(rho, tsallis)?,
        cvne_closed: closed_or_none(spec, EntropyKind::VonNeumann)?,
        crae_alpha_closed: closed_or_none(spec, renyi)?,
        cr2e_closed: closed_or_none(spec, EntropyKind::Renyi(2.0))?,
    })
}

pub fn fef_section(
    rho: &DensityMatrix<f64>,
    spec: &StateSpec,
    opts: &OptimizeOptions,
) -> Result<FefSection> {
    let closed = unsupported_as_none(fef_closed(spec))?;
    let two_qubit = rho.dims() == (2, 2);
    let corr_tensor = if two_qubit {
        Some(fef_corr_tensor(rho)?)
    } else {
        None
    };
    let trace_norm = if two_qubit {
        Some(fef_trace_norm(rho)?)
    } else {
        None
    };
    let optimized = fef_optimize_with(rho, opts)?.result;
    let value = closed.as_ref().map_or(optimized.value, |c| c.value);
    Ok(FefSection {
        useful_for_teleportation: value > 1.0 / spec.d as f64,
        closed,
        corr_tensor,
        trace_norm,
        optimized,
        value,
    })
}

fn multicopy_section(spec: &StateSpec, fef: f64) -> Result<MulticopySection> {
    let kmax = kmax_for(spec.d);
    let min_k = min_k_steerable(spec.d, fef.clamp(0.0, 1.0), kmax)?;
    let mut out = MulticopySection {
        kmax,
        min_k_steerable: min_k,
        steer_threshold_at_min_k: match min_k {
            Some(k) => Some(kcopy_steer_threshold(spec.d, k)?.threshold),
            None => None,
        },
        weyl2_nonlocal: None,
        non_weyl_thresholds: None,
        non_weyl_nonlocal: None,
        noisy_thresholds: None,
        noisy_cr2e_nonlocal: None,
        noisy_cvne_nonlocal: None,
    };
    let p = &spec.params;
    match spec.family {
        Family::Weyl2 => out.weyl2_nonlocal = Some(weyl2_kcopy_nonlocal([p[0], p[1], p[2]])?),
        Family::NonWeyl => {
            out.non_weyl_thresholds = Some(nonweyl_thresholds(p[0])?);
            out.non_weyl_nonlocal = Some(nonweyl_kcopy_nonlocal(p[0], p[1])?);
        }
        Family::NoisySchmidt => {
            let l = &p[..spec.d];
            out.noisy_thresholds = Some(noisy_thresholds(l)?);
            out.noisy_cr2e_nonlocal =
                Some(noisy_kcopy_nonlocal(l, p[spec.d], EntropyKind::Renyi(2.0))?);
            out.noisy_cvne_nonlocal =
                Some(noisy_kcopy_nonlocal(l, p[spec.d], EntropyKind::VonNeumann)?);
        }
        _ => {}
    }
    Ok(out)
}

fn workcost_section(spec: &StateSpec, cvne: f64, ctx: &ThermoContext) -> Result<WorkcostSection> {
    Ok(WorkcostSection {
        context: *ctx,
        work_gain_lower: work_gain_lower(cvne, ctx)?,
        werner2: match spec.family {
            Family::Werner2 => Some(werner2_work_gain(spec.params[0], ctx)?),
            _ => None,
        },
        gen_bell: match spec.family {
            Family::GenBell => Some(genbell_work_gain(spec.d, &spec.params, ctx)?),
            _ => None,
        },
    })
}

/// Everything the library can say about one state.
pub fn analyze(spec: &StateSpec, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let rho = make_state::<f64>(spec)?;
    let entropies = entropies(&rho, spec, opts.alpha)?;
    let fef = fef_section(&rho, spec, &opts.optimize)?;
    let bounds = if opts.alpha > 1.0 {
        applicable_bounds(spec, opts.alpha)?
    } else {
        Vec::new()
    };
    let multicopy = multicopy_section(spec, fef.value)?;
    let workcost = workcost_section(spec, entropies.cvne, &opts.thermo)?;
    Ok(AnalysisReport {
        spec: spec.clone(),
        eigenvalues: rho.spectrum().values().to_vec(),
        entropies,
        fef,
        bounds,
        multicopy,
        workcost,
    })
}

fn opt_line(out: &mut String, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        let _ = writeln!(out, "  {key:<22} {v:.10}");
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "state: {}", self.spec);
        let eig: Vec<String> = self
            .eigenvalues
            .iter()
            .map(|v| format!("{v:.10}"))
            .collect();
        let _ = writeln!(s, "eigenvalues: [{}]", eig.join(", "));
        let e = &self.entropies;
        let _ = writeln!(s, "entropies (alpha = {}):", e.alpha);
        let _ = writeln!(s, "  {:<22} {:.10}", "S(AB)", e.von_neumann);
        let _ = writeln!(s, "  {:<22} {:.10}", "cvne", e.cvne);
        let _ = writeln!(s, "  {:<22} {:.10}", "crae_alpha", e.crae_alpha);
        let _ = writeln!(s, "  {:<22} {:.10}", "cr2e", e.cr2e);
        let _ = writeln!(s, "  {:<22} {:.10}", "ctae_alpha", e.ctae_alpha);
        opt_line(&mut s, "cvne (closed)", e.cvne_closed);
        opt_line(&mut s, "crae_alpha (closed)", e.crae_alpha_closed);
        opt_line(&mut s, "cr2e (closed)", e.cr2e_closed);
        let f = &self.fef;
        let _ = writeln!(s, "fef:");
        opt_line(&mut s, "closed", f.closed.as_ref().map(|r| r.value));
        opt_line(
            &mut s,
            "corr_tensor",
            f.corr_tensor.as_ref().map(|r| r.value),
        );
        opt_line(&mut s, "trace_norm", f.trace_norm.as_ref().map(|r| r.value));
        let _ = writeln!(
            s,
            "  {:<22} {:.10} (restarts {}, converged {})",
            "optimized", f.optimized.value, f.optimized.restarts_used, f.optimized.converged
        );
        let _ = writeln!(
            s,
            "  {:<22} {}",
            "useful (> 1/d)", f.useful_for_teleportation
        );
        if !self.bounds.is_empty() {
            let _ = writeln!(s, "bounds:");
            for b in &self.bounds {
                let verdict = if b.vacuous {
                    "vacuous"
                } else if b.conclusion {
                    "holds"
                } else {
                    "VIOLATED"
                };
                let _ = writeln!(
                    s,
                    "  {:<28} lhs={:.10} rhs={:.10} {verdict}",
                    b.theorem, b.lhs, b.rhs
                );
            }
        }
        let m = &self.multicopy;
        let _ = writeln!(s, "multicopy:");
        match m.min_k_steerable {
            Some(k) => {
                let _ = writeln!(s, "  min_k_steerable        {k} (kmax {})", m.kmax);
            }
            None => {
                let _ = writeln!(s, "  min_k_steerable        none up to {}", m.kmax);
            }
        }
        for (name, v) in [
            ("weyl2_nonlocal", &m.weyl2_nonlocal),
            ("non_weyl_nonlocal", &m.non_weyl_nonlocal),
            ("noisy_cr2e_nonlocal", &m.noisy_cr2e_nonlocal),
            ("noisy_cvne_nonlocal", &m.noisy_cvne_nonlocal),
        ] {
            if let Some(v) = v {
                let _ = writeln!(
                    s,
                    "  {name:<22} hypothesis={} conclusion={}",
                    v.hypothesis, v.conclusion
                );
            }
        }
        if let Some(t) = &m.noisy_thresholds {
            let _ = writeln!(
                s,
                "  noisy thresholds       nonlocal={:.6} cr2e={:.6} cvne={:.6}",
                t.p_nonlocal, t.p_cr2e, t.p_cvne
            );
        }
        let w = &self.workcost;
        let _ = writeln!(s, "workcost (kT = {:e}):", w.context.kt());
        let _ = writeln!(s, "  {:<22} {:e}", "work_gain_lower", w.work_gain_lower);
        for (name, v) in [("werner2", &w.werner2), ("gen_bell", &w.gen_bell)] {
            match v {
                Some(WorkVerdict::Bound { value }) => {
                    let _ = writeln!(s, "  {name:<22} {value:e}");
                }
                Some(WorkVerdict::OutOfPremise { reason }) => {
                    let _ = writeln!(s, "  {name:<22} out of premise ({reason})");
                }
                None => {}
            }
        }
        s
    }
}

pub const SWEEP_HEADER: [&str; 9] = [
    "param",
    "cvne",
    "crae_alpha",
    "cr2e",
    "fef",
    "fef_gt_half",
    "fef_gt_inv_d",
    "cvne_neg",
    "cr2e_neg",
];

/// A rectangular table with a strictly increasing first column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    /// CSV with 17 significant digits and a header row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    /// Parameter values between which `column` changes sign.
    pub fn sign_changes(&self, column: &str) -> Vec<(f64, f64)> {
        let Some(c) = self.header.iter().position(|h| h == column) else {
            return Vec::new();
        };
        self.rows
            .windows(2)
            .filter(|w| (w[0][c] < 0.0) != (w[1][c] < 0.0))
            .map(|w| (w[0][0], w[1][0]))
            .collect()
    }
}

/// Sweep one parameter of `template` over `steps` evenly spaced values.
pub fn sweep(
    template: &StateSpec,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    opts: &AnalyzeOptions,
) -> Result<SweepTable> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be >= 2, got {steps}"
        )));
    }
    if !(from < to) || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite from < to, got {from}..{to}"
        )));
    }
    let index = template.param_index(param)?;
    let renyi = EntropyKind::renyi(opts.alpha)?;
    let d = template.d as f64;
    let values: Vec<f64> = (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let rows = values
        .par_iter()
        .map(|&v| {
            let spec = template.with_param(index, v);
            let rho = make_state::<f64>(&spec)?;
            let cvne = cond_entropy(&rho, EntropyKind::VonNeumann)?;
            let crae = cond_entropy(&rho, renyi)?;
            let cr2e = cond_entropy(&rho, EntropyKind::Renyi(2.0))?;
            let fef = match fef_closed(&spec) {
                Ok(r) => r.value,
                Err(Error::Unsupported(_)) => fef_optimize_with(&rho, &opts.optimize)?.result.value,
                Err(e) => return Err(e),
            };
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            Ok(vec![
                v,
                cvne,
                crae,
                cr2e,
                fef,
                flag(fef > 0.5),
                flag(fef > 1.0 / d),
                flag(cvne < 0.0),
                flag(cr2e < 0.0),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        header: SWEEP_HEADER.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}
