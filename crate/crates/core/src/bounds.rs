//! Entropy/FEF inequalities as explicit two-sided reports, plus threshold root finding.
//!
//! Every implication report carries the two sides of its conclusion in `lhs`
//! and `rhs`. Identity reports carry both sides of the identity.

use serde::{Deserialize, Serialize};

use crate::entropy::{
    cond_entropy_closed, gen_bell_crae, isotropic_cr2e, isotropic_cvne, rank_deficient_cvne,
    shannon, werner2_crae, werner2_cvne, werner_d_crae, werner_d_cvne, xlog2x, EntropyKind,
};
use crate::error::{Error, Result};
use crate::fef::{argmax_first, fef_closed, werner_d_fef};
use crate::spec::StateSpec;
use crate::states::{make_state, validate_probabilities};

pub const BISECTION_TOL: f64 = 1e-9;
pub const BISECTION_MAX_ITERS: usize = 200;
/// Largest accepted `|lhs − rhs|` for the Werner-state identities.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub lhs: f64,
    pub rhs: f64,
    pub hypothesis: bool,
    pub conclusion: bool,
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn implication(
        theorem: &str,
        lhs: f64,
        rhs: f64,
        hypothesis: bool,
        conclusion: bool,
    ) -> Self {
        Self {
            theorem: theorem.to_string(),
            lhs,
            rhs,
            hypothesis,
            conclusion,
            vacuous: !hypothesis,
            note: None,
        }
    }

    /// An identity `lhs = rhs` on a branch where it is claimed to hold.
    pub fn identity(theorem: &str, lhs: f64, rhs: f64) -> Self {
        let ok = (lhs - rhs).abs() <= IDENTITY_TOL;
        Self::implication(theorem, lhs, rhs, true, ok)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the report as outside the theorem's stated premise.
    pub fn out_of_premise(mut self, why: impl Into<String>) -> Self {
        self.hypothesis = false;
        self.vacuous = true;
        self.note = Some(format!("out of premise: {}", why.into()));
        self
    }

    /// A sound report never has a true hypothesis with a false conclusion.
    pub fn is_counterexample(&self) -> bool {
        self.hypothesis && !self.conclusion
    }

    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

fn check_alpha_gt_one(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Smaller of the two distinct two-qubit Werner eigenvalues.
pub fn werner2_delta(p: f64) -> f64 {
    ((1.0 + 3.0 * p) / 4.0).min((1.0 - p) / 4.0)
}

/// `3δ·log₂(1/(2δ))`, continuous at `δ = 0`.
pub fn werner2_cvne_bound(p: f64) -> f64 {
    let delta = werner2_delta(p);
    -1.5 * xlog2x(2.0 * delta)
}

/// Two-qubit Werner: FEF > 1/2 ⇒ CVNE < 3δ·log₂(1/(2δ)).
pub fn werner2_cvne_upper(p: f64) -> Result<BoundReport> {
    check_unit("p", p)?;
    let fef = fef_closed(&StateSpec::werner2(p))?.value;
    let cvne = werner2_cvne(p);
    let rhs = werner2_cvne_bound(p);
    Ok(BoundReport::implication(
        "werner2_cvne_upper",
        cvne,
        rhs,
        fef > 0.5,
        cvne < rhs,
    ))
}

/// `[2^{1−α} − 3δ^α]^{1/α}`, clamped to 0 when the bracket is non-positive.
pub fn werner2_renyi_fef_bound(p: f64, alpha: f64) -> f64 {
    let inner = 2f64.powf(1.0 - alpha) - 3.0 * werner2_delta(p).powf(alpha);
    if inner > 0.0 {
        inner.powf(1.0 / alpha)
    } else {
        0.0
    }
}

/// Largest δ for which the Rényi FEF bound exceeds 1/2.
pub fn werner2_renyi_delta_threshold(alpha: f64) -> f64 {
    ((2f64.powf(alpha) - 2f64.powf(alpha - 1.0)) / (3.0 * 2f64.powf(2.0 * alpha - 1.0)))
        .powf(1.0 / alpha)
}

/// Two-qubit Werner, Rényi α: the FEF lower bound and the teleportation corollary.
pub fn werner2_renyi_bounds(p: f64, alpha: f64) -> Result<Vec<BoundReport>> {
    check_unit("p", p)?;
    check_alpha_gt_one(alpha)?;
    let fef = fef_closed(&StateSpec::werner2(p))?.value;
    let crae = werner2_crae(p, alpha);
    let bound = werner2_renyi_fef_bound(p, alpha);
    let delta = werner2_delta(p);
    let threshold = werner2_renyi_delta_threshold(alpha);
    let lower = BoundReport::implication(
        "werner2_fef_lower_renyi",
        fef,
        bound,
        crae < 0.0,
        fef > bound,
    );
    let tele = BoundReport::implication(
        "werner2_teleport_renyi",
        fef,
        0.5,
        crae < 0.0 && delta < threshold,
        fef > 0.5,
    )
    .with_note(format!("delta={delta}, delta_threshold={threshold}"));
    Ok(vec![lower, tele])
}

/// `|t₁||t₂| + |t₁||t₃| + |t₂||t₃|`.
pub fn weyl2_r(t: [f64; 3]) -> f64 {
    let a = t.map(f64::abs);
    a[0] * a[1] + a[0] * a[2] + a[1] * a[2]
}

/// Two-qubit Weyl: CR2E < 0 ⇒ FEF > 1/2, and FEF > 1/2 ⇒ CR2E < log₂(1/(1−R)).
///
/// FEF here is `(1 + Tr|T|)/4`.
pub fn weyl2_bounds(t: [f64; 3]) -> Result<Vec<BoundReport>> {
    let spec = StateSpec::weyl2(t);
    let fef = fef_closed(&spec)?.value;
    let cr2e = cond_entropy_closed(&spec, EntropyKind::Renyi(2.0))?;
    let a = t.map(f64::abs);
    let mut teleport =
        BoundReport::implication("weyl2_cr2e_teleport", fef, 0.5, cr2e < 0.0, fef > 0.5);
    if a.contains(&0.0) || a[0] == a[1] || a[1] == a[2] || a[0] == a[2] {
        teleport =
            teleport.with_note("coefficients not pairwise distinct and nonzero in magnitude");
    }
    let r = weyl2_r(t);
    let upper = if r > 0.0 && r < 1.0 {
        let rhs = (1.0 / (1.0 - r)).log2();
        BoundReport::implication("weyl2_cr2e_upper", cr2e, rhs, fef > 0.5, cr2e < rhs)
            .with_note(format!("R={r}"))
    } else {
        BoundReport::implication("weyl2_cr2e_upper", cr2e, f64::NAN, false, false)
            .out_of_premise(format!("R={r} outside (0, 1)"))
    };
    Ok(vec![teleport, upper])
}

/// `log_{d²−1}((d²−1)/d)`.
pub fn isotropic_cvne_fef_bound(d: usize) -> f64 {
    let n = (d * d) as f64 - 1.0;
    (n / d as f64).ln() / n.ln()
}

/// `(1 + √(1 + d(d² − d − 1)))/d²`.
pub fn isotropic_cr2e_threshold(d: usize) -> f64 {
    let df = d as f64;
    (1.0 + (1.0 + df * (df * df - df - 1.0)).sqrt()) / (df * df)
}

/// Zero crossing of the isotropic CVNE in `F`.
pub fn isotropic_cvne_crossing(d: usize) -> Result<f64> {
    let lo = 1.0 / (d * d) as f64;
    find_threshold(|f| isotropic_cvne(d, f), lo, 1.0, BISECTION_TOL)
}

/// Zero crossing of the isotropic CR2E in `F`, by bisection.
pub fn isotropic_cr2e_crossing(d: usize) -> Result<f64> {
    let lo = 1.0 / (d * d) as f64;
    find_threshold(|f| isotropic_cr2e(d, f), lo, 1.0, BISECTION_TOL)
}

fn check_dim(d: usize) -> Result<()> {
    if d >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "dimension must be >= 2, got {d}"
        )))
    }
}

/// Isotropic states: CVNE lower bound on F, its 1/d corollary, and the CR2E biconditional.
pub fn isotropic_bounds(d: usize, f: f64) -> Result<Vec<BoundReport>> {
    check_dim(d)?;
    check_unit("F", f)?;
    let cvne = isotropic_cvne(d, f);
    let cr2e = isotropic_cr2e(d, f);
    let b6 = isotropic_cvne_fef_bound(d);
    let thr = isotropic_cr2e_threshold(d);
    let inv_d = 1.0 / d as f64;
    Ok(vec![
        BoundReport::implication("isotropic_fef_lower_cvne", f, b6, cvne < 0.0, f > b6),
        BoundReport::implication("isotropic_teleport_cvne", f, inv_d, cvne < 0.0, f > inv_d),
        BoundReport::implication("isotropic_cr2e_iff", f, thr, cr2e < 0.0, f > thr),
        BoundReport::implication(
            "isotropic_cr2e_iff_converse",
            cr2e,
            0.0,
            f > thr,
            cr2e < 0.0,
        ),
    ])
}

/// Which branch of the Werner-state FEF a point falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WernerBranch {
    /// `1/d ≤ x ≤ 1`, any parity.
    Symmetric,
    /// `−1 ≤ x < 1/d`, even `d`.
    Antisymmetric,
}

pub fn werner_branch(d: usize, x: f64) -> Option<WernerBranch> {
    if x >= 1.0 / d as f64 {
        Some(WernerBranch::Symmetric)
    } else if d % 2 == 0 {
        Some(WernerBranch::Antisymmetric)
    } else {
        None
    }
}

/// Werner-state identities between F and the conditional entropies.
///
/// Symmetric branch: `F^{1+x} = 4^{−S} ((d²−d)/(1−x))^{1−x}/d²` for `x < 1`,
/// `F = 2^{−S}/d` at `x = 1`, and `F^α = Δ₊`. Antisymmetric branch (even `d`):
/// `F^{1−x} = 4^{−S} ((d²+d)/(1+x))^{1+x}/d²` for `x > −1`, `F = 2^{−S}/d` at
/// `x = −1`, and `F^α = Δ₋`. Odd `d` with `x < 1/d` has no identity.
pub fn werner_d_identities(d: usize, x: f64, alpha: f64) -> Result<Vec<BoundReport>> {
    check_dim(d)?;
    check_alpha_gt_one(alpha)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "x must lie in [-1, 1], got {x}"
        )));
    }
    let branch = werner_branch(d, x).ok_or_else(|| {
        Error::Unsupported(format!("no Werner identity for odd d={d} with x={x} < 1/d"))
    })?;
    let df = d as f64;
    let ns = df * df + df;
    let na = df * df - df;
    let f = werner_d_fef(d, x);
    let s = werner_d_cvne(d, x);
    let sa = werner_d_crae(d, x, alpha);
    let four_s = 4f64.powf(-s);
    let two_sa = 2.0 * 2f64.powf((1.0 - alpha) * sa);
    let scale = df.powf(alpha - 1.0);
    let mut out = Vec::with_capacity(2);
    match branch {
        WernerBranch::Symmetric => {
            if x < 1.0 {
                let gamma = (na / (1.0 - x)).powf(1.0 - x) / (df * df);
                out.push(BoundReport::identity(
                    "werner_d_cvne_sym",
                    f.powf(1.0 + x),
                    four_s * gamma,
                ));
            } else {
                out.push(BoundReport::identity(
                    "werner_d_cvne_sym_pure",
                    f,
                    2f64.powf(-s) / df,
                ));
            }
            let delta =
                (two_sa - scale * na.powf(1.0 - alpha) * (1.0 - x).powf(alpha)) / (scale * ns);
            out.push(BoundReport::identity(
                "werner_d_renyi_sym",
                f.powf(alpha),
                delta,
            ));
        }
        WernerBranch::Antisymmetric => {
            if x > -1.0 {
                let gamma = (ns / (1.0 + x)).powf(1.0 + x) / (df * df);
                out.push(BoundReport::identity(
                    "werner_d_cvne_anti",
                    f.powf(1.0 - x),
                    four_s * gamma,
                ));
            } else {
                out.push(BoundReport::identity(
                    "werner_d_cvne_anti_pure",
                    f,
                    2f64.powf(-s) / df,
                ));
            }
            let delta =
                (two_sa - scale * ns.powf(1.0 - alpha) * (1.0 + x).powf(alpha)) / (scale * na);
            out.push(BoundReport::identity(
                "werner_d_renyi_anti",
                f.powf(alpha),
                delta,
            ));
        }
    }
    Ok(out)
}

/// Pieces shared by the generalized Bell-diagonal bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenBellTerms {
    pub fef: f64,
    pub fef_index: usize,
    /// `Π pᵢ^{pᵢ}` over non-maximal entries.
    pub beta: f64,
    /// `Σ pᵢ^α` over non-maximal entries.
    pub x: f64,
    /// Whether every non-maximal weight is strictly positive.
    pub positive: bool,
}

pub fn gen_bell_terms(probs: &[f64], alpha: f64) -> GenBellTerms {
    let idx = argmax_first(probs);
    let rest = probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &p)| p);
    let log_beta: f64 = rest.clone().map(xlog2x).sum();
    GenBellTerms {
        fef: probs[idx],
        fef_index: idx,
        beta: 2f64.powf(log_beta),
        x: rest
            .clone()
            .filter(|&p| p > 0.0)
            .map(|p| p.powf(alpha))
            .sum(),
        positive: rest.into_iter().all(|p| p > 0.0),
    }
}

/// `log₂(d^{F−1}/β)`.
pub fn gen_bell_y(d: usize, terms: &GenBellTerms) -> f64 {
    (terms.fef - 1.0) * (d as f64).log2() - terms.beta.log2()
}

/// Generalized Bell-diagonal states: the four entropy/FEF inequalities.
///
/// The Rényi upper bound uses the prefactor `1/(1−α)`; the note records the
/// value with `1/(α−1)` as well.
pub fn gen_bell_bounds(d: usize, probs: &[f64], alpha: f64) -> Result<Vec<BoundReport>> {
    check_dim(d)?;
    check_alpha_gt_one(alpha)?;
    if probs.len() != d * d {
        return Err(Error::InvalidParameter(format!(
            "expected {} weights, got {}",
            d * d,
            probs.len()
        )));
    }
    validate_probabilities(probs)?;
    let df = d as f64;
    let terms = gen_bell_terms(probs, alpha);
    let f = terms.fef;
    let s = shannon(probs) - df.log2();
    let sa = gen_bell_crae(d, probs, alpha);
    let useful = f > 1.0 / df;
    let mut out = Vec::with_capacity(4);

    let product = f.powf(f) * df * terms.beta;
    let r = BoundReport::implication(
        "gen_bell_cvne_product",
        product,
        1.0,
        s < 0.0,
        product > 1.0,
    );
    out.push(if terms.positive {
        r
    } else {
        r.out_of_premise("a non-maximal weight is zero")
    });

    let y = gen_bell_y(d, &terms);
    let r = BoundReport::implication("gen_bell_cvne_upper", s, y, useful, s < y);
    out.push(if terms.positive {
        r
    } else {
        r.out_of_premise("a non-maximal weight is zero")
    });

    let lower = df.powf(1.0 - alpha) - terms.x;
    out.push(BoundReport::implication(
        "gen_bell_renyi_lower",
        f.powf(alpha),
        lower,
        sa < 0.0,
        f.powf(alpha) > lower,
    ));

    let arg = ((1.0 + df.powf(alpha) * terms.x) / df).log2();
    let upper = arg / (1.0 - alpha);
    let stated = arg / (alpha - 1.0);
    out.push(
        BoundReport::implication("gen_bell_renyi_upper", sa, upper, useful, sa < upper).with_note(
            format!(
                "with prefactor 1/(alpha-1): rhs={stated}, holds={}",
                sa < stated
            ),
        ),
    );
    Ok(out)
}

/// Zero crossings for the rank-two state `p|ψ⁺⟩⟨ψ⁺| + (1−p)|01⟩⟨01|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankDeficientThresholds {
    pub d: usize,
    /// CVNE < 0 for `p` above this value.
    pub p_cvne: f64,
    /// `2/(d+1)`.
    pub p_cr2e: f64,
    /// `1/d` for `d ≤ 3`, else 0.
    pub p_tele: f64,
}

pub const RANK_DEFICIENT_MAX_D: usize = 12;

/// Thresholds for `2 ≤ d ≤ 12`. The CVNE root is bracketed geometrically on `[1e-300, 1]`.
pub fn rank_deficient_thresholds(d: usize) -> Result<RankDeficientThresholds> {
    if !(2..=RANK_DEFICIENT_MAX_D).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "rank-deficient thresholds cover 2 <= d <= {RANK_DEFICIENT_MAX_D}, got {d}"
        )));
    }
    let df = d as f64;
    let p_cvne = find_threshold_geometric(|p| rank_deficient_cvne(d, p), 1e-300, 1.0, 1e-12)?;
    Ok(RankDeficientThresholds {
        d,
        p_cvne,
        p_cr2e: 2.0 / (df + 1.0),
        p_tele: if d <= 3 { 1.0 / df } else { 0.0 },
    })
}

fn endpoint(f: &impl Fn(f64) -> f64, at: f64) -> Result<f64> {
    let v = f(at);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at })
    }
}

fn bracket(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let (f_lo, f_hi) = (endpoint(f, lo)?, endpoint(f, hi)?);
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    Ok((f_lo, f_hi))
}

/// Root of `f` on `[lo, hi]` by bisection, accurate to `tol` (at most 200 halvings).
pub fn find_threshold(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect(&f, lo, hi, tol, |a, b| 0.5 * (a + b), |a, b| b - a)
}

/// Bisection on `ln x` for roots spanning many decades; `rel_tol` bounds `hi/lo − 1`.
pub fn find_threshold_geometric(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "geometric bracket needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    bisect(
        &f,
        lo,
        hi,
        rel_tol,
        |a, b| (a.ln() + 0.5 * (b.ln() - a.ln())).exp(),
        |a, b| b / a - 1.0,
    )
}

fn bisect(
    f: &impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mid: impl Fn(f64, f64) -> f64,
    width: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let (f_lo, f_hi) = bracket(f, lo, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..BISECTION_MAX_ITERS {
        if width(lo, hi) <= tol {
            break;
        }
        let m = mid(lo, hi);
        let fm = endpoint(f, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == lo_positive {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(mid(lo, hi))
}

/// Every report that applies to the given state.
pub fn applicable_bounds(spec: &StateSpec, alpha: f64) -> Result<Vec<BoundReport>> {
    make_state::<f64>(spec)?;
    let p = &spec.params;
    use crate::spec::Family;
    Ok(match spec.family {
        Family::Werner2 => {
            let mut v = vec![werner2_cvne_upper(p[0])?];
            v.extend(werner2_renyi_bounds(p[0], alpha)?);
            v
        }
        Family::Weyl2 => weyl2_bounds([p[0], p[1], p[2]])?,
        Family::Isotropic => isotropic_bounds(spec.d, p[0])?,
        Family::WernerD => match werner_d_identities(spec.d, p[0], alpha) {
            Err(Error::Unsupported(_)) => Vec::new(),
            other => other?,
        },
        Family::GenBell => gen_bell_bounds(spec.d, p, alpha)?,
        _ => Vec::new(),
    })
}
