//! k-copy steerability and k-copy nonlocality thresholds compared with entropy sign regions.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::bounds::{find_threshold, isotropic_cr2e_threshold, isotropic_cvne_crossing};
use crate::entropy::{cond_entropy, cond_entropy_closed, shannon, EntropyKind};
use crate::error::{Error, Result};
use crate::fef::fef_corr_tensor;
use crate::spec::StateSpec;
use crate::states::{make_state, normalized_schmidt};

/// Largest `d^k` for which the harmonic sum is evaluated.
pub const HARMONIC_BUDGET: u64 = 10_000_000;
pub const MAX_COPIES: usize = 20;

/// `H_n = Σ_{m=1}^{n} 1/m`, summed smallest-first with Neumaier compensation.
pub fn harmonic(n: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for m in (1..=n).rev() {
        let term = 1.0 / m as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sufficient condition for k-copy steerability of a state with FEF `F`:
/// `F^k > [(1+n)(H_n − 1) − n]/n²` with `n = d^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteerThreshold {
    pub d: usize,
    pub k: usize,
    /// The right-hand side `[(1+n)(H_n − 1) − n]/n²`.
    pub rhs: f64,
    /// `rhs^{1/k}` when `rhs > 0`, otherwise the signed `rhs`.
    pub threshold: f64,
    /// False when `rhs ≤ 0`, making the condition vacuous.
    pub informative: bool,
}

fn copies_dim(d: usize, k: usize) -> Result<u64> {
    if d < 2 || k < 1 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 2 and k >= 1, got d={d}, k={k}"
        )));
    }
    (d as u64)
        .checked_pow(k as u32)
        .filter(|&n| n <= HARMONIC_BUDGET)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("d^k for d={d}, k={k} exceeds {HARMONIC_BUDGET}"))
        })
}

pub fn kcopy_steer_threshold(d: usize, k: usize) -> Result<SteerThreshold> {
    let n = copies_dim(d, k)?;
    let nf = n as f64;
    let rhs = ((1.0 + nf) * (harmonic(n) - 1.0) - nf) / (nf * nf);
    let informative = rhs > 0.0;
    Ok(SteerThreshold {
        d,
        k,
        rhs,
        threshold: if informative {
            rhs.powf(1.0 / k as f64)
        } else {
            rhs
        },
        informative,
    })
}

/// Smallest `k ≤ kmax` whose steering condition has a positive right side and is met by `f`.
pub fn min_k_steerable(d: usize, f: f64, kmax: usize) -> Result<Option<usize>> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "F must lie in [0, 1], got {f}"
        )));
    }
    if kmax > MAX_COPIES {
        return Err(Error::InvalidParameter(format!(
            "kmax must be <= {MAX_COPIES}, got {kmax}"
        )));
    }
    for k in 1..=kmax {
        let t = kcopy_steer_threshold(d, k)?;
        if t.informative && f.powi(k as i32) > t.rhs {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Comparison between a steering threshold and an entropy-negativity threshold in `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KCopyVerdict {
    pub d: usize,
    pub k: usize,
    pub threshold_f: f64,
    /// `F` above which the conditional entropy is negative.
    pub entropy_threshold_f: f64,
    pub informative: bool,
    /// Negative entropy implies k-copy steerability.
    pub implication_holds: bool,
}

/// Isotropic states: does negative CVNE (or CR2E) imply k-copy steerability?
pub fn isotropic_steering(d: usize, k: usize, kind: EntropyKind) -> Result<KCopyVerdict> {
    let steer = kcopy_steer_threshold(d, k)?;
    let entropy_threshold_f = match kind {
        EntropyKind::VonNeumann => isotropic_cvne_crossing(d)?,
        EntropyKind::Renyi(a) if a == 2.0 => isotropic_cr2e_threshold(d),
        other => {
            return Err(Error::Unsupported(format!(
                "no isotropic threshold for {other}"
            )))
        }
    };
    Ok(KCopyVerdict {
        d,
        k,
        threshold_f: steer.threshold,
        entropy_threshold_f,
        informative: steer.informative,
        implication_holds: steer.informative && entropy_threshold_f >= steer.threshold,
    })
}

/// Entropy negativity against a nonlocality witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlocalVerdict {
    pub entropy: f64,
    pub witness: f64,
    pub witness_threshold: f64,
    pub hypothesis: bool,
    pub conclusion: bool,
    pub vacuous: bool,
    pub implication_holds: bool,
}

impl NonlocalVerdict {
    fn new(entropy: f64, witness: f64, witness_threshold: f64, hypothesis: bool) -> Self {
        let conclusion = witness > witness_threshold;
        Self {
            entropy,
            witness,
            witness_threshold,
            hypothesis,
            conclusion,
            vacuous: !hypothesis,
            implication_holds: !hypothesis || conclusion,
        }
    }
}

/// Two-qubit Weyl: CR2E < 0 ⇒ FEF > 1/2, the route to k-copy nonlocality.
pub fn weyl2_kcopy_nonlocal(t: [f64; 3]) -> Result<NonlocalVerdict> {
    let spec = StateSpec::weyl2(t);
    let rho = make_state::<f64>(&spec)?;
    let cr2e = cond_entropy_closed(&spec, EntropyKind::Renyi(2.0))?;
    let fef = fef_corr_tensor(&rho)?.value;
    Ok(NonlocalVerdict::new(cr2e, fef, 0.5, cr2e < 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonWeylThresholds {
    pub x: f64,
    /// `1/(1 + 2 sin 2x)`: FEF > 1/2 above this `p`.
    pub p_fef: f64,
    /// `1/√3`: CR2E < 0 above this `p`.
    pub p_cr2e: f64,
    /// `½·arcsin((√3 − 1)/2)`: `p_fef < p_cr2e` for `x` above this angle.
    pub x_star: f64,
}

pub fn nonweyl_x_star() -> f64 {
    0.5 * ((3f64.sqrt() - 1.0) / 2.0).asin()
}

fn check_angle(x: f64) -> Result<()> {
    if x > 0.0 && x <= FRAC_PI_4 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "x must lie in (0, pi/4], got {x}"
        )))
    }
}

pub fn nonweyl_thresholds(x: f64) -> Result<NonWeylThresholds> {
    check_angle(x)?;
    Ok(NonWeylThresholds {
        x,
        p_fef: 1.0 / (1.0 + 2.0 * (2.0 * x).sin()),
        p_cr2e: 1.0 / 3f64.sqrt(),
        x_star: nonweyl_x_star(),
    })
}

/// Non-Weyl state: for `x > x*`, CR2E < 0 ⇒ FEF > 1/2.
pub fn nonweyl_kcopy_nonlocal(x: f64, p: f64) -> Result<NonlocalVerdict> {
    check_angle(x)?;
    let rho = make_state::<f64>(&StateSpec::non_weyl(x, p))?;
    let cr2e = cond_entropy(&rho, EntropyKind::Renyi(2.0))?;
    let fef = fef_corr_tensor(&rho)?.value;
    Ok(NonlocalVerdict::new(
        cr2e,
        fef,
        0.5,
        cr2e < 0.0 && x > nonweyl_x_star(),
    ))
}

/// Joint spectrum and B-marginal of `p|ψ⟩⟨ψ| + (1−p)I/d²`.
pub fn noisy_spectra(lambdas: &[f64], p: f64) -> (Vec<f64>, Vec<f64>) {
    let d = lambdas.len();
    let n = (d * d) as f64;
    let mut joint = vec![(1.0 - p) / n; d * d];
    joint[0] += p;
    let marginal = lambdas
        .iter()
        .map(|l| p * l * l + (1.0 - p) / d as f64)
        .collect();
    (joint, marginal)
}

pub fn noisy_cvne(lambdas: &[f64], p: f64) -> f64 {
    let (joint, marginal) = noisy_spectra(lambdas, p);
    shannon(&joint) - shannon(&marginal)
}

pub fn noisy_cr2e(lambdas: &[f64], p: f64) -> f64 {
    let (joint, marginal) = noisy_spectra(lambdas, p);
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    (sq(&marginal) / sq(&joint)).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyThresholds {
    pub d: usize,
    /// `(d − 1)/(d(Σλᵢ)² − 1)`.
    pub p_nonlocal: f64,
    /// `√(d − 1)/√(d − 1 + d²(1 − Σλᵢ⁴))`.
    pub p_cr2e: f64,
    /// Zero crossing of the CVNE in `p`.
    pub p_cvne: f64,
}

pub fn noisy_p_nonlocal(lambdas: &[f64]) -> f64 {
    let d = lambdas.len() as f64;
    let s: f64 = lambdas.iter().sum();
    (d - 1.0) / (d * s * s - 1.0)
}

pub fn noisy_p_cr2e(lambdas: &[f64]) -> f64 {
    let d = lambdas.len() as f64;
    let q: f64 = lambdas.iter().map(|l| l.powi(4)).sum();
    (d - 1.0).sqrt() / (d - 1.0 + d * d * (1.0 - q)).sqrt()
}

/// Thresholds for a Schmidt vector of amplitudes `λᵢ` (`Σλᵢ² = 1`).
pub fn noisy_thresholds(lambdas: &[f64]) -> Result<NoisyThresholds> {
    let l = normalized_schmidt(lambdas)?;
    if l.len() < 2 {
        return Err(Error::InvalidParameter(
            "Schmidt vector needs at least two entries".into(),
        ));
    }
    let p_cvne = find_threshold(|p| noisy_cvne(&l, p), 0.0, 1.0, 1e-12)?;
    Ok(NoisyThresholds {
        d: l.len(),
        p_nonlocal: noisy_p_nonlocal(&l),
        p_cr2e: noisy_p_cr2e(&l),
        p_cvne,
    })
}

/// Noisy state: negative conditional entropy ⇒ `p` above the k-copy nonlocality threshold.
pub fn noisy_kcopy_nonlocal(lambdas: &[f64], p: f64, kind: EntropyKind) -> Result<NonlocalVerdict> {
    let l = normalized_schmidt(lambdas)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    let s = match kind {
        EntropyKind::VonNeumann => noisy_cvne(&l, p),
        EntropyKind::Renyi(a) if a == 2.0 => noisy_cr2e(&l, p),
        other => {
            return Err(Error::Unsupported(format!(
                "no noisy-state check for {other}"
            )))
        }
    };
    Ok(NonlocalVerdict::new(s, p, noisy_p_nonlocal(&l), s < 0.0))
}

/// Schmidt amplitudes for the three fixed examples in dimensions 3, 4 and 5.
pub fn reference_schmidt_vectors() -> Vec<Vec<f64>> {
    let amp = |sq: &[f64]| sq.iter().map(|v| v.sqrt()).collect::<Vec<f64>>();
    vec![
        amp(&[1.0 / 2.0, 1.0 / 3.0, 1.0 / 6.0]),
        amp(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]),
        amp(&[1.0 / 3.0, 1.0 / 7.0, 2.0 / 21.0, 4.0 / 21.0, 5.0 / 21.0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, One, ToPrimitive};

    fn exact_harmonic(n: u64) -> f64 {
        let mut h = BigRational::from_integer(BigInt::from(0));
        for m in 1..=n {
            h += BigRational::new(BigInt::one(), BigInt::from(m));
        }
        h.to_f64().unwrap()
    }

    #[test]
    fn harmonic_matches_exact_rationals() {
        for n in [1u64, 2, 4, 9, 36, 128, 1000] {
            assert!((harmonic(n) - exact_harmonic(n)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn steer_threshold_examples() {
        let t = kcopy_steer_threshold(2, 2).unwrap();
        assert!((t.rhs - (5.0 * (25.0 / 12.0 - 1.0) - 4.0) / 16.0).abs() < 1e-15);
        assert!((t.threshold - 0.297560).abs() < 1e-6);
        assert!((kcopy_steer_threshold(2, 7).unwrap().threshold - 0.5972006).abs() < 1e-6);
        assert!((kcopy_steer_threshold(6, 2).unwrap().threshold - 0.250707).abs() < 1e-6);
        let t = kcopy_steer_threshold(2, 1).unwrap();
        assert!(!t.informative && (t.threshold + 0.125).abs() < 1e-15);
        assert!(matches!(
            kcopy_steer_threshold(10, 8),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn min_k_examples() {
        assert_eq!(min_k_steerable(2, 0.25, 10).unwrap(), None);
        assert_eq!(min_k_steerable(2, 0.99, 10).unwrap(), Some(2));
        assert_eq!(min_k_steerable(6, 0.26, 5).unwrap(), Some(1));
        assert!(min_k_steerable(2, 0.5, 21).is_err());
    }

    #[test]
    fn isotropic_steering_examples() {
        let v = isotropic_steering(2, 7, EntropyKind::VonNeumann).unwrap();
        assert!(v.implication_holds && (v.entropy_threshold_f - 0.81071).abs() < 1e-4);
        let v = isotropic_steering(6, 2, EntropyKind::Renyi(2.0)).unwrap();
        assert!(v.implication_holds);
    }

    #[test]
    fn weyl_nonlocal_examples() {
        let v = weyl2_kcopy_nonlocal([0.8, -0.5, 0.4]).unwrap();
        assert!(v.hypothesis && v.conclusion && (v.witness - 0.675).abs() < 1e-12);
        let v = weyl2_kcopy_nonlocal([0.5, 0.3, 0.2]).unwrap();
        assert!(v.vacuous && v.entropy > 0.0);
        let v = weyl2_kcopy_nonlocal([1.0, -1.0, 1.0]).unwrap();
        assert!(v.implication_holds && v.conclusion);
        assert!(weyl2_kcopy_nonlocal([0.9, 0.9, 0.9]).is_err());
    }

    #[test]
    fn nonweyl_examples() {
        let t = nonweyl_thresholds(FRAC_PI_4).unwrap();
        assert!((t.p_fef - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.p_cr2e - 0.577350).abs() < 1e-6);
        assert!((t.x_star - 0.187367).abs() < 1e-6);
        assert!(nonweyl_thresholds(0.0).is_err() && nonweyl_thresholds(1.0).is_err());
    }

    #[test]
    fn nonweyl_cr2e_threshold_is_angle_free() {
        for x in [FRAC_PI_4 / 4.0, FRAC_PI_4 / 2.0, FRAC_PI_4] {
            let f = |p: f64| {
                let rho = make_state::<f64>(&StateSpec::non_weyl(x, p)).unwrap();
                cond_entropy(&rho, EntropyKind::Renyi(2.0)).unwrap()
            };
            let root = find_threshold(f, 0.3, 1.0, 1e-10).unwrap();
            assert!((root - 1.0 / 3f64.sqrt()).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn noisy_reference_values() {
        let want = [
            (0.263305, 0.516398, 0.728901),
            (0.206292, 0.45399, 0.699086),
            (0.174342, 0.415577, 0.685898),
        ];
        for (l, w) in reference_schmidt_vectors().iter().zip(want) {
            let t = noisy_thresholds(l).unwrap();
            assert!((t.p_nonlocal - w.0).abs() < 1e-6);
            assert!((t.p_cr2e - w.1).abs() < 1e-5);
            assert!((t.p_cvne - w.2).abs() < 1e-4);
            assert!(t.p_cr2e >= t.p_nonlocal && t.p_cvne >= t.p_cr2e);
        }
    }

    #[test]
    fn noisy_analytic_spectrum_matches_matrix() {
        let l = &reference_schmidt_vectors()[1];
        for p in [0.1, 0.5, 0.93] {
            let rho = make_state::<f64>(&StateSpec::noisy_schmidt(l, p)).unwrap();
            let vn = cond_entropy(&rho, EntropyKind::VonNeumann).unwrap();
            let r2 = cond_entropy(&rho, EntropyKind::Renyi(2.0)).unwrap();
            assert!((vn - noisy_cvne(l, p)).abs() < 1e-10);
            assert!((r2 - noisy_cr2e(l, p)).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_cr2e_formula_matches_bisection() {
        for l in reference_schmidt_vectors() {
            let root = find_threshold(|p| noisy_cr2e(&l, p), 0.0, 1.0, 1e-13).unwrap();
            assert!((root - noisy_p_cr2e(&l)).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_entangled_schmidt_vector() {
        for d in 2..=6 {
            let l = vec![1.0 / (d as f64).sqrt(); d];
            assert!((noisy_p_nonlocal(&l) - 1.0 / (d as f64 + 1.0)).abs() < 1e-12);
        }
    }
}
