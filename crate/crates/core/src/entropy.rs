//! Von Neumann, Rényi and Tsallis entropies and their B-conditioned variants.
//!
//! All logarithms are base 2 and `0·log 0 = 0`. Conditioning is always on
//! subsystem B: `S(A|B) = S(ρ_AB) − S(ρ_B)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Subsystem};
use crate::scalar::Real;
use crate::spec::{Family, StateSpec};
use crate::states::{normalized_schmidt, validate_probabilities, DensityMatrix, PSD_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyKind {
    VonNeumann,
    Renyi(f64),
    Tsallis(f64),
}

impl EntropyKind {
    pub fn renyi(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(EntropyKind::Renyi(alpha))
    }

    pub fn tsallis(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(EntropyKind::Tsallis(alpha))
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            EntropyKind::VonNeumann => Ok(self),
            EntropyKind::Renyi(a) | EntropyKind::Tsallis(a) => check_alpha(a).map(|_| self),
        }
    }
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyKind::VonNeumann => f.write_str("von_neumann"),
            EntropyKind::Renyi(a) => write!(f, "renyi({a})"),
            EntropyKind::Tsallis(a) => write!(f, "tsallis({a})"),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha != 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// `x·log₂x` with the `0·log 0 = 0` convention.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Shannon entropy (bits) of a probability vector.
pub fn shannon<T: Real>(probs: &[T]) -> T {
    probs.iter().fold(T::zero(), |acc, &p| acc - xlog2x(p))
}

/// `Σ λᵢ^α` over the clamped spectrum.
pub fn power_sum<T: Real>(eigs: &[T], alpha: T) -> T {
    eigs.iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |acc, &l| acc + l.powf(alpha))
}

fn clamp<T: Real>(eigs: &[T]) -> Result<Vec<T>> {
    let tol = T::tol(PSD_TOL);
    eigs.iter()
        .map(|&l| {
            if l < -tol {
                Err(Error::NotPositive {
                    eigenvalue: l.to_f64_lossy(),
                    detail: "eigenvalue below -1e-9 in entropy evaluation".into(),
                })
            } else {
                Ok(l.max(T::zero()))
            }
        })
        .collect()
}

/// Entropy of a spectrum.
pub fn spectral_entropy<T: Real>(eigs: &[T], kind: EntropyKind) -> Result<T> {
    let kind = kind.validate()?;
    let eigs = clamp(eigs)?;
    Ok(match kind {
        EntropyKind::VonNeumann => shannon(&eigs),
        EntropyKind::Renyi(a) => {
            let a = T::lit(a);
            power_sum(&eigs, a).log2() / (T::one() - a)
        }
        EntropyKind::Tsallis(a) => {
            let a = T::lit(a);
            (power_sum(&eigs, a) - T::one()) / (T::one() - a)
        }
    })
}

/// `S(ρ)`, `S_α(ρ)` or `S^T_α(ρ)` of the whole bipartite state.
pub fn entropy<T: Real>(rho: &DensityMatrix<T>, kind: EntropyKind) -> Result<T> {
    spectral_entropy(rho.spectrum().values(), kind)
}

/// Spectrum of `ρ_B`.
pub fn marginal_b_spectrum<T: Real>(rho: &DensityMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_eig(&rho.partial_trace(Subsystem::B))?.into_values())
}

/// Conditional entropy from joint and B-marginal spectra.
///
/// Tsallis uses `(Tr ρ_B^α − Tr ρ_AB^α) / ((α−1) Tr ρ_B^α)`.
pub fn conditional_from_spectra<T: Real>(
    joint: &[T],
    marginal_b: &[T],
    kind: EntropyKind,
) -> Result<T> {
    let kind = kind.validate()?;
    match kind {
        EntropyKind::VonNeumann | EntropyKind::Renyi(_) => {
            Ok(spectral_entropy(joint, kind)? - spectral_entropy(marginal_b, kind)?)
        }
        EntropyKind::Tsallis(a) => {
            let alpha = T::lit(a);
            let tr_ab = power_sum(&clamp(joint)?, alpha);
            let tr_b = power_sum(&clamp(marginal_b)?, alpha);
            Ok((tr_b - tr_ab) / ((alpha - T::one()) * tr_b))
        }
    }
}

/// `S(A|B)` in the requested flavour.
pub fn cond_entropy<T: Real>(rho: &DensityMatrix<T>, kind: EntropyKind) -> Result<T> {
    let mb = marginal_b_spectrum(rho)?;
    conditional_from_spectra(rho.spectrum().values(), &mb, kind)
}

/// Closed-form conditional entropies for the families that have one.
///
/// Supported pairs:
/// - `werner2`: von Neumann, Rényi α
/// - `weyl2`: Rényi 2
/// - `isotropic`: von Neumann, Rényi 2
/// - `werner_d`: von Neumann, Rényi α
/// - `rank_deficient`: von Neumann, Rényi 2
/// - `gen_bell`: von Neumann, Rényi α
pub fn cond_entropy_closed(spec: &StateSpec, kind: EntropyKind) -> Result<f64> {
    let kind = kind.validate()?;
    let spec = StateSpec::new(spec.family, spec.d, spec.params.clone())?;
    let d = spec.d as f64;
    let p = &spec.params;
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "no closed-form {kind} conditional entropy for {}",
            spec.family
        )))
    };
    match (spec.family, kind) {
        (Family::Werner2, EntropyKind::VonNeumann) => Ok(werner2_cvne(p[0])),
        (Family::Werner2, EntropyKind::Renyi(a)) => Ok(werner2_crae(p[0], a)),
        (Family::Weyl2, EntropyKind::Renyi(a)) if a == 2.0 => {
            Ok(1.0 - (1.0 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).log2())
        }
        (Family::Isotropic, EntropyKind::VonNeumann) => Ok(isotropic_cvne(spec.d, p[0])),
        (Family::Isotropic, EntropyKind::Renyi(a)) if a == 2.0 => Ok(isotropic_cr2e(spec.d, p[0])),
        (Family::WernerD, EntropyKind::VonNeumann) => Ok(werner_d_cvne(spec.d, p[0])),
        (Family::WernerD, EntropyKind::Renyi(a)) => Ok(werner_d_crae(spec.d, p[0], a)),
        (Family::RankDeficient, EntropyKind::VonNeumann) => Ok(rank_deficient_cvne(spec.d, p[0])),
        (Family::RankDeficient, EntropyKind::Renyi(a)) if a == 2.0 => {
            Ok(rank_deficient_cr2e(spec.d, p[0]))
        }
        (Family::GenBell, EntropyKind::VonNeumann) => {
            validate_probabilities(p)?;
            Ok(shannon(p) - d.log2())
        }
        (Family::GenBell, EntropyKind::Renyi(a)) => {
            validate_probabilities(p)?;
            Ok(gen_bell_crae(spec.d, p, a))
        }
        (Family::NoisySchmidt, _) => {
            normalized_schmidt(&p[..spec.d])?;
            unsupported()
        }
        _ => unsupported(),
    }
}

/// `-3((1-p)/4)log((1-p)/4) - ((1+3p)/4)log((1+3p)/4) - 1`.
pub fn werner2_cvne(p: f64) -> f64 {
    -3.0 * xlog2x((1.0 - p) / 4.0) - xlog2x((1.0 + 3.0 * p) / 4.0) - 1.0
}

pub fn werner2_crae(p: f64, alpha: f64) -> f64 {
    let num = ((1.0 + 3.0 * p) / 4.0).powf(alpha) + 3.0 * ((1.0 - p) / 4.0).powf(alpha);
    (num / (2.0 * 0.5f64.powf(alpha))).log2() / (1.0 - alpha)
}

pub fn isotropic_cvne(d: usize, f: f64) -> f64 {
    let n = (d * d) as f64 - 1.0;
    let noise = if f < 1.0 {
        (1.0 - f) * ((1.0 - f) / n).log2()
    } else {
        0.0
    };
    -xlog2x(f) - noise - (d as f64).log2()
}

pub fn isotropic_cr2e(d: usize, f: f64) -> f64 {
    let df = d as f64;
    let n = df * df - 1.0;
    (n / (df * n * f * f + df * (1.0 - f) * (1.0 - f))).log2()
}

pub fn werner_d_cvne(d: usize, x: f64) -> f64 {
    let df = d as f64;
    let sym = if x > -1.0 {
        (1.0 + x) / 2.0 * ((1.0 + x) / (df * df + df)).log2()
    } else {
        0.0
    };
    let anti = if x < 1.0 {
        (1.0 - x) / 2.0 * ((1.0 - x) / (df * df - df)).log2()
    } else {
        0.0
    };
    -sym - anti - df.log2()
}

pub fn werner_d_crae(d: usize, x: f64, alpha: f64) -> f64 {
    let df = d as f64;
    let ns = df * df + df;
    let na = df * df - df;
    let inner = ns / 2.0 * ((1.0 + x) / ns).powf(alpha) + na / 2.0 * ((1.0 - x) / na).powf(alpha);
    (df.powf(alpha - 1.0) * inner).log2() / (1.0 - alpha)
}

/// Evaluated through `ln_1p` so tiny `p` keeps full relative accuracy.
pub fn rank_deficient_cvne(d: usize, p: f64) -> f64 {
    let df = d as f64;
    let m = (df - 1.0) * p / df;
    let ln2 = std::f64::consts::LN_2;
    let head = if p > 0.0 {
        m * (p / df).log2() - p * p.log2()
    } else {
        0.0
    };
    let q_ln_q = if m < 1.0 {
        (1.0 - m) * (-m).ln_1p() / ln2
    } else {
        0.0
    };
    let r_ln_r = if p < 1.0 {
        (1.0 - p) * (-p).ln_1p() / ln2
    } else {
        0.0
    };
    head + q_ln_q - r_ln_r
}

pub fn rank_deficient_cr2e(d: usize, p: f64) -> f64 {
    let df = d as f64;
    let q = df - df * p + p;
    (((df - 1.0) * p * p + q * q) / (df * df * (p * p + (1.0 - p) * (1.0 - p)))).log2()
}

pub fn gen_bell_crae(d: usize, probs: &[f64], alpha: f64) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|q| q.powf(alpha))
        .sum();
    ((d as f64).powf(alpha - 1.0) * s).log2() / (1.0 - alpha)
}
