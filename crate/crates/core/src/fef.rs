//! Fully entangled fraction `max_U ⟨ψ⁺|(U⊗I) ρ (U†⊗I)|ψ⁺⟩`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    gell_mann_basis, hermitian_eigh, hermitian_from_coefficients, trace_norm, unitary_exp,
    ComplexMatrix,
};
use crate::scalar::Real;
use crate::spec::{Family, StateSpec};
use crate::states::{bloch_fano, make_state, DensityMatrix};

pub const DEFAULT_RESTARTS: usize = 16;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 42;
/// Largest accepted `‖U†U − I‖` for an explicit unitary.
pub const UNITARY_TOL: f64 = 1e-8;

const GRID_POINTS: usize = 32;
const GOLDEN_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FefMethod {
    Closed,
    CorrTensor,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FefResult {
    pub value: f64,
    pub method: FefMethod,
    pub restarts_used: usize,
    pub converged: bool,
}

impl FefResult {
    fn exact(value: f64, method: FefMethod) -> Self {
        Self {
            value,
            method,
            restarts_used: 0,
            converged: true,
        }
    }
}

/// Budget and seed for [`fef_optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

fn two_qubit_tensor<T: Real>(rho: &DensityMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(bloch_fano(rho)?.correlation_tensor())
}

/// Literal trace-norm formula `(1 + Tr|T|)/4` for a two-qubit state.
///
/// Exact only when `det T ≤ 0`; otherwise it overestimates the FEF by `s₃/2`.
pub fn fef_trace_norm<T: Real>(rho: &DensityMatrix<T>) -> Result<FefResult> {
    let t = two_qubit_tensor(rho)?;
    let n = trace_norm(&t)?;
    Ok(FefResult::exact(
        ((T::one() + n) / T::lit(4.0)).to_f64_lossy(),
        FefMethod::CorrTensor,
    ))
}

/// Two-qubit FEF from the correlation tensor, `(1 + s₁ + s₂ − sgn(det T)·s₃)/4`
/// with `s₁ ≥ s₂ ≥ s₃` the singular values of `T`.
///
/// Equals [`fef_trace_norm`] whenever `det T ≤ 0`, and is exact for every
/// state with vanishing local Bloch vectors.
pub fn fef_corr_tensor<T: Real>(rho: &DensityMatrix<T>) -> Result<FefResult> {
    let t = two_qubit_tensor(rho)?;
    let gram = &t.adjoint() * &t;
    let mut s: Vec<T> = hermitian_eigh(&gram)?
        .values
        .into_values()
        .into_iter()
        .map(|l| l.max(T::zero()).sqrt())
        .collect();
    s.reverse();
    let det = det3(&t);
    let last = if det > T::zero() { -s[2] } else { s[2] };
    Ok(FefResult::exact(
        ((T::one() + s[0] + s[1] + last) / T::lit(4.0)).to_f64_lossy(),
        FefMethod::CorrTensor,
    ))
}

/// Sign of `det T` for a two-qubit state.
pub fn corr_tensor_det<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(det3(&two_qubit_tensor(rho)?))
}

fn det3<T: Real>(m: &ComplexMatrix<T>) -> T {
    let e = |i, j| m[(i, j)].re;
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

/// Isotropic FEF `max(F, (1 − F)/(d² − 1))`; equals `F` for `F ≥ 1/d²`.
pub fn isotropic_fef(d: usize, f: f64) -> f64 {
    let n = (d * d) as f64;
    f.max((1.0 - f) / (n - 1.0))
}

/// Werner-state FEF, piecewise in the parity of `d` and the sign of `x − 1/d`.
pub fn werner_d_fef(d: usize, x: f64) -> f64 {
    let df = d as f64;
    if x >= 1.0 / df {
        (1.0 + x) / (df * (df + 1.0))
    } else if d % 2 == 0 {
        (1.0 - x) / (df * (df - 1.0))
    } else {
        (df * df - df * df * x + df * x + df - 2.0) / (df * df * (df * df - 1.0))
    }
}

/// Index of the largest weight; the smallest index wins ties.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Closed-form FEF for isotropic, Werner, generalized Bell-diagonal and two-qubit Weyl states.
pub fn fef_closed(spec: &StateSpec) -> Result<FefResult> {
    match spec.family {
        Family::Isotropic | Family::WernerD | Family::GenBell => {
            make_state::<f64>(spec)?;
            let value = match spec.family {
                Family::Isotropic => isotropic_fef(spec.d, spec.params[0]),
                Family::WernerD => werner_d_fef(spec.d, spec.params[0]),
                _ => spec.params[argmax_first(&spec.params)],
            };
            Ok(FefResult::exact(value, FefMethod::Closed))
        }
        Family::Werner2 | Family::Weyl2 => fef_corr_tensor(&make_state::<f64>(spec)?),
        other => Err(Error::Unsupported(format!(
            "no closed-form FEF for {other}"
        ))),
    }
}

fn require_square_system<T: Real>(rho: &DensityMatrix<T>) -> Result<usize> {
    rho.local_dim().ok_or_else(|| {
        Error::DimensionMismatch(format!(
            "FEF needs equal local dimensions, got {:?}",
            rho.dims()
        ))
    })
}

/// `φ†ρφ/d` with `φ` the row-major vectorization of `w = U†`.
fn overlap_w<T: Real>(rho: &ComplexMatrix<T>, w: &ComplexMatrix<T>, d: usize) -> T {
    let phi = w.as_slice();
    let rphi = rho.apply(phi);
    dot(phi, &rphi).re / T::lit(d as f64)
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}

/// Overlap of `(U⊗I)ρ(U†⊗I)` with `|ψ_d⁺⟩` for a specific unitary.
pub fn fef_overlap<T: Real>(rho: &DensityMatrix<T>, u: &ComplexMatrix<T>) -> Result<T> {
    let d = require_square_system(rho)?;
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "unitary must be {d}x{d}, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let residual = u.unitarity_defect();
    if !(residual <= T::tol(UNITARY_TOL)) {
        return Err(Error::NotUnitary {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(overlap_w(rho.matrix(), &u.adjoint(), d))
}

struct Generator<T: Real> {
    lambda: Vec<T>,
    x: ComplexMatrix<T>,
}

struct Ascent<T: Real> {
    value: T,
    u: ComplexMatrix<T>,
    converged: bool,
}

fn golden_max<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut e = a + (b - a) * inv_phi;
    let (mut fc, mut fe) = (f(c), f(e));
    let width = T::tol(GOLDEN_WIDTH);
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + (b - a) * inv_phi;
            fe = f(e);
        }
    }
    if fc > fe {
        c
    } else {
        e
    }
}

/// Best step `t` along `t ↦ f(t)` on `[−π, π]`: coarse grid, then golden section.
fn line_max<T: Real>(f: &impl Fn(T) -> T) -> T {
    let pi = T::PI();
    let h = T::lit(2.0) * pi / T::lit(GRID_POINTS as f64);
    let mut best_t = T::zero();
    let mut best_f = f(T::zero());
    for i in 0..=GRID_POINTS {
        let t = -pi + h * T::lit(i as f64);
        let v = f(t);
        if v > best_f {
            best_f = v;
            best_t = t;
        }
    }
    let t = golden_max(f, best_t - h, best_t + h);
    if f(t) > best_f {
        t
    } else {
        best_t
    }
}

fn ascend<T: Real>(
    rho: &ComplexMatrix<T>,
    d: usize,
    gens: &[Generator<T>],
    u0: ComplexMatrix<T>,
    max_iters: usize,
    tol: T,
) -> Ascent<T> {
    let inv_d = T::one() / T::lit(d as f64);
    let mut w = u0.adjoint();
    let mut value = overlap_w(rho, &w, d);
    let mut converged = false;
    for _ in 0..max_iters {
        let start = value;
        for g in gens {
            let y = &w * &g.x;
            let vs: Vec<Vec<Complex<T>>> = (0..d)
                .map(|r| {
                    (0..d * d)
                        .map(|idx| y[(idx / d, r)] * g.x[(idx % d, r)].conj())
                        .collect()
                })
                .collect();
            let rvs: Vec<Vec<Complex<T>>> = vs.iter().map(|v| rho.apply(v)).collect();
            let mut terms = Vec::with_capacity(d * d);
            for r in 0..d {
                for s in 0..d {
                    terms.push((g.lambda[r] - g.lambda[s], dot(&vs[r], &rvs[s]) * inv_d));
                }
            }
            let f = |t: T| {
                terms.iter().fold(T::zero(), |acc, &(om, c)| {
                    let (sn, cs) = (om * t).sin_cos();
                    acc + c.re * cs - c.im * sn
                })
            };
            let t = line_max(&f);
            if f(t) > f(T::zero()) {
                let phase: Vec<Complex<T>> = g
                    .lambda
                    .iter()
                    .map(|&l| Complex::new((l * t).cos(), -(l * t).sin()))
                    .collect();
                let scaled = ComplexMatrix::from_fn(d, d, |i, j| y[(i, j)] * phase[j]);
                w = &scaled * &g.x.adjoint();
            }
        }
        value = overlap_w(rho, &w, d);
        if value - start < tol {
            converged = true;
            break;
        }
    }
    Ascent {
        value,
        u: w.adjoint(),
        converged,
    }
}

fn random_unitary<T: Real>(d: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix<T>> {
    let coeffs: Vec<T> = (0..d * d)
        .map(|_| T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect();
    unitary_exp(&hermitian_from_coefficients(d, &coeffs)?)
}

/// Best unitary found by [`fef_optimize_with`], alongside the usual result.
#[derive(Debug, Clone)]
pub struct Optimized<T: Real> {
    pub result: FefResult,
    pub unitary: ComplexMatrix<T>,
}

/// Numerical FEF: cyclic coordinate ascent over `U = exp(i Σ hₖ gₖ)` with random restarts.
///
/// Restart 0 starts at the identity; restart `r > 0` draws its start from
/// ChaCha8 stream `r` of `seed`. The result is a lower bound on the FEF.
pub fn fef_optimize<T: Real>(
    rho: &DensityMatrix<T>,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<FefResult> {
    let opts = OptimizeOptions {
        restarts,
        max_iters,
        tol,
        seed,
    };
    Ok(fef_optimize_with(rho, &opts)?.result)
}

pub fn fef_optimize_with<T: Real>(
    rho: &DensityMatrix<T>,
    opts: &OptimizeOptions,
) -> Result<Optimized<T>> {
    let d = require_square_system(rho)?;
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {}",
            opts.tol
        )));
    }
    let gens = gell_mann_basis::<T>(d)?
        .iter()
        .map(|g| {
            let e = hermitian_eigh(g)?;
            Ok(Generator {
                lambda: e.values.into_values(),
                x: e.vectors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = T::lit(opts.tol);
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let u0 = if r == 0 {
                ComplexMatrix::identity(d)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                random_unitary(d, &mut rng)?
            };
            Ok(ascend(rho.matrix(), d, &gens, u0, opts.max_iters, tol))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("restarts >= 1");
    Ok(Optimized {
        result: FefResult {
            value: best.value.to_f64_lossy(),
            method: FefMethod::Optimized,
            restarts_used: opts.restarts,
            converged: best.converged,
        },
        unitary: best.u,
    })
}

/// Closed form where one exists, otherwise [`fef_optimize`] with `opts`.
pub fn fef_auto(spec: &StateSpec, opts: &OptimizeOptions) -> Result<FefResult> {
    match fef_closed(spec) {
        Err(Error::Unsupported(_)) => {
            let rho = make_state::<f64>(spec)?;
            Ok(fef_optimize_with(&rho, opts)?.result)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn st(spec: StateSpec) -> DensityMatrix<f64> {
        make_state(&spec).unwrap()
    }

    fn opt(spec: StateSpec) -> f64 {
        fef_optimize(
            &st(spec),
            DEFAULT_RESTARTS,
            DEFAULT_MAX_ITERS,
            DEFAULT_TOL,
            DEFAULT_SEED,
        )
        .unwrap()
        .value
    }

    #[test]
    fn corr_tensor_examples() {
        assert!(
            (fef_corr_tensor(&st(StateSpec::werner2(1.0 / 3.0)))
                .unwrap()
                .value
                - 0.5)
                .abs()
                < 1e-12
        );
        let v = fef_corr_tensor(&st(StateSpec::weyl2([0.8, -0.5, 0.4])))
            .unwrap()
            .value;
        assert!((v - 0.675).abs() < 1e-12);
        let mm = DensityMatrix::<f64>::maximally_mixed(2, 2);
        assert!((fef_corr_tensor(&mm).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn isotropic_fef_below_uniform_overlap() {
        let spec = StateSpec::isotropic(3, 0.02);
        let closed = fef_closed(&spec).unwrap().value;
        assert!((closed - 0.98 / 8.0).abs() < 1e-15);
        assert!((opt(spec) - closed).abs() < 1e-6);
        assert_eq!(isotropic_fef(3, 0.6), 0.6);
    }

    #[test]
    fn corr_tensor_rejects_qutrits() {
        assert!(matches!(
            fef_corr_tensor(&st(StateSpec::isotropic(3, 0.5))),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn closed_examples() {
        let v = |s| fef_closed(&s).unwrap().value;
        assert!((v(StateSpec::werner_d(2, 1.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((v(StateSpec::werner_d(3, -1.0)) - 2.0 / 9.0).abs() < 1e-15);
        let mut probs = vec![0.38 / 8.0; 9];
        probs[4] = 0.62;
        assert!((v(StateSpec::gen_bell(3, probs)) - 0.62).abs() < 1e-15);
        assert_eq!(v(StateSpec::isotropic(5, 0.7)), 0.7);
        assert!(matches!(
            fef_closed(&StateSpec::rank_deficient(3, 0.5)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn gen_bell_ties_pick_first() {
        assert_eq!(argmax_first(&[0.3, 0.3, 0.2, 0.2]), 0);
        assert_eq!(argmax_first(&[0.1, 0.4, 0.4, 0.1]), 1);
    }

    #[test]
    fn overlap_examples() {
        let bell = st(StateSpec::isotropic(3, 1.0));
        assert!((fef_overlap(&bell, &ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
        let mm = DensityMatrix::<f64>::maximally_mixed(3, 3);
        assert!((fef_overlap(&mm, &ComplexMatrix::identity(3)).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        let phi_plus = st(StateSpec::weyl2([1.0, -1.0, 1.0]));
        let [x, _, _] = pauli::<f64>();
        assert!(fef_overlap(&phi_plus, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn overlap_rejects_non_unitary() {
        let rho = st(StateSpec::werner2(0.5));
        let m = ComplexMatrix::<f64>::identity(2).scale_real(1.1);
        assert!(matches!(
            fef_overlap(&rho, &m),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            fef_overlap(&rho, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn optimizer_recovers_examples() {
        assert!((opt(StateSpec::isotropic(3, 0.6)) - 0.6).abs() < 1e-4);
        assert!((opt(StateSpec::gen_bell(2, vec![0.7, 0.1, 0.1, 0.1])) - 0.7).abs() < 1e-5);
        assert!((opt(StateSpec::werner2(0.8)) - 0.85).abs() < 1e-5);
    }

    #[test]
    fn optimizer_reaches_odd_werner_branch() {
        assert!((opt(StateSpec::werner_d(3, -1.0)) - 2.0 / 9.0).abs() < 1e-5);
        assert!((opt(StateSpec::werner_d(4, -0.5)) - werner_d_fef(4, -0.5)).abs() < 1e-5);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let rho = st(StateSpec::rank_deficient(3, 0.4));
        let a = fef_optimize(&rho, 4, 50, 1e-10, 7).unwrap();
        let b = fef_optimize(&rho, 4, 50, 1e-10, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn optimizer_rejects_zero_restarts() {
        let rho = st(StateSpec::werner2(0.5));
        assert!(fef_optimize(&rho, 0, 10, 1e-10, 1).is_err());
    }

    #[test]
    fn trace_norm_formula_overshoots_when_det_positive() {
        let rho = st(StateSpec::weyl2([0.3, 0.2, 0.1]));
        let signed = fef_corr_tensor(&rho).unwrap().value;
        let unsigned = fef_trace_norm(&rho).unwrap().value;
        let o = fef_optimize(&rho, 8, 200, 1e-12, 3).unwrap().value;
        assert!((signed - 0.35).abs() < 1e-12);
        assert!((o - signed).abs() < 1e-6);
        assert!(unsigned > signed + 0.04);
    }

    #[test]
    fn optimizer_runs_in_single_precision() {
        let rho = make_state::<f32>(&StateSpec::werner2(0.8)).unwrap();
        let v = fef_optimize(&rho, 2, 50, 1e-6, 1).unwrap().value;
        assert!((v - 0.85).abs() < 1e-4);
    }
}
