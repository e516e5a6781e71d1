//! Density matrices and constructors for every supported state family.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, gell_mann_basis, hermitian_eig, kron, max_entangled_vector, partial_trace, pauli,
    swap_operator, weyl_operator, ComplexMatrix, Spectrum, Subsystem,
};
use crate::scalar::Real;
use crate::spec::{Family, StateSpec};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are rounding noise; below that the input is rejected.
pub const PSD_TOL: f64 = 1e-9;
/// Largest `|Σλᵢ² - 1|` silently renormalized for Schmidt vectors.
pub const SCHMIDT_RENORM_TOL: f64 = 1e-9;

/// A validated bipartite density matrix on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    mat: ComplexMatrix<T>,
    da: usize,
    db: usize,
    spectrum: Spectrum<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMatrix<T>, da: usize, db: usize) -> Result<Self> {
        if !mat.is_square() || mat.rows() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "{da}x{db} system needs a {n}x{n} matrix, got {}x{}",
                mat.rows(),
                mat.cols(),
                n = da * db
            )));
        }
        let defect = mat.hermiticity_defect();
        if defect > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian {
                deviation: defect.to_f64_lossy(),
            });
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::InvalidParameter(format!(
                "trace is {tr}, expected 1"
            )));
        }
        let spectrum = hermitian_eig(&mat)?;
        let min = spectrum.min();
        if min < -T::tol(PSD_TOL) {
            return Err(Error::NotPositive {
                eigenvalue: min.to_f64_lossy(),
                detail: "smallest eigenvalue below -1e-9".into(),
            });
        }
        Ok(Self {
            mat,
            da,
            db,
            spectrum,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    /// Local dimension when both factors agree.
    pub fn local_dim(&self) -> Option<usize> {
        (self.da == self.db).then_some(self.da)
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// Eigenvalues with `[-PSD_TOL, 0)` clamped to zero.
    pub fn clamped_eigenvalues(&self) -> Vec<T> {
        self.spectrum
            .values()
            .iter()
            .map(|&l| l.max(T::zero()))
            .collect()
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix<T> {
        partial_trace(&self.mat, (self.da, self.db), keep).expect("dimensions validated")
    }
}

/// Builds the density matrix described by `spec`.
pub fn make_state<T: Real>(spec: &StateSpec) -> Result<DensityMatrix<T>> {
    let spec = StateSpec::new(spec.family, spec.d, spec.params.clone())?;
    let d = spec.d;
    let p = &spec.params;
    let mat = match spec.family {
        Family::Werner2 => {
            in_range("p", p[0], 0.0, 1.0)?;
            pauli_diagonal(&[-p[0], -p[0], -p[0]])
        }
        Family::Weyl2 => {
            check_weyl2_positivity(p[0], p[1], p[2])?;
            pauli_diagonal(&[p[0], p[1], p[2]])
        }
        Family::WeylD => weyl_d_matrix(d, p)?,
        Family::Isotropic => {
            in_range("F", p[0], 0.0, 1.0)?;
            isotropic_matrix(d, p[0])
        }
        Family::WernerD => {
            in_range("x", p[0], -1.0, 1.0)?;
            werner_d_matrix(d, p[0])
        }
        Family::RankDeficient => {
            if !(p[0] > 0.0 && p[0] <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "p must lie in (0, 1], got {}",
                    p[0]
                )));
            }
            rank_deficient_matrix(d, p[0])
        }
        Family::GenBell => gen_bell_matrix(d, p)?,
        Family::NonWeyl => {
            let (x, prob) = (p[0], p[1]);
            if !(x > 0.0 && x <= std::f64::consts::FRAC_PI_4 + 1e-15) {
                return Err(Error::InvalidParameter(format!(
                    "x must lie in (0, pi/4], got {x}"
                )));
            }
            in_range("p", prob, 0.0, 1.0)?;
            non_weyl_matrix(x, prob)
        }
        Family::NoisySchmidt => {
            let lambdas = normalized_schmidt(&p[..d])?;
            in_range("p", p[d], 0.0, 1.0)?;
            noisy_schmidt_matrix(&lambdas, p[d])
        }
    };
    DensityMatrix::new(mat, d, d)
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [{lo}, {hi}], got {v}"
        )))
    }
}

fn c<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// `¼[I + Σ cᵢ σᵢ⊗σᵢ]`.
fn pauli_diagonal<T: Real>(coeffs: &[f64; 3]) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::<T>::identity(4);
    for (s, &ci) in pauli::<T>().iter().zip(coeffs) {
        m = &m + &kron(s, s).scale(c(ci));
    }
    m.scale(c(0.25))
}

/// Bell-basis weights of `¼[I + Σ tᵢ σᵢ⊗σᵢ]`, labelled by sign pattern.
pub fn weyl2_bell_weights(t1: f64, t2: f64, t3: f64) -> [(&'static str, f64); 4] {
    [
        ("(1-t1-t2-t3)/4", (1.0 - t1 - t2 - t3) / 4.0),
        ("(1-t1+t2+t3)/4", (1.0 - t1 + t2 + t3) / 4.0),
        ("(1+t1-t2+t3)/4", (1.0 + t1 - t2 + t3) / 4.0),
        ("(1+t1+t2-t3)/4", (1.0 + t1 + t2 - t3) / 4.0),
    ]
}

fn check_weyl2_positivity(t1: f64, t2: f64, t3: f64) -> Result<()> {
    let worst = weyl2_bell_weights(t1, t2, t3)
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four weights");
    if worst.1 < -PSD_TOL {
        return Err(Error::NotPositive {
            eigenvalue: worst.1,
            detail: format!("Weyl coefficients give negative eigenvalue {}", worst.0),
        });
    }
    Ok(())
}

fn weyl_d_matrix<T: Real>(d: usize, w: &[f64]) -> Result<ComplexMatrix<T>> {
    let basis = gell_mann_basis::<T>(d)?;
    let mut m = ComplexMatrix::<T>::identity(d * d);
    for (g, &wi) in basis.iter().zip(w) {
        if wi != 0.0 {
            m = &m + &kron(g, g).scale(c(wi));
        }
    }
    Ok(m.scale(c(1.0 / (d * d) as f64)))
}

/// `|ψ_d⁺⟩⟨ψ_d⁺|`.
pub fn max_entangled_projector<T: Real>(d: usize) -> ComplexMatrix<T> {
    ComplexMatrix::projector(&max_entangled_vector::<T>(d))
}

fn isotropic_matrix<T: Real>(d: usize, f: f64) -> ComplexMatrix<T> {
    let n = d * d;
    let proj = max_entangled_projector::<T>(d);
    let noise = &ComplexMatrix::identity(n) - &proj;
    &proj.scale(c(f)) + &noise.scale(c((1.0 - f) / (n as f64 - 1.0)))
}

fn werner_d_matrix<T: Real>(d: usize, x: f64) -> ComplexMatrix<T> {
    let df = d as f64;
    let denom = df * df * df - df;
    let id = ComplexMatrix::<T>::identity(d * d).scale(c((df - x) / denom));
    let v = swap_operator::<T>(d).scale(c((df * x - 1.0) / denom));
    &id + &v
}

fn rank_deficient_matrix<T: Real>(d: usize, p: f64) -> ComplexMatrix<T> {
    let ket01 = basis_vector::<T>(d * d, 1);
    let proj01 = ComplexMatrix::projector(&ket01);
    &max_entangled_projector::<T>(d).scale(c(p)) + &proj01.scale(c(1.0 - p))
}

/// Nonzero eigenvalues of the rank-deficient state: `{p, 1 - p}`, or `{1}` at `p = 1`.
pub fn rank_deficient_eigs(d: usize, p: f64) -> Result<Spectrum<f64>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be >= 2, got {d}"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in (0, 1], got {p}"
        )));
    }
    // |01⟩ is orthogonal to every |ii⟩, so the two projectors have disjoint support.
    if p == 1.0 {
        Ok(Spectrum::new(vec![1.0]))
    } else {
        Ok(Spectrum::new(vec![p, 1.0 - p]))
    }
}

/// Bell projectors `P_{m·d+n} = (I⊗U_mn)|ψ_d⁺⟩⟨ψ_d⁺|(I⊗U_mn†)`.
pub fn bell_projectors<T: Real>(d: usize) -> Result<Vec<ComplexMatrix<T>>> {
    let psi = max_entangled_vector::<T>(d);
    let id = ComplexMatrix::<T>::identity(d);
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let u = weyl_operator::<T>(d, m, n)?;
            let v = kron(&id, &u).apply(&psi);
            out.push(ComplexMatrix::projector(&v));
        }
    }
    Ok(out)
}

fn gen_bell_matrix<T: Real>(d: usize, probs: &[f64]) -> Result<ComplexMatrix<T>> {
    validate_probabilities(probs)?;
    let projectors = bell_projectors::<T>(d)?;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for (proj, &pi) in projectors.iter().zip(probs) {
        if pi != 0.0 {
            m = &m + &proj.scale(c(pi));
        }
    }
    Ok(m)
}

/// Checks `pᵢ ≥ 0` and `Σpᵢ = 1` within `1e-10`.
pub fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if let Some(bad) = probs.iter().find(|&&q| !(q >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "probabilities must be >= 0, got {bad}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidParameter(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// `|ψ_x⟩ = cos x |00⟩ + sin x |11⟩`.
fn psi_x<T: Real>(x: f64) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); 4];
    v[0] = c(x.cos());
    v[3] = c(x.sin());
    v
}

fn non_weyl_matrix<T: Real>(x: f64, p: f64) -> ComplexMatrix<T> {
    let pure = ComplexMatrix::projector(&psi_x::<T>(x));
    let rho_a = ComplexMatrix::<T>::from_diag(&[T::lit(x.cos().powi(2)), T::lit(x.sin().powi(2))]);
    let noise = kron(&rho_a, &ComplexMatrix::identity(2).scale(c(0.5)));
    &pure.scale(c(p)) + &noise.scale(c(1.0 - p))
}

/// Validates a Schmidt vector and renormalizes drift up to [`SCHMIDT_RENORM_TOL`].
pub fn normalized_schmidt(lambdas: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "Schmidt coefficients must be > 0, got {bad}"
        )));
    }
    let norm2: f64 = lambdas.iter().map(|l| l * l).sum();
    let drift = (norm2 - 1.0).abs();
    if drift > SCHMIDT_RENORM_TOL {
        return Err(Error::InvalidParameter(format!(
            "Schmidt coefficients must satisfy sum of squares = 1, got {norm2}"
        )));
    }
    let scale = norm2.sqrt();
    Ok(lambdas.iter().map(|l| l / scale).collect())
}

fn noisy_schmidt_matrix<T: Real>(lambdas: &[f64], p: f64) -> ComplexMatrix<T> {
    let d = lambdas.len();
    let mut psi = vec![Complex::zero(); d * d];
    for (i, &l) in lambdas.iter().enumerate() {
        psi[i * d + i] = c(l);
    }
    let n = (d * d) as f64;
    let pure = ComplexMatrix::projector(&psi);
    &pure.scale(c(p)) + &ComplexMatrix::identity(d * d).scale(c((1.0 - p) / n))
}

/// Generalized Bloch–Fano coefficients of a `d⊗d` state:
/// `ρ = (1/d²)[I⊗I + Σ aᵢ gᵢ⊗I + Σ bⱼ I⊗gⱼ + Σ tᵢⱼ gᵢ⊗gⱼ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochFano<T: Real> {
    pub d: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
    /// Row-major `(d²-1) × (d²-1)` correlation tensor.
    pub t: Vec<T>,
}

impl<T: Real> BlochFano<T> {
    fn size(&self) -> usize {
        self.d * self.d - 1
    }

    pub fn t_entry(&self, i: usize, j: usize) -> T {
        self.t[i * self.size() + j]
    }

    /// The correlation tensor as a real matrix.
    pub fn correlation_tensor(&self) -> ComplexMatrix<T> {
        let n = self.size();
        ComplexMatrix::from_fn(n, n, |i, j| Complex::new(self.t_entry(i, j), T::zero()))
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = self.d;
        let basis = gell_mann_basis::<T>(d).expect("d >= 2");
        let id = ComplexMatrix::<T>::identity(d);
        let mut m = ComplexMatrix::<T>::identity(d * d);
        for (g, &ai) in basis.iter().zip(&self.a) {
            m = &m + &kron(g, &id).scale_real(ai);
        }
        for (g, &bj) in basis.iter().zip(&self.b) {
            m = &m + &kron(&id, g).scale_real(bj);
        }
        for (i, gi) in basis.iter().enumerate() {
            for (j, gj) in basis.iter().enumerate() {
                let tij = self.t_entry(i, j);
                if tij != T::zero() {
                    m = &m + &kron(gi, gj).scale_real(tij);
                }
            }
        }
        m.scale_real(T::one() / T::lit((d * d) as f64))
    }
}

/// Two-qubit Bloch–Fano decomposition: `aᵢ = Tr[ρ σᵢ⊗I]`, `bⱼ = Tr[ρ I⊗σⱼ]`,
/// `tᵢⱼ = Tr[ρ σᵢ⊗σⱼ]`.
pub fn bloch_fano<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochFano<T>> {
    if rho.dims() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit decomposition needs a 2x2 system, got {:?}",
            rho.dims()
        )));
    }
    bloch_fano_general(rho)
}

/// Bloch–Fano decomposition of a `d⊗d` state. Unequal local dimensions are rejected.
pub fn bloch_fano_general<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochFano<T>> {
    let d = rho.local_dim().ok_or_else(|| {
        Error::DimensionMismatch(format!(
            "Bloch-Fano decomposition requires equal local dimensions, got {:?}",
            rho.dims()
        ))
    })?;
    let basis = gell_mann_basis::<T>(d)?;
    let id = ComplexMatrix::<T>::identity(d);
    let half_d = T::lit(d as f64 / 2.0);
    let m = rho.matrix();
    let a = basis
        .iter()
        .map(|g| m.trace_product(&kron(g, &id)).re * half_d)
        .collect();
    let b = basis
        .iter()
        .map(|g| m.trace_product(&kron(&id, g)).re * half_d)
        .collect();
    let mut t = Vec::with_capacity(basis.len() * basis.len());
    for gi in &basis {
        for gj in &basis {
            t.push(m.trace_product(&kron(gi, gj)).re * half_d * half_d);
        }
    }
    Ok(BlochFano { d, a, b, t })
}

impl<T: Real> DensityMatrix<T> {
    /// Maximally mixed state `I/(d_a d_b)`.
    pub fn maximally_mixed(da: usize, db: usize) -> Self {
        let n = da * db;
        let mat = ComplexMatrix::identity(n).scale_real(T::one() / T::lit(n as f64));
        DensityMatrix::new(mat, da, db).expect("maximally mixed state is valid")
    }

    /// `ρ_A ⊗ ρ_B` from two single-party density operators.
    pub fn product(rho_a: &ComplexMatrix<T>, rho_b: &ComplexMatrix<T>) -> Result<Self> {
        DensityMatrix::new(kron(rho_a, rho_b), rho_a.rows(), rho_b.rows())
    }

    /// Pure state `|ψ⟩⟨ψ|` on `d_a ⊗ d_b`; `ψ` is normalized here.
    pub fn pure(psi: &[Complex<T>], da: usize, db: usize) -> Result<Self> {
        let norm = psi.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if norm == T::zero() {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        let v: Vec<Complex<T>> = psi.iter().map(|z| *z / norm).collect();
        DensityMatrix::new(ComplexMatrix::projector(&v), da, db)
    }
}

impl<T: Real> From<DensityMatrix<T>> for ComplexMatrix<T> {
    fn from(rho: DensityMatrix<T>) -> Self {
        rho.mat
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn state(spec: StateSpec) -> DensityMatrix<f64> {
        make_state::<f64>(&spec).unwrap()
    }

    #[test]
    fn werner2_pure_singlet() {
        let rho = state(StateSpec::werner2(1.0));
        assert!(rho
            .spectrum()
            .approx_eq(&Spectrum::new(vec![0.0, 0.0, 0.0, 1.0]), 1e-12));
    }

    #[test]
    fn werner2_half_spectrum() {
        let rho = state(StateSpec::werner2(0.5));
        let want = Spectrum::new(vec![0.125, 0.125, 0.125, 0.625]);
        assert!(rho.spectrum().approx_eq(&want, 1e-12));
    }

    #[test]
    fn isotropic_at_inverse_d_squared_is_maximally_mixed() {
        for d in 2..=4 {
            let rho = state(StateSpec::isotropic(d, 1.0 / (d * d) as f64));
            let mm = DensityMatrix::<f64>::maximally_mixed(d, d);
            assert!(rho.matrix().approx_eq(mm.matrix(), 1e-14));
        }
    }

    #[test]
    fn weyl2_phi_plus_is_pure() {
        let rho = state(StateSpec::weyl2([1.0, -1.0, 1.0]));
        assert!(rho
            .spectrum()
            .approx_eq(&Spectrum::new(vec![0.0, 0.0, 0.0, 1.0]), 1e-12));
        let phi = max_entangled_projector::<f64>(2);
        assert!(rho.matrix().approx_eq(&phi, 1e-14));
    }

    #[test]
    fn weyl2_negativity_is_reported() {
        let err = make_state::<f64>(&StateSpec::weyl2([0.9, 0.9, 0.9])).unwrap_err();
        match err {
            Error::NotPositive { eigenvalue, detail } => {
                assert!((eigenvalue - (1.0 - 2.7) / 4.0).abs() < 1e-12);
                assert!(detail.contains("(1-t1-t2-t3)/4"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gen_bell_first_projector_is_psi_plus() {
        let rho = state(StateSpec::gen_bell(2, vec![1.0, 0.0, 0.0, 0.0]));
        assert!(rho.matrix().approx_eq(&max_entangled_projector(2), 1e-14));
    }

    #[test]
    fn gen_bell_spectrum_equals_probabilities() {
        let probs = vec![0.05, 0.3, 0.1, 0.02, 0.13, 0.2, 0.08, 0.07, 0.05];
        let rho = state(StateSpec::gen_bell(3, probs.clone()));
        assert!(rho.spectrum().approx_eq(&Spectrum::new(probs), 1e-10));
    }

    #[test]
    fn bell_projectors_form_resolution_of_identity() {
        for d in 2..=4 {
            let ps = bell_projectors::<f64>(d).unwrap();
            let mut sum = M::zeros(d * d, d * d);
            for (i, pi) in ps.iter().enumerate() {
                sum = &sum + pi;
                for (j, pj) in ps.iter().enumerate() {
                    let prod = pi * pj;
                    let want = if i == j {
                        pi.clone()
                    } else {
                        M::zeros(d * d, d * d)
                    };
                    assert!(prod.approx_eq(&want, 1e-9));
                }
            }
            assert!(sum.approx_eq(&M::identity(d * d), 1e-9));
        }
    }

    #[test]
    fn noisy_schmidt_without_signal_is_maximally_mixed() {
        let l = [0.5f64.sqrt(), (1.0f64 / 3.0).sqrt(), (1.0f64 / 6.0).sqrt()];
        let rho = state(StateSpec::noisy_schmidt(&l, 0.0));
        assert!(rho
            .matrix()
            .approx_eq(DensityMatrix::<f64>::maximally_mixed(3, 3).matrix(), 1e-14));
    }

    #[test]
    fn noisy_schmidt_rejects_unnormalized() {
        let err = make_state::<f64>(&StateSpec::noisy_schmidt(&[0.6, 0.7], 0.5));
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        // tiny drift is absorbed
        let l = [0.6, 0.8 + 1e-12];
        assert!(make_state::<f64>(&StateSpec::noisy_schmidt(&l, 0.5)).is_ok());
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(make_state::<f64>(&StateSpec::werner2(1.2)).is_err());
        assert!(make_state::<f64>(&StateSpec::isotropic(3, -0.1)).is_err());
        assert!(make_state::<f64>(&StateSpec::werner_d(3, 1.5)).is_err());
        assert!(make_state::<f64>(&StateSpec::rank_deficient(3, 0.0)).is_err());
        assert!(make_state::<f64>(&StateSpec::gen_bell(2, vec![0.5, 0.5, 0.5, -0.5])).is_err());
        assert!(make_state::<f64>(&StateSpec::non_weyl(1.0, 0.5)).is_err());
        assert!(make_state::<f64>(&StateSpec::non_weyl(0.0, 0.5)).is_err());
    }

    #[test]
    fn werner_d_matches_weyl2_spectrum_at_d2() {
        for k in 0..=40 {
            let x = -1.0 + 2.0 * k as f64 / 40.0;
            let t = (2.0 * x - 1.0) / 3.0;
            let w = state(StateSpec::werner_d(2, x));
            let y = state(StateSpec::weyl2([t, t, t]));
            assert!(w.spectrum().approx_eq(y.spectrum(), 1e-10), "x={x}");
        }
    }

    #[test]
    fn weyl_d_at_two_is_weyl2() {
        let a = state(StateSpec::weyl_d(2, vec![0.3, -0.2, 0.5]));
        let b = state(StateSpec::weyl2([0.3, -0.2, 0.5]));
        assert!(a.matrix().approx_eq(b.matrix(), 1e-15));
    }

    #[test]
    fn weyl_marginals_are_maximally_mixed() {
        let rho = state(StateSpec::weyl2([0.3, -0.2, 0.5]));
        let half = M::identity(2).scale_real(0.5);
        assert!(rho.partial_trace(Subsystem::A).approx_eq(&half, 1e-15));
        assert!(rho.partial_trace(Subsystem::B).approx_eq(&half, 1e-15));
    }

    #[test]
    fn rank_deficient_spectrum() {
        assert_eq!(rank_deficient_eigs(3, 1.0).unwrap().values(), &[1.0]);
        let s = rank_deficient_eigs(4, 0.5).unwrap();
        assert!((s.sum() - 1.0).abs() < 1e-15 && s.min() >= 0.0);
        for d in 2..=5 {
            let rho = state(StateSpec::rank_deficient(d, 0.3));
            let nonzero: Vec<f64> = rho
                .spectrum()
                .values()
                .iter()
                .copied()
                .filter(|v| *v > 1e-12)
                .collect();
            assert!(Spectrum::new(nonzero).approx_eq(&rank_deficient_eigs(d, 0.3).unwrap(), 1e-12));
        }
        assert!(rank_deficient_eigs(3, 1.5).is_err());
    }

    #[test]
    fn bloch_fano_of_werner_and_weyl() {
        let p = 0.37;
        let bf = bloch_fano(&state(StateSpec::werner2(p))).unwrap();
        assert!(bf.a.iter().chain(&bf.b).all(|v| v.abs() < 1e-14));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -p } else { 0.0 };
                assert!((bf.t_entry(i, j) - want).abs() < 1e-14);
            }
        }
        let bf = bloch_fano(&state(StateSpec::weyl2([0.3, -0.2, 0.5]))).unwrap();
        assert!((bf.t_entry(0, 0) - 0.3).abs() < 1e-14);
        assert!((bf.t_entry(1, 1) + 0.2).abs() < 1e-14);
        assert!((bf.t_entry(2, 2) - 0.5).abs() < 1e-14);

        let mm = DensityMatrix::<f64>::maximally_mixed(2, 2);
        let bf = bloch_fano(&mm).unwrap();
        assert!(bf.t.iter().chain(&bf.a).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn bloch_fano_reconstructs_non_weyl_and_qutrits() {
        let rho = state(StateSpec::non_weyl(0.3, 0.6));
        let bf = bloch_fano(&rho).unwrap();
        assert!(bf.reconstruct().approx_eq(rho.matrix(), 1e-10));
        let rho = state(StateSpec::rank_deficient(3, 0.4));
        assert!(bloch_fano(&rho).is_err());
        let bf = bloch_fano_general(&rho).unwrap();
        assert!(bf.reconstruct().approx_eq(rho.matrix(), 1e-10));
    }

    #[test]
    fn bloch_fano_rejects_unequal_dims() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2, 3);
        assert!(bloch_fano_general(&rho).is_err());
    }

    #[test]
    fn f32_states_build() {
        let rho = make_state::<f32>(&StateSpec::isotropic(3, 0.6)).unwrap();
        assert!((rho.spectrum().max() - 0.6).abs() < 1e-5);
    }
}
