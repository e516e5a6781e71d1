//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)`. The pivot `a_pq` is
//! first made real by a diagonal phase, then annihilated by a real Givens
//! rotation. Sweeps cycle over all pairs until the off-diagonal Frobenius
//! norm drops below the threshold.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Off-diagonal convergence threshold, relative to `max(1, ‖m‖_F)`.
pub const JACOBI_THRESHOLD: f64 = 1e-13;
/// Maximum number of full sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Hermiticity tolerance on eigensolver input, relative to `max(1, ‖m‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum<T: Real> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts the values ascending.
    pub fn new(mut values: Vec<T>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::nan)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::nan)
    }

    /// Multiset comparison after sorting.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

/// Eigenvalues with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub values: Spectrum<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `Q Λ Q†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let lambda = ComplexMatrix::from_diag(self.values.values());
        &(&self.vectors * &lambda) * &self.vectors.adjoint()
    }

    /// `Q diag(f(λ)) Q†` for a complex-valued spectral function.
    pub fn map(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.vectors.rows();
        let fl: Vec<Complex<T>> = self.values.values().iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * fl[k] * self.vectors[(j, k)].conj()
            })
        })
    }
}

fn check_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = T::one().max(m.frobenius_norm());
    let defect = m.hermiticity_defect();
    if !(defect <= T::tol(HERMITIAN_TOL) * scale) {
        return Err(Error::NotHermitian {
            deviation: defect.to_f64_lossy(),
        });
    }
    Ok(scale)
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi<T: Real>(m: &ComplexMatrix<T>, want_vectors: bool) -> Result<Eigen<T>> {
    let scale = check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(if want_vectors { n } else { 0 });
    let threshold = T::tol(JACOBI_THRESHOLD) * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off.to_f64_lossy(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == T::zero() {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, g, want_vectors);
            }
        }
    }

    let mut pairs: Vec<(T, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let values = Spectrum::new(pairs.iter().map(|p| p.0).collect());
    let vectors = if want_vectors {
        ComplexMatrix::from_fn(n, n, |i, k| v[(i, pairs[k].1)])
    } else {
        ComplexMatrix::zeros(0, 0)
    };
    Ok(Eigen { values, vectors })
}

/// Applies `A ← J† A J`, `V ← V J` with `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]`
/// on the `(p, q)` plane, where `a_pq = g·e^{iφ}`.
fn rotate<T: Real>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    apq: Complex<T>,
    g: T,
    want_vectors: bool,
) {
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * g);
    let t = if theta >= T::zero() {
        T::one() / (theta + (T::one() + theta * theta).sqrt())
    } else {
        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let phase = apq / g; // e^{iφ}
    let phase_c = phase.conj();

    // J entries
    let jpp = Complex::new(c, T::zero());
    let jpq = Complex::new(s, T::zero());
    let jqp = phase_c * (-s);
    let jqq = phase_c * c;

    // columns: A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // rows: A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    if want_vectors {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * jpp + vkq * jqp;
            v[(k, q)] = vkp * jpq + vkq * jqq;
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    Ok(jacobi(m, false)?.values)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigh<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    jacobi(m, true)
}

/// Sum of singular values.
///
/// Hermitian input uses `Σ|λ|` directly; anything else goes through the
/// eigenvalues of `t†t`.
pub fn trace_norm<T: Real>(t: &ComplexMatrix<T>) -> Result<T> {
    if t.rows() == 0 || t.cols() == 0 {
        return Ok(T::zero());
    }
    if t.is_square() && t.hermiticity_defect() == T::zero() {
        let spec = hermitian_eig(t)?;
        return Ok(spec.values().iter().fold(T::zero(), |acc, l| acc + l.abs()));
    }
    let gram = &t.adjoint() * t;
    let spec = hermitian_eig(&gram)?;
    Ok(spec
        .values()
        .iter()
        .fold(T::zero(), |acc, &l| acc + l.max(T::zero()).sqrt()))
}

/// `exp(i·h)` for Hermitian `h`.
pub fn unitary_exp<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigh(h)?;
    Ok(eig.map(|l| Complex::new(l.cos(), l.sin())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> M {
        let a = M::from_fn(n, n, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        &a + &a.adjoint()
    }

    #[test]
    fn pauli_z_spectrum() {
        let [_, _, z] = pauli::<f64>();
        assert_eq!(hermitian_eig(&z).unwrap().values(), &[-1.0, 1.0]);
    }

    #[test]
    fn pauli_y_spectrum_and_vectors() {
        let [_, y, _] = pauli::<f64>();
        let e = hermitian_eigh(&y).unwrap();
        assert!(e.values.approx_eq(&Spectrum::new(vec![-1.0, 1.0]), 1e-15));
        assert!(e.reconstruct().approx_eq(&y, 1e-14));
    }

    #[test]
    fn xx_projector_mix_has_half_half_zero_zero() {
        let [x, _, _] = pauli::<f64>();
        let m = (&M::identity(4) + &kron(&x, &x)).scale_real(0.25);
        let s = hermitian_eig(&m).unwrap();
        assert!(s.approx_eq(&Spectrum::new(vec![0.0, 0.0, 0.5, 0.5]), 1e-14));
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 9, 16, 25] {
            let m = random_hermitian(n, &mut rng);
            let e = hermitian_eigh(&m).unwrap();
            let resid = (&m - &e.reconstruct()).frobenius_norm();
            assert!(resid <= 1e-9 * m.frobenius_norm(), "n={n} resid={resid}");
            assert!(e.vectors.unitarity_defect() < 1e-12);
            let tr: f64 = m.trace().re;
            assert!((e.values.sum() - tr).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn f32_instantiation_works() {
        let [x, _, _] = pauli::<f32>();
        let s = hermitian_eig(&kron(&x, &x)).unwrap();
        assert!(s.approx_eq(&Spectrum::new(vec![-1.0f32, -1.0, 1.0, 1.0]), 1e-6));
    }

    #[test]
    fn trace_norm_cases() {
        let d = M::from_diag(&[3.0, -4.0]);
        assert!((trace_norm(&d).unwrap() - 7.0).abs() < 1e-14);
        assert_eq!(trace_norm(&M::zeros(3, 3)).unwrap(), 0.0);
        let p = 0.37;
        let t = M::identity(3).scale_real(-p);
        assert!((trace_norm(&t).unwrap() - 3.0 * p).abs() < 1e-14);
        let nonsym = M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((trace_norm(&nonsym).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_row_sign_flip_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = M::from_fn(3, 3, |_, _| Complex::new(rng.gen_range(-1.0..1.0), 0.0));
            let mut flipped = t.clone();
            let row = rng.gen_range(0..3);
            for j in 0..3 {
                flipped[(row, j)] = -flipped[(row, j)];
            }
            assert!((trace_norm(&t).unwrap() - trace_norm(&flipped).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_exp_cases() {
        let z = unitary_exp(&M::zeros(3, 3)).unwrap();
        assert!(z.approx_eq(&M::identity(3), 1e-15));

        // exp(i π/2 σx) = i σx
        let [x, _, _] = pauli::<f64>();
        let u = unitary_exp(&x.scale_real(std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        assert!(u.approx_eq(&x.scale(Complex::i()), 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        let fwd = unitary_exp(&h).unwrap();
        let back = unitary_exp(&h.scale_real(-1.0)).unwrap();
        assert!((&fwd * &back).approx_eq(&M::identity(4), 1e-9));
    }
}
