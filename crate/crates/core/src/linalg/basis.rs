use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `[σx, σy, σz]`.
pub fn pauli<T: Real>() -> [ComplexMatrix<T>; 3] {
    let o = Complex::<T>::one();
    let z = Complex::<T>::zero();
    let i = Complex::<T>::i();
    [
        ComplexMatrix::from_vec(2, 2, vec![z, o, o, z]).unwrap(),
        ComplexMatrix::from_vec(2, 2, vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::from_vec(2, 2, vec![o, z, z, -o]).unwrap(),
    ]
}

/// Generalized Gell-Mann matrices of dimension `d`.
///
/// Ordering: symmetric `|j⟩⟨k| + |k⟩⟨j|`, then antisymmetric
/// `-i|j⟩⟨k| + i|k⟩⟨j|` (both over `j < k` lexicographically), then the
/// `d - 1` diagonal ones. Normalized so `Tr[g_i g_j] = 2δ_ij`; for `d = 2`
/// this is `[σx, σy, σz]`.
pub fn gell_mann_basis<T: Real>(d: usize) -> Result<Vec<ComplexMatrix<T>>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "Gell-Mann basis needs d >= 2, got {d}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();
    let mut out = Vec::with_capacity(d * d - 1);
    for &(j, k) in &pairs {
        let mut g = ComplexMatrix::zeros(d, d);
        g[(j, k)] = Complex::one();
        g[(k, j)] = Complex::one();
        out.push(g);
    }
    for &(j, k) in &pairs {
        let mut g = ComplexMatrix::zeros(d, d);
        g[(j, k)] = -Complex::i();
        g[(k, j)] = Complex::i();
        out.push(g);
    }
    for l in 1..d {
        let lf = T::lit(l as f64);
        let norm = (T::lit(2.0) / (lf * (lf + T::one()))).sqrt();
        let mut diag = vec![T::zero(); d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -lf * norm;
        out.push(ComplexMatrix::from_diag(&diag));
    }
    Ok(out)
}

/// Weyl operator `U_mn|i⟩ = η^{m(i-n)} |i-n mod d⟩`, `η = e^{2πi/d}`.
pub fn weyl_operator<T: Real>(d: usize, m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    if d == 0 || m >= d || n >= d {
        return Err(Error::InvalidParameter(format!(
            "Weyl operator indices must satisfy 0 <= m, n < d; got d={d}, m={m}, n={n}"
        )));
    }
    let mut u = ComplexMatrix::zeros(d, d);
    let two_pi_over_d = T::lit(2.0) * T::PI() / T::lit(d as f64);
    for i in 0..d {
        let exponent = (m as i64) * (i as i64 - n as i64);
        let k = exponent.rem_euclid(d as i64) as f64;
        let angle = two_pi_over_d * T::lit(k);
        let row = (i + d - n) % d;
        u[(row, i)] = Complex::new(angle.cos(), angle.sin());
    }
    Ok(u)
}

/// Coefficients of `m` in the basis `{I, g_1, …, g_{d²-1}}`, using
/// `m = (Tr m / d) I + Σ (Tr[m g_i] / 2) g_i`.
pub fn hermitian_coefficients<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let d = m.rows();
    let basis = gell_mann_basis::<T>(d)?;
    let mut out = Vec::with_capacity(d * d);
    out.push(m.trace().re / T::lit(d as f64));
    for g in &basis {
        out.push(m.trace_product(g).re / T::lit(2.0));
    }
    Ok(out)
}

/// Inverse of [`hermitian_coefficients`].
pub fn hermitian_from_coefficients<T: Real>(d: usize, coeffs: &[T]) -> Result<ComplexMatrix<T>> {
    if coeffs.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "expected {} coefficients, got {}",
            d * d,
            coeffs.len()
        )));
    }
    let basis = gell_mann_basis::<T>(d)?;
    let mut h = ComplexMatrix::identity(d).scale_real(coeffs[0]);
    for (g, &c) in basis.iter().zip(&coeffs[1..]) {
        h = &h + &g.scale_real(c);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    #[test]
    fn qubit_gell_mann_are_paulis() {
        let gm = gell_mann_basis::<f64>(2).unwrap();
        let p = pauli::<f64>();
        assert_eq!(gm.len(), 3);
        for (g, s) in gm.iter().zip(&p) {
            assert!(g.approx_eq(s, 1e-15));
        }
    }

    #[test]
    fn gell_mann_orthonormality() {
        for d in 2..=6 {
            let gm = gell_mann_basis::<f64>(d).unwrap();
            assert_eq!(gm.len(), d * d - 1);
            for (i, gi) in gm.iter().enumerate() {
                assert!(gi.is_hermitian(0.0));
                assert!(gi.trace().norm() < 1e-14);
                for (j, gj) in gm.iter().enumerate() {
                    let tr = gi.trace_product(gj);
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!(
                        (tr.re - want).abs() < 1e-13 && tr.im.abs() < 1e-13,
                        "d={d} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn gell_mann_rejects_small_d() {
        assert!(gell_mann_basis::<f64>(1).is_err());
    }

    #[test]
    fn hermitian_expansion_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=5 {
            let a = M::from_fn(d, d, |_, _| {
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let h = &a + &a.adjoint();
            let c = hermitian_coefficients(&h).unwrap();
            let back = hermitian_from_coefficients(d, &c).unwrap();
            assert!(back.approx_eq(&h, 1e-9));
        }
    }

    #[test]
    fn weyl_identity_and_qubit_cases() {
        assert!(weyl_operator::<f64>(4, 0, 0)
            .unwrap()
            .approx_eq(&M::identity(4), 0.0));
        let [x, _, z] = pauli::<f64>();
        assert!(weyl_operator::<f64>(2, 1, 0).unwrap().approx_eq(&z, 1e-15));
        assert!(weyl_operator::<f64>(2, 0, 1).unwrap().approx_eq(&x, 1e-15));
    }

    #[test]
    fn weyl_operators_are_unitary() {
        for d in 2..=5 {
            for m in 0..d {
                for n in 0..d {
                    let u = weyl_operator::<f64>(d, m, n).unwrap();
                    assert!(u.unitarity_defect() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn weyl_rejects_out_of_range() {
        assert!(weyl_operator::<f64>(3, 3, 0).is_err());
        assert!(weyl_operator::<f64>(3, 0, 5).is_err());
    }
}
