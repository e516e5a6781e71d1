use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default absolute tolerance for approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Which factor of a bipartite system a reduced operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real entries given as nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.rows))
    }

    /// Trace inner product `Tr[self · other]`.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].re)
            .collect()
    }

    /// Re-symmetrizes a nearly Hermitian matrix: `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + adj[(i, j)]) * T::lit(0.5)
        })
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Partial trace of an operator on `C^{d_a} ⊗ C^{d_b}`, keeping `keep`.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix<T>> {
    let (da, db) = dims;
    if !m.is_square() || m.rows != da * db {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {da}x{db} needs a {n}x{n} matrix, got {}x{}",
            m.rows,
            m.cols,
            n = da * db
        )));
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).fold(Complex::zero(), |acc, k| acc + m[(i * db + k, j * db + k)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).fold(Complex::zero(), |acc, k| acc + m[(k * db + i, k * db + j)])
        }),
    };
    Ok(out)
}

/// Swap operator `V|ij⟩ = |ji⟩` on `C^d ⊗ C^d`.
pub fn swap_operator<T: Real>(d: usize) -> ComplexMatrix<T> {
    let n = d * d;
    let mut v = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = Complex::one();
        }
    }
    v
}

/// Computational basis vector `|i⟩` in dimension `n`.
pub fn basis_vector<T: Real>(n: usize, i: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); n];
    v[i] = Complex::one();
    v
}

/// `|ψ_d⁺⟩ = Σ_i |ii⟩ / √d`.
pub fn max_entangled_vector<T: Real>(d: usize) -> Vec<Complex<T>> {
    let amp = T::one() / T::lit(d as f64).sqrt();
    let mut v = vec![Complex::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = Complex::new(amp, T::zero());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    type M = ComplexMatrix<f64>;

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = M::identity(2);
        assert!(kron(&i2, &i2).approx_eq(&M::identity(4), 0.0));
    }

    #[test]
    fn kron_sz_sz_is_diagonal() {
        let [_, _, z] = pauli::<f64>();
        let zz = kron(&z, &z);
        assert!(zz.approx_eq(&M::from_diag(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let ra = M::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]);
        let rb = M::from_real_rows(&[&[0.25, 0.0, 0.0], &[0.0, 0.25, 0.2], &[0.0, 0.2, 0.5]]);
        let rho = kron(&ra, &rb);
        let b = partial_trace(&rho, (2, 3), Subsystem::B).unwrap();
        let a = partial_trace(&rho, (2, 3), Subsystem::A).unwrap();
        assert!(b.approx_eq(&rb, 1e-15));
        assert!(a.approx_eq(&ra, 1e-15));
    }

    #[test]
    fn partial_trace_rejects_wrong_dims() {
        let m = M::identity(5);
        assert!(matches!(
            partial_trace(&m, (2, 2), Subsystem::A),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let psi = max_entangled_vector::<f64>(2);
        let p = M::projector(&psi);
        let b = partial_trace(&p, (2, 2), Subsystem::B).unwrap();
        assert!(b.approx_eq(&M::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn swap_squares_to_identity() {
        let v = swap_operator::<f64>(3);
        assert!((&v * &v).approx_eq(&M::identity(9), 0.0));
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(M::from_vec(2, 2, vec![Complex::zero(); 3]).is_err());
    }
}
