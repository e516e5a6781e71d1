//! Dense complex linear algebra for small bipartite systems.

mod basis;
mod eigen;
mod matrix;

pub use basis::{
    gell_mann_basis, hermitian_coefficients, hermitian_from_coefficients, pauli, weyl_operator,
};
pub use eigen::{
    hermitian_eig, hermitian_eigh, trace_norm, unitary_exp, Eigen, Spectrum, HERMITIAN_TOL,
    JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD,
};
pub use matrix::{
    basis_vector, kron, max_entangled_vector, partial_trace, swap_operator, ComplexMatrix,
    Subsystem, DEFAULT_TOL,
};
