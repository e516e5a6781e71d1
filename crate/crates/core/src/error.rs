use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not positive semidefinite: {detail} (eigenvalue {eigenvalue:.6e})")]
    NotPositive { eigenvalue: f64, detail: String },

    #[error("invalid entropy order alpha = {0}")]
    InvalidAlpha(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("non-finite function value at {at}")]
    NonFinite { at: f64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
