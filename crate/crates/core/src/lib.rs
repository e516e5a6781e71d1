//! Conditional entropies and fully entangled fraction of bipartite quantum states.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod fef;
pub mod linalg;
pub mod multicopy;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod spec;
pub mod states;
pub mod verify;
pub mod workcost;

pub use entropy::{cond_entropy, entropy, EntropyKind};
pub use error::{Error, Result};
pub use fef::{fef_closed, fef_optimize, FefMethod, FefResult};
pub use scalar::Real;
pub use spec::{Family, StateSpec};
pub use states::{make_state, DensityMatrix};

pub type CMatrix = linalg::ComplexMatrix<f64>;
pub type CMatrix32 = linalg::ComplexMatrix<f32>;
pub type Density = states::DensityMatrix<f64>;
pub type Density32 = states::DensityMatrix<f32>;
