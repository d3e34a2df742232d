//! Reference solvers: the stabilized semi-implicit spectral scheme and a
//! dense-matrix formulation of the sweeps used as a test oracle.

pub mod dense;
pub mod spectral;

pub use dense::{dense_split_matrices, dense_triangular_oracle, OraclePart, DENSE_LIMIT};
pub use spectral::{step_ssi1, SpectralPlan, SpectralWork};
