//! Finite-dimensional quantum channels in three representations: the
//! dynamical matrix `B`, Kraus operator sets, and the process (chi) matrix
//! over a Pauli-tensor or generalized Gell-Mann operator basis.
//!
//! The numerical core is generic over the real scalar type (see [`Real`]);
//! the aliases at the crate root fix it to `f64`, which is what the CLI and
//! the Monte Carlo experiments use.

pub mod analysis;
pub mod basis;
pub mod channel;
pub mod document;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod montecarlo;
pub mod random;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{mat, vec, ComplexMatrix};
pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision complex matrix.
pub type Matrix = ComplexMatrix<f64>;
pub type Eigen = eigen::EigenDecomposition<f64>;
pub type Basis = basis::OperatorBasis<f64>;
pub type Dynamical = channel::DynamicalMatrix<f64>;
pub type Kraus = channel::KrausSet<f64>;
pub type Chi = channel::ChiMatrix<f64>;
pub type Coefficients = channel::CoefficientVector<f64>;
pub type Sparsity = analysis::SparsityReport<f64>;
