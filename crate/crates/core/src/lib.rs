//! Block-Givens rotations and block diagonalization of partitioned matrices,
//! perturbation bounds for dropping a block, and spectra of expected Gram
//! matrices of sparse non-negative random matrices.
//!
//! Dense matrices are `nalgebra::DMatrix<f64>`. A [`BlockPartition`] fixes a
//! split `k` of a tall `m x n` matrix into `[[A, B], [C, D]]` with `A` of
//! size `k x k`.

pub mod approx;
pub mod blockdiag;
pub mod bounds;
pub mod error;
pub mod givens;
pub mod io;
pub mod matcore;
pub mod plan;
pub mod randmat;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::{BlockPartition, Matrix, SvdFactors};
