//! Exact integer linear algebra and graded chain complexes.

mod complex;
mod echelon;
mod matrix;
mod modp;
mod smith;

pub use complex::{homology, tensor, ChainMap, GradedIntComplex, Homology, Truncation};
pub use echelon::{cokernel_basis, inverse_unimodular, kernel_basis, ColumnEchelon, Cokernel};
pub use matrix::IntMatrix;
pub use modp::{reduce_mod, FpMatrix, FpSolver};
pub use smith::{invariant_factors, rank, smith_normal_form, Smith};
