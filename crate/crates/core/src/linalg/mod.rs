//! Linear algebra kernels: a dense symmetric eigensolver and a sparse
//! symmetric indefinite `LDLᵀ` factorization with inertia.

pub mod dense;
pub mod ldlt;
pub mod sparse;

pub use ldlt::{Inertia, Ldlt};
pub use sparse::SymmetricSparse;
