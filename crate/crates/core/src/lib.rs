//! Certifying spectral-norm minimality of Hermitian matrices relative to a
//! C*-subalgebra `B` of `M_n(C)`.
//!
//! A Hermitian `A` is `B`-minimal when `||A|| <= ||A + B||` for every `B` in
//! the algebra, i.e. `dist(A, B) = ||A||`. The crate decides this through
//! moments of the extremal eigenspaces of `A`, produces certificates
//! `X` with `AX = ||A|| |X|`, and computes best approximations.

pub mod density;
pub mod eigen;
pub mod error;
pub mod hermitian;
pub mod matrix;
pub mod minimality;
pub mod moment;
pub mod subalgebra;
pub mod subspace;
pub mod variational;

pub use density::{project_density, project_simplex, DensityMatrix};
pub use eigen::{
    abs_hermitian, cluster_eigenvalues, eig_hermitian, min_eigpair, spectral_norm, EigenCluster,
    EigenDecomposition,
};
pub use error::{Error, Result};
pub use hermitian::HermitianMatrix;
pub use matrix::CMatrix;
pub use moment::{
    compress_family, intersects, jnr_support, moment_distance, moment_of_density, sample_extreme,
    support_function, CompressedFamily, FWConfig, FWResult, MomentPoint,
};
pub use subalgebra::{change_of_basis, BasisKind, BlockKind, BlockPattern, ChangeOfBasis, SubalgebraBasis};
pub use subspace::Subspace;
pub use num_complex::Complex64;
