use thiserror::Error;

/// Errors raised by the minimality toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("frame columns are not orthonormal: ||Q*Q - I||_F = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("subspace must have rank between 1 and {n}, got {rank}")]
    InvalidRank { n: usize, rank: usize },

    #[error("invalid block pattern: {0}")]
    InvalidPattern(String),

    #[error("inputs span only the zero subspace")]
    EmptySpan,

    #[error("trace pairing has imaginary residue {residue:e}; input is not Hermitian")]
    ImaginaryResidue { residue: f64 },

    #[error("bases do not span the same algebra (projection residual {residual:e})")]
    SpanMismatch { residual: f64 },

    #[error("the matrix is zero")]
    ZeroMatrix,

    #[error("spectrum does not contain both +||A|| and -||A|| (lambda_min = {lambda_min}, lambda_max = {lambda_max})")]
    NormNotTwoSided { lambda_min: f64, lambda_max: f64 },

    #[error("basis does not contain the identity (residual {residual:e})")]
    NonUnitalBasis { residual: f64 },

    #[error("subspaces are not orthogonal: ||V*W||_F = {overlap:e}")]
    NotOrthogonal { overlap: f64 },

    #[error("subspaces do not form a support pair (moment distance {distance:e})")]
    NotSupportPair { distance: f64 },

    #[error("intersection undecided: distance {distance:e}, gap {gap:e} after {iterations} iterations")]
    Undecided {
        distance: f64,
        gap: f64,
        iterations: usize,
    },

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("remainder norm {norm} exceeds scale {scale}")]
    RemainderTooLarge { norm: f64, scale: f64 },

    #[error("remainder does not vanish on the support pair: ||R(P_V + P_W)||_F = {residual:e}")]
    RemainderNotCompressed { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
