//! Density matrices and Euclidean projections onto the simplex and the spectrahedron.

use num_complex::Complex64;

use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;

/// A PSD Hermitian matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    inner: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let tr = m.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let lmin = eig_hermitian(&m)?.lambda_min();
        if lmin < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("min eigenvalue {lmin:e} < 0")));
        }
        Ok(Self { inner: m })
    }

    /// Trusted constructor for matrices that are density matrices by
    /// construction (convex combinations of pure states).
    pub(crate) fn from_trusted(m: HermitianMatrix) -> Self {
        Self { inner: m }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            inner: HermitianMatrix::identity(n).scale(1.0 / n as f64),
        }
    }

    /// `vv* / ||v||^2`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        Ok(Self {
            inner: HermitianMatrix::rank_one(v).scale(1.0 / norm2),
        })
    }

    /// `diag(weights)` for a probability vector.
    pub fn from_probabilities(weights: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(weights))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.inner
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.inner
    }
}

/// Euclidean projection onto `{p >= 0, sum p = 1}` by sort and threshold.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest density matrix in Frobenius norm: project the spectrum onto the simplex.
pub fn project_density(m: &HermitianMatrix) -> Result<DensityMatrix> {
    let d = eig_hermitian(m)?;
    let weights = project_simplex(&d.eigenvalues);
    Ok(DensityMatrix::from_trusted(d.reconstruct_weights(&weights)))
}
