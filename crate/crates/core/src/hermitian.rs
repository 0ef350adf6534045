//! Hermitian matrices, validated and exactly symmetrized on construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Absolute asymmetry (relative to `max(1, max|a_ij|)`) repaired silently.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense `n x n` complex self-adjoint matrix.
///
/// Construction rejects non-finite entries and asymmetry above
/// [`HERMITIAN_TOL`]; anything below is repaired by averaging with the
/// adjoint, so stored diagonals are exactly real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrixRepr", into = "CMatrixRepr")]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        m.check_finite()?;
        let scale = m.max_abs().max(1.0);
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(&m))
    }

    /// `(M + M*) / 2` for any square matrix, without validation.
    pub fn symmetrize(m: &CMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self { inner: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: CMatrix::identity(n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            inner: CMatrix::diagonal(values),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows))
    }

    /// Orthogonal projector onto the span of orthonormal columns of `frame`.
    pub fn projector(frame: &CMatrix) -> Self {
        Self::symmetrize(&(frame * &frame.adjoint()))
    }

    /// `v v*`.
    pub fn rank_one(v: &[Complex64]) -> Self {
        Self::symmetrize(&CMatrix::outer(v, v))
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    /// Trace pairing `tr(self * other)`, complex in general.
    pub fn trace_pair(&self, other: &HermitianMatrix) -> Complex64 {
        self.inner.trace_product(&other.inner)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// `self += s * other` on the stored entries.
    pub fn add_scaled(&mut self, s: f64, other: &HermitianMatrix) {
        self.inner.axpy(Complex64::new(s, 0.0), &other.inner);
    }

    /// `Q* self Q`, the compression to the column space of `q`.
    pub fn congruence(&self, q: &CMatrix) -> Self {
        Self::symmetrize(&(&(&q.adjoint() * &self.inner) * q))
    }

    /// `Q self Q*`, lifting an `r x r` matrix back to `n x n`.
    pub fn lift(&self, q: &CMatrix) -> Self {
        Self::symmetrize(&(&(q * &self.inner) * &q.adjoint()))
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            })
        }
    }
}

/// Plain serde shape used only for the derive on [`HermitianMatrix`].
#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl From<HermitianMatrix> for CMatrixRepr {
    fn from(h: HermitianMatrix) -> Self {
        let n = h.dim();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = h.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self { n, entries }
    }
}

impl TryFrom<CMatrixRepr> for HermitianMatrix {
    type Error = Error;

    fn try_from(doc: CMatrixRepr) -> Result<Self> {
        if doc.entries.len() != doc.n {
            return Err(Error::DimensionMismatch {
                expected: doc.n,
                found: doc.entries.len(),
            });
        }
        let mut data = Vec::with_capacity(doc.n * doc.n);
        for row in &doc.entries {
            if row.len() != doc.n {
                return Err(Error::DimensionMismatch {
                    expected: doc.n,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|p| Complex64::new(p[0], p[1])));
        }
        HermitianMatrix::new(CMatrix::from_vec(doc.n, doc.n, data)?)
    }
}
