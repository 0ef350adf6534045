//! Subspaces of `C^n` carried by an orthonormal frame.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::matrix::{gram_schmidt, CMatrix};

/// Tolerance on `||Q*Q - I||_F` for a frame to count as orthonormal.
pub const FRAME_TOL: f64 = 1e-10;

/// An `r`-dimensional subspace stored as an `n x r` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: CMatrix,
}

impl Subspace {
    /// Wraps a frame whose columns are already orthonormal.
    pub fn new(frame: CMatrix) -> Result<Self> {
        let (n, r) = (frame.rows(), frame.cols());
        if r == 0 || r > n {
            return Err(Error::InvalidRank { n, rank: r });
        }
        frame.check_finite()?;
        let gram = &frame.adjoint() * &frame;
        let deviation = (&gram - &CMatrix::identity(r)).frobenius_norm();
        if deviation > FRAME_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { frame })
    }

    /// Orthonormalizes arbitrary spanning columns (Gram-Schmidt, dependent
    /// columns dropped).
    pub fn span(columns: &[Vec<Complex64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let scale = columns
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
            .max(1.0);
        let q = gram_schmidt(columns, 1e-10 * scale);
        if q.is_empty() {
            return Err(Error::InvalidRank { n, rank: 0 });
        }
        Self::new(CMatrix::from_columns(&q)?)
    }

    /// Convenience for real spanning vectors.
    pub fn span_real(columns: &[Vec<f64>]) -> Result<Self> {
        let cols: Vec<Vec<Complex64>> = columns
            .iter()
            .map(|c| c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::span(&cols)
    }

    /// `span{e_i : i in indices}` inside `C^n`.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let cols: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::span_real(&cols)
    }

    pub fn whole(n: usize) -> Self {
        Self {
            frame: CMatrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.rows()
    }

    pub fn rank(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::projector(&self.frame)
    }

    /// `||V* W||_F`; zero iff the subspaces are orthogonal.
    pub fn overlap(&self, other: &Subspace) -> f64 {
        (&self.frame.adjoint() * &other.frame).frobenius_norm()
    }

    /// Orthogonal complement, or `None` when `self` is all of `C^n`.
    pub fn complement(&self) -> Option<Subspace> {
        let n = self.ambient_dim();
        if self.rank() == n {
            return None;
        }
        let mut cols = self.frame.columns();
        cols.extend((0..n).map(|i| {
            (0..n)
                .map(|k| if k == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect()
        }));
        let q = gram_schmidt(&cols, 1e-8);
        let rest: Vec<Vec<Complex64>> = q.into_iter().skip(self.rank()).collect();
        Some(Subspace {
            frame: CMatrix::from_columns(&rest).expect("columns share a length"),
        })
    }
}
