//! Cyclic complex Jacobi eigensolver and the spectral functions built on it.
//!
//! Each off-diagonal pair `(p, q)` is annihilated by a unitary rotation
//! `U = diag(1, e^{-i phi}) R(theta)`: the phase factor makes the pivot real,
//! the real Givens rotation then zeroes it. Sweeps repeat until the
//! off-diagonal Frobenius norm drops below `1e-12 * ||A||_F`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::matrix::{CMatrix, ZERO};
use crate::subspace::Subspace;

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// `A = Q diag(eigenvalues) Q*` with eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: CMatrix,
    /// `||AQ - Q Lambda||_F`.
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// `Q f(Lambda) Q*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reconstruct_weights(&weights)
    }

    /// `Q diag(weights) Q*`.
    pub fn reconstruct_weights(&self, weights: &[f64]) -> HermitianMatrix {
        assert_eq!(weights.len(), self.dim());
        let n = self.dim();
        let q = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = q[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * q[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::symmetrize(&out)
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut off = off_diagonal_norm(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = v.select_columns(&order);
    normalize_phases(&mut vectors);

    let aq = a.as_matrix() * &vectors;
    let mut residual = 0.0;
    for j in 0..n {
        for i in 0..n {
            residual += (aq[(i, j)] - vectors[(i, j)] * eigenvalues[j]).norm_sqr();
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        residual: residual.sqrt(),
    })
}

/// One Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let n = m.rows();
    let phase = apq / b;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let zeta = (aqq - app) / (2.0 * b);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = [[c, s], [-s conj(phase), c conj(phase)]] on coordinates (p, q)
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // M <- M U (columns p, q)
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * u_qp;
        m[(k, q)] = mkp * s + mkq * u_qq;
    }
    // M <- U* M (rows p, q)
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * u_qp.conj();
        m[(q, k)] = mpk * s + mqk * u_qq.conj();
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
}

/// Makes the first entry of (near-)largest modulus in each column real positive.
fn normalize_phases(q: &mut CMatrix) {
    let (n, cols) = (q.rows(), q.cols());
    for j in 0..cols {
        let max = (0..n).map(|i| q[(i, j)].norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = (0..n)
            .find(|&i| q[(i, j)].norm() >= max - 1e-12)
            .expect("max is attained");
        let z = q[(pivot, j)];
        let rot = z.conj() / z.norm();
        for i in 0..n {
            q[(i, j)] *= rot;
        }
        q[(pivot, j)] = Complex64::new(q[(pivot, j)].norm(), 0.0);
    }
}

/// A group of numerically equal eigenvalues and an orthonormal frame of
/// their common eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub value: f64,
    pub frame: Subspace,
    pub multiplicity: usize,
}

/// Default clustering tolerance `1e-8 * max(1, ||A||)`.
pub fn default_cluster_tol(norm: f64) -> f64 {
    1e-8 * norm.max(1.0)
}

/// Greedy ascending scan: neighbours merge when their gap is at most `tol`.
pub fn cluster_eigenvalues(decomp: &EigenDecomposition, tol: f64) -> Vec<EigenCluster> {
    assert!(tol > 0.0, "cluster tolerance must be positive");
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &lam) in decomp.eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if lam - decomp.eigenvalues[*g.last().unwrap()] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let value = g.iter().map(|&i| decomp.eigenvalues[i]).sum::<f64>() / g.len() as f64;
            let cols: Vec<Vec<Complex64>> = g.iter().map(|&i| decomp.eigenvector(i)).collect();
            let frame = Subspace::span(&cols).expect("eigenvectors are orthonormal");
            EigenCluster {
                value,
                multiplicity: frame.rank(),
                frame,
            }
        })
        .collect()
}

pub fn spectral_norm_of(decomp: &EigenDecomposition) -> f64 {
    decomp.lambda_min().abs().max(decomp.lambda_max().abs())
}

/// Operator norm `max(|lambda_min|, |lambda_max|)`.
pub fn spectral_norm(a: &HermitianMatrix) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    Ok(spectral_norm_of(&eig_hermitian(a)?))
}

/// `|X| = Q |Lambda| Q*`.
pub fn abs_hermitian(x: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eig_hermitian(x)?.reconstruct_with(f64::abs))
}

/// Bottom eigenpair; the unit vector minimizes `tr(G vv*)` over density matrices.
pub fn min_eigpair(g: &HermitianMatrix) -> Result<(f64, Vec<Complex64>)> {
    let d = eig_hermitian(g)?;
    Ok((d.lambda_min(), d.eigenvector(0)))
}

/// Top eigenpair.
pub fn max_eigpair(g: &HermitianMatrix) -> Result<(f64, Vec<Complex64>)> {
    let d = eig_hermitian(g)?;
    let last = d.dim() - 1;
    Ok((d.lambda_max(), d.eigenvector(last)))
}

pub fn lambda_max(g: &HermitianMatrix) -> Result<f64> {
    Ok(eig_hermitian(g)?.lambda_max())
}
