//! C*-subalgebras of `M_n(C)` represented by a trace-orthonormal Hermitian basis.
//!
//! The basis *is* the algebra: every downstream formula only consumes the
//! elements `B_k`, so closure under products is verified on demand
//! ([`SubalgebraBasis::verify_closed`]) rather than enforced.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::matrix::CMatrix;

/// Residual below which a Gram-Schmidt candidate counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;
/// Tolerance on `tr(B_i B_j) = delta_ij`.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Mutual projection residual accepted by [`change_of_basis`].
pub const SPAN_TOL: f64 = 1e-8;
/// Imaginary residue of `tr(rho B_k)` silently dropped (relative to `max(1, ||rho||_F)`).
pub const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Diag,
    Block,
    PauliDiag,
    Custom,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Diag => "diag",
            BasisKind::Block => "block",
            BasisKind::PauliDiag => "pauli-diag",
            BasisKind::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Diagonal,
    Full,
}

/// Ordered diagonal blocks of a block algebra, e.g. `D_2 + M_2` inside `M_4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPattern {
    blocks: Vec<(usize, BlockKind)>,
}

impl BlockPattern {
    pub fn new(blocks: Vec<(usize, BlockKind)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPattern("no blocks".into()));
        }
        if blocks.iter().any(|&(size, _)| size == 0) {
            return Err(Error::InvalidPattern("block sizes must be positive".into()));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[(usize, BlockKind)] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.0).sum()
    }
}

/// Parses the comma grammar `<size>d` / `<size>f`, e.g. `2d,2f`.
impl FromStr for BlockPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let (size, kind) = match tok.char_indices().last() {
                    Some((i, 'd')) => (&tok[..i], BlockKind::Diagonal),
                    Some((i, 'f')) => (&tok[..i], BlockKind::Full),
                    _ => return Err(Error::InvalidPattern(format!("bad block `{tok}`"))),
                };
                let size = size
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPattern(format!("bad block size `{tok}`")))?;
                Ok((size, kind))
            })
            .collect::<Result<Vec<_>>>()?;
        BlockPattern::new(blocks)
    }
}

impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|&(size, kind)| format!("{size}{}", if kind == BlockKind::Full { 'f' } else { 'd' }))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Trace-orthonormal Hermitian basis `B_1..B_t` of the Hermitian part of a subalgebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraBasis {
    n: usize,
    elements: Vec<HermitianMatrix>,
    kind: BasisKind,
}

/// Real `t x t` matrix `C[k][i] = tr(to_k from_i)`, orthogonal when both
/// bases span the same algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfBasis {
    pub matrix: Vec<Vec<f64>>,
}

impl ChangeOfBasis {
    pub fn apply(&self, coords: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(coords).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> ChangeOfBasis {
        let t = self.matrix.len();
        ChangeOfBasis {
            matrix: (0..t).map(|i| (0..t).map(|k| self.matrix[k][i]).collect()).collect(),
        }
    }

    /// `max |(C C^T - I)_{ij}|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let t = self.matrix.len();
        let mut worst: f64 = 0.0;
        for i in 0..t {
            for j in 0..t {
                let dot: f64 = (0..t).map(|k| self.matrix[i][k] * self.matrix[j][k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn unit(n: usize, i: usize, j: usize, value: Complex64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = value;
    m
}

impl SubalgebraBasis {
    /// Checks orthonormality and dimensions of an explicit element list.
    pub fn from_elements(n: usize, elements: Vec<HermitianMatrix>, kind: BasisKind) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySpan);
        }
        for e in &elements {
            e.check_dim(n)?;
        }
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate().skip(i) {
                let g = a.trace_pair(b).re;
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidConfig(format!(
                        "basis is not orthonormal: tr(B_{i} B_{j}) = {g}"
                    )));
                }
            }
        }
        Ok(Self { n, elements, kind })
    }

    /// The diagonal algebra `D_n` with basis `E_i = e_i e_i*`.
    pub fn diagonal(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let elements = (0..n)
            .map(|i| {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                HermitianMatrix::diagonal(&d)
            })
            .collect();
        Self {
            n,
            elements,
            kind: BasisKind::Diag,
        }
    }

    /// Block algebra: every `e_i e_i*`, then for each full block and each
    /// `i < j` inside it the pair `W^{i,j} = (e_i e_j* + e_j e_i*)/sqrt2`,
    /// `W^{j,i} = (-i e_i e_j* + i e_j e_i*)/sqrt2`.
    pub fn block(pattern: &BlockPattern) -> Self {
        let n = pattern.dim();
        let mut elements = Self::diagonal(n).elements;
        let s = FRAC_1_SQRT_2;
        let mut offset = 0;
        for &(size, kind) in pattern.blocks() {
            if kind == BlockKind::Full {
                for i in offset..offset + size {
                    for j in (i + 1)..offset + size {
                        let sym = &unit(n, i, j, Complex64::new(s, 0.0)) + &unit(n, j, i, Complex64::new(s, 0.0));
                        let anti = &unit(n, i, j, Complex64::new(0.0, -s)) + &unit(n, j, i, Complex64::new(0.0, s));
                        elements.push(HermitianMatrix::symmetrize(&sym));
                        elements.push(HermitianMatrix::symmetrize(&anti));
                    }
                }
            }
            offset += size;
        }
        Self {
            n,
            elements,
            kind: BasisKind::Block,
        }
    }

    /// All of `M_n`: the block algebra with a single full block.
    pub fn full(n: usize) -> Self {
        let pattern = BlockPattern::new(vec![(n, BlockKind::Full)]).expect("n >= 1");
        Self::block(&pattern)
    }

    /// Normalized Pauli strings over `I` and `Z` on `q` qubits, `n = 2^q`.
    ///
    /// Element `k` carries `Z` on qubit `p` (leftmost tensor factor is
    /// `p = 0`) iff bit `p` of `k` is set, so for `q = 2` the order is
    /// `II, ZI, IZ, ZZ`.
    pub fn pauli_diagonal(q: usize) -> Self {
        assert!((1..=20).contains(&q), "qubit count out of range");
        let n = 1usize << q;
        let norm = 1.0 / (n as f64).sqrt();
        let elements = (0..n)
            .map(|mask| {
                let diag: Vec<f64> = (0..n)
                    .map(|row| {
                        let flips = (0..q)
                            .filter(|&p| mask >> p & 1 == 1 && row >> (q - 1 - p) & 1 == 1)
                            .count();
                        if flips % 2 == 0 {
                            norm
                        } else {
                            -norm
                        }
                    })
                    .collect();
                HermitianMatrix::diagonal(&diag)
            })
            .collect();
        Self {
            n,
            elements,
            kind: BasisKind::PauliDiag,
        }
    }

    /// Gram-Schmidt under `<X, Y> = tr(XY)`; dependent inputs are dropped.
    pub fn orthonormalize(raw: &[HermitianMatrix]) -> Result<Self> {
        let n = raw.first().ok_or(Error::EmptySpan)?.dim();
        let mut elements: Vec<HermitianMatrix> = Vec::new();
        for m in raw {
            m.check_dim(n)?;
            let mut v = m.clone();
            for _ in 0..2 {
                for b in &elements {
                    let c = b.trace_pair(&v).re;
                    v.add_scaled(-c, b);
                }
            }
            let norm = v.frobenius_norm();
            if norm > DEPENDENCE_TOL {
                elements.push(v.scale(1.0 / norm));
            }
        }
        if elements.is_empty() {
            return Err(Error::EmptySpan);
        }
        Ok(Self {
            n,
            elements,
            kind: BasisKind::Custom,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `t` of the algebra.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Coefficients `c_k = tr(B_k M)` of the orthogonal projection of `M` onto the complex span.
    fn project_coefficients(&self, m: &CMatrix) -> Vec<Complex64> {
        self.elements.iter().map(|b| b.as_matrix().trace_product(m)).collect()
    }

    /// Frobenius residual of `M` after projecting onto the complex span.
    pub fn projection_residual(&self, m: &CMatrix) -> f64 {
        let coeffs = self.project_coefficients(m);
        let mut r = m.clone();
        for (c, b) in coeffs.iter().zip(&self.elements) {
            r.axpy(-c, b.as_matrix());
        }
        r.frobenius_norm()
    }

    /// Distance from `I_n` to the span.
    pub fn unit_residual(&self) -> f64 {
        self.projection_residual(&CMatrix::identity(self.n))
    }

    pub fn is_unital(&self) -> bool {
        self.unit_residual() <= ORTHONORMAL_TOL
    }

    pub fn require_unital(&self) -> Result<()> {
        let residual = self.unit_residual();
        if residual <= ORTHONORMAL_TOL {
            Ok(())
        } else {
            Err(Error::NonUnitalBasis { residual })
        }
    }

    /// True iff every product `B_i B_j` lies in the complex span within `tol`.
    pub fn verify_closed(&self, tol: f64) -> bool {
        self.elements.iter().all(|bi| {
            self.elements
                .iter()
                .all(|bj| self.projection_residual(&(bi.as_matrix() * bj.as_matrix())) <= tol)
        })
    }

    /// `Phi(rho) = (tr(rho B_1), ..., tr(rho B_t))`.
    pub fn compress(&self, rho: &HermitianMatrix) -> Result<Vec<f64>> {
        rho.check_dim(self.n)?;
        let scale = rho.frobenius_norm().max(1.0);
        self.elements
            .iter()
            .map(|b| {
                let z = rho.trace_pair(b);
                if z.im.abs() > IMAG_TOL * scale {
                    Err(Error::ImaginaryResidue { residue: z.im.abs() })
                } else {
                    Ok(z.re)
                }
            })
            .collect()
    }

    /// `sum_k x_k B_k`.
    pub fn combine(&self, x: &[f64]) -> Result<HermitianMatrix> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut out = HermitianMatrix::zeros(self.n);
        for (c, b) in x.iter().zip(&self.elements) {
            if *c != 0.0 {
                out.add_scaled(*c, b);
            }
        }
        Ok(out)
    }

    /// True iff `max_k |tr(X B_k)| <= tol * max(1, ||X||_F)`.
    pub fn in_trace_orthocomplement(&self, x: &HermitianMatrix, tol: f64) -> bool {
        x.dim() == self.n && self.max_trace_pairing(x) <= tol * x.frobenius_norm().max(1.0)
    }

    /// `max_k |tr(X B_k)|`.
    pub fn max_trace_pairing(&self, x: &HermitianMatrix) -> f64 {
        self.elements
            .iter()
            .map(|b| x.trace_pair(b).norm())
            .fold(0.0, f64::max)
    }
}

/// `C[k][i] = tr(to_k from_i)`, so that `compress(rho, to) = C compress(rho, from)`.
pub fn change_of_basis(from: &SubalgebraBasis, to: &SubalgebraBasis) -> Result<ChangeOfBasis> {
    if from.n != to.n {
        return Err(Error::DimensionMismatch {
            expected: from.n,
            found: to.n,
        });
    }
    let residual = from
        .elements
        .iter()
        .map(|b| to.projection_residual(b.as_matrix()))
        .chain(to.elements.iter().map(|b| from.projection_residual(b.as_matrix())))
        .fold(0.0, f64::max);
    if residual > SPAN_TOL || from.dim() != to.dim() {
        return Err(Error::SpanMismatch { residual });
    }
    let matrix = to
        .elements
        .iter()
        .map(|tk| from.elements.iter().map(|fi| tk.trace_pair(fi).re).collect())
        .collect();
    Ok(ChangeOfBasis { matrix })
}
