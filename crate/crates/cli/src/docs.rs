//! JSON documents read and written by the command line.
//!
//! Complex entries are `[re, im]` pairs. Floats are written in the shortest
//! form that parses back to the same `f64`, so every document round-trips
//! bit for bit.

use bmin_core::minimality::{Certificate, MinimalityReport, Reason, Verdict};
use bmin_core::variational::BestApproxResult;
use bmin_core::{BasisKind, BlockPattern, CMatrix, Complex64, DensityMatrix, HermitianMatrix, SubalgebraBasis, Subspace};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixDocument {
    pub fn to_hermitian(&self) -> Result<HermitianMatrix, CliError> {
        let data = rectangular(&self.entries, self.n, self.n)?;
        Ok(HermitianMatrix::new(CMatrix::from_vec(self.n, self.n, data)?)?)
    }
}

impl From<&HermitianMatrix> for MatrixDocument {
    fn from(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| pair(h.get(i, j))).collect())
            .collect();
        Self { n, entries }
    }
}

/// An `n x r` matrix whose columns span a subspace; they are orthonormalized on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDocument {
    pub n: usize,
    pub r: usize,
    /// Row-major, `n` rows of `r` entries.
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl FrameDocument {
    pub fn to_subspace(&self) -> Result<Subspace, CliError> {
        let data = rectangular(&self.entries, self.n, self.r)?;
        let columns: Vec<Vec<Complex64>> = (0..self.r)
            .map(|j| (0..self.n).map(|i| data[i * self.r + j]).collect())
            .collect();
        Ok(Subspace::span(&columns)?)
    }
}

impl From<&Subspace> for FrameDocument {
    fn from(s: &Subspace) -> Self {
        let q = s.frame();
        let entries = (0..q.rows())
            .map(|i| (0..q.cols()).map(|j| pair(q[(i, j)])).collect())
            .collect();
        Self {
            n: q.rows(),
            r: q.cols(),
            entries,
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn rectangular(entries: &[Vec<[f64; 2]>], rows: usize, cols: usize) -> Result<Vec<Complex64>, CliError> {
    if entries.len() != rows || entries.iter().any(|row| row.len() != cols) {
        return Err(CliError::Document(format!("expected {rows} rows of {cols} entries")));
    }
    Ok(entries
        .iter()
        .flatten()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub kind: BasisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<MatrixDocument>>,
}

impl AlgebraDocument {
    pub fn resolve(&self) -> Result<SubalgebraBasis, CliError> {
        let missing = |field: &str| CliError::Document(format!("{} algebra needs `{field}`", self.kind));
        let basis = match self.kind {
            BasisKind::Diag => SubalgebraBasis::diagonal(self.n.ok_or_else(|| missing("n"))?),
            BasisKind::PauliDiag => SubalgebraBasis::pauli_diagonal(self.q.ok_or_else(|| missing("q"))?),
            BasisKind::Block => {
                let pattern: BlockPattern = self.pattern.as_deref().ok_or_else(|| missing("pattern"))?.parse()?;
                SubalgebraBasis::block(&pattern)
            }
            BasisKind::Custom => {
                let raw = self
                    .elements
                    .as_ref()
                    .ok_or_else(|| missing("elements"))?
                    .iter()
                    .map(MatrixDocument::to_hermitian)
                    .collect::<Result<Vec<_>, _>>()?;
                SubalgebraBasis::orthonormalize(&raw)?
            }
        };
        if let Some(n) = self.n {
            if n != basis.n() {
                return Err(CliError::Document(format!("algebra acts on {} but n = {n}", basis.n())));
            }
        }
        Ok(basis)
    }
}

impl From<&SubalgebraBasis> for AlgebraDocument {
    fn from(b: &SubalgebraBasis) -> Self {
        Self {
            kind: BasisKind::Custom,
            n: Some(b.n()),
            pattern: None,
            q: None,
            elements: Some(b.elements().iter().map(MatrixDocument::from).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub x: MatrixDocument,
    pub rho_plus: MatrixDocument,
    pub rho_minus: MatrixDocument,
    pub residual_eq: f64,
    pub residual_perp: f64,
}

impl From<&Certificate> for CertificateDocument {
    fn from(c: &Certificate) -> Self {
        let density = |r: &DensityMatrix| MatrixDocument::from(r.as_hermitian());
        Self {
            x: MatrixDocument::from(&c.x),
            rho_plus: density(&c.rho_plus),
            rho_minus: density(&c.rho_minus),
            residual_eq: c.residual_eq,
            residual_perp: c.residual_perp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub verdict: Verdict,
    pub reason: Reason,
    pub norm: f64,
    pub distance: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: usize,
    pub certificate: Option<CertificateDocument>,
    /// Wall-clock data; only present when requested, since it breaks byte determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl From<&MinimalityReport> for ReportDocument {
    fn from(r: &MinimalityReport) -> Self {
        Self {
            verdict: r.verdict,
            reason: r.reason,
            norm: r.norm,
            distance: r.distance,
            gap: r.gap,
            iterations: r.iterations,
            certificate: r.certificate.as_ref().map(CertificateDocument::from),
            timings: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestApproxDocument {
    pub x_star: Vec<f64>,
    pub dist: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(usize, f64)>>,
}

impl BestApproxDocument {
    pub fn new(r: &BestApproxResult, with_trace: bool) -> Self {
        Self {
            x_star: r.x_star.clone(),
            dist: r.dist,
            lower_bound: r.lower_bound,
            iterations: r.iterations,
            converged: r.converged,
            trace: with_trace.then(|| r.trace.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportDocument {
    /// `max { <p, w> : p in m_S }`.
    pub support: f64,
    /// Support of the joint numerical range `{ eps p : p in m_S, 0 <= eps <= 1 }`.
    pub jnr_support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirDerivDocument {
    pub value: f64,
}
