//! Deciding `B`-minimality of a Hermitian matrix.
//!
//! For a unital algebra, `A` is minimal iff `+-||A||` both lie in the
//! spectrum and the moments of the two extremal eigenspaces `E_+`, `E_-`
//! intersect. A common point `Phi(rho_+) = Phi(rho_-)` yields the
//! certificate `X = Q_+ rho_+ Q_+* - Q_- rho_- Q_-*`, which is trace
//! orthogonal to the algebra and satisfies `AX = ||A|| |X|`.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::eigen::{abs_hermitian, cluster_eigenvalues, eig_hermitian, spectral_norm_of, EigenDecomposition};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::moment::{compress_family, intersection_families, polish_intersection, FWConfig, IntersectionVerdict};
use crate::subalgebra::SubalgebraBasis;
use crate::subspace::Subspace;

/// Multiple of the clustering tolerance inside which a missing `-||A||`
/// (or `+||A||`) is reported as undecided instead of absent.
pub const NEAR_THRESHOLD_FACTOR: f64 = 100.0;

/// Orthogonal subspaces required by support pairs.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Moment distance aimed for when polishing certificate witnesses.
pub const POLISH_TARGET: f64 = 1e-13;

/// `||A||`, the eigenspaces for `+||A||` and `-||A||`, and the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSpaces {
    pub norm: f64,
    pub plus: Subspace,
    pub minus: Subspace,
    pub rest: Option<Subspace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub x: HermitianMatrix,
    pub rho_plus: DensityMatrix,
    pub rho_minus: DensityMatrix,
    /// `||AX - ||A|| |X| ||_F`.
    pub residual_eq: f64,
    /// `max_k |tr(X B_k)|`.
    pub residual_perp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Minimal,
    NotMinimal,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NormNotTwoSided,
    MomentsDisjoint,
    CertificateFound,
    GapUndecided,
    /// `-||A||` (or `+||A||`) misses the spectrum by less than
    /// [`NEAR_THRESHOLD_FACTOR`] clustering tolerances.
    SpectrumNearThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub verdict: Verdict,
    pub reason: Reason,
    pub norm: f64,
    /// Moment distance between the extremal eigenspaces, when computed.
    pub distance: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalityConfig {
    pub fw: FWConfig,
    /// Eigenvalues within `cluster_rel_tol * max(1, ||A||)` are treated as equal.
    pub cluster_rel_tol: f64,
    /// Tolerance handed to [`validate_certificate`] before reporting `minimal`.
    pub cert_tol: f64,
}

impl Default for MinimalityConfig {
    fn default() -> Self {
        Self {
            fw: FWConfig::default(),
            cluster_rel_tol: 1e-8,
            cert_tol: 1e-6,
        }
    }
}

impl MinimalityConfig {
    pub fn cluster_tol(&self, norm: f64) -> f64 {
        self.cluster_rel_tol * norm.max(1.0)
    }
}

fn extremal_from_decomposition(decomp: &EigenDecomposition, tau: f64) -> Result<ExtremalSpaces> {
    let norm = spectral_norm_of(decomp);
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let clusters = cluster_eigenvalues(decomp, tau);
    let top = clusters.last().expect("nonempty spectrum");
    let bottom = clusters.first().expect("nonempty spectrum");
    if clusters.len() < 2 || (top.value - norm).abs() > tau || (bottom.value + norm).abs() > tau {
        return Err(Error::NormNotTwoSided {
            lambda_min: decomp.lambda_min(),
            lambda_max: decomp.lambda_max(),
        });
    }
    let n = decomp.dim();
    let rest = if top.multiplicity + bottom.multiplicity < n {
        let cols: Vec<_> = clusters[1..clusters.len() - 1]
            .iter()
            .flat_map(|c| c.frame.frame().columns())
            .collect();
        Some(Subspace::span(&cols)?)
    } else {
        None
    };
    Ok(ExtremalSpaces {
        norm,
        plus: top.frame.clone(),
        minus: bottom.frame.clone(),
        rest,
    })
}

/// Eigenspaces of `A` for `+||A||` and `-||A||`, clustered with tolerance `tau`.
pub fn extremal_eigenspaces(a: &HermitianMatrix, tau: f64) -> Result<ExtremalSpaces> {
    extremal_from_decomposition(&eig_hermitian(a)?, tau)
}

/// `X = Q_+ R_+ Q_+* - Q_- R_- Q_-*` with its residuals against `A` and the basis.
pub fn build_certificate(
    a: &HermitianMatrix,
    spaces: &ExtremalSpaces,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
    basis: &SubalgebraBasis,
) -> Result<Certificate> {
    rho_plus.as_hermitian().check_dim(spaces.plus.rank())?;
    rho_minus.as_hermitian().check_dim(spaces.minus.rank())?;
    let x = rho_plus
        .as_hermitian()
        .lift(spaces.plus.frame())
        .sub(&rho_minus.as_hermitian().lift(spaces.minus.frame()));
    let residual_eq = certificate_equation_residual(a, &x)?;
    Ok(Certificate {
        residual_perp: basis.max_trace_pairing(&x),
        residual_eq,
        x,
        rho_plus: rho_plus.clone(),
        rho_minus: rho_minus.clone(),
    })
}

/// `||AX - ||A|| |X| ||_F`.
pub fn certificate_equation_residual(a: &HermitianMatrix, x: &HermitianMatrix) -> Result<f64> {
    let norm = spectral_norm_of(&eig_hermitian(a)?);
    let lhs = a.as_matrix() * x.as_matrix();
    let rhs = abs_hermitian(x)?.scale(norm);
    Ok((&lhs - rhs.as_matrix()).frobenius_norm())
}

/// True iff `X != 0`, `X` is trace orthogonal to the algebra and `AX = ||A|| |X|`,
/// all within `tol` (the last one relative to `max(1, ||A|| ||X||_F)`).
pub fn validate_certificate(
    a: &HermitianMatrix,
    x: &HermitianMatrix,
    basis: &SubalgebraBasis,
    tol: f64,
) -> Result<bool> {
    if a.dim() != x.dim() || x.dim() != basis.n() {
        return Ok(false);
    }
    let xf = x.frobenius_norm();
    if xf <= tol || !basis.in_trace_orthocomplement(x, tol) {
        return Ok(false);
    }
    let norm = spectral_norm_of(&eig_hermitian(a)?);
    let residual = certificate_equation_residual(a, x)?;
    Ok(residual <= tol * (norm * xf).max(1.0))
}

/// Shared verdict logic once the extremal subspaces are known.
pub(crate) fn decide_from_spaces(
    a: &HermitianMatrix,
    spaces: &ExtremalSpaces,
    basis: &SubalgebraBasis,
    cfg: &MinimalityConfig,
) -> Result<MinimalityReport> {
    let f_plus = compress_family(&spaces.plus, basis)?;
    let f_minus = compress_family(&spaces.minus, basis)?;
    let verdict = intersection_families(&f_plus, &f_minus, &cfg.fw)?;
    let res = verdict.result();
    let mut report = MinimalityReport {
        verdict: Verdict::Undecided,
        reason: Reason::GapUndecided,
        norm: spaces.norm,
        distance: Some(res.distance),
        gap: Some(res.gap),
        iterations: res.iterations,
        certificate: None,
    };
    match &verdict {
        IntersectionVerdict::Intersect(res) => {
            let polished = polish_intersection(&f_plus, &f_minus, &cfg.fw, POLISH_TARGET)?;
            let best = if polished.distance < res.distance { &polished } else { res };
            let cert = build_certificate(a, spaces, &best.witness_plus, &best.witness_minus, basis)?;
            if validate_certificate(a, &cert.x, basis, cfg.cert_tol)? {
                report.verdict = Verdict::Minimal;
                report.reason = Reason::CertificateFound;
                report.certificate = Some(cert);
            }
        }
        IntersectionVerdict::Disjoint(_) => {
            report.verdict = Verdict::NotMinimal;
            report.reason = Reason::MomentsDisjoint;
        }
        IntersectionVerdict::Undecided(_) => {}
    }
    Ok(report)
}

pub(crate) fn one_sided_report(norm: f64, miss: f64, tau: f64) -> MinimalityReport {
    let near = miss <= NEAR_THRESHOLD_FACTOR * tau;
    MinimalityReport {
        verdict: if near { Verdict::Undecided } else { Verdict::NotMinimal },
        reason: if near {
            Reason::SpectrumNearThreshold
        } else {
            Reason::NormNotTwoSided
        },
        norm,
        distance: None,
        gap: None,
        iterations: 0,
        certificate: None,
    }
}

/// Decides whether `A` is `B`-minimal for a unital basis.
pub fn check_minimal(
    a: &HermitianMatrix,
    basis: &SubalgebraBasis,
    cfg: &MinimalityConfig,
) -> Result<MinimalityReport> {
    basis.require_unital()?;
    a.check_dim(basis.n())?;
    let decomp = eig_hermitian(a)?;
    let norm = spectral_norm_of(&decomp);
    let tau = cfg.cluster_tol(norm);
    match extremal_from_decomposition(&decomp, tau) {
        Ok(spaces) => decide_from_spaces(a, &spaces, basis, cfg),
        Err(Error::NormNotTwoSided { lambda_min, lambda_max }) => {
            // distance of the weaker end from -+||A||
            let miss = (lambda_max + lambda_min).abs();
            Ok(one_sided_report(norm, miss, tau))
        }
        Err(e) => Err(e),
    }
}

/// `(V, W)` is a support pair when `V ⊥ W` and `m_V ∩ m_W != ∅`.
pub fn is_support_pair(v: &Subspace, w: &Subspace, basis: &SubalgebraBasis, cfg: &FWConfig) -> Result<bool> {
    match support_pair_verdict(v, w, basis, cfg)? {
        IntersectionVerdict::Intersect(_) => Ok(true),
        IntersectionVerdict::Disjoint(_) => Ok(false),
        IntersectionVerdict::Undecided(r) => Err(Error::Undecided {
            distance: r.distance,
            gap: r.gap,
            iterations: r.iterations,
        }),
    }
}

fn support_pair_verdict(
    v: &Subspace,
    w: &Subspace,
    basis: &SubalgebraBasis,
    cfg: &FWConfig,
) -> Result<IntersectionVerdict> {
    if v.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    let overlap = v.overlap(w);
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { overlap });
    }
    basis.require_unital()?;
    intersection_families(&compress_family(v, basis)?, &compress_family(w, basis)?, cfg)
}

/// `M = lambda (P_V - P_W) + R`, minimal whenever `(V, W)` is a support pair,
/// `||R|| <= lambda` and `R (P_V + P_W) = 0`.
pub fn construct_minimal(
    v: &Subspace,
    w: &Subspace,
    lambda: f64,
    remainder: &HermitianMatrix,
    basis: &SubalgebraBasis,
    cfg: &FWConfig,
) -> Result<HermitianMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveScale(lambda));
    }
    remainder.check_dim(v.ambient_dim())?;
    let r_norm = spectral_norm_of(&eig_hermitian(remainder)?);
    if r_norm > lambda + 1e-10 {
        return Err(Error::RemainderTooLarge {
            norm: r_norm,
            scale: lambda,
        });
    }
    let pv = v.projector();
    let pw = w.projector();
    let residual = (remainder.as_matrix() * pv.add(&pw).as_matrix()).frobenius_norm();
    if residual > 1e-10 {
        return Err(Error::RemainderNotCompressed { residual });
    }
    match support_pair_verdict(v, w, basis, cfg)? {
        IntersectionVerdict::Intersect(_) => Ok(pv.sub(&pw).scale(lambda).add(remainder)),
        IntersectionVerdict::Disjoint(r) => Err(Error::NotSupportPair { distance: r.distance }),
        IntersectionVerdict::Undecided(r) => Err(Error::Undecided {
            distance: r.distance,
            gap: r.gap,
            iterations: r.iterations,
        }),
    }
}
