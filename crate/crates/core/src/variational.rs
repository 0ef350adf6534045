//! The affine family `A(x) = A_0 + sum_k x_k B_k` and its nonsmooth analysis.
//!
//! `lambda_max(A(x))` is convex in `x` with subdifferential equal to the moment
//! `m_{S_max}` of the top eigenspace; `lambda_min` is concave with
//! superdifferential `m_{S_min}`. Minimality of `A(x)` is the optimality
//! condition `0 in d||A(x)||`, which for a two-sided spectrum is
//! `m_{S_max} ∩ m_{S_min} != ∅`.

use serde::{Deserialize, Serialize};

use crate::eigen::{cluster_eigenvalues, eig_hermitian, spectral_norm_of, EigenDecomposition};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::minimality::{decide_from_spaces, one_sided_report, ExtremalSpaces, MinimalityConfig, MinimalityReport};
use crate::moment::{compress_family, intersection_families, support_function, CompressedFamily, FWConfig, IntersectionVerdict};
use crate::subalgebra::SubalgebraBasis;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFamily {
    a0: HermitianMatrix,
    basis: SubalgebraBasis,
}

impl AffineFamily {
    pub fn new(a0: HermitianMatrix, basis: SubalgebraBasis) -> Result<Self> {
        a0.check_dim(basis.n())?;
        Ok(Self { a0, basis })
    }

    pub fn a0(&self) -> &HermitianMatrix {
        &self.a0
    }

    pub fn basis(&self) -> &SubalgebraBasis {
        &self.basis
    }

    /// Number of coordinates `t = dim B`.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<HermitianMatrix> {
        self.check_len(x)?;
        let mut out = self.a0.clone();
        for (xk, bk) in x.iter().zip(self.basis.elements()) {
            if *xk != 0.0 {
                out.add_scaled(*xk, bk);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubdiffKind {
    LambdaMax,
    LambdaMin,
    NormMaxSide,
    NormMinSide,
    NormBoth,
}

/// A subdifferential represented through the moments of `S_max` and/or `S_min`.
///
/// The stored families are the unsigned moments; the sign of the `lambda_min`
/// side is applied by [`SubdifferentialView::support`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubdifferentialView {
    pub kind: SubdiffKind,
    pub moment_max: Option<CompressedFamily>,
    pub moment_min: Option<CompressedFamily>,
}

impl SubdifferentialView {
    fn max_side(&self) -> &CompressedFamily {
        self.moment_max.as_ref().expect("view carries the lambda_max moment")
    }

    fn min_side(&self) -> &CompressedFamily {
        self.moment_min.as_ref().expect("view carries the lambda_min moment")
    }

    /// Support function of the represented set at `w`.
    ///
    /// For `LambdaMin` this is the one-sided derivative of the concave
    /// `lambda_min`, i.e. `min_{v in m_{S_min}} <v, w> = -h_{m_{S_min}}(-w)`.
    pub fn support(&self, w: &[f64]) -> Result<f64> {
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        Ok(match self.kind {
            SubdiffKind::LambdaMax | SubdiffKind::NormMaxSide => support_function(self.max_side(), w)?,
            SubdiffKind::LambdaMin => -support_function(self.min_side(), &neg)?,
            SubdiffKind::NormMinSide => support_function(self.min_side(), &neg)?,
            SubdiffKind::NormBoth => support_function(self.max_side(), w)?
                .max(support_function(self.min_side(), &neg)?),
        })
    }
}

struct Spectrum {
    decomp: EigenDecomposition,
    norm: f64,
    tau: f64,
    top: Subspace,
    bottom: Subspace,
}

fn spectrum(a: &HermitianMatrix, rel_tol: f64) -> Result<Spectrum> {
    let decomp = eig_hermitian(a)?;
    let norm = spectral_norm_of(&decomp);
    let tau = rel_tol * norm.max(1.0);
    let clusters = cluster_eigenvalues(&decomp, tau);
    let top = clusters.last().expect("nonempty spectrum").frame.clone();
    let bottom = clusters.first().expect("nonempty spectrum").frame.clone();
    Ok(Spectrum {
        decomp,
        norm,
        tau,
        top,
        bottom,
    })
}

const DEFAULT_REL_TOL: f64 = 1e-8;

/// `d lambda_max(A(x)) = m_{S_max(x)}`.
pub fn subdiff_lambda_max(fam: &AffineFamily, x: &[f64]) -> Result<SubdifferentialView> {
    let s = spectrum(&fam.evaluate(x)?, DEFAULT_REL_TOL)?;
    Ok(SubdifferentialView {
        kind: SubdiffKind::LambdaMax,
        moment_max: Some(compress_family(&s.top, &fam.basis)?),
        moment_min: None,
    })
}

/// Superdifferential of `lambda_min(A(x))`, which is `m_{S_min(x)}`.
pub fn subdiff_lambda_min(fam: &AffineFamily, x: &[f64]) -> Result<SubdifferentialView> {
    let s = spectrum(&fam.evaluate(x)?, DEFAULT_REL_TOL)?;
    Ok(SubdifferentialView {
        kind: SubdiffKind::LambdaMin,
        moment_max: None,
        moment_min: Some(compress_family(&s.bottom, &fam.basis)?),
    })
}

/// `lambda'_max(x; w) = lambda_max(sum_k w_k Q* B_k Q)` with `Q` a frame of `S_max(x)`.
pub fn directional_derivative(fam: &AffineFamily, x: &[f64], w: &[f64]) -> Result<f64> {
    fam.check_len(w)?;
    let view = subdiff_lambda_max(fam, x)?;
    support_function(view.max_side(), w)
}

/// `d||A(x)||`: `m_{S_max}`, `-m_{S_min}`, or the convex hull of both.
pub fn subdiff_norm(fam: &AffineFamily, x: &[f64]) -> Result<SubdifferentialView> {
    let s = spectrum(&fam.evaluate(x)?, DEFAULT_REL_TOL)?;
    if s.norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let max_active = (s.decomp.lambda_max() - s.norm).abs() <= s.tau;
    let min_active = (s.decomp.lambda_min() + s.norm).abs() <= s.tau;
    let kind = match (max_active, min_active) {
        (true, true) => SubdiffKind::NormBoth,
        (true, false) => SubdiffKind::NormMaxSide,
        _ => SubdiffKind::NormMinSide,
    };
    let moment_max = if max_active {
        Some(compress_family(&s.top, &fam.basis)?)
    } else {
        None
    };
    let moment_min = if min_active {
        Some(compress_family(&s.bottom, &fam.basis)?)
    } else {
        None
    };
    Ok(SubdifferentialView {
        kind,
        moment_max,
        moment_min,
    })
}

/// Minimality of `A(x)` through `0 in d lambda_max(A(x)) + d lambda_min(A(x))`
/// under `lambda_max(A(x)) = -lambda_min(A(x))`.
pub fn is_minimal_variational(fam: &AffineFamily, x: &[f64], cfg: &MinimalityConfig) -> Result<MinimalityReport> {
    fam.basis.require_unital()?;
    let a = fam.evaluate(x)?;
    let s = spectrum(&a, cfg.cluster_rel_tol)?;
    if s.norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let miss = (s.decomp.lambda_max() + s.decomp.lambda_min()).abs();
    if miss > 2.0 * s.tau {
        return Ok(one_sided_report(s.norm, miss, s.tau));
    }
    let spaces = ExtremalSpaces {
        norm: s.norm,
        plus: s.top,
        minus: s.bottom,
        rest: None,
    };
    decide_from_spaces(&a, &spaces, &fam.basis, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `x <- x - (c / sqrt k) g / ||g||`.
    Diminishing,
    /// Polyak steps towards a target level `f_rec - delta`; `delta` is halved
    /// whenever the path since the last record exceeds a length budget.
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub step_rule: StepRule,
    /// Step scale; `None` means `||A(x0)||`.
    pub c: Option<f64>,
    /// Stop when the gap between the best value and the dual bound is below
    /// `dist_tol * max(1, best)`.
    pub dist_tol: f64,
    pub cluster_rel_tol: f64,
    pub fw: FWConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            step_rule: StepRule::Diminishing,
            c: None,
            dist_tol: 1e-6,
            cluster_rel_tol: 1e-8,
            fw: FWConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.dist_tol > 0.0 && self.cluster_rel_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidConfig(format!("step scale {c} must be positive")));
            }
        }
        self.fw.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestApproxResult {
    pub x_star: Vec<f64>,
    /// `||A(x_star)||`.
    pub dist: f64,
    /// Largest certified lower bound on `dist(A_0, B)` found.
    pub lower_bound: f64,
    /// `(iteration, ||A(x_k)||)` for every evaluated iterate.
    pub trace: Vec<(usize, f64)>,
    pub iterations: usize,
    pub converged: bool,
}

/// Everything the solver needs from one evaluation of `A(x)`.
struct Probe {
    f: f64,
    /// Subgradient of `||A(x)||`.
    g: Vec<f64>,
    lower_bound: f64,
    optimal: bool,
}

fn probe(fam: &AffineFamily, x: &[f64], cfg: &SolverConfig) -> Result<Probe> {
    let a = fam.evaluate(x)?;
    let s = spectrum(&a, cfg.cluster_rel_tol)?;
    let n = s.decomp.dim();
    let u = s.decomp.eigenvector(n - 1);
    let w = s.decomp.eigenvector(0);
    let (lmin, lmax) = (s.decomp.lambda_min(), s.decomp.lambda_max());
    if s.norm == 0.0 {
        return Ok(Probe {
            f: 0.0,
            g: vec![0.0; fam.dim()],
            lower_bound: 0.0,
            optimal: true,
        });
    }

    // lambda_max side wins ties
    let g: Vec<f64> = if lmax >= -lmin {
        let uu = HermitianMatrix::rank_one(&u);
        fam.basis.elements().iter().map(|b| uu.trace_pair(b).re).collect()
    } else {
        let ww = HermitianMatrix::rank_one(&w);
        fam.basis.elements().iter().map(|b| -ww.trace_pair(b).re).collect()
    };

    // weak duality: |tr(A_0 Y)| / ||Y||_1 <= dist(A_0, B) for Y trace orthogonal to B
    let mut y = HermitianMatrix::rank_one(&u).sub(&HermitianMatrix::rank_one(&w));
    for b in fam.basis.elements() {
        let c = y.trace_pair(b).re;
        y.add_scaled(-c, b);
    }
    let y_trace_norm: f64 = eig_hermitian(&y)?.eigenvalues.iter().map(|l| l.abs()).sum();
    let lower_bound = if y_trace_norm > 1e-12 {
        fam.a0.trace_pair(&y).re.abs() / y_trace_norm
    } else {
        0.0
    };

    let mut optimal = false;
    if (lmax + lmin).abs() <= 2.0 * s.tau && fam.basis.is_unital() {
        let fp = compress_family(&s.top, &fam.basis)?;
        let fm = compress_family(&s.bottom, &fam.basis)?;
        optimal = matches!(intersection_families(&fp, &fm, &cfg.fw)?, IntersectionVerdict::Intersect(_));
    }
    Ok(Probe {
        f: s.norm,
        g,
        lower_bound,
        optimal,
    })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimizes `||A(x)||` over `x` by subgradient descent started at `x0`.
///
/// The iterate `x = 0` is also evaluated, so `dist <= ||A_0||` always holds.
/// `converged` is set when the dual bound closes the gap to `cfg.dist_tol` or
/// the moment intersection test certifies an iterate as minimal.
pub fn best_approximation(fam: &AffineFamily, x0: &[f64], cfg: &SolverConfig) -> Result<BestApproxResult> {
    cfg.validate()?;
    fam.check_len(x0)?;
    if !fam.basis.is_unital() {
        log::warn!("best approximation over a non-unital basis: optimality certificates disabled");
    }

    let t = fam.dim();
    let zero = vec![0.0; t];
    let p0 = probe(fam, &zero, cfg)?;
    let mut best_x = zero;
    let mut best_f = p0.f;
    let mut lower = p0.lower_bound;
    let mut trace = vec![(0, p0.f)];
    let mut converged = p0.optimal;
    if converged {
        lower = p0.f;
    }

    let mut x = x0.to_vec();
    let mut p = probe(fam, &x, cfg)?;
    trace.push((0, p.f));
    let scale = cfg.c.unwrap_or(p.f).max(f64::MIN_POSITIVE);

    // level-method state
    let mut record = p.f.min(best_f);
    let mut delta = 0.5 * record.max(1e-300);
    let delta_floor = 1e-15 * record.max(1.0);
    let path_budget = (t as f64).sqrt() * scale;
    let mut path = 0.0;

    let mut iterations = 0;
    while !converged && iterations < cfg.max_iter {
        if p.f < best_f {
            best_f = p.f;
            best_x.clone_from(&x);
        }
        lower = lower.max(p.lower_bound);
        if p.optimal {
            best_f = p.f;
            best_x.clone_from(&x);
            lower = p.f;
        }
        if best_f - lower <= cfg.dist_tol * best_f.max(1.0) {
            converged = true;
            break;
        }
        let gn = norm2(&p.g);
        if gn == 0.0 {
            break;
        }
        iterations += 1;

        let step = match cfg.step_rule {
            StepRule::Diminishing => scale / (iterations as f64).sqrt() / gn,
            StepRule::Level => {
                if best_f <= record - 0.5 * delta {
                    record = best_f;
                    path = 0.0;
                } else if path > path_budget {
                    record = best_f;
                    delta = (0.5 * delta).max(delta_floor);
                    path = 0.0;
                    x.clone_from(&best_x);
                    p = probe(fam, &x, cfg)?;
                }
                delta = delta.min((record - lower).max(delta_floor));
                let level = record - delta;
                let gn = norm2(&p.g);
                if gn == 0.0 {
                    break;
                }
                (p.f - level).max(0.0) / (gn * gn)
            }
        };
        for (xk, gk) in x.iter_mut().zip(&p.g) {
            *xk -= step * gk;
        }
        path += step * norm2(&p.g);
        p = probe(fam, &x, cfg)?;
        trace.push((iterations, p.f));
    }
    if !converged {
        if p.f < best_f {
            best_f = p.f;
            best_x.clone_from(&x);
        }
        lower = lower.max(p.lower_bound);
        if p.optimal || best_f - lower <= cfg.dist_tol * best_f.max(1.0) {
            converged = true;
        }
    }
    log::debug!("best approximation: dist {best_f:e}, lower bound {lower:e}, {iterations} iterations");
    Ok(BestApproxResult {
        x_star: best_x,
        dist: best_f,
        lower_bound: lower.min(best_f),
        trace,
        iterations,
        converged,
    })
}
