//! Moments of subspaces relative to a subalgebra basis.
//!
//! For a subspace `S` with frame `Q` the moment is the convex compact set
//! `m_S = { (tr(rho B_1), ..., tr(rho B_t)) : rho density matrix supported on S }`.
//! It is never materialized. Instead the module offers three computable views:
//!
//! * extreme-point samples, images of pure states `vv*` with `v` in `S`;
//! * the support function `h(w) = lambda_max(sum_k w_k Q* B_k Q)`;
//! * the Euclidean distance between two moments, by Frank-Wolfe over the
//!   product of the two spectrahedra, together with a gap certificate.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::eigen::{lambda_max, max_eigpair, min_eigpair};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::matrix::vec_norm;
use crate::subalgebra::SubalgebraBasis;

pub use crate::subspace::Subspace;

/// The compressions `M_k = Q* B_k Q` of a basis to a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedFamily {
    subspace: Subspace,
    mats: Vec<HermitianMatrix>,
}

impl CompressedFamily {
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn mats(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    pub fn rank(&self) -> usize {
        self.subspace.rank()
    }

    /// Number of basis elements `t`.
    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    /// `sum_k w_k M_k`.
    pub fn weighted(&self, w: &[f64]) -> Result<HermitianMatrix> {
        if w.len() != self.mats.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mats.len(),
                found: w.len(),
            });
        }
        let mut out = HermitianMatrix::zeros(self.rank());
        for (c, m) in w.iter().zip(&self.mats) {
            if *c != 0.0 {
                out.add_scaled(*c, m);
            }
        }
        Ok(out)
    }

    /// Moment coordinates of the pure state `u u*` given in frame coordinates.
    pub fn point_of_unit(&self, u: &[Complex64]) -> MomentPoint {
        let coords = self
            .mats
            .iter()
            .map(|m| {
                let mu = m.as_matrix().mul_vec(u);
                u.iter().zip(&mu).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
            })
            .collect();
        MomentPoint { coords }
    }
}

/// A point of `R^t`, the image of a density matrix under `Phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub coords: Vec<f64>,
}

impl MomentPoint {
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.coords.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, other: &MomentPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn compress_family(subspace: &Subspace, basis: &SubalgebraBasis) -> Result<CompressedFamily> {
    if subspace.ambient_dim() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            found: subspace.ambient_dim(),
        });
    }
    let q = subspace.frame();
    let mats = basis.elements().iter().map(|b| b.congruence(q)).collect();
    Ok(CompressedFamily {
        subspace: subspace.clone(),
        mats,
    })
}

/// `coords[k] = tr(R M_k)`, equal to `Phi(Q R Q*)`.
pub fn moment_of_density(fam: &CompressedFamily, rho: &DensityMatrix) -> Result<MomentPoint> {
    rho.as_hermitian().check_dim(fam.rank())?;
    let coords = fam
        .mats
        .iter()
        .map(|m| rho.as_hermitian().trace_pair(m).re)
        .collect();
    Ok(MomentPoint { coords })
}

/// Images of `count` random pure states `Qu u* Q*`, `u` a normalized complex
/// Gaussian. Sample `i` uses seed `seed + i`, so results do not depend on
/// how the work is split across threads.
pub fn sample_extreme(fam: &CompressedFamily, count: usize, seed: u64) -> Vec<MomentPoint> {
    let r = fam.rank();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let mut u: Vec<Complex64> = (0..r)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let norm = vec_norm(&u);
            u.iter_mut().for_each(|z| *z /= norm);
            fam.point_of_unit(&u)
        })
        .collect()
}

/// `h(w) = max_{p in m_S} <w, p> = lambda_max(sum_k w_k M_k)`.
pub fn support_function(fam: &CompressedFamily, w: &[f64]) -> Result<f64> {
    lambda_max(&fam.weighted(w)?)
}

/// Support function of the compressed joint numerical range
/// `W(P_S B_1 P_S, ...) = { eps p : p in m_S, eps in [0, 1] }`.
pub fn jnr_support(fam: &CompressedFamily, w: &[f64]) -> Result<f64> {
    Ok(support_function(fam, w)?.max(0.0))
}

/// Frank-Wolfe settings for moment distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FWConfig {
    /// Stop once the Frank-Wolfe gap (an upper bound on the suboptimality of
    /// `1/2 ||Phi_+ - Phi_-||^2`) falls to this value.
    pub gap_tol: f64,
    /// Distances at or below this value count as an intersection.
    pub dist_tol: f64,
    pub max_iter: usize,
}

impl Default for FWConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            dist_tol: 1e-6,
            max_iter: 20_000,
        }
    }
}

impl FWConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0 && self.dist_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a Frank-Wolfe distance computation between two moments.
#[derive(Debug, Clone, PartialEq)]
pub struct FWResult {
    pub distance: f64,
    /// Witness density matrix in the frame of the first subspace.
    pub witness_plus: DensityMatrix,
    /// Witness density matrix in the frame of the second subspace.
    pub witness_minus: DensityMatrix,
    pub point_plus: MomentPoint,
    pub point_minus: MomentPoint,
    /// Frank-Wolfe gap at the returned iterate.
    pub gap: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit before the stopping rule fired.
    pub converged: bool,
    /// `1/2 distance^2` after each iteration, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

impl FWResult {
    /// Certified lower bound on the true distance: `sqrt(d^2 - 2 gap)`.
    pub fn lower_bound(&self) -> f64 {
        (self.distance * self.distance - 2.0 * self.gap.max(0.0)).max(0.0).sqrt()
    }
}

struct FwState {
    rho: HermitianMatrix,
    point: Vec<f64>,
}

impl FwState {
    fn start(fam: &CompressedFamily) -> Result<Self> {
        let rho = DensityMatrix::maximally_mixed(fam.rank()).into_hermitian();
        let point = fam.mats.iter().map(|m| rho.trace_pair(m).re).collect();
        Ok(Self { rho, point })
    }

    fn step(&mut self, gamma: f64, vertex: &[Complex64], vertex_point: &[f64]) {
        self.rho = self.rho.scale(1.0 - gamma);
        self.rho.add_scaled(gamma, &HermitianMatrix::rank_one(vertex));
        for (p, s) in self.point.iter_mut().zip(vertex_point) {
            *p = (1.0 - gamma) * *p + gamma * s;
        }
    }

    fn finish(self, fam: &CompressedFamily) -> (DensityMatrix, MomentPoint) {
        let tr = self.rho.trace();
        let rho = DensityMatrix::from_trusted(self.rho.scale(1.0 / tr));
        let point = moment_of_density(fam, &rho).expect("dimensions agree");
        (rho, point)
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frank-Wolfe with exact line search on
/// `min 1/2 ||Phi_1(R_1) - Phi_2(R_2)||^2` over pairs of density matrices.
/// `stop(distance, gap)` is consulted before every step.
fn frank_wolfe(
    first: &CompressedFamily,
    second: &CompressedFamily,
    cfg: &FWConfig,
    stop: impl Fn(f64, f64) -> bool,
) -> Result<FWResult> {
    cfg.validate()?;
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            found: second.dim(),
        });
    }
    let mut plus = FwState::start(first)?;
    let mut minus = FwState::start(second)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut gap;

    loop {
        let d: Vec<f64> = plus.point.iter().zip(&minus.point).map(|(a, b)| a - b).collect();
        let d2 = sq_norm(&d);
        trace.push(0.5 * d2);

        // linear minimization: min <d, s_+> over m_1, max <d, s_-> over m_2
        let (low, v_plus) = min_eigpair(&first.weighted(&d)?)?;
        let (high, v_minus) = max_eigpair(&second.weighted(&d)?)?;
        gap = d2 - (low - high);

        if stop(d2.sqrt(), gap) {
            converged = true;
            break;
        }
        if iterations == cfg.max_iter {
            break;
        }

        let s_plus = first.point_of_unit(&v_plus).coords;
        let s_minus = second.point_of_unit(&v_minus).coords;
        let delta: Vec<f64> = (0..d.len())
            .map(|k| (s_plus[k] - plus.point[k]) - (s_minus[k] - minus.point[k]))
            .collect();
        let denom = sq_norm(&delta);
        if denom == 0.0 {
            converged = true;
            break;
        }
        let gamma = (-dot(&d, &delta) / denom).clamp(0.0, 1.0);
        plus.step(gamma, &v_plus, &s_plus);
        minus.step(gamma, &v_minus, &s_minus);
        iterations += 1;
    }

    let (witness_plus, point_plus) = plus.finish(first);
    let (witness_minus, point_minus) = minus.finish(second);
    let distance = point_plus.distance(&point_minus);
    log::debug!(
        "frank-wolfe: distance {distance:e}, gap {gap:e}, {iterations} iterations, converged {converged}"
    );
    Ok(FWResult {
        distance,
        witness_plus,
        witness_minus,
        point_plus,
        point_minus,
        gap,
        iterations,
        converged,
        objective_trace: trace,
    })
}

fn families(
    s1: &Subspace,
    s2: &Subspace,
    basis: &SubalgebraBasis,
) -> Result<(CompressedFamily, CompressedFamily)> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.ambient_dim(),
            found: s2.ambient_dim(),
        });
    }
    Ok((compress_family(s1, basis)?, compress_family(s2, basis)?))
}

/// Euclidean distance between `m_{S1}` and `m_{S2}`, stopping once the gap
/// reaches `cfg.gap_tol` (or at `cfg.max_iter`, with `converged = false`).
pub fn moment_distance(
    s1: &Subspace,
    s2: &Subspace,
    basis: &SubalgebraBasis,
    cfg: &FWConfig,
) -> Result<FWResult> {
    let (f1, f2) = families(s1, s2, basis)?;
    moment_distance_families(&f1, &f2, cfg)
}

pub fn moment_distance_families(
    f1: &CompressedFamily,
    f2: &CompressedFamily,
    cfg: &FWConfig,
) -> Result<FWResult> {
    let gap_tol = cfg.gap_tol;
    frank_wolfe(f1, f2, cfg, |_, gap| gap <= gap_tol)
}

/// Three-valued intersection verdict carried with its Frank-Wolfe data.
#[derive(Debug, Clone, PartialEq)]
pub enum IntersectionVerdict {
    Intersect(FWResult),
    Disjoint(FWResult),
    Undecided(FWResult),
}

impl IntersectionVerdict {
    pub fn result(&self) -> &FWResult {
        match self {
            IntersectionVerdict::Intersect(r)
            | IntersectionVerdict::Disjoint(r)
            | IntersectionVerdict::Undecided(r) => r,
        }
    }
}

fn classify(distance: f64, gap: f64, cfg: &FWConfig) -> Option<bool> {
    if distance <= cfg.dist_tol && gap <= cfg.gap_tol {
        return Some(true);
    }
    let lower = (distance * distance - 2.0 * gap.max(0.0)).max(0.0).sqrt();
    if lower > cfg.dist_tol {
        return Some(false);
    }
    None
}

/// Runs Frank-Wolfe until the gap certificate separates the distance from
/// `cfg.dist_tol` in one direction or the iteration cap is reached.
pub fn intersection_families(
    f1: &CompressedFamily,
    f2: &CompressedFamily,
    cfg: &FWConfig,
) -> Result<IntersectionVerdict> {
    let res = frank_wolfe(f1, f2, cfg, |d, gap| classify(d, gap, cfg).is_some())?;
    Ok(match classify(res.distance, res.gap, cfg) {
        Some(true) => IntersectionVerdict::Intersect(res),
        Some(false) => IntersectionVerdict::Disjoint(res),
        None => IntersectionVerdict::Undecided(res),
    })
}

/// Keeps iterating past the intersection decision until the distance itself
/// reaches `target`, so that witnesses give tight certificates.
pub fn polish_intersection(
    f1: &CompressedFamily,
    f2: &CompressedFamily,
    cfg: &FWConfig,
    target: f64,
) -> Result<FWResult> {
    let t2 = target * target;
    frank_wolfe(f1, f2, cfg, |d, gap| d <= target || d * d - 2.0 * gap > t2)
}

pub fn intersection(
    s1: &Subspace,
    s2: &Subspace,
    basis: &SubalgebraBasis,
    cfg: &FWConfig,
) -> Result<IntersectionVerdict> {
    let (f1, f2) = families(s1, s2, basis)?;
    intersection_families(&f1, &f2, cfg)
}

/// `m_{S1} ∩ m_{S2} != ∅`, or [`Error::Undecided`] when the certificate
/// cannot separate the distance from the tolerance within the budget.
pub fn intersects(s1: &Subspace, s2: &Subspace, basis: &SubalgebraBasis, cfg: &FWConfig) -> Result<bool> {
    match intersection(s1, s2, basis, cfg)? {
        IntersectionVerdict::Intersect(_) => Ok(true),
        IntersectionVerdict::Disjoint(_) => Ok(false),
        IntersectionVerdict::Undecided(r) => Err(Error::Undecided {
            distance: r.distance,
            gap: r.gap,
            iterations: r.iterations,
        }),
    }
}
