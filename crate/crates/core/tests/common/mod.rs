//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use bmin_core::{CMatrix, Complex64, HermitianMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_hermitian<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    HermitianMatrix::symmetrize(&m)
}

pub fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn to_nalgebra(h: &HermitianMatrix) -> DMatrix<Complex64> {
    let n = h.dim();
    DMatrix::from_fn(n, n, |i, j| h.get(i, j))
}

/// Ascending eigenvalues from nalgebra's Hermitian eigensolver.
pub fn oracle_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = to_nalgebra(h).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn oracle_norm(h: &HermitianMatrix) -> f64 {
    oracle_eigenvalues(h).iter().fold(0.0, |m, l| m.max(l.abs()))
}

pub fn oracle_lambda_max(h: &HermitianMatrix) -> f64 {
    *oracle_eigenvalues(h).last().unwrap()
}

/// Hermitian matrices of size `1..=max_n` with entries in `[-scale, scale]`.
pub fn hermitian_strategy(max_n: usize, scale: f64) -> impl Strategy<Value = HermitianMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-scale..scale, 2 * n * n).prop_map(move |v| {
            let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
            HermitianMatrix::symmetrize(&m)
        })
    })
}

pub fn hermitian_of_dim(n: usize, scale: f64) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-scale..scale, 2 * n * n).prop_map(move |v| {
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
        HermitianMatrix::symmetrize(&m)
    })
}

pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).max_abs()
}

/// Unit vector in `C^3` whose squared moduli are all at most `cap`.
pub fn balanced_unit<R: Rng>(rng: &mut R, cap: f64) -> Vec<Complex64> {
    loop {
        let v = random_unit(rng, 3);
        if v.iter().all(|z| z.norm_sqr() <= cap) {
            return v;
        }
    }
}

/// `w ⊥ v` with `|w_i| = |v_i|`: the squared moduli close a triangle, whose
/// angles (law of cosines) give the relative phases.
pub fn equal_moduli_partner(v: &[Complex64]) -> Vec<Complex64> {
    let (a, b, c) = (v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr());
    let cos2 = ((c * c - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let e2 = Complex64::from_polar(1.0, cos2.acos());
    let e3 = -(Complex64::new(a, 0.0) + e2 * b) / c;
    let phases = [Complex64::new(1.0, 0.0), e2, e3 / e3.norm()];
    // sum conj(v_i) w_i = sum |v_i|^2 phase_i = 0
    v.iter().zip(phases).map(|(z, p)| z * p).collect()
}

/// `vv* - ww* + mu uu*` with `u ⊥ v, w`: minimal for the diagonal algebra, norm 1.
pub fn constructed_minimal<R: Rng>(rng: &mut R) -> HermitianMatrix {
    let v = balanced_unit(rng, 0.45);
    let w = equal_moduli_partner(&v);
    // u spans the orthogonal complement of {v, w}
    let cross: Vec<Complex64> = vec![
        v[1] * w[2] - v[2] * w[1],
        v[2] * w[0] - v[0] * w[2],
        v[0] * w[1] - v[1] * w[0],
    ]
    .into_iter()
    .map(|z| z.conj())
    .collect();
    let norm = cross.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<Complex64> = cross.iter().map(|z| z / norm).collect();
    let mu: f64 = rng.random_range(-0.9..0.9);
    let mut a = HermitianMatrix::rank_one(&v).sub(&HermitianMatrix::rank_one(&w));
    a.add_scaled(mu, &HermitianMatrix::rank_one(&u));
    a
}

/// Grid minimum of `||A + diag(d)||` over `d in [-r, r]^3` with `steps + 1`
/// points per axis, using the closed-form 3x3 Hermitian spectrum.
pub fn diagonal_grid_minimum(a: &HermitianMatrix, r: f64, steps: usize) -> f64 {
    let h = 2.0 * r / steps as f64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let d = [-r + h * i as f64, -r + h * j as f64, -r + h * k as f64];
                best = best.min(norm3(a, d));
            }
        }
    }
    best
}

/// Spectral norm of `A + diag(d)` for 3x3 Hermitian `A` via the trigonometric
/// solution of the characteristic cubic.
pub fn norm3(a: &HermitianMatrix, d: [f64; 3]) -> f64 {
    let (l1, _, l3) = eig3(
        [a.get(0, 0).re + d[0], a.get(1, 1).re + d[1], a.get(2, 2).re + d[2]],
        [a.get(0, 1), a.get(0, 2), a.get(1, 2)],
    );
    l1.abs().max(l3.abs())
}

/// Eigenvalues (ascending) of the Hermitian matrix with the given diagonal and
/// upper entries `(a01, a02, a12)`.
pub fn eig3(diag: [f64; 3], off: [Complex64; 3]) -> (f64, f64, f64) {
    let q = (diag[0] + diag[1] + diag[2]) / 3.0;
    let p1 = off[0].norm_sqr() + off[1].norm_sqr() + off[2].norm_sqr();
    let p2 = (diag[0] - q).powi(2) + (diag[1] - q).powi(2) + (diag[2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return (q, q, q);
    }
    // det((A - qI) / p)
    let b = [(diag[0] - q) / p, (diag[1] - q) / p, (diag[2] - q) / p];
    let (x, y, z) = (off[0] / p, off[1] / p, off[2] / p);
    let det = b[0] * b[1] * b[2] + 2.0 * (x * z * y.conj()).re
        - b[0] * z.norm_sqr()
        - b[1] * y.norm_sqr()
        - b[2] * x.norm_sqr();
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l3 = q + 2.0 * p * phi.cos();
    let l1 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    (l1, 3.0 * q - l1 - l3, l3)
}
