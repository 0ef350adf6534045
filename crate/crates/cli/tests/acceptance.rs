//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use bmin::{cmd_construct, cmd_moment, Remainder};
use bmin_core::eigen::eig_hermitian;
use bmin_core::minimality::{check_minimal, is_support_pair, validate_certificate, MinimalityConfig, Reason, Verdict};
use bmin_core::moment::{compress_family, moment_of_density, support_function, FWConfig};
use bmin_core::variational::{best_approximation, directional_derivative, is_minimal_variational, AffineFamily, SolverConfig};
use bmin_core::{
    change_of_basis, BasisKind, CMatrix, Complex64, DensityMatrix, HermitianMatrix, SubalgebraBasis, Subspace,
};
use common::{constructed_minimal, diagonal_grid_minimum, gaussian_hermitian, oracle_norm, to_nalgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn example_s() -> Subspace {
    Subspace::span_real(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
}

fn rotated_basis() -> SubalgebraBasis {
    let s = FRAC_1_SQRT_2;
    SubalgebraBasis::from_elements(
        3,
        vec![
            HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]),
            HermitianMatrix::diagonal(&[0.0, s, -s]),
            HermitianMatrix::diagonal(&[0.0, s, s]),
        ],
        BasisKind::Custom,
    )
    .unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = d.iter().map(|x| x * x).sum();
    let t = (p.iter().zip(a).zip(&d).map(|((p, a), d)| (p - a) * d).sum::<f64>() / len2).clamp(0.0, 1.0);
    p.iter()
        .zip(a)
        .zip(&d)
        .map(|((p, a), d)| (p - a - t * d).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn density(alpha: f64) -> DensityMatrix {
    DensityMatrix::from_probabilities(&[alpha, 1.0 - alpha]).unwrap()
}

fn moment_segment() -> Outcome {
    let basis = SubalgebraBasis::diagonal(3);
    let rows = parse_csv(&cmd_moment(&example_s(), &basis, 1000, 0).map_err(|e| e.to_string())?);
    let (a, b) = ([0.0, 0.0, 1.0], [0.5, 0.5, 0.0]);
    let worst = rows.iter().map(|p| segment_distance(p, &a, &b)).fold(0.0, f64::max);
    ensure(rows.len() == 1000 && worst <= 1e-9, || format!("segment distance {worst:e}"))?;
    let fam = compress_family(&example_s(), &basis).unwrap();
    let e0 = max_diff(&moment_of_density(&fam, &density(0.0)).unwrap().coords, &a);
    let e1 = max_diff(&moment_of_density(&fam, &density(1.0)).unwrap().coords, &b);
    ensure(e0 <= 1e-12 && e1 <= 1e-12, || format!("endpoint errors {e0:e}, {e1:e}"))?;
    Ok(format!("max segment distance {worst:.1e}, endpoint error {:.1e}", e0.max(e1)))
}

fn rotated_moment() -> Outcome {
    let e = SubalgebraBasis::diagonal(3);
    let b = rotated_basis();
    let c = change_of_basis(&e, &b).map_err(|e| e.to_string())?;
    let s = FRAC_1_SQRT_2;
    let expected = [[1.0, 0.0, 0.0], [0.0, s, -s], [0.0, s, s]];
    let entry_err = c.matrix.iter().zip(expected).map(|(r, x)| max_diff(r, &x)).fold(0.0, f64::max);
    ensure(entry_err <= 1e-12, || format!("rotation entry error {entry_err:e}"))?;
    let under_e = parse_csv(&cmd_moment(&example_s(), &e, 200, 5).unwrap());
    let under_b = parse_csv(&cmd_moment(&example_s(), &b, 200, 5).unwrap());
    let point_err = under_e
        .iter()
        .zip(&under_b)
        .map(|(pe, pb)| max_diff(&c.apply(pe), pb))
        .fold(0.0, f64::max);
    ensure(point_err <= 1e-10, || format!("transformed point error {point_err:e}"))?;
    Ok(format!("entry error {entry_err:.1e}, point error {point_err:.1e}"))
}

/// `lambda` times the swap of `e1, e2` plus the identity on `e3`.
fn m_lambda(lambda: f64) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]])
        .unwrap()
        .scale(lambda)
}

fn swap_minimality() -> Outcome {
    let basis = SubalgebraBasis::diagonal(3);
    let mut worst = (0.0f64, 0.0f64);
    for lambda in [1.0, 2.5] {
        let a = m_lambda(lambda);
        let r = check_minimal(&a, &basis, &MinimalityConfig::default()).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Minimal, || format!("lambda {lambda}: {:?}", r.verdict))?;
        let cert = r.certificate.ok_or("no certificate")?;
        ensure(validate_certificate(&a, &cert.x, &basis, 1e-8).unwrap(), || "certificate rejected".into())?;
        ensure(cert.residual_eq <= 1e-8 && cert.residual_perp <= 1e-10, || {
            format!("lambda {lambda}: residuals {:e}, {:e}", cert.residual_eq, cert.residual_perp)
        })?;
        worst = (worst.0.max(cert.residual_eq), worst.1.max(cert.residual_perp));
    }
    Ok(format!("residual_eq {:.1e}, residual_perp {:.1e}", worst.0, worst.1))
}

fn pauli_moments() -> Outcome {
    let fam = compress_family(&Subspace::coordinate(4, &[0, 1]).unwrap(), &SubalgebraBasis::pauli_diagonal(2)).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 0.5, 1.0] {
        let p = moment_of_density(&fam, &density(alpha)).unwrap();
        let a = 2.0 * alpha - 1.0;
        worst = worst.max(max_diff(&p.coords, &[0.5, 0.5, 0.5 * a, 0.5 * a]));
    }
    ensure(worst <= 1e-12, || format!("error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn block_pair() -> (Subspace, Subspace) {
    (
        Subspace::span_real(&[vec![0.5, 0.5, 0.5, 0.5]]).unwrap(),
        Subspace::span_real(&[vec![-0.5, -0.5, 0.5, 0.5]]).unwrap(),
    )
}

/// `lambda (P_V - P_W) + mu (I - P_V - P_W)` for the block example.
fn m_block(lambda: f64, mu: f64) -> HermitianMatrix {
    let (v, w) = block_pair();
    let (pv, pw) = (v.projector(), w.projector());
    pv.sub(&pw)
        .scale(lambda)
        .add(&HermitianMatrix::identity(4).sub(&pv).sub(&pw).scale(mu))
}

fn block_example() -> Outcome {
    let basis = SubalgebraBasis::block(&"2d,2f".parse().unwrap());
    let s = FRAC_1_SQRT_2;
    let mut expected: Vec<CMatrix> = (0..4)
        .map(|i| {
            let mut d = [0.0; 4];
            d[i] = 1.0;
            HermitianMatrix::diagonal(&d).into_matrix()
        })
        .collect();
    let mut w34 = CMatrix::zeros(4, 4);
    w34[(2, 3)] = Complex64::new(s, 0.0);
    w34[(3, 2)] = Complex64::new(s, 0.0);
    let mut w43 = CMatrix::zeros(4, 4);
    w43[(2, 3)] = Complex64::new(0.0, -s);
    w43[(3, 2)] = Complex64::new(0.0, s);
    expected.extend([w34, w43]);
    ensure(basis.dim() == 6, || format!("dimension {}", basis.dim()))?;
    let elem_err = basis
        .elements()
        .iter()
        .zip(&expected)
        .map(|(b, e)| (b.as_matrix() - e).max_abs())
        .fold(0.0, f64::max);
    ensure(elem_err <= 1e-15, || format!("basis element error {elem_err:e}"))?;

    let fw = FWConfig::default();
    let (v, w) = block_pair();
    ensure(is_support_pair(&v, &w, &basis, &fw).unwrap(), || "not a support pair".into())?;

    let built = cmd_construct(&v, &w, 1.0, Remainder::Scalar(0.5), &basis, &fw).map_err(|e| e.to_string())?;
    let m_half = built.to_hermitian().unwrap();
    ensure(m_half.sub(&m_block(1.0, 0.5)).frobenius_norm() < 1e-14, || "construct mismatch".into())?;
    let r = check_minimal(&m_half, &basis, &MinimalityConfig::default()).unwrap();
    ensure(r.verdict == Verdict::Minimal, || format!("M(1, 1/2): {:?}", r.verdict))?;

    let r = check_minimal(&m_block(1.0, 2.0), &basis, &MinimalityConfig::default()).unwrap();
    ensure(r.verdict == Verdict::NotMinimal && r.reason == Reason::NormNotTwoSided, || {
        format!("M(1, 2): {:?} / {:?}", r.verdict, r.reason)
    })?;
    Ok("six elements, support pair, M(1,1/2) minimal, M(1,2) norm_not_two_sided".into())
}

/// Suite of normalized 3x3 matrices for the grid comparison: generic,
/// constructed minimal, and perturbed constructed ones. Generic draws whose
/// grid minimum lands strictly inside the slack band are redrawn.
fn grid_suite(count: u64) -> (Vec<(HermitianMatrix, f64)>, usize) {
    let slack = 0.02 * 3f64.sqrt() * 2.0;
    let mut skipped = 0;
    let suite = (0..count)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let a = match seed % 3 {
                    0 => gaussian_hermitian(&mut rng, 3),
                    1 => constructed_minimal(&mut rng),
                    _ => {
                        let d: Vec<f64> = (0..3)
                            .map(|_| rng.random_range(0.5..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                            .collect();
                        constructed_minimal(&mut rng).add(&HermitianMatrix::diagonal(&d))
                    }
                };
                let a = a.scale(1.0 / oracle_norm(&a));
                // step 0.02 on [-||A||, ||A||]^3 with ||A|| = 1
                let grid = diagonal_grid_minimum(&a, 1.0, 100);
                let in_band = grid < 1.0 - 1e-9 && grid >= 1.0 - slack;
                if in_band && seed % 3 == 0 {
                    skipped += 1;
                    continue;
                }
                return (a, grid);
            }
        })
        .collect();
    (suite, skipped)
}

fn grid_agreement() -> Outcome {
    let slack = 0.02 * 3f64.sqrt() * 2.0;
    let basis = SubalgebraBasis::diagonal(3);
    let (suite, skipped) = grid_suite(25);
    let mut disagreements = Vec::new();
    let mut minimal = 0;
    for (seed, (a, grid)) in suite.iter().enumerate() {
        let r = check_minimal(a, &basis, &MinimalityConfig::default()).unwrap();
        let oracle = grid >= &(1.0 - slack);
        if r.verdict == Verdict::Minimal {
            minimal += 1;
        }
        if (r.verdict == Verdict::Minimal) != oracle || r.verdict == Verdict::Undecided {
            disagreements.push(format!("seed {seed}: {:?} vs grid {grid:.4}", r.verdict));
        }
    }
    ensure(disagreements.is_empty(), || disagreements.join("; "))?;
    Ok(format!("25 instances, {minimal} minimal, 0 disagreements, {skipped} band draws redrawn"))
}

fn families() -> Vec<(AffineFamily, Vec<f64>, bool)> {
    (0..20u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = 3 + (seed % 2) as usize;
            let basis = match (n, seed % 3) {
                (4, 0) => SubalgebraBasis::pauli_diagonal(2),
                (4, 1) => SubalgebraBasis::block(&"2d,2f".parse().unwrap()),
                (_, 2) => SubalgebraBasis::block(&format!("1d,{}f", n - 1).parse().unwrap()),
                _ => SubalgebraBasis::diagonal(n),
            };
            let x: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut a0 = gaussian_hermitian(&mut rng, n);
            let doubled = seed % 4 == 0;
            if doubled {
                // A(x) = U diag(.., 2, 2) U*
                let d = eig_hermitian(&a0).unwrap();
                let mut weights: Vec<f64> = (0..n).map(|i| i as f64 * 0.3 - 1.0).collect();
                weights[n - 2] = 2.0;
                weights[n - 1] = 2.0;
                let shift = basis.combine(&x).unwrap();
                a0 = d.reconstruct_weights(&weights).sub(&shift);
            }
            (AffineFamily::new(a0, basis).unwrap(), x, doubled)
        })
        .collect()
}

/// `m_{S_max}` support at `w`, with the top eigenspace taken from nalgebra.
fn top_moment_support(fam: &AffineFamily, x: &[f64], w: &[f64]) -> f64 {
    let a = fam.evaluate(x).unwrap();
    let eig = to_nalgebra(&a).symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tau = 1e-8 * oracle_norm(&a).max(1.0);
    let cols: Vec<Vec<Complex64>> = (0..a.dim())
        .filter(|&j| eig.eigenvalues[j] >= top - tau)
        .map(|j| eig.eigenvectors.column(j).iter().cloned().collect())
        .collect();
    let fam_top = compress_family(&Subspace::span(&cols).unwrap(), fam.basis()).unwrap();
    support_function(&fam_top, w).unwrap()
}

fn lambda_max_at(fam: &AffineFamily, x: &[f64]) -> f64 {
    common::oracle_lambda_max(&fam.evaluate(x).unwrap())
}

fn subdifferential() -> Outcome {
    let h = 1e-6;
    let (mut fd_worst, mut sup_worst) = (0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (k, (fam, x, doubled)) in families().iter().enumerate() {
        for _ in 0..20 {
            let w: Vec<f64> = (0..fam.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dd = directional_derivative(fam, x, &w).unwrap();
            let sup = (dd - top_moment_support(fam, x, &w)).abs();
            sup_worst = sup_worst.max(sup);
            ensure(sup <= 1e-9, || format!("family {k}: support mismatch {sup:e}"))?;
            if !doubled {
                let plus: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a + h * b).collect();
                let minus: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a - h * b).collect();
                let fd = (lambda_max_at(fam, &plus) - lambda_max_at(fam, &minus)) / (2.0 * h);
                fd_worst = fd_worst.max((fd - dd).abs());
                ensure((fd - dd).abs() <= 1e-5, || format!("family {k}: finite difference off by {:e}", (fd - dd).abs()))?;
            }
        }
    }
    Ok(format!("20 families, finite-difference error {fd_worst:.1e}, support error {sup_worst:.1e}"))
}

fn route_agreement() -> Outcome {
    let diag = SubalgebraBasis::diagonal(3);
    let block = SubalgebraBasis::block(&"2d,2f".parse().unwrap());
    let mut cases: Vec<(HermitianMatrix, SubalgebraBasis)> = vec![
        (m_lambda(1.0), diag.clone()),
        (m_lambda(2.5), diag.clone()),
        (m_block(1.0, 0.5), block.clone()),
        (m_block(1.0, 2.0), block),
    ];
    cases.extend(grid_suite(25).0.into_iter().map(|(a, _)| (a, diag.clone())));
    let cfg = MinimalityConfig::default();
    for (k, (a, basis)) in cases.iter().enumerate() {
        let direct = check_minimal(a, basis, &cfg).unwrap().verdict;
        let fam = AffineFamily::new(a.clone(), basis.clone()).unwrap();
        let variational = is_minimal_variational(&fam, &vec![0.0; basis.dim()], &cfg).unwrap().verdict;
        ensure(direct == variational, || format!("case {k}: {direct:?} vs {variational:?}"))?;
    }
    Ok(format!("{} cases, identical verdicts", cases.len()))
}

fn best_approx() -> Outcome {
    let cfg = SolverConfig::default();
    let sx = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let fam = AffineFamily::new(sx, SubalgebraBasis::diagonal(2)).unwrap();
    let mut report = Vec::new();
    for x0 in [vec![0.0, 0.0], vec![1.0, -1.0]] {
        let r = best_approximation(&fam, &x0, &cfg).map_err(|e| e.to_string())?;
        let xn = r.x_star.iter().map(|x| x * x).sum::<f64>().sqrt();
        ensure((r.dist - 1.0).abs() <= 0.02 && xn <= 0.05, || {
            format!("x0 {x0:?}: dist {}, |x*| {xn}", r.dist)
        })?;
        report.push(format!("dist {:.6}", r.dist));
    }
    let inside = [
        (HermitianMatrix::diagonal(&[1.0, 2.0]), SubalgebraBasis::diagonal(2)),
        (HermitianMatrix::diagonal(&[0.5, -3.0, 2.0]), SubalgebraBasis::diagonal(3)),
        (
            SubalgebraBasis::pauli_diagonal(2).combine(&[0.3, -1.0, 2.0, 0.7]).unwrap(),
            SubalgebraBasis::pauli_diagonal(2),
        ),
    ];
    for (a, basis) in inside {
        let fam = AffineFamily::new(a, basis).unwrap();
        let r = best_approximation(&fam, &vec![0.0; fam.dim()], &cfg).unwrap();
        ensure(r.dist <= 1e-6, || format!("A0 in B: dist {}", r.dist))?;
    }
    report.push("A0 in B: dist <= 1e-6".into());
    Ok(report.join(", "))
}

fn eigensolver_suite() -> Outcome {
    let (mut rec, mut uni) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let n = 1 + (seed % 12) as usize;
        let a = gaussian_hermitian(&mut rng, n);
        let d = eig_hermitian(&a).map_err(|e| e.to_string())?;
        rec = rec.max(d.reconstruct_with(|l| l).sub(&a).frobenius_norm());
        uni = uni.max((&(&d.vectors.adjoint() * &d.vectors) - &CMatrix::identity(n)).frobenius_norm());
    }
    ensure(rec <= 1e-10 && uni <= 1e-10, || format!("reconstruction {rec:e}, unitarity {uni:e}"))?;
    Ok(format!("100 matrices, reconstruction {rec:.1e}, unitarity {uni:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, f64); 10] = [
        ("moment segment", moment_segment, 1.0),
        ("rotated basis", rotated_moment, 1.0),
        ("swap matrix minimality", swap_minimality, 2.0),
        ("Pauli moments", pauli_moments, 1.0),
        ("block algebra", block_example, 2.0),
        ("grid oracle agreement", grid_agreement, 60.0),
        ("subdifferential consistency", subdifferential, 30.0),
        ("route agreement", route_agreement, 60.0),
        ("best approximation", best_approx, 10.0),
        ("eigensolver suite", eigensolver_suite, 30.0),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|msg| {
            if secs <= *budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {secs:.2} s, budget {budget} s"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.2} s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.2} s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
