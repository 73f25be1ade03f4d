//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. Every criterion has a
//! wall-clock budget that counts towards its verdict.

mod props;

use finsler_plateau::cartan::{
    check_symmetrization_identity, default_z_samples, ellipticity_scan, CartanIntegrand, DEFAULT_ELLIPTICITY_TOL,
    DEFAULT_NODES,
};
use finsler_plateau::gacheck::{binomial_gap, binomial_gap_exact, sufficient_condition, threshold_scan};
use finsler_plateau::metric::{Finsler, MetricSpec, Phi};
use finsler_plateau::plateau::{solve, BoundaryCurve, SolveConfig};
use finsler_plateau::radon::{radon_transform, reciprocity_gap, verify_diff_rule, InversePower, MetricPower};
use finsler_plateau::sampling::{random_unit, sphere_directions};
use nalgebra::Vector3;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: finsler_plateau::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn randers_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let b = random_unit(&mut rng) * rng.random_range(0.0..=0.9);
        let z = random_unit(&mut rng) * rng.random_range(0.1..10.0);
        let ci = lib(CartanIntegrand::new(MetricSpec::randers(b.as_slice())))?;
        let a = lib(ci.value(&Vector3::zeros(), &z))?;
        let c2 = b.norm_squared() - b.dot(&z.normalize()).powi(2);
        let exact = z.norm() * (1.0 - c2).powf(1.5);
        worst = worst.max((a - exact).abs() / exact);
    }
    check(worst <= 1e-9, format!("max relative error {worst:.2e} over 1000 samples"))
}

fn symmetrization() -> Outcome {
    let r = lib(check_symmetrization_identity(
        &lib(CartanIntegrand::new(MetricSpec::randers(&[0.3, 0.0, 0.0])))?,
        200,
        2,
    ))?;
    let m = lib(check_symmetrization_identity(
        &lib(CartanIntegrand::new(MetricSpec::matsumoto(&[0.0, 0.4, 0.0])))?,
        200,
        3,
    ))?;
    check(r.max(m) <= 1e-8, format!("randers {r:.2e}, matsumoto {m:.2e}"))
}

fn thresholds() -> Outcome {
    let cases = [
        (Phi::Randers, 0.9, 1.0 / 3f64.sqrt()),
        (Phi::TwoOrder, 0.6, 1.0 / 10f64.sqrt()),
        (Phi::Matsumoto, 0.9, 0.5),
    ];
    let mut ok = true;
    let mut parts = vec![];
    for (phi, hi, expected) in cases {
        let r = lib(threshold_scan(&phi, 0.0, hi, 1e-4))?;
        ok &= (r.critical_b - expected).abs() <= 0.005;
        parts.push(format!("{} {:.5} (expected {:.5})", r.family, r.critical_b, expected));
    }
    check(ok, parts.join(", "))
}

fn sufficient_implies_direct() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut sufficient, mut skipped, mut violations) = (0, 0, vec![]);
    for case in 0..500 {
        let b = random_unit(&mut rng) * rng.random_range(0.0..0.95);
        let phi = match case % 5 {
            0 => Phi::Randers,
            1 => Phi::TwoOrder,
            2 => Phi::Matsumoto,
            3 => Phi::Polynomial {
                coefficients: vec![1.0, 1.0, rng.random_range(-0.5..0.5)],
            },
            _ => Phi::CuiShen {
                odd_coefficients: vec![rng.random_range(-0.9..0.9)],
                order: 2,
            },
        };
        let spec = MetricSpec::alpha_beta(phi, b.as_slice());
        let ys = sphere_directions(3, 200, spec.axis(&[0.0; 3]).as_deref(), case);
        match sufficient_condition(&spec, 2, &[], &ys, &[]) {
            Ok(r) => {
                sufficient += r.sufficient_cond as usize;
                if r.sufficient_cond && !r.direct_ga {
                    violations.push(format!("{} |b|={:.3}", spec.tag(), b.norm()));
                }
            }
            Err(_) => skipped += 1,
        }
    }
    check(
        violations.is_empty(),
        format!(
            "{sufficient} of 500 satisfy the sufficient condition, {skipped} not evaluable, {} violations {violations:?}",
            violations.len()
        ),
    )
}

fn binomial_gap_criterion() -> Outcome {
    let mut worst = f64::INFINITY;
    for m in 1..=12u32 {
        let hi = if m % 2 == 1 || m == 2 { 1.0 } else { (1.0 / (m - 1) as f64).sqrt() };
        for i in 1..=200 {
            worst = worst.min(lib(binomial_gap(hi * i as f64 / 201.0, m))?);
        }
    }
    let half = BigRational::new(1.into(), 2.into());
    let f2 = lib(binomial_gap_exact(&half, 2))?;
    let f3 = lib(binomial_gap_exact(&half, 3))?;
    let exact = f2 == BigRational::new(3.into(), 4.into()) && f3 == BigRational::new(3.into(), 2.into());
    check(
        worst >= -1e-12 && exact,
        format!("min f = {worst:.3e}; f(1/2,2) = {f2}, f(1/2,3) = {f3}"),
    )
}

fn radon_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spec = MetricSpec::randers(&[0.3, 0.0, 0.0]);
    let ci = lib(CartanIntegrand::new(spec.clone()))?;
    let g = MetricPower::new(&spec, Vector3::zeros(), 2);
    let (mut euclid, mut diff, mut recip): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let z = random_unit(&mut rng) * rng.random_range(0.2..5.0);
        let r = lib(radon_transform(&InversePower { m: 2 }, &z, DEFAULT_NODES))?;
        euclid = euclid.max((r * z.norm() - 1.0).abs());
        let (tau, sigma) = (rng.random_range(0..3), rng.random_range(0..3));
        diff = diff.max(lib(verify_diff_rule(&g, &z, tau, sigma, DEFAULT_NODES))?.residual);
        recip = recip.max(lib(reciprocity_gap(&ci, &Vector3::zeros(), &z))?);
    }
    check(
        euclid <= 1e-12 && diff <= 1e-5 && recip <= 1e-12,
        format!("euclidean {euclid:.1e}, differentiation rule {diff:.1e}, reciprocity {recip:.1e}"),
    )
}

fn plateau_euclidean() -> Outcome {
    let ci = lib(CartanIntegrand::new(MetricSpec::euclidean(3)))?;
    let r = lib(solve(&ci, &lib(BoundaryCurve::circle(1.0))?, &SolveConfig::default()))?;
    let l = r.finsler_boundary_length;
    let slack = (4.0 * PI * r.finsler_area - l * l).abs() / (l * l);
    let area_err = (r.finsler_area - PI).abs() / PI;
    check(
        area_err <= 0.01 && r.conformality_defect <= 1e-3 && slack <= 0.02,
        format!(
            "area {:.6} ({:.2}% off), defect {:.1e}, slack {:.2}%",
            r.finsler_area,
            100.0 * area_err,
            r.conformality_defect,
            100.0 * slack
        ),
    )
}

fn plateau_randers() -> Outcome {
    let ci = lib(CartanIntegrand::new(MetricSpec::randers(&[0.3, 0.0, 0.0])))?;
    let r = lib(solve(&ci, &lib(BoundaryCurve::circle(1.0))?, &SolveConfig::default()))?;
    let upper = 1.015 * PI * 0.91f64.powf(1.5);
    let lower = r.growth.m1 * r.euclidean_area;
    check(
        r.finsler_area <= upper && r.finsler_area >= lower && r.isoperimetric.holds,
        format!(
            "{lower:.5} ≤ area {:.6} ≤ {upper:.5}, isoperimetric {}",
            r.finsler_area, r.isoperimetric.holds
        ),
    )
}

fn lambda_min(b: f64, samples: usize) -> Result<f64, String> {
    let ci = lib(CartanIntegrand::new(MetricSpec::randers(&[b, 0.0, 0.0])))?;
    let zs = default_z_samples(&ci, samples);
    Ok(lib(ellipticity_scan(&ci, &zs, &[], DEFAULT_ELLIPTICITY_TOL))?.lambda_min)
}

fn convexity() -> Outcome {
    let at03 = lambda_min(0.3, 2000)?;
    let at09 = lambda_min(0.9, 2000)?;
    let grid: Vec<f64> = (0..=90).map(|i| 0.01 * i as f64).collect();
    let values = grid
        .iter()
        .map(|&b| lambda_min(b, 400))
        .collect::<Result<Vec<_>, _>>()?;
    let changes: Vec<(f64, f64)> = (1..grid.len())
        .filter(|&i| (values[i - 1] > 0.0) != (values[i] > 0.0))
        .map(|i| (grid[i - 1], grid[i]))
        .collect();
    // closed form of the minimum for Randers: 1 - 3|b|²
    let oracle = (at03 - 0.73).abs().max((at09 - (1.0 - 3.0 * 0.81)).abs());
    let bracketed = changes.len() == 1 && changes[0].0 >= 0.55 && changes[0].1 <= 0.61;
    check(
        at03 > 0.0 && at09 < 0.0 && bracketed,
        format!("λ(0.3) = {at03:.6}, λ(0.9) = {at09:.6}, sign changes {changes:?}, oracle gap {oracle:.1e}"),
    )
}

fn property_suites() -> Outcome {
    let failed: Vec<String> = props::ALL
        .iter()
        .filter_map(|(name, f)| f().err().map(|e| format!("{name}: {e}")))
        .collect();
    check(
        failed.is_empty(),
        format!("{} of {} suites pass {failed:?}", props::ALL.len() - failed.len(), props::ALL.len()),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("randers integrand oracle", 5, randers_oracle),
        ("symmetrization identity", 5, symmetrization),
        ("threshold reproduction", 60, thresholds),
        ("sufficient condition implies (GA)", 60, sufficient_implies_direct),
        ("binomial gap polynomial", 1, binomial_gap_criterion),
        ("radon identities", 10, radon_identities),
        ("plateau, euclidean circle", 120, plateau_euclidean),
        ("plateau, randers circle", 180, plateau_randers),
        ("convexity scan", 60, convexity),
        ("property suites", 600, property_suites),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        failures += !ok as usize;
        println!(
            "{:>2} {} {name}: {detail} [{:.2}s / {budget}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}
