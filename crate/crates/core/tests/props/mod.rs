//! Invariants shared by the `properties` and `acceptance` test targets.
//!
//! Each check drives a deterministic proptest runner and returns the shrunk
//! counterexample on failure.

use finsler_plateau::cartan::{growth_bounds, CartanIntegrand};
use finsler_plateau::gacheck::{binomial_gap, binomial_gap_exact};
use finsler_plateau::metric::{Drift, Finsler, MetricSpec, ReversibleBase};
use finsler_plateau::plateau::energy::{add_dirichlet_gradient, rotate_parameters};
use finsler_plateau::plateau::{
    discrete_dirichlet, discrete_finsler_area, finsler_area_gradient, finsler_length, generate_disk_mesh,
    BoundaryCurve, DiskMesh,
};
use finsler_plateau::radon::{radon_transform, FnHomogeneous, InversePower, MetricPower};
use nalgebra::{Rotation3, Vector3};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Check = fn() -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    ("metric_homogeneity", metric_homogeneity),
    ("metric_euler_identity", metric_euler_identity),
    ("integrand_homogeneity", integrand_homogeneity),
    ("integrand_basis_independence", integrand_basis_independence),
    ("integrand_euler_identity", integrand_euler_identity),
    ("integrand_gradient_vs_fd", integrand_gradient_vs_fd),
    ("integrand_parity", integrand_parity),
    ("integrand_sandwich", integrand_sandwich),
    ("quadrature_refinement", quadrature_refinement),
    ("radon_degree_and_linearity", radon_degree_and_linearity),
    ("binomial_gap_nonnegative", binomial_gap_nonnegative),
    ("mesh_topology", mesh_topology),
    ("area_gradient_vs_fd", area_gradient_vs_fd),
    ("descent_direction", descent_direction),
    ("dirichlet_dominates_area", dirichlet_dominates_area),
    ("area_parametrization_invariance", area_parametrization_invariance),
    ("closed_curve_drift_invariance", closed_curve_drift_invariance),
];

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn lib(e: finsler_plateau::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn unit() -> impl Strategy<Value = Vector3<f64>> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
        .prop_map(Vector3::from)
        .prop_filter("away from zero", |v| v.norm() > 0.1)
        .prop_map(|v| v.normalize())
}

fn vector() -> impl Strategy<Value = Vector3<f64>> {
    (unit(), 0.05..5.0f64).prop_map(|(u, r)| u * r)
}

/// Metrics that are Finsler for every generated parameter.
fn metric() -> impl Strategy<Value = MetricSpec> {
    let drift = |max: f64| (unit(), 0.0..max).prop_map(|(u, r)| u * r);
    prop_oneof![
        drift(0.8).prop_map(|b| MetricSpec::randers(b.as_slice())),
        drift(0.3).prop_map(|b| MetricSpec::two_order(b.as_slice())),
        drift(0.45).prop_map(|b| MetricSpec::matsumoto(b.as_slice())),
        (0.0..0.3f64).prop_map(|e| MetricSpec::perturbed_quartic(3, e)),
        (drift(0.3), unit()).prop_map(|(b, k)| MetricSpec::composite(
            3,
            ReversibleBase::Euclidean,
            Drift::Sinusoidal {
                offset: b.as_slice().to_vec(),
                amplitude: vec![0.1, 0.0, 0.1],
                wavevector: k.as_slice().to_vec(),
            },
        )),
    ]
}

fn point() -> impl Strategy<Value = Vector3<f64>> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64].prop_map(Vector3::from)
}

fn integrand(spec: MetricSpec) -> CartanIntegrand<MetricSpec> {
    CartanIntegrand::with_nodes(spec, 128).expect("three-dimensional metric")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn metric_homogeneity() -> Result<(), String> {
    run(256, (metric(), point(), vector(), 0.01..100.0f64), |(f, x, y, t)| {
        let a = f.value(x.as_slice(), (y * t).as_slice()).map_err(lib)?;
        let b = t * f.value(x.as_slice(), y.as_slice()).map_err(lib)?;
        prop_assert!(rel(a, b) < 1e-12, "F(ty) = {a}, tF(y) = {b}");
        Ok(())
    })
}

pub fn metric_euler_identity() -> Result<(), String> {
    run(256, (metric(), point(), vector()), |(f, x, y)| {
        let d = f.derivatives(x.as_slice(), y.as_slice()).map_err(lib)?;
        let yv = nalgebra::DVector::from_column_slice(y.as_slice());
        prop_assert!(rel(d.gradient.dot(&yv), d.value) < 1e-12);
        prop_assert!((&d.hessian * &yv).amax() < 1e-10 * d.hessian.amax().max(1.0));
        Ok(())
    })
}

pub fn integrand_homogeneity() -> Result<(), String> {
    run(128, (metric(), point(), vector(), 0.01..100.0f64), |(f, x, z, t)| {
        let ci = integrand(f);
        let a = ci.value(&x, &(z * t)).map_err(lib)?;
        let b = t * ci.value(&x, &z).map_err(lib)?;
        prop_assert!(rel(a, b) < 1e-12);
        Ok(())
    })
}

pub fn integrand_basis_independence() -> Result<(), String> {
    run(128, (metric(), point(), vector(), 0.0..std::f64::consts::TAU), |(f, x, z, phi)| {
        let ci = integrand(f);
        let (f1, f2) = finsler_plateau::sampling::orthonormal_complement(&z);
        let rot = Rotation3::new(z.normalize() * phi);
        let a = ci.value(&x, &z).map_err(lib)?;
        let b = ci.value_with_basis(&x, &z, &(rot * f1), &(rot * f2)).map_err(lib)?;
        // reversed orientation as well
        let c = ci.value_with_basis(&x, &z, &(rot * f2), &(rot * f1)).map_err(lib)?;
        prop_assert!(rel(a, b) < 1e-10 && rel(a, c) < 1e-10, "{a} {b} {c}");
        Ok(())
    })
}

pub fn integrand_euler_identity() -> Result<(), String> {
    run(64, (metric(), point(), vector()), |(f, x, z)| {
        let ci = integrand(f);
        let (a, g) = ci.value_gradient(&x, &z).map_err(lib)?;
        prop_assert!(rel(g.dot(&z), a) < 1e-10);
        let d = ci.derivs(&x, &z).map_err(lib)?;
        let scale = d.hessian.amax().max(1.0 / z.norm());
        prop_assert!((d.hessian * z).amax() < 1e-4 * scale * z.norm());
        Ok(())
    })
}

pub fn integrand_gradient_vs_fd() -> Result<(), String> {
    run(64, (metric(), point(), vector()), |(f, x, z)| {
        let ci = integrand(f);
        let (_, g) = ci.value_gradient(&x, &z).map_err(lib)?;
        let h = 1e-6 * z.norm();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            let fd = (ci.value(&x, &(z + e)).map_err(lib)? - ci.value(&x, &(z - e)).map_err(lib)?) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g.amax()), "component {i}: {fd} vs {}", g[i]);
        }
        Ok(())
    })
}

/// `A(Z) = A(-Z)`, and for constant-drift metrics flipping the drift leaves
/// the integrand unchanged.
pub fn integrand_parity() -> Result<(), String> {
    run(128, (unit(), 0.0..0.85f64, vector()), |(u, r, z)| {
        let b = u * r;
        let x = Vector3::zeros();
        let plus = integrand(MetricSpec::randers(b.as_slice()));
        let minus = integrand(MetricSpec::randers((-b).as_slice()));
        let a = plus.value(&x, &z).map_err(lib)?;
        prop_assert!(rel(plus.value(&x, &(-z)).map_err(lib)?, a) < 1e-12);
        prop_assert!(rel(minus.value(&x, &z).map_err(lib)?, a) < 1e-12);
        Ok(())
    })
}

pub fn integrand_sandwich() -> Result<(), String> {
    run(24, (metric(), proptest::collection::vec(vector(), 8)), |(f, zs)| {
        let ci = integrand(f);
        let xs: Vec<Vector3<f64>> = (0..4).map(|k| Vector3::new(0.3 * k as f64, -0.2, 0.1)).collect();
        let gb = growth_bounds(&ci, &xs, 500).map_err(lib)?;
        for x in &xs {
            for z in &zs {
                let a = ci.value(x, z).map_err(lib)?;
                // sampled bounds may miss the extremes slightly
                prop_assert!(a >= gb.m1 * z.norm() * (1.0 - 1e-3), "{a} < {} |Z|", gb.m1);
                prop_assert!(a <= gb.m2 * z.norm() * (1.0 + 1e-3), "{a} > {} |Z|", gb.m2);
            }
        }
        Ok(())
    })
}

/// Trapezoid error against the closed form falls as the node count grows.
pub fn quadrature_refinement() -> Result<(), String> {
    run(64, (unit(), 0.5..0.95f64, vector()), |(u, r, z)| {
        let b = u * r;
        let c2 = b.norm_squared() - b.dot(&z.normalize()).powi(2);
        let exact = z.norm() * (1.0 - c2).powf(1.5);
        let err = |n: usize| -> Result<f64, TestCaseError> {
            let ci = CartanIntegrand::with_nodes(MetricSpec::randers(b.as_slice()), n).map_err(lib)?;
            Ok(rel(ci.value(&Vector3::zeros(), &z).map_err(lib)?, exact))
        };
        let (e16, e32, e256) = (err(16)?, err(32)?, err(256)?);
        prop_assert!(e32 <= e16 + 1e-15 && e256 <= e32 + 1e-15, "{e16} {e32} {e256}");
        prop_assert!(e256 < 1e-9);
        Ok(())
    })
}

pub fn radon_degree_and_linearity() -> Result<(), String> {
    run(128, (unit(), 0.0..0.8f64, vector(), 0.1..10.0f64, -2.0..2.0f64), |(u, r, z, t, c)| {
        let spec = MetricSpec::randers((u * r).as_slice());
        let g = MetricPower::new(&spec, Vector3::zeros(), 2);
        let e = InversePower { m: 2 };
        let rg = radon_transform(&g, &z, 256).map_err(lib)?;
        prop_assert!(rel(radon_transform(&g, &(z * t), 256).map_err(lib)?, rg / t) < 1e-12);
        let combo = FnHomogeneous::new(-2.0, |y: &Vector3<f64>| {
            let f = spec.value(&[0.0; 3], y.as_slice()).unwrap_or(f64::NAN);
            f.powi(-2) + c * y.norm_squared().recip()
        });
        let lhs = radon_transform(&combo, &z, 256).map_err(lib)?;
        let rhs = rg + c * radon_transform(&e, &z, 256).map_err(lib)?;
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        Ok(())
    })
}

pub fn binomial_gap_nonnegative() -> Result<(), String> {
    run(512, (1u32..=12, 1u32..1000), |(m, k)| {
        let hi = if m % 2 == 1 || m == 2 { 1000 } else { (1000.0 / ((m - 1) as f64).sqrt()).floor() as u32 };
        let a = BigRational::new(((k % hi).max(1)).into(), 1000.into());
        let exact = binomial_gap_exact(&a, m).map_err(lib)?;
        prop_assert!(exact >= BigRational::from_integer(0.into()));
        let float = binomial_gap(a.to_f64().unwrap(), m).map_err(lib)?;
        prop_assert!((float - exact.to_f64().unwrap()).abs() < 1e-12 * (1.0 + float.abs()));
        Ok(())
    })
}

pub fn mesh_topology() -> Result<(), String> {
    run(16, 1usize..=20, |rings| {
        let m = generate_disk_mesh(rings).map_err(lib)?;
        prop_assert_eq!(m.vertex_count(), 1 + 3 * rings * (rings + 1));
        prop_assert_eq!(m.triangles.len(), 6 * rings * rings);
        prop_assert_eq!(m.euler_characteristic(), 1);
        prop_assert_eq!(m.boundary.len(), 6 * rings);
        Ok(())
    })
}

/// A disk mesh bent into a random smooth surface.
fn bent_mesh() -> impl Strategy<Value = DiskMesh> {
    (2usize..=5, -0.5..0.5f64, -0.5..0.5f64, 0.5..1.5f64).prop_map(|(rings, a, b, s)| {
        let mesh = generate_disk_mesh(rings).unwrap();
        finsler_plateau::plateau::energy::map_vertices(&mesh, |p| {
            Vector3::new(s * p[0], p[1] + 0.1 * p[0] * p[1], a * p[0] * p[0] + b * p[1] * p[1])
        })
    })
}

pub fn area_gradient_vs_fd() -> Result<(), String> {
    run(16, (metric(), bent_mesh(), any::<prop::sample::Index>()), |(f, mesh, idx)| {
        let ci = integrand(f);
        let (_, grad) = finsler_area_gradient(&ci, &mesh).map_err(lib)?;
        let v = idx.index(mesh.vertex_count());
        let h = 1e-6;
        for i in 0..3 {
            let mut p = mesh.clone();
            let mut q = mesh.clone();
            p.x[v][i] += h;
            q.x[v][i] -= h;
            let fd = (discrete_finsler_area(&ci, &p).map_err(lib)? - discrete_finsler_area(&ci, &q).map_err(lib)?)
                / (2.0 * h);
            prop_assert!((fd - grad[v][i]).abs() < 1e-6, "vertex {v} axis {i}: {fd} vs {}", grad[v][i]);
        }
        Ok(())
    })
}

/// A small step against the gradient of `area + ε D` decreases it.
pub fn descent_direction() -> Result<(), String> {
    run(16, (metric(), bent_mesh(), 1e-4..1e-1f64), |(f, mesh, eps)| {
        let ci = integrand(f);
        let objective = |m: &DiskMesh| -> Result<f64, TestCaseError> {
            Ok(discrete_finsler_area(&ci, m).map_err(lib)? + eps * discrete_dirichlet(m))
        };
        let (_, mut grad) = finsler_area_gradient(&ci, &mesh).map_err(lib)?;
        add_dirichlet_gradient(&mesh, eps, &mut grad);
        let gg: f64 = grad.iter().map(|g| g.norm_squared()).sum();
        prop_assume!(gg > 1e-12);
        let e0 = objective(&mesh)?;
        let mut alpha = 0.1;
        let mut stepped = mesh.clone();
        for _ in 0..30 {
            for ((s, x), g) in stepped.x.iter_mut().zip(&mesh.x).zip(&grad) {
                *s = x - g * alpha;
            }
            if objective(&stepped)? <= e0 - 1e-4 * alpha * gg {
                return Ok(());
            }
            alpha *= 0.5;
        }
        Err(TestCaseError::fail("no Armijo step found along the negative gradient"))
    })
}

/// Dirichlet energy bounds the Euclidean area from above.
pub fn dirichlet_dominates_area() -> Result<(), String> {
    run(32, bent_mesh(), |mesh| {
        prop_assert!(discrete_dirichlet(&mesh) >= mesh.euclidean_area() * (1.0 - 1e-12));
        Ok(())
    })
}

pub fn area_parametrization_invariance() -> Result<(), String> {
    run(16, (metric(), bent_mesh(), 0.0..std::f64::consts::TAU), |(f, mesh, angle)| {
        let ci = integrand(f);
        let a = discrete_finsler_area(&ci, &mesh).map_err(lib)?;
        let b = discrete_finsler_area(&ci, &rotate_parameters(&mesh, angle)).map_err(lib)?;
        prop_assert!(rel(a, b) < 1e-12);
        Ok(())
    })
}

/// A constant drift integrates to zero along a closed curve.
pub fn closed_curve_drift_invariance() -> Result<(), String> {
    run(32, (unit(), 0.0..0.8f64, 1.0..2.0f64, 0.0..1.0f64), |(u, r, a, h)| {
        let curves = [BoundaryCurve::ellipse(a, 1.0).map_err(lib)?, BoundaryCurve::helical(h, 1.0).map_err(lib)?];
        for c in &curves {
            let lf = finsler_length(&MetricSpec::randers((u * r).as_slice()), c, 1024).map_err(lib)?;
            let le = finsler_length(&MetricSpec::euclidean(3), c, 1024).map_err(lib)?;
            prop_assert!(rel(lf, le) < 1e-10);
        }
        Ok(())
    })
}
