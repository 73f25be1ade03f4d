//! Deterministic direction sets on spheres.
//!
//! The two-sphere uses a Fibonacci lattice, the circle a uniform grid. Higher
//! dimensional spheres fall back to seeded Gaussian directions. When an axis
//! is supplied the lattice pole is rotated onto it and both poles are
//! appended, so that directions parallel and orthogonal to a drift vector are
//! resolved well.

use nalgebra::{DVector, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n` quasi-uniform points on the unit two-sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Fibonacci lattice whose pole is rotated onto `axis`, plus `±axis`.
pub fn aligned_sphere(n: usize, axis: Option<&Vector3<f64>>) -> Vec<Vector3<f64>> {
    let lattice = fibonacci_sphere(n);
    let Some(axis) = axis.and_then(|a| a.try_normalize(1e-14)) else {
        return lattice;
    };
    let (f1, f2) = orthonormal_complement(&axis);
    let mut out: Vec<_> = lattice
        .into_iter()
        .map(|p| f1 * p.x + f2 * p.y + axis * p.z)
        .collect();
    out.push(axis);
    out.push(-axis);
    out
}

/// Uniform grid of `n` points on the unit circle.
pub fn circle_grid(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Sample directions on the unit sphere of `R^dim`.
///
/// `axis`, if given, must have length `dim`; it only affects `dim == 3`.
pub fn sphere_directions(dim: usize, n: usize, axis: Option<&[f64]>, seed: u64) -> Vec<DVector<f64>> {
    match dim {
        2 => circle_grid(n)
            .into_iter()
            .map(|[c, s]| DVector::from_vec(vec![c, s]))
            .collect(),
        3 => {
            let axis = axis.map(|a| Vector3::new(a[0], a[1], a[2]));
            aligned_sphere(n, axis.as_ref())
                .into_iter()
                .map(|p| DVector::from_column_slice(p.as_slice()))
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let v = DVector::from_fn(dim, |_, _| standard_normal(&mut rng));
                if let Some(u) = v.try_normalize(1e-12) {
                    out.push(u);
                }
            }
            out
        }
    }
}

/// Orthonormal basis `(f1, f2)` of the plane orthogonal to `z`, oriented so
/// that `f1 × f2` points along `z`.
///
/// `f1` is obtained by Gram-Schmidt from the coordinate axis least aligned
/// with `z` (first index wins ties), so the frame is a deterministic function
/// of `z`.
pub fn orthonormal_complement(z: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let zh = z.normalize();
    let a = zh.map(f64::abs);
    let mut idx = 0;
    for i in 1..3 {
        if a[i] < a[idx] {
            idx = i;
        }
    }
    let mut e = Vector3::zeros();
    e[idx] = 1.0;
    let f1 = (e - zh * zh.dot(&e)).normalize();
    let f2 = zh.cross(&f1);
    (f1, f2)
}

/// Uniformly distributed random unit vector in R^3.
pub fn random_unit<R: rand::Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        );
        if let Some(u) = v.try_normalize(1e-12) {
            return u;
        }
    }
}

fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
