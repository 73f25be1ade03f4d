//! The Cartan area integrand of a Finsler metric on `R^3`.
//!
//! For `Z ≠ 0` with an orthonormal basis `f1, f2` of `Z^⊥`,
//!
//! ```text
//! A^F(x, Z) = |Z| · 2π / ∫_0^{2π} F(x, cos θ f1 + sin θ f2)^{-2} dθ,
//! ```
//!
//! the ratio of the Euclidean unit disk area to the area of the Finsler unit
//! disk in `Z^⊥`, scaled by `|Z|`. The integral is evaluated with the
//! composite trapezoid rule, which is spectrally accurate for smooth periodic
//! integrands. Only the surface case (two-dimensional great circles) is
//! implemented.

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{Finsler, HarmonicSym};
use crate::quadrature::{CircleRule, CompensatedSum};
use crate::sampling::{aligned_sphere, orthonormal_complement, random_unit};

pub const DEFAULT_NODES: usize = 256;
pub const MIN_NODES: usize = 16;
/// Default tolerance of the convexity verdict.
pub const DEFAULT_ELLIPTICITY_TOL: f64 = 1e-6;
/// Default threshold for the regularity predicate `ρ₂(F - |·|) < δ₀`; the
/// universal constant has no known value, so this is configuration.
pub const DEFAULT_DELTA0: f64 = 0.1;
/// Threshold of the perfect-dominance criterion `δ < 1/5`.
pub const DOMINANCE_DELTA: f64 = 0.2;

/// A metric paired with a great-circle quadrature rule.
#[derive(Clone, Debug)]
pub struct CartanIntegrand<M> {
    metric: M,
    rule: CircleRule,
}

/// Finite-difference derivatives of the integrand in `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct IntegrandDerivs {
    pub gradient: Vector3<f64>,
    pub hessian: Matrix3<f64>,
    /// Largest deviation between the difference-quotient gradient and the
    /// quadrature gradient; a proxy for the finite-difference noise floor.
    pub uncertainty: f64,
}

impl<M: Finsler> CartanIntegrand<M> {
    pub fn new(metric: M) -> Result<Self> {
        Self::with_nodes(metric, DEFAULT_NODES)
    }

    pub fn with_nodes(metric: M, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::config(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {nodes}"
            )));
        }
        if metric.dim() != 3 {
            return Err(Error::Unsupported(format!(
                "the area integrand is implemented for surfaces in R^3 only, metric lives in R^{}",
                metric.dim()
            )));
        }
        Ok(CartanIntegrand {
            metric,
            rule: CircleRule::new(nodes),
        })
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    /// Codimension-one exponent `m` (the surface dimension).
    pub fn m(&self) -> u32 {
        2
    }

    /// `A^F(x, Z)`.
    pub fn value(&self, x: &Vector3<f64>, z: &Vector3<f64>) -> Result<f64> {
        let zn = nonzero(z)?;
        let (f1, f2) = orthonormal_complement(z);
        self.value_in_frame(x, zn, &f1, &f2)
    }

    /// `A^F(x, Z)` using a caller-supplied orthonormal basis of `Z^⊥`.
    pub fn value_with_basis(
        &self,
        x: &Vector3<f64>,
        z: &Vector3<f64>,
        f1: &Vector3<f64>,
        f2: &Vector3<f64>,
    ) -> Result<f64> {
        let zn = nonzero(z)?;
        self.value_in_frame(x, zn, f1, f2)
    }

    fn value_in_frame(
        &self,
        x: &Vector3<f64>,
        zn: f64,
        f1: &Vector3<f64>,
        f2: &Vector3<f64>,
    ) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for y in self.rule.great_circle(f1, f2) {
            let f = self.metric.value(x.as_slice(), y.as_slice())?;
            acc.add(positive_node(f, &y)?.powi(-2));
        }
        let mean = acc.value() / self.rule.len() as f64;
        finite(zn / mean, "area integrand")
    }

    /// `A^F(x, Z)` and its exact Z-gradient.
    ///
    /// With `g = F^{-2}` and `R[g](Z) = mean_{great circle}(g) / |Z|`, the
    /// contracted differentiation rule of the Radon transform gives
    /// `|Z|² ∂_σ R[g] = -R[Z_σ g + y^σ (Z·∇g)]`, and `A = 1/R[g]`.
    pub fn value_gradient(
        &self,
        x: &Vector3<f64>,
        z: &Vector3<f64>,
    ) -> Result<(f64, Vector3<f64>)> {
        let zn = nonzero(z)?;
        let (f1, f2) = orthonormal_complement(z);
        let mut g_acc = CompensatedSum::default();
        let mut v_acc = [CompensatedSum::default(); 3];
        let mut grad = [0.0; 3];
        for y in self.rule.great_circle(&f1, &f2) {
            let f = self.metric.value_grad(x.as_slice(), y.as_slice(), &mut grad)?;
            let f = positive_node(f, &y)?;
            let g = f.powi(-2);
            // ∇g = -2 F^{-3} ∇F
            let z_dot_grad_g = -2.0 * g / f * (z[0] * grad[0] + z[1] * grad[1] + z[2] * grad[2]);
            g_acc.add(g);
            for i in 0..3 {
                v_acc[i].add(y[i] * z_dot_grad_g);
            }
        }
        let n = self.rule.len() as f64;
        let mean_g = g_acc.value() / n;
        let mean_v = Vector3::new(v_acc[0].value(), v_acc[1].value(), v_acc[2].value()) / n;
        let r = mean_g / zn;
        let a = finite(1.0 / r, "area integrand")?;
        let grad_a = (z * r + mean_v / zn) / (zn * zn * r * r);
        Ok((a, grad_a))
    }

    /// x-gradient of `A^F(x, Z)` by central differences (zero for Minkowski
    /// metrics).
    pub fn x_gradient(&self, x: &Vector3<f64>, z: &Vector3<f64>) -> Result<Vector3<f64>> {
        if !self.metric.is_x_dependent() {
            return Ok(Vector3::zeros());
        }
        let h = f64::EPSILON.cbrt() * x.norm().max(1.0);
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            g[i] = (self.value(&(x + e), z)? - self.value(&(x - e), z)?) / (2.0 * h);
        }
        Ok(g)
    }

    /// Central finite-difference gradient and Hessian of `A^F(x, ·)` at `Z`.
    ///
    /// The Hessian differences the quadrature gradient, which keeps it
    /// accurate to roughly `1e-9` relative.
    pub fn derivs(&self, x: &Vector3<f64>, z: &Vector3<f64>) -> Result<IntegrandDerivs> {
        let zn = nonzero(z)?;
        let h = f64::EPSILON.cbrt() * zn;
        let mut gradient = Vector3::zeros();
        let mut hessian = Matrix3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            gradient[i] = (self.value(x, &(z + e))? - self.value(x, &(z - e))?) / (2.0 * h);
            let (_, gp) = self.value_gradient(x, &(z + e))?;
            let (_, gm) = self.value_gradient(x, &(z - e))?;
            hessian.set_column(i, &((gp - gm) / (2.0 * h)));
        }
        let hessian = (hessian + hessian.transpose()) * 0.5;
        let (_, exact) = self.value_gradient(x, z)?;
        Ok(IntegrandDerivs {
            gradient,
            hessian,
            uncertainty: (gradient - exact).amax(),
        })
    }

    /// Smallest eigenvalue of the Hessian restricted to `Z^⊥`, scaled by
    /// `|Z|` so that the Euclidean integrand gives 1.
    pub fn tangential_min_eigenvalue(&self, x: &Vector3<f64>, z: &Vector3<f64>) -> Result<f64> {
        let d = self.derivs(x, z)?;
        let (f1, f2) = orthonormal_complement(z);
        let h = &d.hessian;
        let m = Matrix2::new(
            f1.dot(&(h * f1)),
            f1.dot(&(h * f2)),
            f2.dot(&(h * f1)),
            f2.dot(&(h * f2)),
        );
        let tr = m.trace();
        let det = m.determinant();
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        Ok((0.5 * tr - disc) * z.norm())
    }
}

fn nonzero(z: &Vector3<f64>) -> Result<f64> {
    let n = z.norm();
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(Error::domain(format!("normal vector Z must be nonzero and finite, got {z:?}")))
    }
}

fn positive_node(f: f64, y: &Vector3<f64>) -> Result<f64> {
    if f > 0.0 && f.is_finite() {
        Ok(f)
    } else {
        Err(Error::singular(format!(
            "metric equals {f} at great-circle node y = ({:.6}, {:.6}, {:.6})",
            y[0], y[1], y[2]
        )))
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::singular(format!("{what} not finite")))
    }
}

/// `A^F(x, Z)`.
pub fn area_integrand<M: Finsler>(
    ci: &CartanIntegrand<M>,
    x: &Vector3<f64>,
    z: &Vector3<f64>,
) -> Result<f64> {
    ci.value(x, z)
}

/// Central finite-difference gradient and Hessian in `Z`.
pub fn area_integrand_derivs<M: Finsler>(
    ci: &CartanIntegrand<M>,
    x: &Vector3<f64>,
    z: &Vector3<f64>,
) -> Result<IntegrandDerivs> {
    ci.derivs(x, z)
}

/// Pointwise bounds `c1 ≤ F ≤ c2` on the unit sphere and the induced
/// integrand bounds `m1 |Z| ≤ A^F ≤ m2 |Z|` with `m_i = c_i^2`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthBounds {
    pub c1: f64,
    pub c2: f64,
    pub m1: f64,
    pub m2: f64,
    /// Whether the integrand sandwich held on the probe directions.
    pub probe_holds: bool,
    pub probe_min_ratio: f64,
    pub probe_max_ratio: f64,
}

impl GrowthBounds {
    /// `inf F` over the sampled sphere bundle.
    pub fn m_f(&self) -> f64 {
        self.c1
    }

    /// `sup F` over the sampled sphere bundle.
    pub fn big_m_f(&self) -> f64 {
        self.c2
    }
}

/// Growth bounds sampled at each point of `x_samples` over
/// `sample_count` directions.
pub fn growth_bounds<M: Finsler>(
    ci: &CartanIntegrand<M>,
    x_samples: &[Vector3<f64>],
    sample_count: usize,
) -> Result<GrowthBounds> {
    if sample_count < 500 {
        return Err(Error::config(format!(
            "growth bounds need at least 500 directions, got {sample_count}"
        )));
    }
    let origin = [Vector3::zeros()];
    let xs = if x_samples.is_empty() { &origin[..] } else { x_samples };
    let (mut c1, mut c2) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in xs {
        let axis = ci.metric.axis(x.as_slice()).map(|a| Vector3::new(a[0], a[1], a[2]));
        for y in aligned_sphere(sample_count, axis.as_ref()) {
            let f = ci.metric.value(x.as_slice(), y.as_slice())?;
            c1 = c1.min(f);
            c2 = c2.max(f);
        }
    }
    if !(c1 > 0.0) {
        return Err(Error::NotFinsler(format!(
            "metric not positive on the unit sphere: min F = {c1}"
        )));
    }
    let m = ci.m() as i32;
    let (m1, m2) = (c1.powi(m), c2.powi(m));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in xs {
        for z in aligned_sphere(64, None) {
            let r = ci.value(x, &z)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let slack = 1e-12;
    Ok(GrowthBounds {
        c1,
        c2,
        m1,
        m2,
        probe_holds: lo >= m1 * (1.0 - slack) && hi <= m2 * (1.0 + slack),
        probe_min_ratio: lo,
        probe_max_ratio: hi,
    })
}

/// Largest relative gap `|A^F - A^{F_sym}| / A^F` over `sample_count`
/// random normals (and random base points in the unit ball when the metric
/// depends on position).
pub fn check_symmetrization_identity<M: Finsler>(
    ci: &CartanIntegrand<M>,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let sym = CartanIntegrand::with_nodes(HarmonicSym::new(&ci.metric, ci.m())?, ci.nodes())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..sample_count {
        let z = random_unit(&mut rng) * rng.random_range(0.1..10.0);
        let x = if ci.metric.is_x_dependent() {
            random_unit(&mut rng) * rng.random_range(0.0..1.0)
        } else {
            Vector3::zeros()
        };
        let a = ci.value(&x, &z)?;
        let b = sym.value(&x, &z)?;
        worst = worst.max((a - b).abs() / a);
    }
    Ok(worst)
}

/// Sampled ellipticity constant of the integrand.
#[derive(Clone, Debug, Serialize)]
pub struct EllipticityReport {
    /// Smallest tangential Hessian eigenvalue (scaled by `|Z|`) over all
    /// samples: an estimate of the ellipticity constant, not a certified
    /// infimum.
    pub lambda_min: f64,
    pub argmin_x: Vector3<f64>,
    pub argmin_z: Vector3<f64>,
    pub z_count: usize,
    pub x_count: usize,
    /// Estimate per base point, in the order of `x_samples`.
    pub per_x: Vec<f64>,
    pub tolerance: f64,
    pub convex: bool,
}

/// Default normal directions for scans: a Fibonacci lattice aligned with the
/// metric's drift at the origin.
pub fn default_z_samples<M: Finsler>(ci: &CartanIntegrand<M>, n: usize) -> Vec<Vector3<f64>> {
    let axis = ci.metric.axis(&[0.0; 3]).map(|a| Vector3::new(a[0], a[1], a[2]));
    aligned_sphere(n, axis.as_ref())
}

/// Minimum tangential eigenvalue over all `(x, Z)` pairs.
///
/// Evaluation is parallel; ties are broken by the first index in
/// `x`-major order, so the arg-min is reproducible.
pub fn ellipticity_scan<M: Finsler>(
    ci: &CartanIntegrand<M>,
    z_samples: &[Vector3<f64>],
    x_samples: &[Vector3<f64>],
    tol: f64,
) -> Result<EllipticityReport> {
    if z_samples.is_empty() {
        return Err(Error::config("ellipticity scan needs at least one normal sample"));
    }
    let origin = [Vector3::zeros()];
    let xs = if x_samples.is_empty() { &origin[..] } else { x_samples };
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..z_samples.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| ci.tangential_min_eigenvalue(&xs[i], &z_samples[j]))
        .collect::<Result<_>>()?;
    let mut per_x = vec![f64::INFINITY; xs.len()];
    let mut best = (f64::INFINITY, 0usize);
    for (k, (&(i, _), &v)) in pairs.iter().zip(&values).enumerate() {
        per_x[i] = per_x[i].min(v);
        if v < best.0 {
            best = (v, k);
        }
    }
    let (i, j) = pairs[best.1];
    Ok(EllipticityReport {
        lambda_min: best.0,
        argmin_x: xs[i],
        argmin_z: z_samples[j],
        z_count: z_samples.len(),
        x_count: xs.len(),
        per_x,
        tolerance: tol,
        convex: best.0 >= -tol,
    })
}

/// Seminorm `ρ_k(g) = max { |D^α g(ξ)| : ξ ∈ samples, |α| ≤ k }` with
/// derivatives by central differences; `k ≤ 2`.
pub fn rho_k<G>(g: G, k: u32, samples: &[Vector3<f64>]) -> Result<f64>
where
    G: Fn(&Vector3<f64>) -> Result<f64> + Sync,
{
    if k > 2 {
        return Err(Error::Unsupported(format!(
            "seminorms are implemented up to order 2, requested {k}"
        )));
    }
    let h1 = 1e-5;
    let h2 = 1e-4;
    let e = |i: usize, h: f64| {
        let mut v = Vector3::zeros();
        v[i] = h;
        v
    };
    let per_point: Vec<f64> = samples
        .par_iter()
        .map(|p| -> Result<f64> {
            let g0 = g(p)?;
            let mut worst = g0.abs();
            if k >= 1 {
                for i in 0..3 {
                    let d = (g(&(p + e(i, h1)))? - g(&(p - e(i, h1)))?) / (2.0 * h1);
                    worst = worst.max(d.abs());
                }
            }
            if k >= 2 {
                for i in 0..3 {
                    let d = (g(&(p + e(i, h2)))? - 2.0 * g0 + g(&(p - e(i, h2)))?) / (h2 * h2);
                    worst = worst.max(d.abs());
                    for j in 0..i {
                        let (a, b) = (e(i, h2), e(j, h2));
                        let d = (g(&(p + a + b))? - g(&(p + a - b))? - g(&(p - a + b))?
                            + g(&(p - a - b))?)
                            / (4.0 * h2 * h2);
                        worst = worst.max(d.abs());
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}

/// Perfect-dominance feasibility and the regularity predicate.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    /// `sup_x ρ₂(A^F(x,·) - |·|)`.
    pub delta: f64,
    /// `δ < 1/5`.
    pub delta_below_fifth: bool,
    /// Scaling `R` applied before measuring the shifted integrand
    /// `R A^F - |·|`.
    pub scale: f64,
    pub shifted_m1: f64,
    pub shifted_m2: f64,
    pub shifted_lambda: f64,
    /// `2 [m2 - min(λ, m1/2)]` of the shifted integrand; a perfect dominance
    /// function exists for `A^F` when this is below 1.
    pub k0: f64,
    pub k0_below_one: bool,
    /// `sup_x ρ₂(F(x,·) - |·|)`.
    pub metric_deviation: f64,
    pub delta0: f64,
    pub delta0_pass: bool,
}

/// Dominance and regularity criteria evaluated over `x_grid` and the normal
/// samples `z_samples`.
pub fn dominance_feasibility<M: Finsler>(
    ci: &CartanIntegrand<M>,
    x_grid: &[Vector3<f64>],
    z_samples: &[Vector3<f64>],
    delta0: f64,
) -> Result<DominanceReport> {
    let origin = [Vector3::zeros()];
    let xs = if x_grid.is_empty() { &origin[..] } else { x_grid };
    let mut delta: f64 = 0.0;
    let mut metric_deviation: f64 = 0.0;
    for x in xs {
        delta = delta.max(rho_k(|z| Ok(ci.value(x, z)? - z.norm()), 2, z_samples)?);
        metric_deviation = metric_deviation.max(rho_k(
            |y| Ok(ci.metric.value(x.as_slice(), y.as_slice())? - y.norm()),
            2,
            z_samples,
        )?);
    }
    let (scale, m1, m2, lambda, k0) = if delta < 1.0 {
        let scale = 1.001 / (1.0 - delta);
        let (mut m1, mut m2) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in xs {
            for z in z_samples {
                let v = scale * ci.value(x, &z.normalize())? - 1.0;
                m1 = m1.min(v);
                m2 = m2.max(v);
            }
        }
        let ell = ellipticity_scan(ci, z_samples, xs, DEFAULT_ELLIPTICITY_TOL)?;
        let lambda = scale * ell.lambda_min - 1.0;
        let k0 = 2.0 * (m2 - lambda.min(0.5 * m1));
        (scale, m1, m2, lambda, k0)
    } else {
        (f64::INFINITY, f64::NAN, f64::NAN, f64::NAN, f64::INFINITY)
    };
    Ok(DominanceReport {
        delta,
        delta_below_fifth: delta < DOMINANCE_DELTA,
        scale,
        shifted_m1: m1,
        shifted_m2: m2,
        shifted_lambda: lambda,
        k0,
        k0_below_one: k0 < 1.0,
        metric_deviation,
        delta0,
        delta0_pass: metric_deviation < delta0,
    })
}
