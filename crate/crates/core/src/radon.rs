//! Spherical Radon transform of positively homogeneous functions on `R^3`.
//!
//! For `g` homogeneous of degree `-2`,
//!
//! ```text
//! R[g](Z) = (2π |Z|)^{-1} ∫_0^{2π} g(cos θ f1 + sin θ f2) dθ,
//! ```
//!
//! with `f1, f2` an orthonormal basis of `Z^⊥`. The transform is
//! `(-1)`-homogeneous in `Z`, and the area integrand is its reciprocal:
//! `A^F(x, Z) = 1 / R[F(x, ·)^{-2}](Z)`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::cartan::{rho_k, CartanIntegrand, DEFAULT_NODES, MIN_NODES};
use crate::error::{Error, Result};
use crate::metric::Finsler;
use crate::quadrature::{CircleRule, CompensatedSum};
use crate::sampling::orthonormal_complement;

/// A positively homogeneous function on `R^3 \ {0}`.
pub trait HomogeneousFunction: Sync {
    /// Homogeneity degree `d`: `g(t y) = t^d g(y)` for `t > 0`.
    fn degree(&self) -> f64;

    fn eval(&self, y: &Vector3<f64>) -> Result<f64>;

    /// Value and gradient; central differences unless overridden.
    fn eval_grad(&self, y: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let v = self.eval(y)?;
        let h = f64::EPSILON.cbrt() * y.norm();
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            g[i] = (self.eval(&(y + e))? - self.eval(&(y - e))?) / (2.0 * h);
        }
        Ok((v, g))
    }
}

impl<G: HomogeneousFunction + ?Sized> HomogeneousFunction for &G {
    fn degree(&self) -> f64 {
        (**self).degree()
    }
    fn eval(&self, y: &Vector3<f64>) -> Result<f64> {
        (**self).eval(y)
    }
    fn eval_grad(&self, y: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        (**self).eval_grad(y)
    }
}

/// `|y|^{-m}`.
#[derive(Clone, Copy, Debug)]
pub struct InversePower {
    pub m: u32,
}

impl HomogeneousFunction for InversePower {
    fn degree(&self) -> f64 {
        -(self.m as f64)
    }

    fn eval(&self, y: &Vector3<f64>) -> Result<f64> {
        Ok(y.norm().powi(-(self.m as i32)))
    }

    fn eval_grad(&self, y: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let r2 = y.norm_squared();
        let v = r2.powf(-0.5 * self.m as f64);
        Ok((v, y * (-(self.m as f64) * v / r2)))
    }
}

/// `F(x, ·)^{-m}` at a fixed base point.
#[derive(Clone, Debug)]
pub struct MetricPower<M> {
    pub metric: M,
    pub x: Vector3<f64>,
    pub m: u32,
}

impl<M: Finsler> MetricPower<M> {
    pub fn new(metric: M, x: Vector3<f64>, m: u32) -> Self {
        MetricPower { metric, x, m }
    }
}

impl<M: Finsler> HomogeneousFunction for MetricPower<M> {
    fn degree(&self) -> f64 {
        -(self.m as f64)
    }

    fn eval(&self, y: &Vector3<f64>) -> Result<f64> {
        let f = positive_metric(self.metric.value(self.x.as_slice(), y.as_slice())?, y)?;
        Ok(f.powi(-(self.m as i32)))
    }

    fn eval_grad(&self, y: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let mut grad = [0.0; 3];
        let f = self.metric.value_grad(self.x.as_slice(), y.as_slice(), &mut grad)?;
        let f = positive_metric(f, y)?;
        let v = f.powi(-(self.m as i32));
        let s = -(self.m as f64) * v / f;
        Ok((v, Vector3::new(grad[0], grad[1], grad[2]) * s))
    }
}

fn positive_metric(f: f64, y: &Vector3<f64>) -> Result<f64> {
    if f > 0.0 {
        Ok(f)
    } else {
        Err(Error::singular(format!(
            "metric equals {f} at y = ({:.6}, {:.6}, {:.6})",
            y[0], y[1], y[2]
        )))
    }
}

/// A closure with a declared degree.
pub struct FnHomogeneous<G> {
    f: G,
    degree: f64,
}

impl<G> FnHomogeneous<G>
where
    G: Fn(&Vector3<f64>) -> f64 + Sync,
{
    pub fn new(degree: f64, f: G) -> Self {
        FnHomogeneous { f, degree }
    }
}

impl<G> HomogeneousFunction for FnHomogeneous<G>
where
    G: Fn(&Vector3<f64>) -> f64 + Sync,
{
    fn degree(&self) -> f64 {
        self.degree
    }

    fn eval(&self, y: &Vector3<f64>) -> Result<f64> {
        Ok((self.f)(y))
    }
}

/// Largest relative homogeneity residual `|g(ty) - t^d g(y)| / |t^d g(y)|`
/// over the given directions and scales.
pub fn homogeneity_residual<G: HomogeneousFunction>(
    g: &G,
    directions: &[Vector3<f64>],
    scales: &[f64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for y in directions {
        let base = g.eval(y)?;
        for &t in scales {
            let expect = t.powf(g.degree()) * base;
            worst = worst.max((g.eval(&(y * t))? - expect).abs() / expect.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(worst)
}

/// Trapezoid evaluation of `R[g](Z)` on `n` great-circle nodes.
pub fn radon_transform<G: HomogeneousFunction>(g: &G, z: &Vector3<f64>, n: usize) -> Result<f64> {
    let (f1, f2) = orthonormal_complement(z);
    radon_with_basis(g, z, &f1, &f2, n)
}

/// As [`radon_transform`] with a caller-supplied orthonormal basis of `Z^⊥`.
pub fn radon_with_basis<G: HomogeneousFunction>(
    g: &G,
    z: &Vector3<f64>,
    f1: &Vector3<f64>,
    f2: &Vector3<f64>,
    n: usize,
) -> Result<f64> {
    let zn = checked_normal(z, n)?;
    let rule = CircleRule::new(n);
    let mut acc = CompensatedSum::default();
    for y in rule.great_circle(f1, f2) {
        acc.add(finite_node(g.eval(&y)?, &y)?);
    }
    Ok(acc.value() / (n as f64 * zn))
}

fn checked_normal(z: &Vector3<f64>, n: usize) -> Result<f64> {
    if n < MIN_NODES {
        return Err(Error::config(format!(
            "quadrature needs at least {MIN_NODES} nodes, got {n}"
        )));
    }
    let zn = z.norm();
    if zn > 0.0 && zn.is_finite() {
        Ok(zn)
    } else {
        Err(Error::domain(format!("Z must be nonzero and finite, got {z:?}")))
    }
}

fn finite_node(v: f64, y: &Vector3<f64>) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::singular(format!(
            "integrand equals {v} at y = ({:.6}, {:.6}, {:.6})",
            y[0], y[1], y[2]
        )))
    }
}

/// `A^F(x, Z)` as `1 / R[F(x,·)^{-2}](Z)`.
pub fn cartan_via_radon<M: Finsler>(
    metric: &M,
    x: &Vector3<f64>,
    z: &Vector3<f64>,
    n: usize,
) -> Result<f64> {
    if metric.dim() != 3 {
        return Err(Error::Unsupported(format!(
            "Radon transform implemented on R^3 only, metric lives in R^{}",
            metric.dim()
        )));
    }
    let r = radon_transform(&MetricPower::new(metric, *x, 2), z, n)?;
    if r > 0.0 && r.is_finite() {
        Ok(1.0 / r)
    } else {
        Err(Error::singular(format!("Radon transform of F^-2 equals {r}")))
    }
}

/// Both sides of `Z_τ ∂_σ R[g](Z) = -R[∂_τ(y^σ g)](Z)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiffRuleCheck {
    pub tau: usize,
    pub sigma: usize,
    /// Central difference of the transform.
    pub lhs: f64,
    /// Quadrature of the differentiated integrand.
    pub rhs: f64,
    pub residual: f64,
}

/// Checks the first-order differentiation rule at `Z` for the zero-based
/// coordinate indices `tau`, `sigma`.
pub fn verify_diff_rule<G: HomogeneousFunction>(
    g: &G,
    z: &Vector3<f64>,
    tau: usize,
    sigma: usize,
    n: usize,
) -> Result<DiffRuleCheck> {
    if tau > 2 || sigma > 2 {
        return Err(Error::config(format!(
            "indices must be 0, 1 or 2, got tau={tau} sigma={sigma}"
        )));
    }
    let zn = checked_normal(z, n)?;
    let h = f64::EPSILON.cbrt() * zn;
    let mut e = Vector3::zeros();
    e[sigma] = h;
    let d = (radon_transform(g, &(z + e), n)? - radon_transform(g, &(z - e), n)?) / (2.0 * h);
    let lhs = z[tau] * d;
    let derived = FnHomogeneousResult(|y: &Vector3<f64>| {
        let (v, grad) = g.eval_grad(y)?;
        Ok(if tau == sigma { v } else { 0.0 } + y[sigma] * grad[tau])
    });
    let rhs = -radon_transform(&derived, z, n)?;
    Ok(DiffRuleCheck {
        tau,
        sigma,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

struct FnHomogeneousResult<G>(G);

impl<G> HomogeneousFunction for FnHomogeneousResult<G>
where
    G: Fn(&Vector3<f64>) -> Result<f64> + Sync,
{
    fn degree(&self) -> f64 {
        -2.0
    }
    fn eval(&self, y: &Vector3<f64>) -> Result<f64> {
        (self.0)(y)
    }
}

/// Seminorms of `g` and of its transform on the same samples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeminormProbe {
    pub k: u32,
    pub rho_transform: f64,
    pub rho_function: f64,
    pub ratio: f64,
}

pub fn seminorm_bound_probe<G: HomogeneousFunction>(
    g: &G,
    k: u32,
    samples: &[Vector3<f64>],
) -> Result<SeminormProbe> {
    let rho_transform = rho_k(|z| radon_transform(g, z, DEFAULT_NODES), k, samples)?;
    let rho_function = rho_k(|y| g.eval(y), k, samples)?;
    Ok(SeminormProbe {
        k,
        rho_transform,
        rho_function,
        ratio: rho_transform / rho_function,
    })
}

/// Largest relative gap between `R[g](L Z)` and `R[g ∘ L^{-T}](Z)` over the
/// samples, for `det L = 1`.
pub fn sl_invariance_probe<G: HomogeneousFunction>(
    g: &G,
    l: &Matrix3<f64>,
    samples: &[Vector3<f64>],
    n: usize,
) -> Result<f64> {
    if (l.determinant() - 1.0).abs() > 1e-9 {
        return Err(Error::config(format!(
            "matrix must have determinant 1, got {}",
            l.determinant()
        )));
    }
    let inv_t = l
        .try_inverse()
        .ok_or_else(|| Error::config("matrix not invertible"))?
        .transpose();
    let pulled = FnHomogeneousResult(|y: &Vector3<f64>| g.eval(&(inv_t * y)));
    let mut worst: f64 = 0.0;
    for z in samples {
        let a = radon_transform(g, &(l * z), n)?;
        let b = radon_transform(&pulled, z, n)?;
        worst = worst.max((a - b).abs() / a.abs());
    }
    Ok(worst)
}

/// Relative gap between the quadrature integrand and the Radon form.
pub fn reciprocity_gap<M: Finsler>(
    ci: &CartanIntegrand<M>,
    x: &Vector3<f64>,
    z: &Vector3<f64>,
) -> Result<f64> {
    let a = ci.value(x, z)?;
    let r = radon_transform(&MetricPower::new(ci.metric(), *x, 2), z, ci.nodes())?;
    Ok((a * r - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use crate::sampling::aligned_sphere;
    use approx::assert_relative_eq;

    fn randers_power(b: [f64; 3]) -> MetricPower<MetricSpec> {
        MetricPower::new(MetricSpec::randers(&b), Vector3::zeros(), 2)
    }

    #[test]
    fn transform_examples() {
        let z = Vector3::new(0.0, 0.0, 2.0);
        assert_relative_eq!(radon_transform(&InversePower { m: 2 }, &z, 256).unwrap(), 0.5, epsilon = 1e-15);
        let g = randers_power([0.3, 0.0, 0.0]);
        let r = radon_transform(&g, &z, 256).unwrap();
        assert_relative_eq!(r, 0.575981, epsilon = 1e-6);
        assert_relative_eq!(r, 0.91f64.powf(-1.5) / 2.0, max_relative = 1e-13);
        assert_relative_eq!(radon_transform(&g, &(z * 2.0), 256).unwrap(), r / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn transform_errors() {
        assert!(matches!(
            radon_transform(&InversePower { m: 2 }, &Vector3::zeros(), 256),
            Err(Error::Domain(_))
        ));
        let g = FnHomogeneous::new(-2.0, |y: &Vector3<f64>| 1.0 / y[1]);
        assert!(matches!(
            radon_transform(&g, &Vector3::z(), 256),
            Err(Error::IntegrandSingular(_))
        ));
    }

    #[test]
    fn basis_independence() {
        let g = randers_power([0.2, -0.1, 0.4]);
        let z = Vector3::new(0.3, 0.5, -0.8);
        let (f1, f2) = orthonormal_complement(&z);
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        let a = radon_with_basis(&g, &z, &f1, &f2, 256).unwrap();
        let b = radon_with_basis(&g, &z, &(f1 * c + f2 * s), &(f2 * c - f1 * s), 256).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-13);
    }

    #[test]
    fn via_radon_matches_integrand() {
        let m = MetricSpec::randers(&[0.3, 0.0, 0.0]);
        let z = Vector3::new(0.0, 0.0, 2.0);
        assert_relative_eq!(cartan_via_radon(&m, &Vector3::zeros(), &z, 256).unwrap(), 1.736169, epsilon = 1e-6);
        let e = MetricSpec::euclidean(3);
        assert_eq!(cartan_via_radon(&e, &Vector3::zeros(), &z, 256).unwrap(), 2.0);
        let ci = CartanIntegrand::new(MetricSpec::matsumoto(&[0.3, 0.1, 0.0])).unwrap();
        for z in aligned_sphere(20, None) {
            assert!(reciprocity_gap(&ci, &Vector3::zeros(), &z).unwrap() < 1e-12);
        }
    }

    #[test]
    fn diff_rule_euclidean() {
        let g = InversePower { m: 2 };
        let d = verify_diff_rule(&g, &Vector3::z(), 2, 2, 256).unwrap();
        assert_relative_eq!(d.lhs, -1.0, epsilon = 1e-8);
        assert_relative_eq!(d.rhs, -1.0, epsilon = 1e-14);
        let d = verify_diff_rule(&g, &Vector3::z(), 0, 1, 256).unwrap();
        assert!(d.lhs.abs() < 1e-8 && d.rhs.abs() < 1e-14);
    }

    #[test]
    fn diff_rule_randers() {
        let g = randers_power([0.3, 0.0, 0.0]);
        let z = Vector3::new(0.4, -0.7, 0.6);
        for tau in 0..3 {
            for sigma in 0..3 {
                assert!(verify_diff_rule(&g, &z, tau, sigma, 256).unwrap().residual <= 1e-5);
            }
        }
        assert!(verify_diff_rule(&g, &z, 3, 0, 256).is_err());
    }

    #[test]
    fn seminorm_probe() {
        let pts = aligned_sphere(100, None);
        let p = seminorm_bound_probe(&InversePower { m: 2 }, 0, &pts).unwrap();
        assert_relative_eq!(p.rho_transform, 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.ratio, 1.0, epsilon = 1e-14);
        let g = randers_power([0.3, 0.0, 0.0]);
        let p = seminorm_bound_probe(&g, 0, &pts).unwrap();
        assert!(p.ratio.is_finite() && p.ratio > 0.0);
        let g2 = FnHomogeneousResult(|y: &Vector3<f64>| Ok(2.0 * g.eval(y)?));
        let p2 = seminorm_bound_probe(&g2, 0, &pts).unwrap();
        assert_relative_eq!(p.ratio, p2.ratio, max_relative = 1e-13);
    }

    #[test]
    fn sl_invariance() {
        let l = Matrix3::new(2.0, 0.3, 0.0, 0.0, 0.5, 0.1, 0.0, 0.0, 1.0);
        let pts = aligned_sphere(20, None);
        assert!(sl_invariance_probe(&randers_power([0.3, 0.0, 0.0]), &l, &pts, 256).unwrap() < 1e-10);
        assert!(sl_invariance_probe(&InversePower { m: 2 }, &(l * 2.0), &pts, 256).is_err());
    }

    #[test]
    fn homogeneity() {
        let pts = aligned_sphere(30, None);
        assert!(homogeneity_residual(&randers_power([0.3, 0.2, 0.0]), &pts, &[0.5, 2.0, 7.0]).unwrap() < 1e-12);
    }
}
