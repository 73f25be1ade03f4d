//! Closed boundary curves `γ: [0, 1) → R^3`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Finsler;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum CurveShape {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Planar curve `r(θ) = radius (1 + amplitude cos(sides θ))`.
    PlanarPolygonSmoothed { sides: u32, amplitude: f64, radius: f64 },
    /// Circle of radius `radius` lifted by `z = height (1 - cos θ)² / 4`.
    HelicalArcClosure { height: f64, radius: f64 },
    /// Periodic cubic spline through points at uniform parameters.
    Sampled(PeriodicSpline),
}

/// A boundary curve with its three pinned parameters.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCurve {
    pub shape: CurveShape,
    pub anchors: [f64; 3],
}

impl BoundaryCurve {
    pub fn new(shape: CurveShape) -> Result<Self> {
        let c = BoundaryCurve {
            shape,
            anchors: [0.0, 1.0 / 3.0, 2.0 / 3.0],
        };
        c.validate()?;
        Ok(c)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(CurveShape::Circle { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(CurveShape::Ellipse { a, b })
    }

    pub fn polygon_smoothed(sides: u32, amplitude: f64, radius: f64) -> Result<Self> {
        Self::new(CurveShape::PlanarPolygonSmoothed {
            sides,
            amplitude,
            radius,
        })
    }

    pub fn helical(height: f64, radius: f64) -> Result<Self> {
        Self::new(CurveShape::HelicalArcClosure { height, radius })
    }

    pub fn sampled(points: &[Vector3<f64>]) -> Result<Self> {
        Self::new(CurveShape::Sampled(PeriodicSpline::new(points)?))
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("curve {what} must be positive, got {v}")))
            }
        };
        match &self.shape {
            CurveShape::Circle { radius } => positive(*radius, "radius")?,
            CurveShape::Ellipse { a, b } => {
                positive(*a, "semi-axis a")?;
                positive(*b, "semi-axis b")?;
            }
            CurveShape::PlanarPolygonSmoothed {
                sides,
                amplitude,
                radius,
            } => {
                positive(*radius, "radius")?;
                if *sides < 2 || !(amplitude.abs() < 1.0) {
                    return Err(Error::config(format!(
                        "smoothed polygon needs sides >= 2 and |amplitude| < 1, got sides={sides} amplitude={amplitude}"
                    )));
                }
            }
            CurveShape::HelicalArcClosure { height, radius } => {
                positive(*radius, "radius")?;
                if !height.is_finite() {
                    return Err(Error::config("helix height must be finite"));
                }
            }
            CurveShape::Sampled(_) => {}
        }
        Ok(())
    }

    pub fn point(&self, t: f64) -> Vector3<f64> {
        self.eval(t).0
    }

    pub fn tangent(&self, t: f64) -> Vector3<f64> {
        self.eval(t).1
    }

    /// `γ(t)` and `γ'(t)`; `t` is taken modulo 1.
    pub fn eval(&self, t: f64) -> (Vector3<f64>, Vector3<f64>) {
        let t = t.rem_euclid(1.0);
        let th = TAU * t;
        let (s, c) = th.sin_cos();
        match &self.shape {
            CurveShape::Circle { radius } => (
                Vector3::new(radius * c, radius * s, 0.0),
                Vector3::new(-radius * s, radius * c, 0.0) * TAU,
            ),
            CurveShape::Ellipse { a, b } => (
                Vector3::new(a * c, b * s, 0.0),
                Vector3::new(-a * s, b * c, 0.0) * TAU,
            ),
            CurveShape::PlanarPolygonSmoothed {
                sides,
                amplitude,
                radius,
            } => {
                let k = *sides as f64;
                let r = radius * (1.0 + amplitude * (k * th).cos());
                let dr = -radius * amplitude * k * (k * th).sin();
                (
                    Vector3::new(r * c, r * s, 0.0),
                    Vector3::new(dr * c - r * s, dr * s + r * c, 0.0) * TAU,
                )
            }
            CurveShape::HelicalArcClosure { height, radius } => {
                let z = height * (1.0 - c).powi(2) / 4.0;
                let dz = height * (1.0 - c) * s / 2.0;
                (
                    Vector3::new(radius * c, radius * s, z),
                    Vector3::new(-radius * s, radius * c, dz) * TAU,
                )
            }
            CurveShape::Sampled(sp) => sp.eval(t),
        }
    }

    /// `|γ(0) - γ(1⁻)|`.
    pub fn closure_gap(&self) -> f64 {
        (self.point(0.0) - self.point(1.0 - f64::EPSILON)).norm()
    }

    /// Euclidean length by the trapezoid rule on `n` nodes.
    pub fn euclidean_length(&self, n: usize) -> f64 {
        (0..n).map(|k| self.tangent(k as f64 / n as f64).norm()).sum::<f64>() / n as f64
    }
}

/// `∫_0^1 F(γ, γ') dt` by the trapezoid rule on `n ≥ 64` nodes.
pub fn finsler_length<M: Finsler>(metric: &M, curve: &BoundaryCurve, n: usize) -> Result<f64> {
    if n < 64 {
        return Err(Error::config(format!("length quadrature needs at least 64 nodes, got {n}")));
    }
    let mut sum = 0.0;
    for k in 0..n {
        let (p, d) = curve.eval(k as f64 / n as f64);
        if d.norm() == 0.0 {
            return Err(Error::domain(format!("curve derivative vanishes at t = {}", k as f64 / n as f64)));
        }
        sum += metric.value(p.as_slice(), d.as_slice())?;
    }
    Ok(sum / n as f64)
}

/// Interpolating periodic cubic spline, one knot per sample at `t_i = i/n`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicSpline {
    points: Vec<Vector3<f64>>,
    /// Second derivatives in `t` at the knots.
    second: Vec<Vector3<f64>>,
}

impl PeriodicSpline {
    pub fn new(points: &[Vector3<f64>]) -> Result<Self> {
        let n = points.len();
        if n < 4 {
            return Err(Error::config(format!("sampled curve needs at least 4 points, got {n}")));
        }
        for i in 0..n {
            if (points[(i + 1) % n] - points[i]).norm() == 0.0 {
                return Err(Error::config(format!("sampled curve repeats point {i}")));
            }
        }
        let h = 1.0 / n as f64;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, (i + n - 1) % n)] = 1.0;
            a[(i, i)] = 4.0;
            a[(i, (i + 1) % n)] = 1.0;
        }
        let lu = a.lu();
        let mut second = vec![Vector3::zeros(); n];
        for d in 0..3 {
            let rhs = DVector::from_fn(n, |i, _| {
                6.0 * (points[(i + 1) % n][d] - 2.0 * points[i][d] + points[(i + n - 1) % n][d]) / (h * h)
            });
            let m = lu.solve(&rhs).ok_or_else(|| Error::config("spline system singular"))?;
            for i in 0..n {
                second[i][d] = m[i];
            }
        }
        Ok(PeriodicSpline {
            points: points.to_vec(),
            second,
        })
    }

    fn eval(&self, t: f64) -> (Vector3<f64>, Vector3<f64>) {
        let n = self.points.len();
        let h = 1.0 / n as f64;
        let s = t * n as f64;
        let i = (s.floor() as usize).min(n - 1);
        let u = s - i as f64;
        let j = (i + 1) % n;
        let (p0, p1) = (self.points[i], self.points[j]);
        let (m0, m1) = (self.second[i], self.second[j]);
        let a = 1.0 - u;
        let b = u;
        let p = p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let dp = (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        (p, dp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use approx::assert_relative_eq;

    #[test]
    fn lengths() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let e = MetricSpec::euclidean(3);
        assert_relative_eq!(finsler_length(&e, &c, 256).unwrap(), TAU, epsilon = 1e-6);
        let r = MetricSpec::randers(&[0.3, 0.2, 0.1]);
        assert_relative_eq!(finsler_length(&r, &c, 256).unwrap(), TAU, epsilon = 1e-6);
        let c2 = BoundaryCurve::circle(2.0).unwrap();
        assert_relative_eq!(finsler_length(&r, &c2, 256).unwrap(), 2.0 * TAU, epsilon = 1e-6);
        assert!(finsler_length(&e, &c, 32).is_err());
    }

    #[test]
    fn closure_and_derivatives() {
        let curves = [
            BoundaryCurve::circle(1.0).unwrap(),
            BoundaryCurve::ellipse(1.5, 0.7).unwrap(),
            BoundaryCurve::polygon_smoothed(5, 0.03, 1.0).unwrap(),
            BoundaryCurve::helical(0.8, 1.0).unwrap(),
        ];
        for c in &curves {
            assert!(c.closure_gap() < 1e-12);
            for t in [0.05, 0.3, 0.77] {
                let h = 1e-6;
                let fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
                assert!((fd - c.tangent(t)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn spline_interpolates_and_is_periodic() {
        let pts: Vec<_> = (0..24)
            .map(|k| {
                let t = TAU * k as f64 / 24.0;
                Vector3::new(t.cos(), t.sin(), 0.2 * (2.0 * t).sin())
            })
            .collect();
        let c = BoundaryCurve::sampled(&pts).unwrap();
        for (k, p) in pts.iter().enumerate() {
            assert!((c.point(k as f64 / 24.0) - p).norm() < 1e-12);
        }
        assert!(c.closure_gap() < 1e-12);
        let h = 1e-6;
        let fd = (c.point(h) - c.point(1.0 - h)) / (2.0 * h);
        assert!((fd - c.tangent(0.0)).norm() < 1e-5);
        let circle: Vec<_> = (0..48)
            .map(|k| {
                let t = TAU * k as f64 / 48.0;
                Vector3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        let c = BoundaryCurve::sampled(&circle).unwrap();
        assert!((c.euclidean_length(2048) - TAU).abs() < 1e-4);
    }

    #[test]
    fn bad_parameters() {
        assert!(BoundaryCurve::circle(0.0).is_err());
        assert!(BoundaryCurve::polygon_smoothed(5, 1.5, 1.0).is_err());
        assert!(PeriodicSpline::new(&[Vector3::zeros(); 3]).is_err());
    }
}
