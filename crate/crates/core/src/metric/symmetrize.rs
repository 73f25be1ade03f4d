//! Arithmetic, antisymmetric and m-harmonic parts of a metric in `y`.

use nalgebra::DMatrix;

use super::{Derivatives, Finsler, MAX_DIM};
use crate::error::{Error, Result};

fn negated(y: &[f64]) -> ([f64; MAX_DIM], usize) {
    let mut buf = [0.0; MAX_DIM];
    for (b, v) in buf.iter_mut().zip(y) {
        *b = -v;
    }
    (buf, y.len())
}

/// Derivatives of `y ↦ F(x, -y)` expressed through those of `F` at `-y`.
fn reflected<F: Finsler>(f: &F, x: &[f64], y: &[f64]) -> Result<Derivatives> {
    let (buf, n) = negated(y);
    let mut d = f.derivatives(x, &buf[..n])?;
    d.gradient = -d.gradient;
    Ok(d)
}

/// `F_s(x,y) = (F(x,y) + F(x,-y)) / 2`.
#[derive(Clone, Debug)]
pub struct ArithmeticSym<M>(pub M);

/// `F_a(x,y) = (F(x,y) - F(x,-y)) / 2`. Odd in `y`, so not a metric itself.
#[derive(Clone, Debug)]
pub struct AntiSym<M>(pub M);

/// `F_sym(x,y) = [2 / (F(x,y)^-m + F(x,-y)^-m)]^(1/m)`.
#[derive(Clone, Debug)]
pub struct HarmonicSym<M> {
    inner: M,
    order: u32,
}

impl<M: Finsler> HarmonicSym<M> {
    pub fn new(inner: M, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("symmetrization order m must be >= 1"));
        }
        Ok(HarmonicSym { inner, order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

/// m-harmonic symmetrization of `spec`.
pub fn symmetrize_m_harmonic<M: Finsler>(spec: M, m: u32) -> Result<HarmonicSym<M>> {
    HarmonicSym::new(spec, m)
}

/// The arithmetic symmetrization, antisymmetric part and m-harmonic
/// symmetrization of one metric.
pub struct SymmetrizationPair<M> {
    pub symmetric: ArithmeticSym<M>,
    pub antisymmetric: AntiSym<M>,
    pub harmonic: HarmonicSym<M>,
}

pub fn split_sym_asym<M: Finsler + Clone>(spec: M, m: u32) -> Result<SymmetrizationPair<M>> {
    Ok(SymmetrizationPair {
        symmetric: ArithmeticSym(spec.clone()),
        antisymmetric: AntiSym(spec.clone()),
        harmonic: HarmonicSym::new(spec, m)?,
    })
}

impl<M: Finsler> Finsler for ArithmeticSym<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let (buf, n) = negated(y);
        Ok(0.5 * (self.0.value(x, y)? + self.0.value(x, &buf[..n])?))
    }

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        let p = self.0.derivatives(x, y)?;
        let q = reflected(&self.0, x, y)?;
        Ok(Derivatives {
            value: 0.5 * (p.value + q.value),
            gradient: (p.gradient + q.gradient) * 0.5,
            hessian: (p.hessian + q.hessian) * 0.5,
        })
    }

    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.0.axis(x)
    }

    fn is_reversible(&self) -> bool {
        true
    }

    fn is_x_dependent(&self) -> bool {
        self.0.is_x_dependent()
    }
}

impl<M: Finsler> Finsler for AntiSym<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let (buf, n) = negated(y);
        Ok(0.5 * (self.0.value(x, y)? - self.0.value(x, &buf[..n])?))
    }

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        let p = self.0.derivatives(x, y)?;
        let q = reflected(&self.0, x, y)?;
        Ok(Derivatives {
            value: 0.5 * (p.value - q.value),
            gradient: (p.gradient - q.gradient) * 0.5,
            hessian: (p.hessian - q.hessian) * 0.5,
        })
    }

    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.0.axis(x)
    }

    fn is_x_dependent(&self) -> bool {
        self.0.is_x_dependent()
    }
}

impl<M: Finsler> Finsler for HarmonicSym<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if y.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        if self.inner.is_reversible() {
            return self.inner.value(x, y);
        }
        let (buf, n) = negated(y);
        let p = self.inner.value(x, y)?;
        let q = self.inner.value(x, &buf[..n])?;
        let m = self.order as f64;
        let u = 0.5 * (p.powf(-m) + q.powf(-m));
        let v = u.powf(-1.0 / m);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!(
                "m-harmonic symmetrization not finite: F(y) = {p}, F(-y) = {q}"
            )))
        }
    }

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        if self.inner.is_reversible() {
            return self.inner.derivatives(x, y);
        }
        let m = self.order as f64;
        let p = self.inner.derivatives(x, y)?;
        let q = reflected(&self.inner, x, y)?;
        if !(p.value > 0.0 && q.value > 0.0) {
            return Err(Error::domain(format!(
                "m-harmonic symmetrization needs F > 0 off the origin: F(y) = {}, F(-y) = {}",
                p.value, q.value
            )));
        }
        // u = (F(y)^-m + F(-y)^-m) / 2 and F_sym = u^(-1/m).
        let mut u = 0.0;
        let mut du = p.gradient.clone() * 0.0;
        let mut hu: DMatrix<f64> = p.hessian.clone() * 0.0;
        for d in [&p, &q] {
            let fm = d.value.powf(-m);
            u += 0.5 * fm;
            du += &d.gradient * (-0.5 * m * fm / d.value);
            hu += (&d.gradient * d.gradient.transpose() * ((m + 1.0) / d.value)
                - &d.hessian)
                * (0.5 * m * fm / d.value);
        }
        let k = 1.0 / m;
        let value = u.powf(-k);
        let c = -k * value / u;
        let gradient = &du * c;
        let hessian = (hu - &du * du.transpose() * ((k + 1.0) / u)) * c;
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        Ok(Derivatives {
            value,
            gradient,
            hessian,
        })
    }

    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner.axis(x)
    }

    fn is_reversible(&self) -> bool {
        true
    }

    fn is_x_dependent(&self) -> bool {
        self.inner.is_x_dependent()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{fd_derivatives, MetricSpec, Phi};
    use approx::assert_relative_eq;

    const X0: [f64; 3] = [0.0; 3];

    #[test]
    fn randers_two_harmonic_value() {
        let f = MetricSpec::randers(&[0.3, 0.0, 0.0]);
        let sym = symmetrize_m_harmonic(&f, 2).unwrap();
        let v = sym.value(&X0, &[1.0, 0.0, 0.0]).unwrap();
        // 2-harmonic mean of 1.3² and 0.7², square root; equals (1−s²)/√(1+s²).
        let expected = (2.0 / (1.3f64.powi(-2) + 0.7f64.powi(-2))).sqrt();
        assert_relative_eq!(v, expected, epsilon = 1e-15);
        assert_relative_eq!(v, 0.91 / 1.09f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(v, 0.871621, epsilon = 1e-6);
    }

    #[test]
    fn reversible_metric_is_its_own_symmetrization() {
        let f = MetricSpec::perturbed_quartic(3, 0.2);
        let sym = symmetrize_m_harmonic(&f, 2).unwrap();
        let y = [0.3, -1.0, 0.4];
        assert_eq!(sym.value(&X0, &y).unwrap(), f.value(&X0, &y).unwrap());
    }

    #[test]
    fn cui_shen_symmetrizes_to_euclidean() {
        let f = MetricSpec::alpha_beta(
            Phi::CuiShen {
                odd_coefficients: vec![0.6, -0.2],
                order: 2,
            },
            &[0.5, 0.2, 0.1],
        );
        let sym = symmetrize_m_harmonic(&f, 2).unwrap();
        for y in [[1.0f64, 0.0, 0.0], [0.3, -0.5, 0.8], [-2.0, 1.0, 0.1]] {
            let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            assert_relative_eq!(sym.value(&X0, &y).unwrap(), n, epsilon = 1e-13);
        }
    }

    #[test]
    fn parity_split() {
        let f = MetricSpec::randers(&[0.3, 0.0, 0.0]);
        let pair = split_sym_asym(&f, 2).unwrap();
        let y = [1.0, 0.0, 0.0];
        assert_relative_eq!(pair.symmetric.value(&X0, &y).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(pair.antisymmetric.value(&X0, &y).unwrap(), 0.3, epsilon = 1e-15);
        let y = [0.2, -0.7, 0.4];
        let fs = pair.symmetric.value(&X0, &y).unwrap();
        let fa = pair.antisymmetric.value(&X0, &y).unwrap();
        assert_relative_eq!(fs, (0.04f64 + 0.49 + 0.16).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(fa, 0.06, epsilon = 1e-15);
        assert_relative_eq!(fs + fa, f.value(&X0, &y).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn reversible_antisymmetric_part_vanishes() {
        let f = MetricSpec::perturbed_quartic(3, 0.5);
        let pair = split_sym_asym(&f, 2).unwrap();
        assert_eq!(pair.antisymmetric.value(&X0, &[0.3, 0.1, -0.9]).unwrap(), 0.0);
    }

    #[test]
    fn symmetrized_derivatives_match_finite_differences() {
        let specs = [
            MetricSpec::randers(&[0.3, 0.1, 0.0]),
            MetricSpec::two_order(&[0.1, 0.2, 0.0]),
            MetricSpec::matsumoto(&[0.0, 0.3, 0.2]),
        ];
        let y = [0.5, -0.2, 0.8];
        for f in &specs {
            for m in [1, 2, 3] {
                let sym = HarmonicSym::new(f, m).unwrap();
                let a = sym.derivatives(&X0, &y).unwrap();
                let n = fd_derivatives(|p| sym.value(&X0, p), 3, &y).unwrap();
                assert!((&a.gradient - &n.gradient).amax() < 1e-8);
                assert!((&a.hessian - &n.hessian).amax() < 1e-6);
            }
            let pair = split_sym_asym(f, 2).unwrap();
            for d in [
                (pair.symmetric.derivatives(&X0, &y).unwrap(), fd_derivatives(|p| pair.symmetric.value(&X0, p), 3, &y).unwrap()),
                (pair.antisymmetric.derivatives(&X0, &y).unwrap(), fd_derivatives(|p| pair.antisymmetric.value(&X0, p), 3, &y).unwrap()),
            ] {
                assert!((&d.0.gradient - &d.1.gradient).amax() < 1e-8);
                assert!((&d.0.hessian - &d.1.hessian).amax() < 1e-6);
            }
        }
    }
}
