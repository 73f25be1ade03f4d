//! Finsler structures on `R^n`, their y-derivatives, symmetrizations and
//! the pointwise Finsler-property checks.

mod check;
mod family;
mod symmetrize;

pub use check::{
    check_alphabeta_finsler, check_finsler, check_finsler_with, fundamental_tensor,
    min_eigenvalue, FinslerReport, FundamentalTensor, DEFAULT_FINSLER_TOL,
};
pub use family::{Drift, Family, FnMetric, MetricSpec, Phi, ReversibleBase};
pub use symmetrize::{
    split_sym_asym, symmetrize_m_harmonic, AntiSym, ArithmeticSym, HarmonicSym, SymmetrizationPair,
};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest supported dimension of the ambient space.
pub const MAX_DIM: usize = 8;

/// Value, y-gradient and y-Hessian of a 1-homogeneous function at one point.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// A positively 1-homogeneous function `F(x, y)` on `R^n × R^n`.
///
/// Finsler metrics are the main implementors, but arithmetic parts such as
/// the antisymmetric part of a metric also implement it so that their
/// derivatives are available through the same machinery. Implementations
/// return `0` at `y = 0` and refuse derivative requests there.
pub trait Finsler: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64>;

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives>;

    /// Value and y-gradient; the gradient is written into `grad`.
    fn value_grad(&self, x: &[f64], y: &[f64], grad: &mut [f64]) -> Result<f64> {
        let d = self.derivatives(x, y)?;
        grad.copy_from_slice(d.gradient.as_slice());
        Ok(d.value)
    }

    /// Preferred direction at `x` (the drift of a Randers-type metric), used
    /// to align direction samples.
    fn axis(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn is_reversible(&self) -> bool {
        false
    }

    fn is_x_dependent(&self) -> bool {
        false
    }
}

impl<T: Finsler + ?Sized> Finsler for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        (**self).value(x, y)
    }
    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        (**self).derivatives(x, y)
    }
    fn value_grad(&self, x: &[f64], y: &[f64], grad: &mut [f64]) -> Result<f64> {
        (**self).value_grad(x, y, grad)
    }
    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        (**self).axis(x)
    }
    fn is_reversible(&self) -> bool {
        (**self).is_reversible()
    }
    fn is_x_dependent(&self) -> bool {
        (**self).is_x_dependent()
    }
}

impl<T: Finsler + ?Sized> Finsler for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        (**self).value(x, y)
    }
    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        (**self).derivatives(x, y)
    }
    fn value_grad(&self, x: &[f64], y: &[f64], grad: &mut [f64]) -> Result<f64> {
        (**self).value_grad(x, y, grad)
    }
    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        (**self).axis(x)
    }
    fn is_reversible(&self) -> bool {
        (**self).is_reversible()
    }
    fn is_x_dependent(&self) -> bool {
        (**self).is_x_dependent()
    }
}

/// `F(x, y)`, zero at `y = 0`.
pub fn eval_metric<F: Finsler + ?Sized>(f: &F, x: &[f64], y: &[f64]) -> Result<f64> {
    f.value(x, y)
}

/// y-gradient and y-Hessian of `F` at `(x, y)`.
pub fn grad_hess_y<F: Finsler + ?Sized>(
    f: &F,
    x: &[f64],
    y: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = f.derivatives(x, y)?;
    Ok((d.gradient, d.hessian))
}

/// Central finite-difference derivatives of a 1-homogeneous function.
///
/// Differences are taken at the unit vector `y/|y|` and rescaled (the
/// gradient is 0-homogeneous, the Hessian (-1)-homogeneous), so the step never
/// underflows for tiny `y`. Gradient step `cbrt(eps)`, Hessian step
/// `eps^(1/4)`.
pub fn fd_derivatives<F>(value: F, dim: usize, y: &[f64]) -> Result<Derivatives>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > f64::MIN_POSITIVE) {
        return Err(Error::domain(
            "finite-difference step underflow: y is zero or not representable",
        ));
    }
    let u: Vec<f64> = y.iter().map(|v| v / norm).collect();
    let f0 = value(&u)?;
    let h1 = f64::EPSILON.cbrt();
    let h2 = f64::EPSILON.powf(0.25);
    let mut p = u.clone();
    let mut eval_at = |shifts: &[(usize, f64)]| -> Result<f64> {
        p.copy_from_slice(&u);
        for &(i, d) in shifts {
            p[i] += d;
        }
        value(&p)
    };
    let mut gradient = DVector::zeros(dim);
    for i in 0..dim {
        gradient[i] = (eval_at(&[(i, h1)])? - eval_at(&[(i, -h1)])?) / (2.0 * h1);
    }
    let mut hessian = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let fp = eval_at(&[(i, h2)])?;
        let fm = eval_at(&[(i, -h2)])?;
        hessian[(i, i)] = (fp - 2.0 * f0 + fm) / (h2 * h2);
        for j in 0..i {
            let v = (eval_at(&[(i, h2), (j, h2)])? - eval_at(&[(i, h2), (j, -h2)])?
                - eval_at(&[(i, -h2), (j, h2)])?
                + eval_at(&[(i, -h2), (j, -h2)])?)
                / (4.0 * h2 * h2);
            hessian[(i, j)] = v;
            hessian[(j, i)] = v;
        }
    }
    Ok(Derivatives {
        value: f0 * norm,
        gradient,
        hessian: hessian / norm,
    })
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub(crate) fn check_dim(expected: usize, v: &[f64], what: &str) -> Result<()> {
    if v.len() != expected {
        return Err(Error::domain(format!(
            "{what} has length {} but the metric lives in R^{expected}",
            v.len()
        )));
    }
    Ok(())
}
