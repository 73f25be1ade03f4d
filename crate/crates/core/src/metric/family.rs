use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_dim, dot, fd_derivatives, norm, Derivatives, Finsler, MAX_DIM};
use crate::error::{Error, Result};

/// Profile function `φ` of an (α,β)-metric `F = α φ(β/α)` with `α = |y|`,
/// `β = b·y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Phi {
    /// `φ(s) = 1 + s`.
    Randers,
    /// `φ(s) = (1 + s)^2`.
    TwoOrder,
    /// `φ(s) = 1 / (1 - s)`.
    Matsumoto,
    /// `φ(s) = Σ c_k s^k`.
    Polynomial { coefficients: Vec<f64> },
    /// `φ(s) = (1 + h(s))^(-1/m)` with odd `h(s) = Σ h_j s^(2j+1)`.
    CuiShen { odd_coefficients: Vec<f64>, order: u32 },
}

impl Phi {
    /// `(φ, φ', φ'')` at `s`.
    pub fn eval(&self, s: f64) -> Result<[f64; 3]> {
        let out = match self {
            Phi::Randers => [1.0 + s, 1.0, 0.0],
            Phi::TwoOrder => [(1.0 + s) * (1.0 + s), 2.0 * (1.0 + s), 2.0],
            Phi::Matsumoto => {
                let d = 1.0 - s;
                if d <= 1e-12 {
                    return Err(Error::domain(format!(
                        "Matsumoto profile singular: ratio β/α = {s} reaches the pole at 1"
                    )));
                }
                [1.0 / d, 1.0 / (d * d), 2.0 / (d * d * d)]
            }
            Phi::Polynomial { coefficients } => poly_eval(coefficients, s),
            Phi::CuiShen {
                odd_coefficients,
                order,
            } => {
                let mut full = vec![0.0; 2 * odd_coefficients.len() + 1];
                for (j, c) in odd_coefficients.iter().enumerate() {
                    full[2 * j + 1] = *c;
                }
                let [h, dh, ddh] = poly_eval(&full, s);
                let base = 1.0 + h;
                if base <= 0.0 {
                    return Err(Error::domain(format!(
                        "Cui-Shen profile singular: 1 + h(s) = {base} at s = {s}"
                    )));
                }
                let p = 1.0 / *order as f64;
                let v = base.powf(-p);
                [
                    v,
                    -p * v / base * dh,
                    p * (p + 1.0) * v / (base * base) * dh * dh - p * v / base * ddh,
                ]
            }
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::domain(format!("profile φ not finite at s = {s}")))
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Phi::Polynomial { coefficients } => coefficients
                .iter()
                .skip(1)
                .step_by(2)
                .all(|c| *c == 0.0),
            Phi::CuiShen {
                odd_coefficients, ..
            } => odd_coefficients.iter().all(|c| *c == 0.0),
            _ => false,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Phi::Randers => "randers",
            Phi::TwoOrder => "two-order",
            Phi::Matsumoto => "matsumoto",
            Phi::Polynomial { .. } => "alpha-beta",
            Phi::CuiShen { .. } => "cui-shen",
        }
    }
}

fn poly_eval(c: &[f64], s: f64) -> [f64; 3] {
    // Horner for the polynomial and its first two derivatives.
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        ddp = ddp * s + 2.0 * dp;
        dp = dp * s + p;
        p = p * s + a;
    }
    [p, dp, ddp]
}

/// Reversible part of a composite metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum ReversibleBase {
    Euclidean,
    PerturbedQuartic { epsilon: f64 },
}

/// Position-dependent drift `b(x)` of a composite metric
/// `F(x,y) = F_r(y) + b(x)·y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Drift {
    Constant { b: Vec<f64> },
    /// `b(x) = offset + amplitude · sin(wavevector · x)`.
    Sinusoidal {
        offset: Vec<f64>,
        amplitude: Vec<f64>,
        wavevector: Vec<f64>,
    },
}

impl Drift {
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Drift::Constant { b } => out.copy_from_slice(b),
            Drift::Sinusoidal {
                offset,
                amplitude,
                wavevector,
            } => {
                let phase = dot(wavevector, x).sin();
                for i in 0..out.len() {
                    out[i] = offset[i] + amplitude[i] * phase;
                }
            }
        }
    }

    /// Drift vector at `x`.
    pub fn at(&self, x: &[f64]) -> Vec<f64> {
        let n = match self {
            Drift::Constant { b } => b.len(),
            Drift::Sinusoidal { offset, .. } => offset.len(),
        };
        let mut out = vec![0.0; n];
        self.eval_into(x, &mut out);
        out
    }

    /// Supremum of `|b(x)|` over all `x`, bounded from above.
    pub fn sup_norm_bound(&self) -> f64 {
        match self {
            Drift::Constant { b } => norm(b),
            Drift::Sinusoidal {
                offset, amplitude, ..
            } => norm(offset) + norm(amplitude),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Drift::Constant { b } => b.iter().all(|v| *v == 0.0),
            Drift::Sinusoidal {
                offset, amplitude, ..
            } => offset.iter().chain(amplitude).all(|v| *v == 0.0),
        }
    }

    fn is_x_dependent(&self) -> bool {
        match self {
            Drift::Constant { .. } => false,
            Drift::Sinusoidal {
                amplitude,
                wavevector,
                ..
            } => amplitude.iter().any(|v| *v != 0.0) && wavevector.iter().any(|v| *v != 0.0),
        }
    }

    fn lengths(&self) -> Vec<usize> {
        match self {
            Drift::Constant { b } => vec![b.len()],
            Drift::Sinusoidal {
                offset,
                amplitude,
                wavevector,
            } => vec![offset.len(), amplitude.len(), wavevector.len()],
        }
    }
}

/// Family of a [`MetricSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum Family {
    Euclidean,
    AlphaBeta { phi: Phi, b: Vec<f64> },
    PerturbedQuartic { epsilon: f64 },
    Composite { base: ReversibleBase, drift: Drift },
}

/// A built-in Finsler structure on `R^n` with analytic y-derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    dim: usize,
    family: Family,
}

impl MetricSpec {
    pub fn new(dim: usize, family: Family) -> Result<Self> {
        let spec = MetricSpec { dim, family };
        spec.validate()?;
        Ok(spec)
    }

    pub fn euclidean(dim: usize) -> Self {
        MetricSpec {
            dim,
            family: Family::Euclidean,
        }
    }

    pub fn alpha_beta(phi: Phi, b: &[f64]) -> Self {
        MetricSpec {
            dim: b.len(),
            family: Family::AlphaBeta {
                phi,
                b: b.to_vec(),
            },
        }
    }

    /// `F(y) = |y| + b·y`.
    pub fn randers(b: &[f64]) -> Self {
        Self::alpha_beta(Phi::Randers, b)
    }

    /// `F(y) = |y| (1 + b·y/|y|)^2`.
    pub fn two_order(b: &[f64]) -> Self {
        Self::alpha_beta(Phi::TwoOrder, b)
    }

    /// `F(y) = |y|^2 / (|y| - b·y)`.
    pub fn matsumoto(b: &[f64]) -> Self {
        Self::alpha_beta(Phi::Matsumoto, b)
    }

    /// `F(y) = sqrt(sqrt(Σ y_i^4) + ε Σ y_i^2)`.
    pub fn perturbed_quartic(dim: usize, epsilon: f64) -> Self {
        MetricSpec {
            dim,
            family: Family::PerturbedQuartic { epsilon },
        }
    }

    /// `F(x,y) = F_r(y) + b(x)·y`.
    pub fn composite(dim: usize, base: ReversibleBase, drift: Drift) -> Self {
        MetricSpec {
            dim,
            family: Family::Composite { base, drift },
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Short family tag used in reports.
    pub fn tag(&self) -> &'static str {
        match &self.family {
            Family::Euclidean => "euclidean",
            Family::AlphaBeta { phi, .. } => phi.tag(),
            Family::PerturbedQuartic { .. } => "perturbed-quartic",
            Family::Composite { .. } => "composite",
        }
    }

    /// The constant drift vector `b` of an (α,β) or constant composite metric.
    pub fn drift(&self) -> Option<Vec<f64>> {
        match &self.family {
            Family::AlphaBeta { b, .. } => Some(b.clone()),
            Family::Composite { drift, .. } if !drift.is_x_dependent() => {
                Some(drift.at(&vec![0.0; self.dim]))
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_DIM).contains(&self.dim) {
            return Err(Error::config(format!(
                "dimension {} outside 2..={MAX_DIM}",
                self.dim
            )));
        }
        let positive = |eps: f64| {
            if eps > 0.0 && eps.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("quartic epsilon must be > 0, got {eps}")))
            }
        };
        match &self.family {
            Family::Euclidean => {}
            Family::AlphaBeta { phi, b } => {
                if b.len() != self.dim {
                    return Err(Error::config(format!(
                        "drift b has length {} but dimension is {}",
                        b.len(),
                        self.dim
                    )));
                }
                if let Phi::CuiShen { order: 0, .. } = phi {
                    return Err(Error::config("Cui-Shen order must be >= 1"));
                }
            }
            Family::PerturbedQuartic { epsilon } => positive(*epsilon)?,
            Family::Composite { base, drift } => {
                if let ReversibleBase::PerturbedQuartic { epsilon } = base {
                    positive(*epsilon)?;
                }
                if drift.lengths().iter().any(|&l| l != self.dim) {
                    return Err(Error::config(format!(
                        "drift vectors must have length {}",
                        self.dim
                    )));
                }
            }
        }
        Ok(())
    }
}

fn quartic_value_grad(eps: f64, y: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let p: f64 = y.iter().map(|v| v.powi(4)).sum();
    let s: f64 = y.iter().map(|v| v * v).sum();
    if s == 0.0 {
        if let Some(g) = grad {
            g.fill(0.0);
        }
        return 0.0;
    }
    let sp = p.sqrt();
    let f = (sp + eps * s).sqrt();
    if let Some(g) = grad {
        for (gi, yi) in g.iter_mut().zip(y) {
            *gi = (2.0 * yi.powi(3) / sp + 2.0 * eps * yi) / (2.0 * f);
        }
    }
    f
}

fn quartic_hessian(eps: f64, y: &[f64]) -> DMatrix<f64> {
    let n = y.len();
    let p: f64 = y.iter().map(|v| v.powi(4)).sum();
    let s: f64 = y.iter().map(|v| v * v).sum();
    let sp = p.sqrt();
    let f = (sp + eps * s).sqrt();
    let dq = DVector::from_fn(n, |i, _| 2.0 * y[i].powi(3) / sp + 2.0 * eps * y[i]);
    let hq = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j {
            6.0 * y[i] * y[i] / sp + 2.0 * eps
        } else {
            0.0
        };
        diag - 4.0 * y[i].powi(3) * y[j].powi(3) / (p * sp)
    });
    hq / (2.0 * f) - &dq * dq.transpose() / (4.0 * f * f * f)
}

fn euclidean_hessian(y: &[f64]) -> DMatrix<f64> {
    let r = norm(y);
    let n = y.len();
    DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        (id - y[i] * y[j] / (r * r)) / r
    })
}

impl MetricSpec {
    fn alpha_beta_value_grad(
        phi: &Phi,
        b: &[f64],
        y: &[f64],
        grad: Option<&mut [f64]>,
    ) -> Result<f64> {
        let a = norm(y);
        if a == 0.0 {
            if let Some(g) = grad {
                g.fill(0.0);
            }
            return Ok(0.0);
        }
        let s = dot(b, y) / a;
        let [p, dp, _] = phi.eval(s)?;
        if let Some(g) = grad {
            let c = p - s * dp;
            for i in 0..y.len() {
                g[i] = c * y[i] / a + dp * b[i];
            }
        }
        Ok(a * p)
    }
}

impl Finsler for MetricSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y, "direction y")?;
        let v = match &self.family {
            Family::Euclidean => norm(y),
            Family::AlphaBeta { phi, b } => Self::alpha_beta_value_grad(phi, b, y, None)?,
            Family::PerturbedQuartic { epsilon } => quartic_value_grad(*epsilon, y, None),
            Family::Composite { base, drift } => {
                let mut buf = [0.0; MAX_DIM];
                let bx = &mut buf[..self.dim];
                drift.eval_into(x, bx);
                let r = match base {
                    ReversibleBase::Euclidean => norm(y),
                    ReversibleBase::PerturbedQuartic { epsilon } => {
                        quartic_value_grad(*epsilon, y, None)
                    }
                };
                r + dot(bx, y)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("{} metric not finite at y = {y:?}", self.tag())))
        }
    }

    fn value_grad(&self, x: &[f64], y: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.dim, y, "direction y")?;
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::domain("derivatives requested at y = 0"));
        }
        match &self.family {
            Family::Euclidean => {
                let r = norm(y);
                for (g, yi) in grad.iter_mut().zip(y) {
                    *g = yi / r;
                }
                Ok(r)
            }
            Family::AlphaBeta { phi, b } => Self::alpha_beta_value_grad(phi, b, y, Some(grad)),
            Family::PerturbedQuartic { epsilon } => {
                Ok(quartic_value_grad(*epsilon, y, Some(grad)))
            }
            Family::Composite { base, drift } => {
                let mut buf = [0.0; MAX_DIM];
                let bx = &mut buf[..self.dim];
                drift.eval_into(x, bx);
                let r = match base {
                    ReversibleBase::Euclidean => {
                        let r = norm(y);
                        for (g, yi) in grad.iter_mut().zip(y) {
                            *g = yi / r;
                        }
                        r
                    }
                    ReversibleBase::PerturbedQuartic { epsilon } => {
                        quartic_value_grad(*epsilon, y, Some(&mut *grad))
                    }
                };
                for (g, bi) in grad.iter_mut().zip(bx.iter()) {
                    *g += bi;
                }
                Ok(r + dot(bx, y))
            }
        }
    }

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        let mut g = vec![0.0; self.dim];
        let value = self.value_grad(x, y, &mut g)?;
        let hessian = match &self.family {
            Family::Euclidean => euclidean_hessian(y),
            Family::AlphaBeta { phi, b } => {
                let a = norm(y);
                let s = dot(b, y) / a;
                let [p, dp, ddp] = phi.eval(s)?;
                let n = self.dim;
                let t = DVector::from_fn(n, |i, _| b[i] - s * y[i] / a);
                let proj = DMatrix::from_fn(n, n, |i, j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - y[i] * y[j] / (a * a)
                });
                &t * t.transpose() * (ddp / a) + proj * ((p - s * dp) / a)
            }
            Family::PerturbedQuartic { epsilon } => quartic_hessian(*epsilon, y),
            Family::Composite { base, .. } => match base {
                ReversibleBase::Euclidean => euclidean_hessian(y),
                ReversibleBase::PerturbedQuartic { epsilon } => quartic_hessian(*epsilon, y),
            },
        };
        Ok(Derivatives {
            value,
            gradient: DVector::from_vec(g),
            hessian,
        })
    }

    fn axis(&self, x: &[f64]) -> Option<Vec<f64>> {
        let b = match &self.family {
            Family::AlphaBeta { b, .. } => b.clone(),
            Family::Composite { drift, .. } => drift.at(x),
            _ => return None,
        };
        (norm(&b) > 0.0).then_some(b)
    }

    fn is_reversible(&self) -> bool {
        match &self.family {
            Family::Euclidean | Family::PerturbedQuartic { .. } => true,
            Family::AlphaBeta { phi, b } => phi.is_even() || b.iter().all(|v| *v == 0.0),
            Family::Composite { drift, .. } => drift.is_zero(),
        }
    }

    fn is_x_dependent(&self) -> bool {
        matches!(&self.family, Family::Composite { drift, .. } if drift.is_x_dependent())
    }
}

/// A metric given by a closure, differentiated by central finite
/// differences.
///
/// This is the route for composites with a user-supplied drift `b(x)`; the
/// closure must be positively 1-homogeneous in `y` and `C^2` off `y = 0`.
pub struct FnMetric<Fun> {
    dim: usize,
    f: Fun,
    reversible: bool,
    x_dependent: bool,
}

impl<Fun> FnMetric<Fun>
where
    Fun: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: Fun) -> Self {
        FnMetric {
            dim,
            f,
            reversible: false,
            x_dependent: true,
        }
    }

    pub fn reversible(mut self, yes: bool) -> Self {
        self.reversible = yes;
        self
    }

    pub fn x_dependent(mut self, yes: bool) -> Self {
        self.x_dependent = yes;
        self
    }
}

impl<Fun> Finsler for FnMetric<Fun>
where
    Fun: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y, "direction y")?;
        if y.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let v = (self.f)(x, y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("metric closure not finite at y = {y:?}")))
        }
    }

    fn derivatives(&self, x: &[f64], y: &[f64]) -> Result<Derivatives> {
        check_dim(self.dim, y, "direction y")?;
        fd_derivatives(|p| self.value(x, p), self.dim, y)
    }

    fn is_reversible(&self) -> bool {
        self.reversible
    }

    fn is_x_dependent(&self) -> bool {
        self.x_dependent
    }
}
