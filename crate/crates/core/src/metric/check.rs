use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{Finsler, Phi};
use crate::error::{Error, Result};
use crate::sampling::sphere_directions;

/// Tolerance of the Finsler verdict.
pub const DEFAULT_FINSLER_TOL: f64 = 1e-9;

/// `g_ij(x,y) = (F²/2)_{y^i y^j}` at one point.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalTensor {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub g: DMatrix<f64>,
}

impl FundamentalTensor {
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.g)
    }
}

/// Fundamental tensor `∇F ⊗ ∇F + F Hess F`, symmetrized.
pub fn fundamental_tensor<F: Finsler + ?Sized>(
    f: &F,
    x: &[f64],
    y: &[f64],
) -> Result<FundamentalTensor> {
    let d = f.derivatives(x, y)?;
    let g = &d.gradient * d.gradient.transpose() + &d.hessian * d.value;
    let g = (&g + g.transpose()) * 0.5;
    Ok(FundamentalTensor {
        x: x.to_vec(),
        y: y.to_vec(),
        g,
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Outcome of the pointwise Finsler checks over a direction sample.
#[derive(Clone, Debug, Serialize)]
pub struct FinslerReport {
    pub sample_count: usize,
    pub min_value: f64,
    pub min_value_direction: Vec<f64>,
    /// Largest `|F(ty) - tF(y)| / (tF(y))` over `t ∈ {0.5, 2, 10}`.
    pub max_homogeneity_residual: f64,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_x: Vec<f64>,
    pub min_eigenvalue_direction: Vec<f64>,
    pub tolerance: f64,
    pub verdict: bool,
    /// First evaluation failure, if any (e.g. a singular profile).
    pub failure: Option<String>,
}

impl FinslerReport {
    /// Worst case of two reports (used when scanning several base points).
    pub fn merge(self, other: FinslerReport) -> FinslerReport {
        let (lo_v, _) = pick(&self, &other, |r| r.min_value);
        let (lo_e, _) = pick(&self, &other, |r| r.min_eigenvalue);
        FinslerReport {
            sample_count: self.sample_count + other.sample_count,
            min_value: lo_v.min_value,
            min_value_direction: lo_v.min_value_direction.clone(),
            max_homogeneity_residual: self
                .max_homogeneity_residual
                .max(other.max_homogeneity_residual),
            min_eigenvalue: lo_e.min_eigenvalue,
            min_eigenvalue_x: lo_e.min_eigenvalue_x.clone(),
            min_eigenvalue_direction: lo_e.min_eigenvalue_direction.clone(),
            tolerance: self.tolerance,
            verdict: self.verdict && other.verdict,
            failure: self.failure.clone().or_else(|| other.failure.clone()),
        }
    }
}

fn pick<'a>(
    a: &'a FinslerReport,
    b: &'a FinslerReport,
    key: impl Fn(&FinslerReport) -> f64,
) -> (&'a FinslerReport, &'a FinslerReport) {
    if key(b) < key(a) {
        (b, a)
    } else {
        (a, b)
    }
}

/// Finsler checks at `x` over `sample_count` quasi-uniform directions, with
/// the default tolerance.
pub fn check_finsler<F: Finsler + ?Sized>(
    f: &F,
    x: &[f64],
    sample_count: usize,
) -> Result<FinslerReport> {
    check_finsler_with(f, x, sample_count, DEFAULT_FINSLER_TOL)
}

/// Positivity, 1-homogeneity and positive definiteness of the fundamental
/// tensor on a direction sample at `x`; the verdict requires all three to
/// exceed `tol`.
pub fn check_finsler_with<F: Finsler + ?Sized>(
    f: &F,
    x: &[f64],
    sample_count: usize,
    tol: f64,
) -> Result<FinslerReport> {
    if sample_count < 100 {
        return Err(Error::config(format!(
            "Finsler check needs at least 100 directions, got {sample_count}"
        )));
    }
    let n = f.dim();
    let axis = f.axis(x);
    let dirs = sphere_directions(n, sample_count, axis.as_deref(), 0x5eed);
    let mut report = FinslerReport {
        sample_count: dirs.len(),
        min_value: f64::INFINITY,
        min_value_direction: vec![],
        max_homogeneity_residual: 0.0,
        min_eigenvalue: f64::INFINITY,
        min_eigenvalue_x: x.to_vec(),
        min_eigenvalue_direction: vec![],
        tolerance: tol,
        verdict: true,
        failure: None,
    };
    for y in &dirs {
        let y = y.as_slice();
        let step = (|| -> Result<()> {
            let v = f.value(x, y)?;
            if v < report.min_value {
                report.min_value = v;
                report.min_value_direction = y.to_vec();
            }
            for t in [0.5, 2.0, 10.0] {
                let ty: Vec<f64> = y.iter().map(|c| c * t).collect();
                let r = (f.value(x, &ty)? - t * v).abs() / (t * v.abs()).max(f64::MIN_POSITIVE);
                report.max_homogeneity_residual = report.max_homogeneity_residual.max(r);
            }
            let g = fundamental_tensor(f, x, y)?;
            let e = g.min_eigenvalue();
            if !e.is_finite() {
                return Err(Error::domain(format!("fundamental tensor not finite at y = {y:?}")));
            }
            if e < report.min_eigenvalue {
                report.min_eigenvalue = e;
                report.min_eigenvalue_direction = y.to_vec();
            }
            Ok(())
        })();
        if let Err(e) = step {
            report.verdict = false;
            if report.failure.is_none() {
                report.failure = Some(format!("at y = {y:?}: {e}"));
            }
        }
    }
    report.verdict &= report.min_value > tol
        && report.max_homogeneity_residual <= tol
        && report.min_eigenvalue > tol;
    Ok(report)
}

/// The (α,β) criterion: `φ(s) > 0` and `φ - sφ' + (|b|² - s²)φ'' > 0` for
/// `|s| ≤ |b|`, checked on `grid` equally spaced points with margin `1e-10`.
pub fn check_alphabeta_finsler(phi: &Phi, b_norm: f64, grid: usize) -> Result<bool> {
    if !(b_norm >= 0.0 && b_norm.is_finite()) {
        return Err(Error::domain(format!("|b| must be finite and >= 0, got {b_norm}")));
    }
    let grid = grid.max(2);
    let b2 = b_norm * b_norm;
    let mut ok = true;
    for k in 0..grid {
        let s = -b_norm + 2.0 * b_norm * k as f64 / (grid - 1) as f64;
        let [p, dp, ddp] = phi.eval(s)?;
        let cond = p - s * dp + (b2 - s * s) * ddp;
        ok &= p > 1e-10 && cond > 1e-10;
    }
    Ok(ok)
}
