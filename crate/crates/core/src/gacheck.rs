//! Assumption (GA): the m-harmonic symmetrization `F_sym` is again a Finsler
//! metric. Decided directly from the fundamental tensor of `F_sym`, or through
//! the sufficient condition on the parity split `F = F_s + F_a`:
//!
//! 1. `((F_a)_y · w)² < (g_{F_s})(w, w) / (m + 1)` for all `w ≠ 0`,
//! 2. `F_a · Hess_y F_a` negative semidefinite.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{
    check_alphabeta_finsler, check_finsler_with, fundamental_tensor, ArithmeticSym, AntiSym,
    Finsler, FinslerReport, HarmonicSym, MetricSpec, Phi,
};
use crate::sampling::sphere_directions;

/// Strict positivity margin for definiteness verdicts.
pub const GA_MARGIN: f64 = 1e-10;
/// Tolerance on the largest eigenvalue of `F_a Hess F_a`.
pub const NSD_TOL: f64 = 1e-10;

/// A sample at which a condition failed.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub condition: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct GAReport {
    pub m: u32,
    pub sample_count: usize,
    /// Fundamental tensor of `F_sym` positive definite on every sample.
    pub direct_ga: bool,
    /// Smallest eigenvalue of that tensor.
    pub direct_margin: f64,
    /// `F_s` positive with positive definite fundamental tensor.
    pub fs_finsler: bool,
    /// Conditions 1 and 2 on every sample (and `F_s` Finsler).
    pub sufficient_cond: bool,
    /// Smallest eigenvalue of `g_{F_s}/(m+1) - ∇F_a ∇F_aᵀ`.
    pub condition1_margin: f64,
    /// Largest eigenvalue of `F_a Hess F_a`.
    pub condition2_max: f64,
    pub witness: Option<Witness>,
}

/// Evaluates direct (GA) and the sufficient condition on the same samples.
///
/// The quantifier over `w` is decided by an eigenproblem; `w_samples`, when
/// given, only select the reported witness direction.
pub fn sufficient_condition<M: Finsler>(
    metric: &M,
    m: u32,
    x_samples: &[Vec<f64>],
    y_samples: &[DVector<f64>],
    w_samples: &[DVector<f64>],
) -> Result<GAReport> {
    let n = metric.dim();
    let origin = [vec![0.0; n]];
    let xs = if x_samples.is_empty() { &origin[..] } else { x_samples };
    let fs = ArithmeticSym(metric);
    let fa = AntiSym(metric);
    let fsym = HarmonicSym::new(metric, m)?;
    let scale = 1.0 / (m as f64 + 1.0);
    let mut r = GAReport {
        m,
        sample_count: xs.len() * y_samples.len(),
        direct_ga: true,
        direct_margin: f64::INFINITY,
        fs_finsler: true,
        sufficient_cond: true,
        condition1_margin: f64::INFINITY,
        condition2_max: f64::NEG_INFINITY,
        witness: None,
    };
    for x in xs {
        for y in y_samples {
            let y = y.as_slice();
            match fundamental_tensor(&fsym, x, y) {
                Ok(g) => r.direct_margin = r.direct_margin.min(g.min_eigenvalue()),
                Err(_) => r.direct_margin = f64::NEG_INFINITY,
            }
            let gs = fundamental_tensor(&fs, x, y)?;
            let fs_val = fs.value(x, y)?;
            let gs_min = gs.min_eigenvalue();
            if !(fs_val > GA_MARGIN && gs_min > GA_MARGIN) {
                r.fs_finsler = false;
            }
            let da = fa.derivatives(x, y)?;
            let c1 = &gs.g * scale - &da.gradient * da.gradient.transpose();
            let e1 = SymmetricEigen::new(c1.clone());
            let (i1, &min1) = e1
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty spectrum");
            let c2 = &da.hessian * da.value;
            let max2 = SymmetricEigen::new((&c2 + c2.transpose()) * 0.5).eigenvalues.max();
            r.condition1_margin = r.condition1_margin.min(min1);
            r.condition2_max = r.condition2_max.max(max2);
            if r.witness.is_none() && (min1 <= GA_MARGIN || max2 > NSD_TOL) {
                let condition = if min1 <= GA_MARGIN { 1 } else { 2 };
                let matrix = if condition == 1 { c1 } else { -c2 };
                let w = worst_sample(&matrix, w_samples)
                    .unwrap_or_else(|| e1.eigenvectors.column(i1).into_owned());
                r.witness = Some(Witness {
                    x: x.clone(),
                    y: y.to_vec(),
                    w: w.as_slice().to_vec(),
                    condition,
                });
            }
        }
    }
    r.direct_ga = r.direct_margin > GA_MARGIN;
    r.sufficient_cond = r.fs_finsler && r.condition1_margin > GA_MARGIN && r.condition2_max <= NSD_TOL;
    Ok(r)
}

/// Sample `w` minimizing `wᵀ M w / |w|²` if that value is non-positive.
fn worst_sample(matrix: &DMatrix<f64>, ws: &[DVector<f64>]) -> Option<DVector<f64>> {
    ws.iter()
        .filter(|w| w.len() == matrix.nrows() && w.norm() > 0.0)
        .map(|w| ((w.transpose() * matrix * w)[0] / w.norm_squared(), w))
        .filter(|(q, _)| *q <= GA_MARGIN)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, w)| w.clone())
}

/// Direct (GA) verdict.
#[derive(Clone, Debug, Serialize)]
pub struct DirectGA {
    pub holds: bool,
    /// Smallest fundamental-tensor eigenvalue of `F_sym` over the samples.
    pub margin: f64,
    pub report: FinslerReport,
}

/// (GA) at the origin.
pub fn ga_direct<M: Finsler>(metric: &M, m: u32, sample_count: usize) -> Result<DirectGA> {
    ga_direct_on(metric, m, &[vec![0.0; metric.dim()]], sample_count)
}

/// (GA) at each base point of `xs`.
pub fn ga_direct_on<M: Finsler>(
    metric: &M,
    m: u32,
    xs: &[Vec<f64>],
    sample_count: usize,
) -> Result<DirectGA> {
    let sym = HarmonicSym::new(metric, m)?;
    let mut report: Option<FinslerReport> = None;
    for x in xs {
        let r = check_finsler_with(&sym, x, sample_count, GA_MARGIN)?;
        report = Some(match report {
            None => r,
            Some(prev) => prev.merge(r),
        });
    }
    let report = report.ok_or_else(|| Error::config("no base points given"))?;
    Ok(DirectGA {
        holds: report.verdict,
        margin: report.min_eigenvalue,
        report,
    })
}

/// One row of a threshold table.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdRow {
    pub family: String,
    pub b: f64,
    pub finsler: bool,
    pub ga_direct: bool,
    pub sufficient: bool,
    pub ga_margin: f64,
    pub sufficient_margin: f64,
}

impl ThresholdRow {
    pub fn verdict(&self) -> bool {
        self.finsler && self.ga_direct
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdResult {
    pub family: String,
    pub m: u32,
    /// Midpoint of the final bracket.
    pub critical_b: f64,
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    pub sign_changes: usize,
    pub rows: Vec<ThresholdRow>,
}

/// Configuration of a threshold scan.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub m: u32,
    /// Grid points of the initial scan.
    pub grid: usize,
    /// Directions per (GA) evaluation.
    pub sample_count: usize,
    /// Grid of the (α,β) criterion in `s`.
    pub profile_grid: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            m: 2,
            grid: 41,
            sample_count: 1000,
            profile_grid: 2001,
        }
    }
}

/// Table row for the (α,β) metric with profile `phi` and `|b| = b`.
pub fn evaluate_row(phi: &Phi, b: f64, cfg: &ScanConfig) -> Result<ThresholdRow> {
    let finsler = match check_alphabeta_finsler(phi, b, cfg.profile_grid) {
        Ok(v) => v,
        Err(Error::Domain(_)) => false,
        Err(e) => return Err(e),
    };
    let n = cfg.m as usize + 1;
    let mut bv = vec![0.0; n];
    bv[0] = b;
    let metric = MetricSpec::alpha_beta(phi.clone(), &bv);
    let direct = ga_direct(&metric, cfg.m, cfg.sample_count)?;
    let ys = sphere_directions(n, cfg.sample_count, Some(&bv), 0x5eed);
    let (sufficient, sufficient_margin) = match sufficient_condition(&metric, cfg.m, &[], &ys, &[]) {
        Ok(r) => (r.sufficient_cond, r.condition1_margin.min(0.0 - r.condition2_max)),
        Err(Error::Domain(_)) => (false, f64::NEG_INFINITY),
        Err(e) => return Err(e),
    };
    Ok(ThresholdRow {
        family: phi.tag().to_string(),
        b,
        finsler,
        ga_direct: direct.holds,
        sufficient,
        ga_margin: direct.margin,
        sufficient_margin,
    })
}

/// Critical `|b|` of an (α,β) family where `F Finsler ∧ (GA)` first fails.
///
/// Scans a uniform grid on `[b_low, b_high]` in parallel, checks that the
/// verdicts change sign exactly once, then bisects the bracketing cell to
/// width `≤ tol`.
pub fn threshold_scan(phi: &Phi, b_low: f64, b_high: f64, tol: f64) -> Result<ThresholdResult> {
    threshold_scan_with(phi, b_low, b_high, tol, &ScanConfig::default())
}

pub fn threshold_scan_with(
    phi: &Phi,
    b_low: f64,
    b_high: f64,
    tol: f64,
    cfg: &ScanConfig,
) -> Result<ThresholdResult> {
    if !(0.0 <= b_low && b_low < b_high && b_high.is_finite()) {
        return Err(Error::config(format!("need 0 <= b_low < b_high, got [{b_low}, {b_high}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::config(format!("tolerance must be positive, got {tol}")));
    }
    let grid = cfg.grid.max(2);
    let bs: Vec<f64> = (0..grid)
        .map(|k| b_low + (b_high - b_low) * k as f64 / (grid - 1) as f64)
        .collect();
    let mut rows: Vec<ThresholdRow> = bs
        .par_iter()
        .map(|&b| evaluate_row(phi, b, cfg))
        .collect::<Result<_>>()?;
    let sign_changes = rows.windows(2).filter(|w| w[0].verdict() != w[1].verdict()).count();
    let mut result = ThresholdResult {
        family: phi.tag().to_string(),
        m: cfg.m,
        critical_b: f64::NAN,
        bracket: (b_low, b_high),
        bracket_width: b_high - b_low,
        sign_changes,
        rows: rows.clone(),
    };
    if !rows[0].verdict() || rows[grid - 1].verdict() {
        return Err(Error::config(format!(
            "verdict must hold at b_low and fail at b_high (got {} and {})",
            rows[0].verdict(),
            rows[grid - 1].verdict()
        )));
    }
    if sign_changes != 1 {
        return Err(Error::ScanInconsistent(sign_changes, Box::new(result)));
    }
    let k = rows.iter().position(|r| !r.verdict()).expect("one sign change");
    let (mut lo, mut hi) = (bs[k - 1], bs[k]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let row = evaluate_row(phi, mid, cfg)?;
        if row.verdict() {
            lo = mid;
        } else {
            hi = mid;
        }
        rows.push(row);
    }
    rows.sort_by(|a, b| a.b.total_cmp(&b.b));
    result.rows = rows;
    result.bracket = (lo, hi);
    result.bracket_width = hi - lo;
    result.critical_b = 0.5 * (lo + hi);
    Ok(result)
}

fn binomials(m: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..m {
        let next = &row[k as usize] * BigInt::from(m - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

fn binomial_gap_coefficients(m: u32) -> Vec<BigInt> {
    let c = binomials(m);
    let get = |i: u32| if i <= m { c[i as usize].clone() } else { BigInt::zero() };
    (0..=m / 2).map(|k| get(2 * k + 1) - get(2 * k)).collect()
}

fn binomial_gap_domain(m: u32, a_pos: bool, a_lt_one: bool, a2_times: impl Fn(u32) -> bool) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("m must be >= 1"));
    }
    let ok = if m % 2 == 1 || m == 2 {
        a_pos && a_lt_one
    } else {
        a_pos && a2_times(m - 1)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "a outside the admissible interval for m = {m}"
        )))
    }
}

/// `f(a, m) = Σ_{k=0}^{⌊m/2⌋} [C(m, 2k+1) - C(m, 2k)] a^{2k}`, evaluated in
/// floating point from exact coefficients.
pub fn binomial_gap(a: f64, m: u32) -> Result<f64> {
    binomial_gap_domain(m, a > 0.0, a < 1.0, |k| a * a * (k as f64) < 1.0)?;
    let a2 = a * a;
    Ok(binomial_gap_coefficients(m)
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * a2 + c.to_f64().unwrap_or(f64::NAN)))
}

/// Exact rational evaluation of [`binomial_gap`].
pub fn binomial_gap_exact(a: &BigRational, m: u32) -> Result<BigRational> {
    let one = BigRational::one();
    let a2 = a * a;
    binomial_gap_domain(m, a.is_positive(), a < &one, |k| {
        &a2 * BigRational::from_integer(BigInt::from(k)) < one
    })?;
    Ok(binomial_gap_coefficients(m)
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * &a2 + BigRational::from_integer(c.clone())))
}
