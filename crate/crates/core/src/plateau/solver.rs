//! ε-regularized gradient descent for the discrete Plateau problem.

use log::{debug, warn};
use nalgebra::Vector3;
use serde::Serialize;

use super::curve::{finsler_length, BoundaryCurve};
use super::energy::{
    add_dirichlet_gradient, conformality_defect, cotangent_weights, discrete_dirichlet,
    discrete_finsler_area, finsler_area_gradient,
};
use super::mesh::{generate_disk_mesh, DiskMesh, MIN_TRIANGLE_AREA};
use crate::cartan::{growth_bounds, CartanIntegrand, GrowthBounds};
use crate::error::{Error, Result};
use crate::gacheck::ga_direct;
use crate::metric::{check_finsler, Finsler};

#[derive(Clone, Debug, Serialize)]
pub struct SolveConfig {
    pub rings: usize,
    pub eps_schedule: Vec<f64>,
    /// Stop a stage when the gradient ∞-norm falls below this.
    pub tol: f64,
    /// Iteration cap per stage.
    pub max_iter: usize,
    pub armijo: f64,
    pub max_halvings: usize,
    /// Nodes of the boundary-length quadrature.
    pub length_nodes: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            rings: 16,
            eps_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4],
            tol: 1e-6,
            max_iter: 2000,
            armijo: 1e-4,
            max_halvings: 60,
            length_nodes: 1024,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_schedule.is_empty() || self.eps_schedule.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::config("ε schedule must be a nonempty list of finite values >= 0"));
        }
        if !(self.tol > 0.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::config("tolerance must be positive and the Armijo constant in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    pub eps: f64,
    pub iterations: usize,
    pub objective: f64,
    pub finsler_area: f64,
    pub dirichlet_energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub line_search_failed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoperimetricVerdict {
    pub holds: bool,
    /// `M_F² / (4π m_F²) · (ℒ^F)²`.
    pub bound: f64,
    /// `bound - area`.
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub mesh: DiskMesh,
    /// Boundary parameters `t_k` in boundary-loop order.
    pub boundary_params: Vec<f64>,
    pub finsler_area: f64,
    pub euclidean_area: f64,
    pub dirichlet_energy: f64,
    pub conformality_defect: f64,
    pub finsler_boundary_length: f64,
    pub growth: GrowthBounds,
    pub isoperimetric: IsoperimetricVerdict,
    pub isoperimetric_ok: bool,
    pub stages: Vec<StageTrace>,
    pub iterations: usize,
    pub converged: bool,
    pub min_triangle_area: f64,
}

/// `area ≤ M_F² / (4π m_F²) · (ℒ^F)²`.
pub fn isoperimetric_check(result: &SolveResult, bounds: &GrowthBounds) -> IsoperimetricVerdict {
    isoperimetric_bound(result.finsler_area, result.finsler_boundary_length, bounds)
}

fn isoperimetric_bound(area: f64, length: f64, bounds: &GrowthBounds) -> IsoperimetricVerdict {
    let ratio = bounds.big_m_f() / bounds.m_f();
    let bound = ratio * ratio * length * length / (4.0 * std::f64::consts::PI);
    IsoperimetricVerdict {
        holds: area <= bound,
        bound,
        slack: bound - area,
    }
}

fn anchor_indices(nb: usize) -> Result<[usize; 3]> {
    if nb < 9 || !nb.is_multiple_of(3) {
        return Err(Error::config(format!(
            "anchors collide: boundary has {nb} vertices, need a multiple of 3 that is at least 9"
        )));
    }
    Ok([0, nb / 3, 2 * nb / 3])
}

/// Boundary vertices at `γ(k / nb)` (anchors at `0, 1/3, 2/3`), interior by
/// the discrete harmonic extension with cotangent weights.
pub fn initial_surface(curve: &BoundaryCurve, mesh: &DiskMesh) -> Result<DiskMesh> {
    let nb = mesh.boundary.len();
    anchor_indices(nb)?;
    let mut out = mesh.clone();
    for (k, &v) in mesh.boundary.iter().enumerate() {
        out.x[v] = curve.point(k as f64 / nb as f64);
    }
    harmonic_extension(&mut out)?;
    Ok(out)
}

/// Solves `Σ_j w_ij (X_i - X_j) = 0` at interior vertices by conjugate
/// gradients, boundary values fixed.
fn harmonic_extension(mesh: &mut DiskMesh) -> Result<()> {
    let fixed = mesh.is_boundary();
    let n = mesh.vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![vec![]; n];
    for (i, j, w) in cotangent_weights(mesh) {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (k, &v) in free.iter().enumerate() {
            let mut s = 0.0;
            for &(j, w) in &adj[v] {
                s += w * x[k];
                if !fixed[j] {
                    s -= w * x[slot[j]];
                }
            }
            out[k] = s;
        }
    };
    for d in 0..3 {
        let b: Vec<f64> = free
            .iter()
            .map(|&v| adj[v].iter().filter(|(j, _)| fixed[*j]).map(|&(j, w)| w * mesh.x[j][d]).sum())
            .collect();
        let mut x: Vec<f64> = free.iter().map(|&v| mesh.x[v][d]).collect();
        let mut ax = vec![0.0; free.len()];
        apply(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut p = r.clone();
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let stop = 1e-28 * b.iter().map(|v| v * v).sum::<f64>().max(1e-300);
        for _ in 0..10 * free.len().max(10) {
            if rr <= stop {
                break;
            }
            apply(&p, &mut ax);
            let alpha = rr / p.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>();
            for k in 0..x.len() {
                x[k] += alpha * p[k];
                r[k] -= alpha * ax[k];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..p.len() {
                p[k] = r[k] + beta * p[k];
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("harmonic extension diverged"));
        }
        for (k, &v) in free.iter().enumerate() {
            mesh.x[v][d] = x[k];
        }
    }
    Ok(())
}

/// Optimization state: vertex positions plus boundary parameters.
#[derive(Clone)]
struct State {
    mesh: DiskMesh,
    t: Vec<f64>,
}

struct Problem<'a, M> {
    ci: &'a CartanIntegrand<M>,
    curve: &'a BoundaryCurve,
    interior: Vec<usize>,
    anchors: [usize; 3],
    /// Smallest spacing of consecutive boundary parameters.
    min_gap: f64,
}

type Snapshot = (Vec<Vector3<f64>>, Vec<Vector3<f64>>);

/// Boundary parameter spacing floor, as a fraction of the uniform spacing.
const MIN_GAP_FRACTION: f64 = 0.25;

/// Objective value with its interior gradient.
struct InteriorEval {
    objective: f64,
    area: f64,
    dirichlet: f64,
    gx: Vec<Vector3<f64>>,
}

fn inf_norm(gx: &[Vector3<f64>]) -> f64 {
    gx.iter().map(|v| v.amax()).fold(0.0, f64::max)
}

impl<M: Finsler> Problem<'_, M> {
    fn objective(&self, s: &State, eps: f64) -> Result<f64> {
        Ok(discrete_finsler_area(self.ci, &s.mesh)? + eps * discrete_dirichlet(&s.mesh))
    }

    fn eval(&self, s: &State, eps: f64) -> Result<InteriorEval> {
        let (area, mut grad) = finsler_area_gradient(self.ci, &s.mesh)?;
        let dirichlet = discrete_dirichlet(&s.mesh);
        add_dirichlet_gradient(&s.mesh, eps, &mut grad);
        let mut gx = vec![Vector3::zeros(); grad.len()];
        for &v in &self.interior {
            gx[v] = grad[v];
        }
        Ok(InteriorEval {
            objective: area + eps * dirichlet,
            area,
            dirichlet,
            gx,
        })
    }

    /// Dirichlet gradient with respect to the free boundary parameters.
    fn boundary_gradient(&self, s: &State) -> Vec<f64> {
        let mut grad = vec![Vector3::zeros(); s.mesh.vertex_count()];
        add_dirichlet_gradient(&s.mesh, 1.0, &mut grad);
        s.mesh
            .boundary
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                if self.anchors.contains(&k) {
                    0.0
                } else {
                    grad[v].dot(&self.curve.tangent(s.t[k]))
                }
            })
            .collect()
    }

    fn move_interior(&self, s: &State, gx: &[Vector3<f64>], alpha: f64) -> State {
        let mut out = s.clone();
        for &v in &self.interior {
            out.mesh.x[v] -= gx[v] * alpha;
        }
        out
    }

    /// `P(t - α g)`: within each anchor segment the parameters are sorted
    /// and clamped so that consecutive ones stay `min_gap` apart.
    fn move_boundary(&self, s: &State, gt: &[f64], alpha: f64) -> State {
        let mut out = s.clone();
        let nb = out.t.len();
        let gap = self.min_gap;
        for seg in 0..3 {
            let lo = self.anchors[seg];
            let hi = if seg == 2 { nb } else { self.anchors[seg + 1] };
            let t_lo = s.t[lo];
            let t_hi = if seg == 2 { 1.0 } else { s.t[hi] };
            let mut u: Vec<f64> = (lo + 1..hi)
                .map(|k| s.t[k] - alpha * gt[k] - (k - lo) as f64 * gap)
                .collect();
            u.sort_by(f64::total_cmp);
            let u_max = t_hi - (hi - lo) as f64 * gap;
            for (i, k) in (lo + 1..hi).enumerate() {
                out.t[k] = u[i].clamp(t_lo, u_max) + (k - lo) as f64 * gap;
            }
        }
        for (k, &v) in s.mesh.boundary.iter().enumerate() {
            out.mesh.x[v] = self.curve.point(out.t[k]);
        }
        out
    }

    /// Armijo backtracking from `alpha` along `-g` for the interior block.
    fn interior_step(
        &self,
        s: &State,
        g: &InteriorEval,
        eps: f64,
        mut alpha: f64,
        cfg: &SolveConfig,
    ) -> Result<Option<(State, f64)>> {
        let gg: f64 = self.interior.iter().map(|&v| g.gx[v].norm_squared()).sum();
        for _ in 0..cfg.max_halvings {
            let trial = self.move_interior(s, &g.gx, alpha);
            if trial.mesh.min_spatial_area().0 >= MIN_TRIANGLE_AREA {
                match self.objective(&trial, eps) {
                    Ok(v) if v <= g.objective - cfg.armijo * alpha * gg => return Ok(Some((trial, alpha))),
                    Ok(_) | Err(Error::IntegrandSingular(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            alpha *= 0.5;
        }
        Ok(None)
    }

    /// Projected Armijo step on the Dirichlet energy for the boundary block.
    fn boundary_step(&self, s: &State, gt: &[f64], mut alpha: f64, cfg: &SolveConfig) -> Option<(State, f64)> {
        let d0 = discrete_dirichlet(&s.mesh);
        for _ in 0..cfg.max_halvings {
            let trial = self.move_boundary(s, gt, alpha);
            let decrease: f64 = gt.iter().zip(s.t.iter().zip(&trial.t)).map(|(g, (a, b))| g * (a - b)).sum();
            if decrease > 0.0
                && trial.mesh.min_spatial_area().0 >= MIN_TRIANGLE_AREA
                && discrete_dirichlet(&trial.mesh) <= d0 - cfg.armijo * decrease
            {
                return Some((trial, alpha));
            }
            alpha *= 0.5;
        }
        None
    }
}

/// Minimizes `area + ε · Dirichlet` for each `ε` of the schedule in turn.
///
/// Each iteration takes a backtracking gradient step in the interior
/// vertices on the full objective. During the first stage it also takes one
/// in the boundary parameters on the Dirichlet energy alone: the area of a
/// surface does not depend on how its boundary is parametrized, and the
/// discrete area's dependence on `t` only rewards bunching the boundary
/// vertices. Later stages keep `t` fixed so that each stage is a monotone
/// descent.
pub fn solve<M: Finsler>(
    ci: &CartanIntegrand<M>,
    curve: &BoundaryCurve,
    config: &SolveConfig,
) -> Result<SolveResult> {
    config.validate()?;
    let metric = ci.metric();
    match (check_finsler(metric, &[0.0; 3], 200), ga_direct(metric, 2, 200)) {
        (Ok(f), Ok(g)) if f.verdict && g.holds => {}
        _ => warn!("metric fails the Finsler or (GA) check on a coarse sample; continuing"),
    }
    let base = generate_disk_mesh(config.rings)?;
    let anchors = anchor_indices(base.boundary.len())?;
    let mesh = initial_surface(curve, &base)?;
    let (min_area, tri) = mesh.min_spatial_area();
    if min_area < MIN_TRIANGLE_AREA {
        return Err(Error::MeshDegenerate { triangle: tri });
    }
    let nb = mesh.boundary.len();
    let flags = mesh.is_boundary();
    let problem = Problem {
        ci,
        curve,
        interior: (0..mesh.vertex_count()).filter(|&v| !flags[v]).collect(),
        anchors,
        min_gap: MIN_GAP_FRACTION / nb as f64,
    };
    let mut state = State {
        t: (0..nb).map(|k| k as f64 / nb as f64).collect(),
        mesh,
    };
    let edge = 1.0 / config.rings as f64;
    let mut stages = vec![];
    let mut total_iter = 0;
    let mut aborted = false;
    let mut alpha_t = 1e-3;
    for (stage, &eps) in config.eps_schedule.iter().enumerate() {
        let move_boundary = stage == 0;
        let mut g = problem.eval(&state, eps)?;
        let mut gt = problem.boundary_gradient(&state);
        let mut alpha = f64::NAN;
        // interior positions and gradient of the previous iterate
        let mut prev: Option<Snapshot> = None;
        let mut trace = StageTrace {
            eps,
            iterations: 0,
            objective: g.objective,
            finsler_area: g.area,
            dirichlet_energy: g.dirichlet,
            grad_inf: 0.0,
            converged: false,
            line_search_failed: false,
        };
        while trace.iterations < config.max_iter {
            let gx_inf = inf_norm(&g.gx);
            let gt_inf = if move_boundary { eps * gt.iter().fold(0.0f64, |a, v| a.max(v.abs())) } else { 0.0 };
            trace.grad_inf = gx_inf.max(gt_inf);
            if trace.grad_inf < config.tol {
                trace.converged = true;
                break;
            }
            if gx_inf >= config.tol {
                alpha = match &prev {
                    Some((px, pg)) => bb_step(&problem, px, &state.mesh.x, pg, &g.gx).unwrap_or(alpha * 2.0),
                    None => 0.1 * edge / gx_inf,
                };
                match problem.interior_step(&state, &g, eps, alpha, config)? {
                    Some((next, _)) => {
                        let old_x = std::mem::replace(&mut state, next).mesh.x;
                        let ng = problem.eval(&state, eps)?;
                        prev = Some((old_x, std::mem::replace(&mut g, ng).gx));
                    }
                    None => {
                        trace.line_search_failed = true;
                        break;
                    }
                }
            }
            gt = problem.boundary_gradient(&state);
            if move_boundary && eps * gt.iter().fold(0.0f64, |a, v| a.max(v.abs())) >= config.tol {
                if let Some((next, a)) = problem.boundary_step(&state, &gt, alpha_t * 2.0, config) {
                    alpha_t = a;
                    state = next;
                    g = problem.eval(&state, eps)?;
                    gt = problem.boundary_gradient(&state);
                }
            }
            trace.iterations += 1;
        }
        trace.objective = g.objective;
        trace.finsler_area = g.area;
        trace.dirichlet_energy = g.dirichlet;
        debug!(
            "stage eps={eps:e}: {} iterations, area {:.10}, |g| {:.3e}",
            trace.iterations, trace.finsler_area, trace.grad_inf
        );
        total_iter += trace.iterations;
        aborted = trace.line_search_failed;
        stages.push(trace);
        if aborted {
            warn!("line search failed at ε = {eps:e}; returning the current iterate");
            break;
        }
    }
    let finsler_area = discrete_finsler_area(ci, &state.mesh)?;
    let length = finsler_length(metric, curve, config.length_nodes.max(64))?;
    let mut xs: Vec<Vector3<f64>> = (0..12).map(|k| curve.point(k as f64 / 12.0)).collect();
    xs.push(state.mesh.x.iter().sum::<Vector3<f64>>() / state.mesh.vertex_count() as f64);
    let xs = if metric.is_x_dependent() { xs } else { vec![Vector3::zeros()] };
    let growth = growth_bounds(ci, &xs, 500)?;
    let iso = isoperimetric_bound(finsler_area, length, &growth);
    let converged = !aborted && stages.last().is_some_and(|s| s.converged);
    Ok(SolveResult {
        finsler_area,
        euclidean_area: state.mesh.euclidean_area(),
        dirichlet_energy: discrete_dirichlet(&state.mesh),
        conformality_defect: conformality_defect(&state.mesh),
        finsler_boundary_length: length,
        isoperimetric_ok: iso.holds,
        isoperimetric: iso,
        growth,
        stages,
        iterations: total_iter,
        converged,
        min_triangle_area: state.mesh.min_spatial_area().0,
        boundary_params: state.t,
        mesh: state.mesh,
    })
}

/// Barzilai-Borwein step `⟨s, s⟩ / ⟨s, y⟩` for the interior block, if
/// positive.
fn bb_step<M: Finsler>(
    p: &Problem<'_, M>,
    prev_x: &[Vector3<f64>],
    cur_x: &[Vector3<f64>],
    prev_g: &[Vector3<f64>],
    cur_g: &[Vector3<f64>],
) -> Option<f64> {
    let mut ss = 0.0;
    let mut sy = 0.0;
    for &v in &p.interior {
        let s = cur_x[v] - prev_x[v];
        ss += s.norm_squared();
        sy += s.dot(&(cur_g[v] - prev_g[v]));
    }
    let a = ss / sy;
    (a.is_finite() && a > 0.0).then_some(a)
}
