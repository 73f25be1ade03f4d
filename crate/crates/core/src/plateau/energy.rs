//! Discrete Finsler area, Dirichlet energy and conformality defect.

use nalgebra::{Matrix2, Matrix3x2, Vector3};
use rayon::prelude::*;

use super::mesh::DiskMesh;
use crate::cartan::CartanIntegrand;
use crate::error::{Error, Result};
use crate::metric::Finsler;

/// Spatial triangles with `|E1 × E2|` at or below this contribute nothing.
pub const DEGENERATE_NORMAL: f64 = 1e-14;

fn tag_triangle(t: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::IntegrandSingular(m) => Error::IntegrandSingular(format!("triangle {t}: {m}")),
        Error::Domain(m) => Error::Domain(format!("triangle {t}: {m}")),
        other => other,
    }
}

/// `Σ_T A^F(x_T, E1 × E2) / 2` with `x_T` the centroid.
pub fn discrete_finsler_area<M: Finsler>(ci: &CartanIntegrand<M>, mesh: &DiskMesh) -> Result<f64> {
    let parts: Vec<f64> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let n = mesh.normal(t);
            if n.norm() <= DEGENERATE_NORMAL {
                return Ok(0.0);
            }
            Ok(0.5 * ci.value(&mesh.centroid(t), &n).map_err(tag_triangle(t))?)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// `A^F(x_T, E1 × E2) / 2` and its gradient with respect to the corners
/// `p0, p1, p2`; zero for degenerate triangles.
pub fn triangle_term<M: Finsler>(
    ci: &CartanIntegrand<M>,
    p: [&Vector3<f64>; 3],
) -> Result<(f64, [Vector3<f64>; 3])> {
    let (e1, e2) = (p[1] - p[0], p[2] - p[0]);
    let n = e1.cross(&e2);
    if n.norm() <= DEGENERATE_NORMAL {
        return Ok((0.0, [Vector3::zeros(); 3]));
    }
    let xc = (p[0] + p[1] + p[2]) / 3.0;
    let (v, g) = ci.value_gradient(&xc, &n)?;
    let gb = e2.cross(&g) * 0.5;
    let gc = g.cross(&e1) * 0.5;
    let mut out = [-gb - gc, gb, gc];
    if ci.metric().is_x_dependent() {
        let gx = ci.x_gradient(&xc, &n)? / 6.0;
        for o in &mut out {
            *o += gx;
        }
    }
    Ok((0.5 * v, out))
}

/// Discrete Finsler area and its gradient with respect to the vertices.
pub fn finsler_area_gradient<M: Finsler>(
    ci: &CartanIntegrand<M>,
    mesh: &DiskMesh,
) -> Result<(f64, Vec<Vector3<f64>>)> {
    let parts: Vec<(f64, [Vector3<f64>; 3])> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let [a, b, c] = mesh.triangles[t];
            triangle_term(ci, [&mesh.x[a], &mesh.x[b], &mesh.x[c]]).map_err(tag_triangle(t))
        })
        .collect::<Result<_>>()?;
    let mut grad = vec![Vector3::zeros(); mesh.vertex_count()];
    let mut total = 0.0;
    for (tri, (v, g)) in mesh.triangles.iter().zip(&parts) {
        total += v;
        for k in 0..3 {
            grad[tri[k]] += g[k];
        }
    }
    Ok((total, grad))
}

/// Cotangents of the parametric angles at the three corners of triangle `t`.
pub fn cotangents(mesh: &DiskMesh, t: usize) -> [f64; 3] {
    let tri = mesh.triangles[t];
    let mut out = [0.0; 3];
    for k in 0..3 {
        let p = mesh.uv[tri[k]];
        let q = mesh.uv[tri[(k + 1) % 3]];
        let r = mesh.uv[tri[(k + 2) % 3]];
        let (u, v) = ([q[0] - p[0], q[1] - p[1]], [r[0] - p[0], r[1] - p[1]]);
        out[k] = (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]);
    }
    out
}

/// `½ ∫_B |∇X|²` for the piecewise-linear map, by the cotangent formula.
pub fn discrete_dirichlet(mesh: &DiskMesh) -> f64 {
    let mut total = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let cot = cotangents(mesh, t);
        for k in 0..3 {
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            total += 0.25 * cot[k] * (mesh.x[i] - mesh.x[j]).norm_squared();
        }
    }
    total
}

/// Adds `scale · ∇D` to `grad`.
pub fn add_dirichlet_gradient(mesh: &DiskMesh, scale: f64, grad: &mut [Vector3<f64>]) {
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let cot = cotangents(mesh, t);
        for k in 0..3 {
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let d = (mesh.x[i] - mesh.x[j]) * (0.5 * scale * cot[k]);
            grad[i] += d;
            grad[j] -= d;
        }
    }
}

/// Symmetric edge weights `w_ij = ½ (cot α_ij + cot β_ij)` of the
/// parametric mesh, listed once per edge as `(i, j, w)` with `i < j`.
pub fn cotangent_weights(mesh: &DiskMesh) -> Vec<(usize, usize, f64)> {
    let mut map = std::collections::BTreeMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let cot = cotangents(mesh, t);
        for k in 0..3 {
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            *map.entry((i.min(j), i.max(j))).or_insert(0.0) += 0.5 * cot[k];
        }
    }
    map.into_iter().map(|((i, j), w)| (i, j, w)).collect()
}

/// Jacobian `(X_{u¹}, X_{u²})` of the linear interpolant on triangle `t`.
pub fn jacobian(mesh: &DiskMesh, t: usize) -> Matrix3x2<f64> {
    let [a, b, c] = mesh.triangles[t];
    let (p, q, r) = (mesh.uv[a], mesh.uv[b], mesh.uv[c]);
    let du = Matrix2::new(q[0] - p[0], r[0] - p[0], q[1] - p[1], r[1] - p[1]);
    let dx = Matrix3x2::from_columns(&[mesh.x[b] - mesh.x[a], mesh.x[c] - mesh.x[a]]);
    dx * du.try_inverse().unwrap_or_else(Matrix2::zeros)
}

/// Parametric-area-weighted mean of
/// `((|X_1|² - |X_2|²)² + 4 (X_1·X_2)²) / (|X_1|² + |X_2|²)²`.
pub fn conformality_defect(mesh: &DiskMesh) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for t in 0..mesh.triangles.len() {
        let j = jacobian(mesh, t);
        let (x1, x2) = (j.column(0), j.column(1));
        let (e, g, f) = (x1.norm_squared(), x2.norm_squared(), x1.dot(&x2));
        let s = (e + g) * (e + g);
        let w = mesh.param_area(t);
        if s > 0.0 {
            num += w * ((e - g).powi(2) + 4.0 * f * f) / s;
        }
        den += w;
    }
    num / den
}

/// Smallest `|E1 × E2| / 2` over the mesh, reported as a branch-point hint.
pub fn min_normal_norm(mesh: &DiskMesh) -> f64 {
    mesh.min_spatial_area().0
}

/// Linear map applied to every vertex, for diagnostics and tests.
pub fn map_vertices(mesh: &DiskMesh, f: impl Fn(&[f64; 2]) -> Vector3<f64>) -> DiskMesh {
    let mut out = mesh.clone();
    out.x = mesh.uv.iter().map(f).collect();
    out
}

/// Rotation of the parametric disk by `angle`; the embedding is unchanged.
pub fn rotate_parameters(mesh: &DiskMesh, angle: f64) -> DiskMesh {
    let (s, c) = angle.sin_cos();
    let mut out = mesh.clone();
    for p in &mut out.uv {
        *p = [c * p[0] - s * p[1], s * p[0] + c * p[1]];
    }
    out
}
