//! Concentric-ring triangulations of the closed unit disk.

use std::collections::HashSet;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest admissible parametric or spatial triangle area.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// A disk-type triangle mesh with a parametric domain in the unit disk and an
/// embedding in `R^3`.
#[derive(Clone, Debug, Serialize)]
pub struct DiskMesh {
    pub uv: Vec<[f64; 2]>,
    pub x: Vec<Vector3<f64>>,
    /// Counter-clockwise in the parameter domain.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertices in counter-clockwise order, starting at angle 0.
    pub boundary: Vec<usize>,
    pub rings: usize,
}

/// Ring `r` carries `6r` equally spaced vertices at radius `r / rings`;
/// consecutive rings are stitched by merging their angles.
pub fn generate_disk_mesh(rings: usize) -> Result<DiskMesh> {
    if rings == 0 {
        return Err(Error::config("mesh needs at least one ring"));
    }
    let mut uv = vec![[0.0, 0.0]];
    let mut starts = vec![0usize];
    for r in 1..=rings {
        starts.push(uv.len());
        let n = 6 * r;
        let rad = r as f64 / rings as f64;
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            uv.push([rad * t.cos(), rad * t.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for j in 0..6 {
        triangles.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for r in 2..=rings {
        let (na, nb) = (6 * (r - 1), 6 * r);
        let (a0, b0) = (starts[r - 1], starts[r]);
        let (mut i, mut j) = (0, 0);
        while i < na || j < nb {
            let next_a = (i + 1) as f64 / na as f64;
            let next_b = (j + 1) as f64 / nb as f64;
            let ai = a0 + i % na;
            let bj = b0 + j % nb;
            if j < nb && (i == na || next_b <= next_a) {
                triangles.push([ai, bj, b0 + (j + 1) % nb]);
                j += 1;
            } else {
                triangles.push([ai, bj, a0 + (i + 1) % na]);
                i += 1;
            }
        }
    }
    let boundary = (starts[rings]..uv.len()).collect();
    let x = uv.iter().map(|p| Vector3::new(p[0], p[1], 0.0)).collect();
    let mesh = DiskMesh {
        uv,
        x,
        triangles,
        boundary,
        rings,
    };
    mesh.validate()?;
    Ok(mesh)
}

impl DiskMesh {
    pub fn vertex_count(&self) -> usize {
        self.uv.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Signed parametric area of triangle `t`.
    pub fn param_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.uv[a], self.uv[b], self.uv[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// `E1 × E2` of triangle `t`; twice the vector area.
    pub fn normal(&self, t: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangles[t];
        (self.x[b] - self.x[a]).cross(&(self.x[c] - self.x[a]))
    }

    pub fn centroid(&self, t: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangles[t];
        (self.x[a] + self.x[b] + self.x[c]) / 3.0
    }

    pub fn euclidean_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| 0.5 * self.normal(t).norm()).sum()
    }

    /// Smallest spatial triangle area and its index.
    pub fn min_spatial_area(&self) -> (f64, usize) {
        (0..self.triangles.len())
            .map(|t| (0.5 * self.normal(t).norm(), t))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    }

    pub fn is_boundary(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertex_count()];
        for &b in &self.boundary {
            flags[b] = true;
        }
        flags
    }

    /// Disk topology, parametric non-degeneracy and a boundary loop on the
    /// unit circle.
    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.uv.len() {
            return Err(Error::config("vertex arrays differ in length"));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= self.uv.len()) {
                return Err(Error::config(format!("triangle {t} references a missing vertex")));
            }
            if self.param_area(t) < MIN_TRIANGLE_AREA {
                return Err(Error::MeshDegenerate { triangle: t });
            }
        }
        if self.euler_characteristic() != 1 {
            return Err(Error::config(format!(
                "mesh is not a disk: Euler characteristic {}",
                self.euler_characteristic()
            )));
        }
        let mut seen = HashSet::new();
        for &b in &self.boundary {
            let p = self.uv[b];
            if ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() > 1e-12 || !seen.insert(b) {
                return Err(Error::config(format!("boundary vertex {b} is off the unit circle or repeated")));
            }
        }
        if self.boundary.len() < 3 {
            return Err(Error::config("boundary loop needs at least three vertices"));
        }
        Ok(())
    }
}
