//! Great-circle trapezoid rule with compensated summation.

use nalgebra::Vector3;

use crate::sampling::orthonormal_complement;

/// Neumaier-compensated running sum; summation order is fixed by the caller,
/// so results are bit-reproducible.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Nodes `θ_k = 2πk/N` of the composite trapezoid rule on the unit circle,
/// stored as `(cos θ_k, sin θ_k)`.
#[derive(Clone, Debug)]
pub struct CircleRule {
    nodes: Vec<(f64, f64)>,
}

impl CircleRule {
    pub fn new(n: usize) -> Self {
        let nodes = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        CircleRule { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Unit vectors `cos θ_k f1 + sin θ_k f2` on the great circle spanned by
    /// `f1, f2`.
    pub fn great_circle<'a>(
        &'a self,
        f1: &'a Vector3<f64>,
        f2: &'a Vector3<f64>,
    ) -> impl Iterator<Item = Vector3<f64>> + 'a {
        self.nodes.iter().map(move |&(c, s)| f1 * c + f2 * s)
    }

    /// Great circle orthogonal to `z` in the default frame.
    pub fn orthogonal_to(&self, z: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        orthonormal_complement(z)
    }
}
