//! Spherical Radon transform of homogeneous functions: the differentiation
//! rule, reciprocity with the area integrand and SL(3) invariance.
//!
//! ```text
//! cargo run --example radon_transform
//! ```

use finsler_plateau::cartan::{CartanIntegrand, DEFAULT_NODES};
use finsler_plateau::metric::MetricSpec;
use finsler_plateau::radon::{
    radon_transform, reciprocity_gap, seminorm_bound_probe, sl_invariance_probe, verify_diff_rule, InversePower,
    MetricPower,
};
use finsler_plateau::sampling::fibonacci_sphere;
use finsler_plateau::Result;
use nalgebra::{Matrix3, Vector3};

fn main() -> Result<()> {
    let z = Vector3::new(0.0, 0.0, 2.0);
    let euclid = InversePower { m: 2 };
    println!("R[|y|^-2](Z) = {:.15}  (1/|Z| = {})", radon_transform(&euclid, &z, DEFAULT_NODES)?, 1.0 / z.norm());

    let metric = MetricSpec::randers(&[0.3, 0.0, 0.0]);
    let g = MetricPower::new(&metric, Vector3::zeros(), 2);
    println!("R[F^-2](Z)    = {:.10}", radon_transform(&g, &z, DEFAULT_NODES)?);

    println!("\ndifferentiation rule at Z = (0.2, -0.5, 1):");
    let zp = Vector3::new(0.2, -0.5, 1.0);
    for tau in 0..3 {
        for sigma in 0..3 {
            let c = verify_diff_rule(&g, &zp, tau, sigma, DEFAULT_NODES)?;
            println!("  τ={tau} σ={sigma}: lhs {:+.8} rhs {:+.8} residual {:.1e}", c.lhs, c.rhs, c.residual);
        }
    }

    let ci = CartanIntegrand::new(metric.clone())?;
    let gap = reciprocity_gap(&ci, &Vector3::zeros(), &zp)?;
    println!("\n|A · R[F^-2] - 1| = {gap:.1e}");

    let samples = fibonacci_sphere(50);
    let l = Matrix3::new(2.0, 0.3, 0.0, 0.0, 0.5, 0.1, 0.0, 0.0, 1.0);
    println!("SL(3) invariance gap: {:.1e}", sl_invariance_probe(&g, &l, &samples, DEFAULT_NODES)?);

    let probe = seminorm_bound_probe(&g, 1, &samples)?;
    println!(
        "ρ_1 of the transform {:.4}, of the function {:.4}, ratio {:.4}",
        probe.rho_transform, probe.rho_function, probe.ratio
    );
    Ok(())
}
