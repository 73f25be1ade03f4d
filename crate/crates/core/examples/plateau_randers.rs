//! Discrete Plateau problem for a Minkowski-Randers metric: solves on a unit
//! circle and an ellipse, prints the diagnostics and writes OBJ meshes.
//!
//! ```text
//! cargo run --release --example plateau_randers [out_dir]
//! ```

use finsler_plateau::cartan::CartanIntegrand;
use finsler_plateau::metric::MetricSpec;
use finsler_plateau::plateau::{save_obj, solve, BoundaryCurve, SolveConfig};
use finsler_plateau::Result;
use std::path::PathBuf;

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let ci = CartanIntegrand::with_nodes(MetricSpec::randers(&[0.3, 0.0, 0.0]), 64)?;
    let cfg = SolveConfig { rings: 8, ..SolveConfig::default() };

    for (name, curve) in [("circle", BoundaryCurve::circle(1.0)?), ("ellipse", BoundaryCurve::ellipse(1.5, 1.0)?)] {
        let r = solve(&ci, &curve, &cfg)?;
        println!("{name}:");
        println!("  Finsler area      {:.6}", r.finsler_area);
        println!("  Euclidean area    {:.6}", r.euclidean_area);
        println!("  sandwich          {:.6} ≤ A ≤ {:.6}", r.growth.m1 * r.euclidean_area, r.growth.m2 * r.euclidean_area);
        println!("  conformality      {:.2e}", r.conformality_defect);
        println!("  boundary length   {:.6}", r.finsler_boundary_length);
        println!("  isoperimetric     {} (A ≤ {:.4})", r.isoperimetric.holds, r.isoperimetric.bound);
        println!("  iterations        {} converged {}", r.iterations, r.converged);
        let path = out.join(format!("plateau_{name}.obj"));
        save_obj(&r.mesh, &path)?;
        println!("  wrote {}", path.display());
    }
    Ok(())
}
