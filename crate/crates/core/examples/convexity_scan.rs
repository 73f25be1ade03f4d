//! Ellipticity of the Randers area integrand as the drift grows, with the
//! dominance criterion.
//!
//! ```text
//! cargo run --release --example convexity_scan
//! ```

use finsler_plateau::cartan::{
    default_z_samples, dominance_feasibility, ellipticity_scan, CartanIntegrand, DEFAULT_DELTA0,
    DEFAULT_ELLIPTICITY_TOL,
};
use finsler_plateau::metric::MetricSpec;
use finsler_plateau::Result;

fn main() -> Result<()> {
    println!("{:>5} {:>12} {:>8}", "|b|", "λ_min", "convex");
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=18 {
        let b = 0.05 * i as f64;
        let ci = CartanIntegrand::with_nodes(MetricSpec::randers(&[b, 0.0, 0.0]), 128)?;
        let zs = default_z_samples(&ci, 400);
        let r = ellipticity_scan(&ci, &zs, &[], DEFAULT_ELLIPTICITY_TOL)?;
        println!("{b:>5.2} {:>12.6} {:>8}", r.lambda_min, r.convex);
        if let Some((pb, pl)) = prev {
            if pl > 0.0 && r.lambda_min <= 0.0 {
                println!("      sign change in [{pb:.2}, {b:.2}]");
            }
        }
        prev = Some((b, r.lambda_min));
    }

    let ci = CartanIntegrand::new(MetricSpec::randers(&[0.05, 0.0, 0.0]))?;
    let zs = default_z_samples(&ci, 300);
    let d = dominance_feasibility(&ci, &[], &zs, DEFAULT_DELTA0)?;
    println!(
        "\nranders 0.05: δ = {:.4} (< 1/5: {}), k0 = {:.4} (< 1: {}), ρ₂(F - |·|) = {:.4}",
        d.delta, d.delta_below_fifth, d.k0, d.k0_below_one, d.metric_deviation
    );
    Ok(())
}
