//! Finsler checks and the fundamental tensor for the built-in metric families.
//!
//! ```text
//! cargo run --example check_metric
//! ```

use finsler_plateau::gacheck::ga_direct;
use finsler_plateau::metric::{check_finsler, fundamental_tensor, MetricSpec};
use finsler_plateau::Result;

fn main() -> Result<()> {
    let metrics = [
        MetricSpec::euclidean(3),
        MetricSpec::randers(&[0.3, 0.0, 0.0]),
        MetricSpec::randers(&[0.7, 0.0, 0.0]),
        MetricSpec::two_order(&[0.2, 0.0, 0.0]),
        MetricSpec::matsumoto(&[0.4, 0.0, 0.0]),
        MetricSpec::perturbed_quartic(3, 0.1),
    ];
    let origin = [0.0; 3];

    println!("{:<18} {:>6} {:>12} {:>12} {:>8} {:>8}", "family", "|b|", "min F", "min eig g", "finsler", "GA");
    for spec in &metrics {
        let b = spec.drift().map(|d| d.iter().map(|v| v * v).sum::<f64>().sqrt()).unwrap_or(0.0);
        let report = check_finsler(spec, &origin, 500)?;
        let ga = ga_direct(spec, 2, 500)?;
        println!(
            "{:<18} {:>6.2} {:>12.6} {:>12.6} {:>8} {:>8}",
            spec.tag(),
            b,
            report.min_value,
            report.min_eigenvalue,
            report.verdict,
            ga.holds
        );
    }

    // Randers past the unit ball is no longer positive
    let bad = MetricSpec::randers(&[1.2, 0.0, 0.0]);
    let report = check_finsler(&bad, &origin, 500)?;
    println!("\nranders |b|=1.2: verdict {} ({:?})", report.verdict, report.failure);

    let g = fundamental_tensor(&metrics[1], &origin, &[0.0, 0.0, 1.0])?;
    println!("\ng at y = e3 for randers 0.3:\n{}", g.g);
    println!("min eigenvalue {:.6}", g.min_eigenvalue());
    Ok(())
}
