//! Boundary curves: analytic shapes, a spline through sampled points and
//! their Euclidean and Finsler lengths.
//!
//! ```text
//! cargo run --example boundary_curves
//! ```

use finsler_plateau::metric::MetricSpec;
use finsler_plateau::plateau::{finsler_length, read_points, BoundaryCurve};
use finsler_plateau::Result;
use std::f64::consts::TAU;

fn main() -> Result<()> {
    // closed curves do not see a constant drift, so compare against a quartic
    let quartic = MetricSpec::perturbed_quartic(3, 0.3);
    let curves = [
        ("circle", BoundaryCurve::circle(1.0)?),
        ("ellipse 1.5x1", BoundaryCurve::ellipse(1.5, 1.0)?),
        ("pentagon", BoundaryCurve::polygon_smoothed(5, 0.1, 1.0)?),
        ("helical", BoundaryCurve::helical(0.6, 1.0)?),
    ];
    for (name, c) in &curves {
        println!(
            "{name:<14} euclidean {:.6}  quartic {:.6}  closure {:.1e}",
            c.euclidean_length(4096),
            finsler_length(&quartic, c, 1024)?,
            c.closure_gap()
        );
    }

    // A closed polyline in the text format accepted by `--curve <file>`
    let text: String = (0..24)
        .map(|k| {
            let t = TAU * k as f64 / 24.0;
            format!("{} {} {}\n", t.cos(), t.sin(), 0.2 * (2.0 * t).sin())
        })
        .collect();
    let points = read_points(text.as_bytes())?;
    let spline = BoundaryCurve::sampled(&points)?;
    let (p, dp) = spline.eval(0.125);
    println!("\nspline through {} points: γ(1/8) = {:?}, γ'(1/8) = {:?}", points.len(), p.as_slice(), dp.as_slice());
    println!("length {:.6}", spline.euclidean_length(4096));
    Ok(())
}
