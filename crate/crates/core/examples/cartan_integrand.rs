//! The area integrand of a Randers metric against its closed form, the
//! symmetrization identity and the growth bounds.
//!
//! ```text
//! cargo run --example cartan_integrand
//! ```

use finsler_plateau::cartan::{check_symmetrization_identity, growth_bounds, CartanIntegrand};
use finsler_plateau::metric::MetricSpec;
use finsler_plateau::Result;
use nalgebra::Vector3;

/// `|Z| (1 - c²)^{3/2}` with `c² = |b|² - (b·Ẑ)²`.
fn randers_closed_form(b: &Vector3<f64>, z: &Vector3<f64>) -> f64 {
    let c2 = b.norm_squared() - b.dot(&z.normalize()).powi(2);
    z.norm() * (1.0 - c2).powf(1.5)
}

fn main() -> Result<()> {
    let b = Vector3::new(0.3, 0.0, 0.0);
    let ci = CartanIntegrand::new(MetricSpec::randers(b.as_slice()))?;
    let x = Vector3::zeros();

    for z in [Vector3::new(0.0, 0.0, 2.0), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.3, -1.0, 0.5)] {
        let a = ci.value(&x, &z)?;
        let exact = randers_closed_form(&b, &z);
        println!("Z = {:?}: A = {a:.12}  closed form {exact:.12}  rel err {:.1e}", z.as_slice(), (a - exact).abs() / exact);
    }

    let z = Vector3::new(0.3, -1.0, 0.5);
    let d = ci.derivs(&x, &z)?;
    println!("\ngradient {:?}", d.gradient.as_slice());
    println!("Hessian · Z (should vanish) {:.2e}", (d.hessian * z).amax());

    let gap = check_symmetrization_identity(&ci, 200, 7)?;
    println!("\nsymmetrization identity, max relative gap over 200 normals: {gap:.2e}");
    let mats = CartanIntegrand::new(MetricSpec::matsumoto(&[0.4, 0.0, 0.0]))?;
    println!("same for matsumoto 0.4: {:.2e}", check_symmetrization_identity(&mats, 200, 7)?);

    let gb = growth_bounds(&ci, &[x], 2000)?;
    println!(
        "\ngrowth: {:.4} ≤ F ≤ {:.4}, so {:.4} |Z| ≤ A ≤ {:.4} |Z| (probe ratios {:.4}..{:.4})",
        gb.c1, gb.c2, gb.m1, gb.m2, gb.probe_min_ratio, gb.probe_max_ratio
    );
    Ok(())
}
