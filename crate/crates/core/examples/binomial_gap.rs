//! The polynomial `f(a, m) = Σ [C(m, 2k+1) - C(m, 2k)] a^{2k}` in exact and
//! floating-point arithmetic.
//!
//! ```text
//! cargo run --example binomial_gap
//! ```

use finsler_plateau::gacheck::{binomial_gap, binomial_gap_exact};
use finsler_plateau::Result;
use num_rational::BigRational;

fn main() -> Result<()> {
    let half = BigRational::new(1.into(), 2.into());
    for m in 1..=6 {
        match binomial_gap_exact(&half, m) {
            Ok(v) => println!("f(1/2, {m}) = {v}"),
            Err(e) => println!("f(1/2, {m}): {e}"),
        }
    }

    println!("\nminimum of f over an admissible grid:");
    for m in 1..=12u32 {
        // even m > 2 need a² (m - 1) < 1
        let hi = if m % 2 == 1 || m == 2 { 1.0 } else { (1.0 / (m - 1) as f64).sqrt() };
        let min = (1..=200)
            .map(|i| binomial_gap(hi * i as f64 / 201.0, m))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        println!("  m = {m:>2}: a < {hi:.4}, min f = {min:.6}");
    }
    Ok(())
}
