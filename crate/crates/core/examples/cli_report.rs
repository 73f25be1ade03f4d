//! Drives the command-line front end in-process and prints the JSON report.
//!
//! ```text
//! cargo run --example cli_report
//! ```

use finsler_plateau::cli::main_with_args;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("finsler-plateau-cli-example");
    std::fs::create_dir_all(&dir)?;
    let metric = dir.join("randers.toml");
    std::fs::write(&metric, "family = \"randers\"\nb = [0.3, 0.0, 0.0]\n")?;

    let code = main_with_args([
        "finsler-plateau",
        "check-metric",
        "--metric",
        metric.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    println!("check-metric exit code {code}");
    for entry in std::fs::read_dir(&dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            println!("{}:\n{}", path.display(), std::fs::read_to_string(&path)?);
        }
    }
    Ok(())
}
