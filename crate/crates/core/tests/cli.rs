use std::path::Path;
use std::process::Command;

fn run(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_finsler-plateau"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .status()
        .expect("binary runs")
        .code()
        .expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_metric_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let good = write(d, "good.toml", "family = \"randers\"\nb = [0.3, 0.0, 0.0]\n");
    assert_eq!(run(d, &["check-metric", "--metric", &good]), 0);
    let report = json(&d.join("check-metric.json"));
    assert_eq!(report["command"], "check-metric");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);

    let bad = write(d, "bad.toml", "family = \"randers\"\nb = [1.2, 0.0, 0.0]\n");
    assert_eq!(run(d, &["check-metric", "--metric", &bad]), 1);
    let broken = write(d, "broken.toml", "family = \"randers\"\nb = [0.3\n");
    assert_eq!(run(d, &["check-metric", "--metric", &broken]), 2);
    let unknown = write(d, "unknown.toml", "family = \"randers\"\nb = [0.3, 0, 0]\ncolour = 1\n");
    assert_eq!(run(d, &["check-metric", "--metric", &unknown]), 2);
}

#[test]
fn config_hash_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["threshold-scan", "--family", "randers", "--grid", "11", "--samples", "200"];
    assert_eq!(run(d, &args), 0);
    let first = json(&d.join("threshold-randers.json"));
    assert_eq!(run(d, &args), 0);
    let second = json(&d.join("threshold-randers.json"));
    assert_eq!(first["config_hash"], second["config_hash"]);
    let b = first["report"]["critical_b"].as_f64().unwrap();
    assert!((b - 1.0 / 3f64.sqrt()).abs() < 5e-3, "{b}");
}

#[test]
fn threshold_scan_csv_has_header_comment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = run(d, &["threshold-scan", "--family", "matsumoto", "--grid", "11", "--samples", "200", "--format", "csv", "--seed", "5"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(d.join("threshold-matsumoto.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# config_hash=") && first.ends_with("seed=5"), "{first}");
}

#[test]
fn solve_plateau_writes_mesh_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["solve-plateau", "--curve", "circle", "--rings", "6", "--quad-n", "64"]), 0);
    let obj = std::fs::read_to_string(d.join("plateau.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 1 + 3 * 6 * 7);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 6 * 36);
    let report = json(&d.join("plateau.json"));
    let area = report["report"]["finsler_area"].as_f64().unwrap();
    assert!((area - std::f64::consts::PI).abs() < 0.05 * std::f64::consts::PI);

    assert_eq!(run(d, &["solve-plateau", "--curve", "spiral"]), 2);
    assert_eq!(run(d, &["solve-plateau", "--rings", "1"]), 2);
}

#[test]
fn solve_plateau_reads_sampled_curve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let pts: String = (0..30)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 30.0;
            format!("{}, {}, 0\n", t.cos(), t.sin())
        })
        .collect();
    let file = write(d, "curve.txt", &format!("# unit circle\n{pts}"));
    assert_eq!(run(d, &["solve-plateau", "--curve", &file, "--rings", "4", "--quad-n", "32"]), 0);
}

#[test]
fn radon_verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["radon-verify", "--samples", "10"]), 0);
    assert_eq!(run(d, &["radon-verify", "--samples", "10", "--tol", "1e-14"]), 1);
    let singular = write(d, "singular.toml", "family = \"randers\"\nb = [1.2, 0.0, 0.0]\n");
    assert_eq!(run(d, &["radon-verify", "--samples", "10", "--metric", &singular]), 4);
}

#[test]
fn convexity_scan_reports_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = run(d, &["convexity-scan", "--grid", "4", "--samples", "200", "--quad-n", "64"]);
    assert!(code == 0 || code == 1);
    let report = json(&d.join("convexity-scan.json"));
    assert!(report["report"]["rows"].as_array().unwrap().len() >= 4);
}
