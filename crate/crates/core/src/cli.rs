//! Command-line front end: metric spec files, subcommands, report files and
//! exit codes.
//!
//! Exit codes: 0 success, 1 a verdict failed, 2 configuration or parse
//! error, 3 solver did not converge, 4 numerical failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cartan::{default_z_samples, ellipticity_scan, rho_k, CartanIntegrand, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::gacheck::{ga_direct_on, sufficient_condition, threshold_scan_with, ScanConfig};
use crate::metric::{
    check_alphabeta_finsler, check_finsler, Drift, Family, Finsler, MetricSpec, Phi, ReversibleBase,
};
use crate::plateau::{io::save_obj, solve, BoundaryCurve, SolveConfig};
use crate::radon::{
    radon_transform, reciprocity_gap, sl_invariance_probe, verify_diff_rule, InversePower, MetricPower,
};
use crate::sampling::{random_unit, sphere_directions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser, Debug, Serialize)]
#[command(name = "finsler-plateau", version, about = "Finsler area integrands, (GA) checks and a discrete Plateau solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Finsler and (GA) checks of a metric spec.
    CheckMetric(CheckMetricArgs),
    /// Critical |b| of an (α,β) family.
    ThresholdScan(ThresholdArgs),
    /// Discrete Plateau problem for a boundary curve.
    SolvePlateau(SolveArgs),
    /// Differentiation rule and reciprocity checks of the Radon transform.
    RadonVerify(RadonArgs),
    /// Ellipticity and dominance of the area integrand across |b|.
    ConvexityScan(ConvexityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckMetricArgs {
    #[arg(long)]
    pub metric: PathBuf,
    /// Directions per base point.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Randers,
    TwoOrder,
    Matsumoto,
}

impl FamilyArg {
    pub fn phi(self) -> Phi {
        match self {
            FamilyArg::Randers => Phi::Randers,
            FamilyArg::TwoOrder => Phi::TwoOrder,
            FamilyArg::Matsumoto => Phi::Matsumoto,
        }
    }

    fn default_b_high(self) -> f64 {
        match self {
            FamilyArg::Randers => 0.9,
            FamilyArg::TwoOrder => 0.6,
            FamilyArg::Matsumoto => 0.9,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.0)]
    pub b_low: f64,
    /// Defaults to 0.9 (0.6 for two-order).
    #[arg(long)]
    pub b_high: Option<f64>,
    /// Final bracket width.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// Metric spec file; Euclidean when omitted.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// `name[:key=value,...]` or a file of sampled points.
    #[arg(long, default_value = "circle")]
    pub curve: String,
    #[arg(long, default_value_t = 16)]
    pub rings: usize,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub quad_n: usize,
    /// Comma-separated ε values.
    #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4")]
    pub eps_schedule: String,
    /// Gradient ∞-norm tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct RadonArgs {
    /// Metric spec file; Randers with b = (0.3, 0, 0) when omitted.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub quad_n: usize,
    /// Bound on the differentiation-rule residual.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvexityArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Randers)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.0)]
    pub b_low: f64,
    #[arg(long, default_value_t = 0.9)]
    pub b_high: f64,
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    /// Normal directions per |b|.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub quad_n: usize,
    /// Convexity tolerance on λ_min.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Flat key/value metric description.
///
/// ```toml
/// family = "randers"   # euclidean | randers | two-order | matsumoto | alpha-beta
///                      # | cui-shen | perturbed-quartic | composite
/// dim = 3              # optional: length of b, else 3
/// m = 2                # symmetrization order
/// b = [0.3, 0.0, 0.0]  # drift (composite: offset of b(x))
/// epsilon = 0.1        # perturbed-quartic, or the quartic base of a composite
/// phi = [1.0, 1.0]     # alpha-beta: coefficients of φ(s) = Σ c_k s^k
/// h = [0.6, -0.2]      # cui-shen: h(s) = Σ h_j s^(2j+1)
/// base = "euclidean"   # composite: euclidean | perturbed-quartic
/// drift_amplitude = [0.1, 0.0, 0.0]   # composite: b(x) = b + A sin(k·x)
/// drift_wavevector = [0.0, 0.0, 1.0]
/// ```
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub family: String,
    pub dim: Option<usize>,
    pub m: Option<u32>,
    pub b: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub phi: Option<Vec<f64>>,
    pub h: Option<Vec<f64>>,
    pub base: Option<String>,
    pub drift_amplitude: Option<Vec<f64>>,
    pub drift_wavevector: Option<Vec<f64>>,
}

impl MetricFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn order(&self) -> u32 {
        self.m.unwrap_or(2)
    }

    pub fn to_spec(&self) -> Result<MetricSpec> {
        let dim = self.dim.or(self.b.as_ref().map(Vec::len)).unwrap_or(3);
        let b = || -> Result<Vec<f64>> {
            self.b.clone().ok_or_else(|| Error::config(format!("family {} needs b", self.family)))
        };
        let family = match self.family.as_str() {
            "euclidean" => Family::Euclidean,
            "randers" => Family::AlphaBeta { phi: Phi::Randers, b: b()? },
            "two-order" => Family::AlphaBeta { phi: Phi::TwoOrder, b: b()? },
            "matsumoto" => Family::AlphaBeta { phi: Phi::Matsumoto, b: b()? },
            "alpha-beta" => Family::AlphaBeta {
                phi: Phi::Polynomial {
                    coefficients: self.phi.clone().ok_or_else(|| Error::config("alpha-beta needs phi"))?,
                },
                b: b()?,
            },
            "cui-shen" => Family::AlphaBeta {
                phi: Phi::CuiShen {
                    odd_coefficients: self.h.clone().ok_or_else(|| Error::config("cui-shen needs h"))?,
                    order: self.order(),
                },
                b: b()?,
            },
            "perturbed-quartic" => Family::PerturbedQuartic {
                epsilon: self.epsilon.ok_or_else(|| Error::config("perturbed-quartic needs epsilon"))?,
            },
            "composite" => {
                let base = match self.base.as_deref().unwrap_or("euclidean") {
                    "euclidean" => ReversibleBase::Euclidean,
                    "perturbed-quartic" => ReversibleBase::PerturbedQuartic {
                        epsilon: self.epsilon.ok_or_else(|| Error::config("quartic base needs epsilon"))?,
                    },
                    other => return Err(Error::config(format!("unknown composite base {other:?}"))),
                };
                let offset = self.b.clone().unwrap_or_else(|| vec![0.0; dim]);
                let drift = match (&self.drift_amplitude, &self.drift_wavevector) {
                    (None, None) => Drift::Constant { b: offset },
                    (Some(a), Some(k)) => Drift::Sinusoidal {
                        offset,
                        amplitude: a.clone(),
                        wavevector: k.clone(),
                    },
                    _ => return Err(Error::config("drift_amplitude and drift_wavevector go together")),
                };
                Family::Composite { base, drift }
            }
            other => return Err(Error::config(format!("unknown metric family {other:?}"))),
        };
        MetricSpec::new(dim, family)
    }
}

/// Reads and validates a metric spec file; returns the spec, the symmetrization
/// order and the raw text (hashed into reports).
pub fn load_metric(path: &Path) -> Result<(MetricSpec, u32, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read metric spec {}: {e}", path.display())))?;
    let file = MetricFile::parse(&text)?;
    let spec = file.to_spec()?;
    Ok((spec, file.order(), text))
}

/// `name[:key=value,...]` for a built-in curve, otherwise a points file.
pub fn parse_curve(arg: &str) -> Result<BoundaryCurve> {
    let (name, params) = arg.split_once(':').unwrap_or((arg, ""));
    let mut kv = BTreeMap::new();
    for item in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::config(format!("curve parameter {item:?} is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("curve parameter {k} = {v:?} is not a number")))?;
        kv.insert(k.trim().to_string(), v);
    }
    let take = |kv: &mut BTreeMap<String, f64>, k: &str, default: f64| kv.remove(k).unwrap_or(default);
    let curve = match name {
        "circle" => BoundaryCurve::circle(take(&mut kv, "radius", 1.0))?,
        "ellipse" => {
            let a = take(&mut kv, "a", 1.5);
            BoundaryCurve::ellipse(a, take(&mut kv, "b", 1.0))?
        }
        "planar-polygon-smoothed" => {
            let sides = take(&mut kv, "sides", 5.0);
            if sides.fract() != 0.0 || sides < 0.0 {
                return Err(Error::config(format!("sides must be a whole number, got {sides}")));
            }
            let amp = take(&mut kv, "amplitude", 0.1);
            BoundaryCurve::polygon_smoothed(sides as u32, amp, take(&mut kv, "radius", 1.0))?
        }
        "helical-arc-closure" => {
            let h = take(&mut kv, "height", 0.5);
            BoundaryCurve::helical(h, take(&mut kv, "radius", 1.0))?
        }
        path if Path::new(path).is_file() && params.is_empty() => {
            let f = fs::File::open(path)?;
            let pts = crate::plateau::io::read_points(std::io::BufReader::new(f))?;
            return BoundaryCurve::sampled(&pts);
        }
        other => return Err(Error::config(format!("unknown curve {other:?} (and no such points file)"))),
    };
    if let Some(k) = kv.keys().next() {
        return Err(Error::config(format!("unknown parameter {k:?} for curve {name}")));
    }
    Ok(curve)
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) | Error::Unsupported(_) => EXIT_CONFIG,
        Error::ScanInconsistent(..) | Error::NotFinsler(_) => EXIT_VERDICT,
        Error::Domain(_) | Error::IntegrandSingular(_) | Error::MeshDegenerate { .. } => EXIT_NUMERICAL,
    }
}

/// Files written by a command and its exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config_hash: &'a str,
    seed: u64,
    exit_code: i32,
    report: &'a T,
}

struct Writer<'a> {
    command: &'static str,
    common: &'a Common,
    hash: String,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(command: &'static str, common: &'a Common, config: &impl Serialize, extra: &str) -> Result<Self> {
        fs::create_dir_all(&common.out)?;
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(config).map_err(|e| Error::config(e.to_string()))?);
        h.update(extra.as_bytes());
        Ok(Writer {
            command,
            common,
            hash: hex::encode(h.finalize()),
            files: vec![],
        })
    }

    fn json<T: Serialize>(&mut self, name: &str, report: &T, code: i32) -> Result<()> {
        let env = Envelope {
            command: self.command,
            config_hash: &self.hash,
            seed: self.common.seed,
            exit_code: code,
            report,
        };
        let path = self.common.out.join(name);
        let text = serde_json::to_string_pretty(&env).map_err(|e| Error::config(e.to_string()))?;
        fs::write(&path, text + "\n")?;
        self.files.push(path);
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.common.out.join(name);
        let mut buf = format!("# config_hash={} seed={}\n", self.hash, self.common.seed).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r).map_err(|e| Error::config(e.to_string()))?;
            }
            w.flush()?;
        }
        fs::write(&path, buf)?;
        self.files.push(path);
        Ok(())
    }

    /// Report in the requested format; tables fall back to JSON when no CSV
    /// form exists.
    fn report<T: Serialize, R: Serialize>(&mut self, stem: &str, report: &T, rows: Option<&[R]>, code: i32) -> Result<()> {
        match (self.common.format, rows) {
            (Format::Csv, Some(rows)) => self.csv(&format!("{stem}.csv"), rows),
            _ => self.json(&format!("{stem}.json"), report, code),
        }
    }

    fn done(self, code: i32) -> Outcome {
        Outcome { code, files: self.files }
    }
}

#[derive(Serialize)]
struct CheckMetricReport {
    metric: MetricSpec,
    order: u32,
    finsler: crate::metric::FinslerReport,
    alpha_beta_criterion: Option<bool>,
    ga_direct: Option<crate::gacheck::DirectGA>,
    sufficient: Option<crate::gacheck::GAReport>,
    errors: Vec<String>,
    verdict: bool,
}

fn base_points(spec: &MetricSpec) -> Vec<Vec<f64>> {
    let n = spec.dim();
    let mut xs = vec![vec![0.0; n]];
    if spec.is_x_dependent() {
        for k in 0..n {
            for s in [-1.0, 1.0] {
                let mut x = vec![0.0; n];
                x[k] = s;
                xs.push(x);
            }
        }
    }
    xs
}

pub fn cmd_check_metric(args: &CheckMetricArgs) -> Result<Outcome> {
    let (spec, m, text) = load_metric(&args.metric)?;
    let mut w = Writer::new("check-metric", &args.common, args, &text)?;
    let xs = base_points(&spec);
    let mut finsler: Option<crate::metric::FinslerReport> = None;
    for x in &xs {
        let r = check_finsler(&spec, x, args.samples)?;
        finsler = Some(match finsler {
            None => r,
            Some(p) => p.merge(r),
        });
    }
    let finsler = finsler.expect("at least one base point");
    let mut errors = vec![];
    let alpha_beta_criterion = match spec.family() {
        Family::AlphaBeta { phi, b } => {
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            match check_alphabeta_finsler(phi, bn, 2001) {
                Ok(v) => Some(v),
                Err(e) => {
                    errors.push(e.to_string());
                    Some(false)
                }
            }
        }
        _ => None,
    };
    let ga = ga_direct_on(&spec, m, &xs, args.samples)
        .map_err(|e| errors.push(format!("(GA): {e}")))
        .ok();
    let ys = sphere_directions(spec.dim(), args.samples, spec.axis(&xs[0]).as_deref(), args.common.seed);
    let ws = sphere_directions(spec.dim(), 64, None, args.common.seed.wrapping_add(1));
    let sufficient = sufficient_condition(&spec, m, &xs, &ys, &ws)
        .map_err(|e| errors.push(format!("sufficient condition: {e}")))
        .ok();
    let verdict = finsler.verdict
        && alpha_beta_criterion.unwrap_or(true)
        && ga.as_ref().is_some_and(|g| g.holds);
    let code = if verdict { EXIT_OK } else { EXIT_VERDICT };
    let report = CheckMetricReport {
        metric: spec,
        order: m,
        finsler,
        alpha_beta_criterion,
        ga_direct: ga,
        sufficient,
        errors,
        verdict,
    };
    w.json("check-metric.json", &report, code)?;
    Ok(w.done(code))
}

pub fn cmd_threshold_scan(args: &ThresholdArgs) -> Result<Outcome> {
    let mut w = Writer::new("threshold-scan", &args.common, args, "")?;
    let cfg = ScanConfig {
        grid: args.grid,
        sample_count: args.samples,
        ..ScanConfig::default()
    };
    let b_high = args.b_high.unwrap_or(args.family.default_b_high());
    let stem = format!("threshold-{}", args.family.phi().tag());
    match threshold_scan_with(&args.family.phi(), args.b_low, b_high, args.tol, &cfg) {
        Ok(r) => {
            w.report(&stem, &r, Some(&r.rows), EXIT_OK)?;
            Ok(w.done(EXIT_OK))
        }
        Err(Error::ScanInconsistent(n, table)) => {
            w.report(&stem, &*table, Some(&table.rows), EXIT_VERDICT)?;
            log::error!("threshold scan inconsistent: {n} sign changes");
            Ok(w.done(EXIT_VERDICT))
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct PlateauReport<'a> {
    metric: &'a MetricSpec,
    curve: &'a BoundaryCurve,
    config: &'a SolveConfig,
    quad_n: usize,
    finsler_area: f64,
    euclidean_area: f64,
    dirichlet_energy: f64,
    conformality_defect: f64,
    finsler_boundary_length: f64,
    growth: &'a crate::cartan::GrowthBounds,
    isoperimetric: &'a crate::plateau::IsoperimetricVerdict,
    isoperimetric_ok: bool,
    converged: bool,
    iterations: usize,
    min_triangle_area: f64,
    stages: &'a [crate::plateau::StageTrace],
    vertex_count: usize,
    triangle_count: usize,
}

pub fn parse_schedule(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad ε value {v:?} in schedule")))
        })
        .collect()
}

pub fn cmd_solve_plateau(args: &SolveArgs) -> Result<Outcome> {
    let (spec, text) = match &args.metric {
        Some(p) => {
            let (s, _, t) = load_metric(p)?;
            (s, t)
        }
        None => (MetricSpec::euclidean(3), String::new()),
    };
    let curve = parse_curve(&args.curve)?;
    let config = SolveConfig {
        rings: args.rings,
        eps_schedule: parse_schedule(&args.eps_schedule)?,
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolveConfig::default()
    };
    config.validate()?;
    let mut w = Writer::new("solve-plateau", &args.common, args, &text)?;
    let ci = CartanIntegrand::with_nodes(spec.clone(), args.quad_n)?;
    let r = solve(&ci, &curve, &config)?;
    let code = if r.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let obj = args.common.out.join("plateau.obj");
    save_obj(&r.mesh, &obj)?;
    w.files.push(obj);
    let report = PlateauReport {
        metric: &spec,
        curve: &curve,
        config: &config,
        quad_n: args.quad_n,
        finsler_area: r.finsler_area,
        euclidean_area: r.euclidean_area,
        dirichlet_energy: r.dirichlet_energy,
        conformality_defect: r.conformality_defect,
        finsler_boundary_length: r.finsler_boundary_length,
        growth: &r.growth,
        isoperimetric: &r.isoperimetric,
        isoperimetric_ok: r.isoperimetric_ok,
        converged: r.converged,
        iterations: r.iterations,
        min_triangle_area: r.min_triangle_area,
        stages: &r.stages,
        vertex_count: r.mesh.vertex_count(),
        triangle_count: r.mesh.triangles.len(),
    };
    w.report::<_, crate::plateau::StageTrace>("plateau", &report, Some(&r.stages), code)?;
    Ok(w.done(code))
}

#[derive(Serialize)]
struct DiffRuleRow {
    sample: usize,
    z0: f64,
    z1: f64,
    z2: f64,
    tau: usize,
    sigma: usize,
    lhs: f64,
    rhs: f64,
    residual: f64,
}

#[derive(Serialize)]
struct RadonReport {
    metric: MetricSpec,
    samples: usize,
    quad_n: usize,
    tolerance: f64,
    euclidean_max_error: f64,
    max_diff_rule_residual: f64,
    max_reciprocity_gap: f64,
    sl_invariance_gap: f64,
    pass: bool,
}

pub fn cmd_radon_verify(args: &RadonArgs) -> Result<Outcome> {
    let (spec, text) = match &args.metric {
        Some(p) => {
            let (s, _, t) = load_metric(p)?;
            (s, t)
        }
        None => (MetricSpec::randers(&[0.3, 0.0, 0.0]), String::new()),
    };
    if !(args.tol > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    let mut w = Writer::new("radon-verify", &args.common, args, &text)?;
    let ci = CartanIntegrand::with_nodes(spec.clone(), args.quad_n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    let x = Vector3::zeros();
    let g = MetricPower::new(&spec, x, 2);
    let mut rows = vec![];
    let (mut euc, mut recip, mut resid) = (0.0f64, 0.0f64, 0.0f64);
    let mut zs = vec![];
    for s in 0..args.samples {
        let z = random_unit(&mut rng) * rng.random_range(0.2..5.0);
        zs.push(z);
        let r = radon_transform(&InversePower { m: 2 }, &z, args.quad_n)?;
        euc = euc.max((r * z.norm() - 1.0).abs());
        recip = recip.max(reciprocity_gap(&ci, &x, &z)?);
        for tau in 0..3 {
            for sigma in 0..3 {
                let d = verify_diff_rule(&g, &z, tau, sigma, args.quad_n)?;
                resid = resid.max(d.residual);
                rows.push(DiffRuleRow {
                    sample: s,
                    z0: z[0],
                    z1: z[1],
                    z2: z[2],
                    tau,
                    sigma,
                    lhs: d.lhs,
                    rhs: d.rhs,
                    residual: d.residual,
                });
            }
        }
    }
    let l = Matrix3::new(1.5, 0.2, 0.0, 0.0, 1.0 / 1.5, 0.3, 0.0, 0.0, 1.0);
    let sl = sl_invariance_probe(&g, &l, &zs[..zs.len().min(20)], args.quad_n)?;
    let pass = resid <= args.tol && recip <= 1e-12 && euc <= 1e-12;
    let code = if pass { EXIT_OK } else { EXIT_VERDICT };
    let report = RadonReport {
        metric: spec,
        samples: args.samples,
        quad_n: args.quad_n,
        tolerance: args.tol,
        euclidean_max_error: euc,
        max_diff_rule_residual: resid,
        max_reciprocity_gap: recip,
        sl_invariance_gap: sl,
        pass,
    };
    w.report("radon-verify", &report, Some(&rows), code)?;
    Ok(w.done(code))
}

/// One |b| of a convexity scan.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityRow {
    pub b: f64,
    pub lambda_min: f64,
    pub delta: f64,
    pub convex: bool,
    pub delta_below_fifth: bool,
}

#[derive(Serialize)]
struct ConvexityReport {
    family: String,
    samples: usize,
    tolerance: f64,
    /// Last convex and first non-convex |b| of the grid, if the verdict flips.
    bracket: Option<(f64, f64)>,
    rows: Vec<ConvexityRow>,
}

/// `λ_min` and `δ` for the (α,β) metric with `|b| = b` along `e1`.
pub fn convexity_row(phi: &Phi, b: f64, samples: usize, quad_n: usize, tol: f64) -> Result<ConvexityRow> {
    let ci = CartanIntegrand::with_nodes(MetricSpec::alpha_beta(phi.clone(), &[b, 0.0, 0.0]), quad_n)?;
    let zs = default_z_samples(&ci, samples);
    let ell = ellipticity_scan(&ci, &zs, &[], tol)?;
    let x = Vector3::zeros();
    let delta = rho_k(|z| Ok(ci.value(&x, z)? - z.norm()), 2, &zs)?;
    Ok(ConvexityRow {
        b,
        lambda_min: ell.lambda_min,
        delta,
        convex: ell.convex,
        delta_below_fifth: delta < crate::cartan::DOMINANCE_DELTA,
    })
}

pub fn cmd_convexity_scan(args: &ConvexityArgs) -> Result<Outcome> {
    if !(args.b_low >= 0.0 && args.b_low < args.b_high) || args.grid < 2 {
        return Err(Error::config("need 0 <= b_low < b_high and grid >= 2"));
    }
    let mut w = Writer::new("convexity-scan", &args.common, args, "")?;
    let phi = args.family.phi();
    let mut rows = vec![];
    for k in 0..args.grid {
        let b = args.b_low + (args.b_high - args.b_low) * k as f64 / (args.grid - 1) as f64;
        rows.push(convexity_row(&phi, b, args.samples, args.quad_n, args.tol)?);
    }
    let bracket = rows
        .windows(2)
        .find(|p| p[0].convex && !p[1].convex)
        .map(|p| (p[0].b, p[1].b));
    let report = ConvexityReport {
        family: phi.tag().to_string(),
        samples: args.samples,
        tolerance: args.tol,
        bracket,
        rows,
    };
    w.report("convexity-scan", &report, Some(&report.rows), EXIT_OK)?;
    Ok(w.done(EXIT_OK))
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::CheckMetric(a) => cmd_check_metric(a),
        Command::ThresholdScan(a) => cmd_threshold_scan(a),
        Command::SolvePlateau(a) => cmd_solve_plateau(a),
        Command::RadonVerify(a) => cmd_radon_verify(a),
        Command::ConvexityScan(a) => cmd_convexity_scan(a),
    };
    match result {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses arguments (exit 2 on usage errors) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
