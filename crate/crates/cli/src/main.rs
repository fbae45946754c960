//! Batch front end: parses a config file, runs one experiment, and writes
//! machine-readable artifacts. Exit codes: 0 success, 1 validation error,
//! 2 numerical-contract violation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use modelset::{
    banach_density, duality_experiment, eig_extremes, fejer_averager, indicator,
    inner_trapezoid, interp_lower, interp_upper, interpolation_gram, make_scheme,
    outer_trapezoid, psf_residual, sampling_lower, sampling_quotient, sampling_upper, Basis,
    BoundCertificate, Interval, IntervalSet, LatticeScheme, VanHoveSeq, WeightFunction,
};

#[derive(Parser)]
#[command(name = "modelset", version, about = "Cut-and-project sampling laboratory")]
struct Cli {
    /// Path to the JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output artifacts; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the truncation radius from the config
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Override the sweep seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Preferred stdout artifact when more than one is produced
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the model set and emit its points
    Gen,
    /// Banach density estimates along a van Hove sequence
    Density,
    /// Weighted Poisson summation residual against its tail certificates
    PsfCheck,
    /// Sampling/interpolation bound certificates with audit ingredients
    Bounds,
    /// Gram and sampling-quotient estimates at each truncation
    Frame,
    /// Two-sided stability experiment with dual cross-checks
    Duality,
    /// Randomized certificate-vs-empirical soundness sweep
    Sweep,
}

/// One run configuration. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    basis: Basis,
    #[serde(default)]
    window: Vec<Interval>,
    #[serde(default)]
    spectrum: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<WeightFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    test_weight: Option<WeightFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_configs: Option<usize>,
}

enum CliError {
    /// Bad input: config, flags, or module preconditions.
    Validation(String),
    /// The computation ran but violated a numerical contract.
    Contract(String),
}

impl From<modelset::ModelSetError> for CliError {
    fn from(e: modelset::ModelSetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Artifact {
    name: &'static str,
    contents: String,
}

impl Artifact {
    fn json(name: &'static str, v: &serde_json::Value) -> Self {
        let mut contents = serde_json::to_string_pretty(v).expect("value serializes");
        contents.push('\n');
        Artifact { name, contents }
    }

    fn is_json(&self) -> bool {
        self.name.ends_with(".json")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(artifacts) => match emit(&cli, &artifacts) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Contract(msg)) => {
            eprintln!("numerical contract violated: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, artifacts: &[Artifact]) -> std::io::Result<()> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for a in artifacts {
                write_atomic(dir, a.name, &a.contents)?;
                println!("{}", dir.join(a.name).display());
            }
        }
        None => {
            let preferred = artifacts
                .iter()
                .find(|a| a.is_json() == (cli.format == Format::Json))
                .or_else(|| artifacts.first());
            if let Some(a) = preferred {
                print!("{}", a.contents);
            }
        }
    }
    Ok(())
}

/// Write via a temp file in the same directory, then rename into place.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, dir.join(name))
}

fn run(cli: &Cli) -> CliResult<Vec<Artifact>> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config PATH is required".into()))?;
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: RunConfig = serde_json::from_str(&raw)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(r) = cli.radius {
        cfg.radius = Some(r);
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    validate(&cfg)?;
    match cli.cmd {
        Cmd::Gen => cmd_gen(&cfg),
        Cmd::Density => cmd_density(&cfg),
        Cmd::PsfCheck => cmd_psf(&cfg),
        Cmd::Bounds => cmd_bounds(&cfg),
        Cmd::Frame => cmd_frame(&cfg),
        Cmd::Duality => cmd_duality(&cfg),
        Cmd::Sweep => cmd_sweep(&cfg),
    }
}

/// Re-run every module precondition before any computation starts.
fn validate(cfg: &RunConfig) -> CliResult<()> {
    make_scheme(cfg.basis)?;
    IntervalSet::normalize(cfg.window.clone())?;
    IntervalSet::normalize(cfg.spectrum.clone())?;
    for w in [&cfg.weight, &cfg.test_weight].into_iter().flatten() {
        validate_weight(w)?;
    }
    if let Some(r) = cfg.radius {
        if !(r > 0.0) || !r.is_finite() {
            return Err(CliError::Validation(format!("radius {r} must be positive")));
        }
    }
    if let Some([lo, hi]) = cfg.g_range {
        Interval::closed(lo, hi)?;
    }
    if let Some(ts) = &cfg.truncations {
        if ts.iter().any(|t| !(*t > 0.0)) {
            return Err(CliError::Validation("truncations must be positive".into()));
        }
    }
    Ok(())
}

/// Weights arrive through serde, so push them back through the checked
/// constructors.
fn validate_weight(w: &WeightFunction) -> CliResult<()> {
    match w {
        WeightFunction::Indicator { window } => indicator(window.clone())?,
        WeightFunction::OuterTrapezoid { window, u } => outer_trapezoid(window.clone(), *u)?,
        WeightFunction::InnerTrapezoid { window, u } => inner_trapezoid(window.clone(), *u)?,
        WeightFunction::FejerAverager { n, shift } => fejer_averager(*n, *shift)?,
    };
    Ok(())
}

fn scheme_of(cfg: &RunConfig) -> CliResult<LatticeScheme> {
    Ok(make_scheme(cfg.basis)?)
}

fn window_of(cfg: &RunConfig) -> CliResult<IntervalSet> {
    let set = IntervalSet::normalize(cfg.window.clone())?;
    if set.is_empty() {
        return Err(CliError::Validation("config needs a non-empty `window`".into()));
    }
    Ok(set)
}

fn spectrum_of(cfg: &RunConfig) -> CliResult<IntervalSet> {
    let set = IntervalSet::normalize(cfg.spectrum.clone())?;
    if set.is_empty() {
        return Err(CliError::Validation("config needs a non-empty `spectrum`".into()));
    }
    Ok(set)
}

fn radius_of(cfg: &RunConfig) -> f64 {
    cfg.radius.unwrap_or(100.0)
}

fn truncations_of(cfg: &RunConfig) -> Vec<f64> {
    cfg.truncations.clone().unwrap_or_else(|| vec![40.0, 80.0, 160.0])
}

fn cmd_gen(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let window = window_of(cfg)?;
    let r = radius_of(cfg);
    let [lo, hi] = cfg.g_range.unwrap_or([-r, r]);
    let set = scheme.enumerate_strip(&window, Interval::closed(lo, hi)?)?;
    let gaps = set.min_gap();
    let summary = json!({
        "n_points": set.len(),
        "g_range": [lo, hi],
        "window_measure": window.measure(),
        "lattice_density": scheme.density(),
        "min_gap": gaps.min_gap,
        "coincident_projections": gaps.violation,
    });
    Ok(vec![
        Artifact { name: "points.csv", contents: set.to_csv() },
        Artifact::json("gen.json", &summary),
    ])
}

fn cmd_density(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let window = window_of(cfg)?;
    let levels = cfg.density_levels.unwrap_or(7);
    let seq = VanHoveSeq::geometric(25.0, 2.0, levels, 32, 50.0);
    let predicted = scheme.density() * window.measure();
    let report = banach_density(
        |iv| Ok(scheme.enumerate_strip(&window, iv)?.g_coords()),
        &seq,
        Some(predicted),
    )?;
    let mut csv = String::from("half_width,inf_count,sup_count,lower_est,upper_est\n");
    for l in &report.levels {
        writeln!(csv, "{},{},{},{:.17e},{:.17e}", l.half_width, l.inf_count, l.sup_count, l.lower, l.upper)
            .expect("string write");
    }
    let summary = serde_json::to_value(&report).expect("report serializes");
    Ok(vec![
        Artifact { name: "density.csv", contents: csv },
        Artifact::json("density.json", &summary),
    ])
}

fn cmd_psf(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let h = cfg
        .weight
        .clone()
        .ok_or_else(|| CliError::Validation("psf-check needs `weight`".into()))?;
    let g = cfg
        .test_weight
        .clone()
        .ok_or_else(|| CliError::Validation("psf-check needs `test_weight`".into()))?;
    let r = radius_of(cfg);
    let chk = psf_residual(&scheme, &h, &g, r)?;
    let out = json!({
        "lhs": chk.lhs,
        "rhs": chk.rhs,
        "residual": chk.residual,
        "tails": chk.lhs.tail_bound + chk.rhs.tail_bound + chk.num_slack,
        "radius": r,
        "terms": chk.lhs.n_terms + chk.rhs.n_terms,
        "passes": chk.passes(),
    });
    let artifacts = vec![Artifact::json("psf.json", &out)];
    if !chk.passes() {
        // still write the evidence before failing
        return Err(CliError::Contract(format!(
            "PSF residual {:e} exceeds declared tails {:e}",
            chk.residual,
            chk.lhs.tail_bound + chk.rhs.tail_bound + chk.num_slack
        )));
    }
    Ok(artifacts)
}

fn cert_entry(r: modelset::Result<BoundCertificate>) -> serde_json::Value {
    match r {
        Ok(c) => serde_json::to_value(&c).expect("certificate serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn cmd_bounds(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let window = window_of(cfg)?;
    let spectrum = spectrum_of(cfg)?;
    let r = radius_of(cfg);
    let u = cfg.smoothing.unwrap_or(0.25);
    let v = cfg.dual_smoothing.unwrap_or_else(|| {
        0.25 * spectrum.hull().map(|h| h.measure()).unwrap_or(1.0) / 2.0
    });
    let pts = scheme
        .enumerate_strip(&window, Interval::closed(-r, r)?)?
        .g_coords();
    let out = json!({
        "radius": r,
        "smoothing": u,
        "dual_smoothing": v,
        "sampling_upper": cert_entry(sampling_upper(&scheme, &window, &spectrum, u, r)),
        "sampling_lower": cert_entry(sampling_lower(&scheme, &spectrum, &window, u, r)),
        "interp_lower": cert_entry(interp_lower(&scheme, &window, &spectrum, v, r)),
        "interp_upper": cert_entry(interp_upper(&pts, &spectrum)),
    });
    Ok(vec![Artifact::json("bounds.json", &out)])
}

fn quotient_nodes(spectrum: &IntervalSet, t: f64) -> usize {
    ((4.0 * spectrum.measure() * t) as usize + 64).min(modelset::MAX_EIG_DIM)
}

fn cmd_frame(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let window = window_of(cfg)?;
    let spectrum = spectrum_of(cfg)?;
    let mut rows = Vec::new();
    let mut csv = String::from(
        "truncation,n_points,gram_lambda_min,gram_lambda_max,quot_lambda_min,quot_lambda_max,subspace_dim,shannon\n",
    );
    for t in truncations_of(cfg) {
        let pts = scheme
            .enumerate_strip(&window, Interval::closed(-t, t)?)?
            .g_coords();
        let gram = eig_extremes(&interpolation_gram(&pts, &spectrum)?)?;
        let quot = sampling_quotient(&pts, &spectrum, t, quotient_nodes(&spectrum, t))?;
        writeln!(
            csv,
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{},{}",
            t, pts.len(), gram.lambda_min, gram.lambda_max, quot.lambda_min, quot.lambda_max,
            quot.subspace_dim, quot.shannon
        )
        .expect("string write");
        rows.push(json!({
            "truncation": t,
            "n_points": pts.len(),
            "gram": gram,
            "quotient": quot,
        }));
    }
    let out = json!({ "levels": rows });
    Ok(vec![
        Artifact { name: "frame.csv", contents: csv },
        Artifact::json("frame.json", &out),
    ])
}

fn cmd_duality(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let scheme = scheme_of(cfg)?;
    let window = window_of(cfg)?;
    let spectrum = spectrum_of(cfg)?;
    let report = duality_experiment(&scheme, &window, &spectrum, &truncations_of(cfg))?;
    let mut csv = String::from("trace,truncation,n_points,lambda_min,lambda_max\n");
    for (label, trace) in [
        ("sampling", &report.sampling_trace),
        ("interpolation", &report.interpolation_trace),
        ("dual_interpolation", &report.dual_interpolation_trace),
        ("dual_sampling", &report.dual_sampling_trace),
    ] {
        for e in trace {
            writeln!(
                csv,
                "{},{},{},{:.17e},{:.17e}",
                label, e.truncation, e.n_points, e.lambda_min, e.lambda_max
            )
            .expect("string write");
        }
    }
    let out = serde_json::to_value(&report).expect("report serializes");
    Ok(vec![
        Artifact { name: "duality.csv", contents: csv },
        Artifact::json("duality.json", &out),
    ])
}

/// One randomized configuration for the soundness sweep.
struct SweepCase {
    scheme: LatticeScheme,
    window: IntervalSet,
    spectrum: IntervalSet,
    u: f64,
}

fn random_case(rng: &mut ChaCha8Rng) -> SweepCase {
    let scheme = loop {
        let basis = [
            [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)],
            [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)],
        ];
        if let Ok(s) = make_scheme(basis) {
            if (0.5..=2.0).contains(&s.det().abs()) {
                break s;
            }
        }
    };
    let w = rng.gen_range(0.5..1.2);
    let k = rng.gen_range(0.05..0.3);
    SweepCase {
        scheme,
        window: IntervalSet::from(Interval::centered(w).expect("positive half-width")),
        spectrum: IntervalSet::from(Interval::centered(k).expect("positive half-width")),
        u: rng.gen_range(0.1..0.4),
    }
}

fn cmd_sweep(cfg: &RunConfig) -> CliResult<Vec<Artifact>> {
    let n = cfg.n_configs.unwrap_or(30);
    let seed = cfg.seed.unwrap_or(0);
    let t = cfg.truncations.as_ref().and_then(|v| v.last().copied()).unwrap_or(40.0);
    let r = radius_of(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from(
        "case,det,window_half,spectrum_half,density,theta,quot_min,quot_max,gram_min,gram_max,s_lower,s_upper,i_lower,i_upper,sound\n",
    );
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for case_id in 0..n {
        let case = random_case(&mut rng);
        let pts = case
            .scheme
            .enumerate_strip(&case.window, Interval::closed(-t, t)?)?
            .g_coords();
        if pts.len() < 2 {
            continue;
        }
        let quot = sampling_quotient(&pts, &case.spectrum, t, quotient_nodes(&case.spectrum, t))?;
        let gram = eig_extremes(&interpolation_gram(&pts, &case.spectrum)?)?;
        let su = sampling_upper(&case.scheme, &case.window, &case.spectrum, case.u, r)?;
        let sl = sampling_lower(&case.scheme, &case.spectrum, &case.window, case.u, r)?;
        let v = 0.2 * case.spectrum.measure();
        let il = interp_lower(&case.scheme, &case.window, &case.spectrum, v, r)?;
        let iu = interp_upper(&pts, &case.spectrum)?;

        let mut bad = Vec::new();
        if su.value < quot.lambda_max - 1e-9 {
            bad.push(format!("sampling_upper {} < lambda_max {}", su.value, quot.lambda_max));
        }
        if sl.positive && sl.value > quot.lambda_min + 1e-9 {
            bad.push(format!("sampling_lower {} > lambda_min {}", sl.value, quot.lambda_min));
        }
        if il.positive && il.value > gram.lambda_min + 1e-9 {
            bad.push(format!("interp_lower {} > gram_min {}", il.value, gram.lambda_min));
        }
        if iu.value < gram.lambda_max - 1e-9 {
            bad.push(format!("interp_upper {} < gram_max {}", iu.value, gram.lambda_max));
        }
        let sound = bad.is_empty();
        let dens = case.scheme.density() * case.window.measure();
        let theta = case.spectrum.measure();
        writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            case_id,
            case.scheme.det(),
            case.window.measure() / 2.0,
            theta / 2.0,
            dens,
            theta,
            quot.lambda_min,
            quot.lambda_max,
            gram.lambda_min,
            gram.lambda_max,
            sl.value,
            su.value,
            il.value,
            iu.value,
            sound
        )
        .expect("string write");
        rows.push(json!({
            "case": case_id,
            "basis": case.scheme.basis(),
            "window": case.window,
            "spectrum": case.spectrum,
            "smoothing": case.u,
            "density": dens,
            "theta": theta,
            "quotient": quot,
            "gram": gram,
            "sampling_lower": sl,
            "sampling_upper": su,
            "interp_lower": il,
            "interp_upper": iu,
            "violations": bad.clone(),
        }));
        for b in bad {
            violations.push(format!("case {case_id}: {b}"));
        }
    }
    let out = json!({
        "seed": seed,
        "n_configs": n,
        "truncation": t,
        "radius": r,
        "violations": violations,
        "cases": rows,
    });
    let artifacts = vec![
        Artifact { name: "sweep.csv", contents: csv },
        Artifact::json("sweep.json", &out),
    ];
    if !violations.is_empty() {
        return Err(CliError::Contract(format!(
            "{} certificate soundness violations; first: {}",
            violations.len(),
            violations[0]
        )));
    }
    Ok(artifacts)
}
