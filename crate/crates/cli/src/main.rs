//! `dglab` command-line front end.
//!
//! Every subcommand prints its result on stdout (JSON, or CSV for `volume`)
//! and, when an output directory is set, also writes it there. A JSON file
//! given with `--config` supplies flags for the subcommand; flags on the
//! command line override it.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use dglab::classifier::{self, ClassifyConfig, Constants, Sequence, Tail};
use dglab::geometry::{audit_structure_conditions, AuditConfig};
use dglab::inequalities::{monte_carlo, InequalityKind, MonteCarloConfig};
use dglab::metric::{
    dual_cone_integral, forward_cone_integral, geodesic_radius, rstar_and_height, straight_across_n, KernelForm,
};
use dglab::report::{self, Envelope};
use dglab::solver::{self, BoundaryData, DegenerateProblem, SolveOptions};
use dglab::{suite, Error, Geometry};

#[derive(Parser, Debug)]
#[command(name = "dglab", version, about = "Numerical laboratory for infinitely degenerate elliptic operators")]
#[command(args_override_self = true)]
struct Cli {
    /// Directory for output files.
    #[arg(long, env = "DGLAB_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    /// JSON object of flags for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the five structure conditions on an interval.
    Audit(AuditArgs),
    /// Turning geodesic, dual radius and ball height.
    Geodesic(GeodesicArgs),
    /// Analytic and grid-measured ball volume.
    Volume(VolumeArgs),
    /// Straight-across integral of the kernel.
    Kernel(KernelArgs),
    /// Poincaré inequality Monte Carlo.
    Poincare(InequalityArgs),
    /// Vanishing Sobolev inequality Monte Carlo.
    Sobolev(InequalityArgs),
    /// Caccioppoli inequality Monte Carlo.
    Caccioppoli(InequalityArgs),
    /// DeGiorgi isoperimetric inequality Monte Carlo.
    Degiorgi(InequalityArgs),
    /// Solve the Dirichlet problem on a rectangle.
    Solve(SolveArgs),
    /// Oscillation decay over nested control balls.
    Oscillation(OscillationArgs),
    /// Summability verdict for a geometry or an explicit sequence.
    Classify(ClassifyArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Audit(_) => "audit",
            Cmd::Geodesic(_) => "geodesic",
            Cmd::Volume(_) => "volume",
            Cmd::Kernel(_) => "kernel",
            Cmd::Poincare(_) => "poincare",
            Cmd::Sobolev(_) => "sobolev",
            Cmd::Caccioppoli(_) => "caccioppoli",
            Cmd::Degiorgi(_) => "degiorgi",
            Cmd::Solve(_) => "solve",
            Cmd::Oscillation(_) => "oscillation",
            Cmd::Classify(_) => "classify",
            Cmd::Suite(_) => "suite",
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct AuditArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    #[arg(long, default_value_t = 1e-6)]
    a: f64,
    #[arg(long, default_value_t = 0.4)]
    b: f64,
    #[arg(long, default_value_t = 257)]
    samples: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct GeodesicArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    #[arg(long, default_value_t = 0.2)]
    x1: f64,
    #[arg(long, default_value_t = 0.0625)]
    r: f64,
    /// With `--x-end`, also integrate the geodesic of this `λ`.
    #[arg(long, requires = "x_end")]
    lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    x_end: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct VolumeArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    x1: f64,
    #[arg(long, default_value_t = 0.015625)]
    r: f64,
    /// Oracle nodes across the ball.
    #[arg(long, default_value_t = 256)]
    cells: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FormArg {
    Exact,
    Simplified,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct KernelArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    x1: f64,
    #[arg(long, default_value_t = 0.03125)]
    r: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Exact)]
    form: FormArg,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct InequalityArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    /// Calibration trials.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Validation trials; defaults to `--trials`.
    #[arg(long)]
    validation_trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_001)]
    validation_seed: u64,
    #[arg(long, default_value_t = 0.01)]
    slack: f64,
    /// Cap on search proposals per trial; 0 keeps the plain random sample.
    #[arg(long, default_value_t = 400)]
    search_iters: usize,
    #[arg(long, default_value_t = 64)]
    cells: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct SolveArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    /// `a1,b1,a2,b2`.
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0.05,0.4,-0.2,0.2")]
    rect: Vec<f64>,
    #[arg(long, default_value_t = 128)]
    cells: usize,
    /// linear-x1, linear-x2, quadratic, exp-cos or random:SEED[:LATTICE].
    #[arg(long, default_value = "random:1")]
    boundary: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct OscillationArgs {
    #[arg(long, default_value = "Fks:3,0.5")]
    geometry: String,
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0.04,0.36,-0.1,0.1")]
    rect: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    cells: usize,
    #[arg(long, default_value = "random:1")]
    boundary: String,
    #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0.2,0")]
    center: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    r0: f64,
    #[arg(long, default_value_t = 4)]
    levels: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ClassifyArgs {
    #[arg(long, default_value = "Fks:3,0.9")]
    geometry: String,
    /// Classify an explicit sequence instead: harmonic, geometric, power:p,
    /// bertrand:p or constant:λ.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c3: f64,
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    #[arg(long, default_value_t = 0.25)]
    r0: f64,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Rows of the explicit λ_j table.
    #[arg(long, default_value_t = 32)]
    rows: usize,
    /// Tail window ln ln j in [Y/2, Y] (geometry default 1e12).
    #[arg(long, conflicts_with = "j_max")]
    y_max: Option<f64>,
    /// Tail window j in [J/2, J] (sequence default 1e6).
    #[arg(long)]
    j_max: Option<f64>,
    /// Use a constant growth map instead of F(r)/ln(1/r).
    #[arg(long)]
    constant_growth: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct SuiteArgs {
    /// Criteria to run, e.g. `1,4,9`; all by default.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
}

/// Result of a subcommand: what to print and what to write.
struct Output {
    stdout: String,
    files: Vec<(String, String)>,
    /// Nonzero when the computation ran but the checked property failed.
    status: u8,
}

impl Output {
    fn json<C: Serialize, R: Serialize>(cmd: &str, cfg: &C, result: &R) -> Result<Self, Error> {
        let text = Envelope::new(cmd, cfg, result).to_json()?;
        Ok(Output { files: vec![(format!("{cmd}.json"), text.clone())], stdout: text, status: 0 })
    }
}

fn geometry(spec: &str) -> Result<Geometry, Error> {
    spec.parse()
}

fn rect4(v: &[f64]) -> Result<[f64; 4], Error> {
    v.try_into().map_err(|_| Error::Config(format!("rect needs 4 numbers, got {}", v.len())))
}

fn audit(a: &AuditArgs) -> Result<Output, Error> {
    let cfg = AuditConfig { sample_count: a.samples, ..AuditConfig::default() };
    let rep = audit_structure_conditions(&geometry(&a.geometry)?, a.a, a.b, &cfg)?;
    let mut out = Output::json("audit", a, &rep)?;
    if !rep.passed {
        for c in rep.conditions.iter().filter(|c| !c.passed) {
            eprintln!("condition ({}) failed: {}", c.index, c.detail);
        }
        out.status = 1;
    }
    Ok(out)
}

fn geodesic(a: &GeodesicArgs) -> Result<Output, Error> {
    let g = geometry(&a.geometry)?;
    let hp = rstar_and_height(&g, a.x1, a.r)?;
    let mut v = serde_json::json!({
        "lambda": hp.lambda,
        "r_star": hp.r_star,
        "height": hp.h,
        "regime": hp.regime.as_str(),
        "surrogate": hp.surrogate,
    });
    if let (Some(lam), Some(x_end)) = (a.lambda, a.x_end) {
        v["geodesic_radius"] = Value::from(geodesic_radius(&g, a.x1, x_end, lam)?);
    }
    Output::json("geodesic", a, &v)
}

fn volume(a: &VolumeArgs) -> Result<Output, Error> {
    let row = report::volume_row(&geometry(&a.geometry)?, a.n, a.x1, a.r, a.cells)?;
    let csv = report::csv_table(&report::VOLUME_HEADER, &[row])?;
    Ok(Output { files: vec![("volume.csv".into(), csv.clone())], stdout: csv, status: 0 })
}

fn kernel(a: &KernelArgs) -> Result<Output, Error> {
    let g = geometry(&a.geometry)?;
    let form = match a.form {
        FormArg::Exact => KernelForm::Exact,
        FormArg::Simplified => KernelForm::Simplified,
    };
    let v = if a.n == 2 {
        let fwd = forward_cone_integral(&g, a.x1, a.r, form)?;
        let dual = if a.x1 - a.r > 0.0 { Some(dual_cone_integral(&g, a.x1, a.r, form)?) } else { None };
        serde_json::json!({ "forward": fwd, "dual": dual })
    } else {
        serde_json::json!({ "analytic": straight_across_n(&g, a.n, a.x1, a.r)? })
    };
    Output::json("kernel", a, &v)
}

fn inequality(name: &'static str, kind: InequalityKind, a: &InequalityArgs) -> Result<Output, Error> {
    let mut cfg = MonteCarloConfig::new(geometry(&a.geometry)?);
    cfg.calibration_trials = a.trials;
    cfg.validation_trials = a.validation_trials.unwrap_or(a.trials);
    cfg.calibration_seed = a.seed;
    cfg.validation_seed = a.validation_seed;
    cfg.slack = a.slack;
    cfg.search_iters = a.search_iters;
    cfg.cells = a.cells;
    if cfg.calibration_trials == 0 || cfg.validation_trials == 0 {
        return Err(Error::Config("trial counts must be positive".into()));
    }
    let s = monte_carlo(kind, &cfg)?;
    let csv = report::csv_table(&report::INEQUALITY_HEADER, &s.validation_reports)?;
    let mut summary = serde_json::to_value(&s)?;
    if let Some(m) = summary.as_object_mut() {
        m.remove("validation_reports");
        m.insert("passed".into(), Value::from(s.passed()));
    }
    let mut out = Output::json(name, a, &summary)?;
    out.files.push((format!("{name}.csv"), csv));
    if !s.passed() {
        out.status = 2;
    }
    Ok(out)
}

fn solve(a: &SolveArgs) -> Result<Output, Error> {
    let p = DegenerateProblem {
        geometry: geometry(&a.geometry)?,
        rect: rect4(&a.rect)?,
        cells: [a.cells, a.cells],
        boundary: a.boundary.parse()?,
    };
    let sol = solver::solve_problem(&p, SolveOptions { rel_tol: a.tol, ..SolveOptions::default() })?;
    let v = serde_json::json!({
        "geometry": p.geometry.id(),
        "boundary": p.boundary.name(),
        "nodes": [a.cells + 1, a.cells + 1],
        "iterations": sol.iterations,
        "residual": sol.residual,
        "energy": sol.energy,
        "min": sol.u.min(),
        "max": sol.u.max(),
    });
    let mut out = Output::json("solve", a, &v)?;
    out.files.push(("solve_field.csv".into(), report::field_csv(&sol.u)?));
    Ok(out)
}

fn oscillation(a: &OscillationArgs) -> Result<Output, Error> {
    let g = geometry(&a.geometry)?;
    let boundary: BoundaryData = a.boundary.parse()?;
    let center: [f64; 2] =
        a.center.as_slice().try_into().map_err(|_| Error::Config("center needs 2 numbers".into()))?;
    if a.levels == 0 {
        return Err(Error::Config("levels must be positive".into()));
    }
    let p = DegenerateProblem { geometry: g.clone(), rect: rect4(&a.rect)?, cells: [a.cells, a.cells], boundary };
    let profile = classifier::DeltaProfile::of_geometry(&g);
    let lambda = |r: f64| {
        classifier::delta(&profile, r).map(|d| classifier::ln_lambda(d.ln(), 1.0).exp()).unwrap_or(f64::NAN)
    };
    let rep = solver::oscillation_decay_run(&p, center, a.r0, a.levels, &lambda)?;
    let summary = serde_json::json!({
        "report": rep,
        "strictly_decreasing": rep.strictly_decreasing(),
        "final_over_initial": rep.final_over_initial(),
    });
    let mut out = Output::json("oscillation", a, &summary)?;
    let rows: Vec<(f64, f64)> = rep.levels.iter().map(|l| (l.r, l.osc)).collect();
    out.files.push(("oscillation.dat".into(), report::plot_data(["r", "osc"], &rows)));
    Ok(out)
}

fn classify(a: &ClassifyArgs) -> Result<Output, Error> {
    if let Some(s) = &a.sequence {
        let seq: Sequence = s.parse()?;
        let tail = match (a.j_max, a.y_max) {
            (_, Some(y)) => Tail::LogLog { y_max: y },
            (Some(j), None) => Tail::Index { j_max: j },
            (None, None) => Tail::DEFAULT_INDEX,
        };
        let v = classifier::classify_sequence(seq, tail, a.margin)?;
        return Output::json("classify", a, &v);
    }
    let tail = match (a.j_max, a.y_max) {
        (Some(j), _) => Tail::Index { j_max: j },
        (None, Some(y)) => Tail::LogLog { y_max: y },
        (None, None) => Tail::DEFAULT_LOGLOG,
    };
    let cfg = ClassifyConfig {
        constants: Constants { c1: a.c1, c2: a.c2, c3: a.c3, n: a.n },
        r0: a.r0,
        tail,
        margin: a.margin,
        table_rows: a.rows,
        constant_growth: a.constant_growth,
    };
    let rep = classifier::classify(&geometry(&a.geometry)?, &cfg)?;
    let mut out = Output::json("classify", a, &rep)?;
    let rows: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.j as f64, r.ln_lambda)).collect();
    out.files.push(("classify.dat".into(), report::plot_data(["j", "ln_lambda"], &rows)));
    Ok(out)
}

fn run_suite(a: &SuiteArgs) -> Result<Output, Error> {
    let ids: Vec<u8> = if a.criteria.is_empty() { (1..=11).collect() } else { a.criteria.clone() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=11).contains(&i)) {
        return Err(Error::Config(format!("no criterion {bad}")));
    }
    let mut outcomes = vec![];
    let mut text = String::new();
    for id in ids {
        let o = suite::run(id);
        text.push_str(&o.line());
        text.push('\n');
        outcomes.push(o);
    }
    let json = Envelope::new("suite", a, &outcomes).to_json()?;
    let status = if outcomes.iter().all(|o| o.passed) { 0 } else { 2 };
    Ok(Output { stdout: text, files: vec![("suite.json".into(), json)], status })
}

fn dispatch(cmd: &Cmd) -> Result<Output, Error> {
    match cmd {
        Cmd::Audit(a) => audit(a),
        Cmd::Geodesic(a) => geodesic(a),
        Cmd::Volume(a) => volume(a),
        Cmd::Kernel(a) => kernel(a),
        Cmd::Poincare(a) => inequality("poincare", InequalityKind::Poincare, a),
        Cmd::Sobolev(a) => inequality("sobolev", InequalityKind::VanishingSobolev, a),
        Cmd::Caccioppoli(a) => inequality("caccioppoli", InequalityKind::Caccioppoli, a),
        Cmd::Degiorgi(a) => inequality("degiorgi", InequalityKind::DeGiorgi, a),
        Cmd::Solve(a) => solve(a),
        Cmd::Oscillation(a) => oscillation(a),
        Cmd::Classify(a) => classify(a),
        Cmd::Suite(a) => run_suite(a),
    }
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<(), Error> {
    for (name, text) in files {
        report::write_atomic(&dir.join(name), text.as_bytes())?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> ExitCode {
    ExitCode::from(if e.is_validation() { 1 } else { 2 })
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out = match dispatch(&cli.cmd) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    print!("{}", out.stdout);
    if let Some(dir) = &cli.out_dir {
        if let Err(e) = write_outputs(dir, &out.files) {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    }
    if out.status != 0 {
        eprintln!("{}: check failed", cli.cmd.name());
    }
    ExitCode::from(out.status)
}
