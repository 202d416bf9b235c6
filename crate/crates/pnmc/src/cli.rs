//! `pnmc` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pnmc_core::analysis::{analyze, geometric_frame, AnalysisOptions, Immersion, SurfaceAnalysis};
use pnmc_core::canonical::{canonicalize, CanonicalizeOptions};
use pnmc_core::frame::{compatibility_residual, reconstruct, ReconstructOptions, TOL_BUILD};
use pnmc_core::natural::residual;
use pnmc_core::{standard_frame, CanonicalTriple, Case, MinkVec, ScalarField};
use serde_json::{json, Value};

use crate::config::JobConfig;
use crate::error::{CliError, Result};
use crate::fixtures::{self, Fixture, FixtureParams};
use crate::io;
use crate::report::Report;

/// Default bound on the roundtrip triple-recovery error.
pub const TOL_RECOVERY: f64 = 5e-4;

#[derive(Debug, Parser)]
#[command(name = "pnmc", version, about = "Timelike surfaces with parallel normalized mean curvature in R^4_1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Natural-system residuals of a triple.
    Residual(Flags),
    /// Builds a triple from a fixture and writes it as a bundle.
    Solve(Flags),
    /// Integrates the moving frame and writes the surface.
    Reconstruct(Flags),
    /// Frame functions and invariants of a sampled surface.
    Analyze(Flags),
    /// Moves a surface to canonical parameters.
    Canonicalize(Flags),
    /// solve, reconstruct, analyze and compare.
    Roundtrip(Flags),
    /// Converts a CSV bundle to legacy VTK.
    Export(Flags),
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::Residual(f) => ("residual", f),
            Command::Solve(f) => ("solve", f),
            Command::Reconstruct(f) => ("reconstruct", f),
            Command::Analyze(f) => ("analyze", f),
            Command::Canonicalize(f) => ("canonicalize", f),
            Command::Roundtrip(f) => ("roundtrip", f),
            Command::Export(f) => ("export", f),
        }
    }
}

#[derive(Debug, Default, clap::Args)]
struct Flags {
    /// JSON job file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// constant | jet | goursat-degenerate | goursat-hyperbolic | cylinder
    #[arg(long)]
    fixture: Option<String>,
    /// positive | negative | degenerate
    #[arg(long)]
    case: Option<String>,
    /// Jet order.
    #[arg(long)]
    order: Option<usize>,
    /// Half-width of the jet patch.
    #[arg(long)]
    radius: Option<f64>,
    /// Nodes per axis.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Triple bundle directory, immersion CSV, or bundle to export.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (or VTK file for `export`).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    tol_build: Option<f64>,
    #[arg(long)]
    tol_beta: Option<f64>,
    #[arg(long)]
    tol_sep: Option<f64>,
    #[arg(long)]
    tol_recovery: Option<f64>,
    /// Reconstruct even when the residual exceeds tol_build.
    #[arg(long)]
    force: bool,
}

impl Flags {
    fn into_config(self) -> JobConfig {
        JobConfig {
            command: None,
            fixture: self.fixture,
            case: self.case,
            order: self.order,
            radius: self.radius,
            nodes: self.nodes,
            seed: self.seed,
            input: self.input,
            output: self.output,
            tol_build: self.tol_build,
            tol_beta: self.tol_beta,
            tol_sep: self.tol_sep,
            tol_recovery: self.tol_recovery,
            force: self.force.then_some(true),
        }
    }
}

/// Parses `argv`, runs the command, prints the JSON report and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_report(argv) {
        Ok((report, code)) => {
            // A closed pipe on stdout must not turn into a panic.
            let _ = writeln!(std::io::stdout(), "{}", report.to_json());
            code
        }
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                1
            } else {
                0
            }
        }
    }
}

/// Like [`run`] but returns the report instead of printing it. Argument
/// errors (and `--help`) come back as the clap error.
pub fn run_report<I, T>(argv: I) -> std::result::Result<(Report, i32), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (command, flags) = Cli::try_parse_from(argv)?.command.split();
    let mut report = Report::new(command);
    let code = match execute(command, flags, &mut report) {
        Ok(()) => 0,
        Err(e) => {
            report.fail(&e);
            e.exit_code()
        }
    };
    Ok((report, code))
}

fn execute(command: &str, flags: Flags, report: &mut Report) -> Result<()> {
    let file = match &flags.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::Config(format!("job file is for command {c:?}, not {command:?}")));
        }
    }
    let cfg = file.merged(flags.into_config());
    cfg.validate()?;
    record_inputs(&cfg, report);
    let job = Job::new(cfg)?;
    match command {
        "residual" => cmd_residual(&job, report),
        "solve" => cmd_solve(&job, report),
        "reconstruct" => cmd_reconstruct(&job, report),
        "analyze" => cmd_analyze(&job, report),
        "canonicalize" => cmd_canonicalize(&job, report),
        "roundtrip" => cmd_roundtrip(&job, report),
        "export" => cmd_export(&job, report),
        _ => unreachable!("clap only yields known commands"),
    }
}

fn record_inputs(cfg: &JobConfig, report: &mut Report) {
    if let Value::Object(map) = serde_json::to_value(cfg).expect("config is plain data") {
        for (k, v) in map {
            if !v.is_null() && k != "command" {
                report.input(&k, v);
            }
        }
    }
}

/// Resolved configuration.
struct Job {
    cfg: JobConfig,
    params: FixtureParams,
}

impl Job {
    fn new(cfg: JobConfig) -> Result<Self> {
        let case = match &cfg.case {
            Some(s) => Some(Case::parse(s).ok_or_else(|| CliError::Config(format!("unknown case {s:?}")))?),
            None => None,
        };
        let params = FixtureParams {
            case,
            order: cfg.order,
            radius: cfg.radius.unwrap_or(fixtures::DEFAULT_RADIUS),
            nodes: cfg.nodes.unwrap_or(fixtures::DEFAULT_NODES),
            seed: cfg.seed.unwrap_or(fixtures::DEFAULT_SEED),
        };
        Ok(Job { cfg, params })
    }

    fn fixture(&self, default: Fixture) -> Result<Fixture> {
        self.cfg.fixture.as_deref().map_or(Ok(default), Fixture::parse)
    }

    fn reconstruct_options(&self, report: &mut Report) -> ReconstructOptions {
        let tol_build = self.cfg.tol_build.unwrap_or(TOL_BUILD);
        report.tolerance("tol_build", tol_build);
        ReconstructOptions { tol_build, force: self.cfg.force.unwrap_or(false) }
    }

    fn analysis_options(&self, report: &mut Report) -> AnalysisOptions {
        let opts = AnalysisOptions { tol_beta: self.cfg.tol_beta, ..Default::default() };
        report.tolerance("isotropy_tol", opts.isotropy_tol);
        opts
    }

    /// Triple from `--input` (a bundle directory) or a fixture.
    fn triple(&self, default: Fixture, report: &mut Report) -> Result<CanonicalTriple> {
        let t = match &self.cfg.input {
            Some(dir) => io::read_triple(dir)?,
            None => {
                let f = self.fixture(default)?;
                report.input("fixture", f.name());
                fixtures::triple(f, &self.params)?
            }
        };
        report.metric("case", t.case.name()).metric("nodes_u", t.grid().nu).metric("nodes_v", t.grid().nv);
        Ok(t)
    }

    /// Immersion from `--input` (a CSV file or a directory holding
    /// `immersion.csv`) or a fixture.
    fn immersion(&self, default: Fixture, report: &mut Report) -> Result<Immersion> {
        match &self.cfg.input {
            Some(p) => io::read_immersion(&immersion_path(p)),
            None => {
                let f = self.fixture(default)?;
                report.input("fixture", f.name());
                let opts = self.reconstruct_options(report);
                fixtures::immersion(f, &self.params, opts)
            }
        }
    }

    fn output(&self) -> Result<Option<&Path>> {
        match &self.cfg.output {
            Some(dir) => {
                io::create_dir(dir)?;
                Ok(Some(dir))
            }
            None => Ok(None),
        }
    }
}

fn immersion_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("immersion.csv")
    } else {
        p.to_path_buf()
    }
}

fn residual_metrics(t: &CanonicalTriple, report: &mut Report) -> Result<()> {
    let r = residual(t)?;
    let (m, im) = (r.component_max(), r.component_interior_max());
    for k in 0..3 {
        report.metric(&format!("r{}_max", k + 1), m[k]).metric(&format!("r{}_interior_max", k + 1), im[k]);
    }
    report.metric("residual_max", r.max_abs).metric("residual_interior_max", r.interior_max_abs);
    Ok(())
}

fn cmd_residual(job: &Job, report: &mut Report) -> Result<()> {
    let t = job.triple(Fixture::Constant, report)?;
    residual_metrics(&t, report)?;
    report.metric("compat_max", compatibility_residual(&t)?.max_abs());
    Ok(())
}

fn cmd_solve(job: &Job, report: &mut Report) -> Result<()> {
    let f = job.fixture(Fixture::Jet)?;
    report.input("fixture", f.name());
    let t = fixtures::triple(f, &job.params)?;
    report.metric("case", t.case.name()).metric("nodes_u", t.grid().nu).metric("nodes_v", t.grid().nv);
    residual_metrics(&t, report)?;
    if let Some(dir) = job.output()? {
        io::write_triple(dir, &t)?;
    }
    Ok(())
}

fn cmd_reconstruct(job: &Job, report: &mut Report) -> Result<()> {
    let t = job.triple(Fixture::Constant, report)?;
    let opts = job.reconstruct_options(report);
    let b = reconstruct(&t, MinkVec::ZERO, &standard_frame(), opts)?;
    let d = &b.diagnostics;
    report
        .metric("gram_drift", d.gram_drift)
        .metric("path_discrepancy", d.path_discrepancy)
        .metric("position_discrepancy", d.position_discrepancy)
        .metric("compat_max", d.compat_max)
        .metric("residual_max", d.residual_max);
    if let Some(dir) = job.output()? {
        io::write_immersion(&dir.join("immersion.csv"), &b.immersion)?;
        io::write_vtk(&dir.join("surface.vtk"), &b.immersion, Some(&b.frames))?;
        io::write_json(
            &dir.join("diagnostics.json"),
            &json!({
                "gram_drift": d.gram_drift,
                "path_discrepancy": d.path_discrepancy,
                "position_discrepancy": d.position_discrepancy,
                "compat_max": d.compat_max,
                "residual_max": d.residual_max,
            }),
        )?;
    }
    Ok(())
}

/// Interior `(min, max)` of a field.
fn interior_range(f: &ScalarField) -> (f64, f64) {
    let g = *f.grid();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..g.nu {
        for j in 0..g.nv {
            if g.is_interior(i, j) {
                lo = lo.min(f.at(i, j));
                hi = hi.max(f.at(i, j));
            }
        }
    }
    (lo, hi)
}

fn named_fields(a: &SurfaceAnalysis) -> Vec<(&'static str, &ScalarField)> {
    let (f, inv) = (&a.functions, &a.invariants);
    vec![
        ("f", &f.f),
        ("lambda1", &f.lambda1),
        ("mu1", &f.mu1),
        ("lambda2", &f.lambda2),
        ("mu2", &f.mu2),
        ("nu", &f.nu),
        ("beta1", &f.beta1),
        ("beta2", &f.beta2),
        ("gamma1", &f.gamma1),
        ("gamma2", &f.gamma2),
        ("k_metric", &inv.k_metric),
        ("k_frame", &inv.k_frame),
        ("h2", &inv.h2),
        ("kmh2", &inv.kmh2_direct),
        ("delta1", &inv.delta1),
        ("delta2", &inv.delta2),
        ("delta3", &inv.delta3),
    ]
}

fn analysis_metrics(a: &SurfaceAnalysis, report: &mut Report) -> Result<()> {
    let g = *a.functions.f.grid();
    let inv = &a.invariants;
    report
        .metric("classification", inv.overall.name())
        .metric("isotropy_ratio", a.fff.isotropy_ratio)
        .metric("beta_max", a.functions.beta_max())
        .metric("beta_interior_max", a.functions.beta_interior_max())
        .metric("nu_variation", inv.nu_variation)
        .metric("k_difference_interior_max", (&inv.k_metric - &inv.k_frame).interior_max_abs())
        .tolerance("tol_beta", inv.tol_beta)
        .tolerance("tol_nu_variation", inv.tol_nu_variation);
    if let Ok((case, _)) = a.case_at(g.nu / 2, g.nv / 2) {
        report.metric("case", case.name());
    }
    let mut fields = serde_json::Map::new();
    for (name, f) in named_fields(a) {
        let (lo, hi) = interior_range(f);
        fields.insert(name.to_string(), json!({ "interior_min": lo, "interior_max": hi }));
    }
    report.metric("fields", Value::Object(fields));
    Ok(())
}

fn cmd_analyze(job: &Job, report: &mut Report) -> Result<()> {
    let m = job.immersion(Fixture::Cylinder, report)?;
    let a = analyze(&m, &job.analysis_options(report))?;
    analysis_metrics(&a, report)?;
    if let Some(dir) = job.output()? {
        for (name, f) in named_fields(&a) {
            io::write_field(&dir.join(format!("{name}.csv")), f)?;
        }
        io::write_json(&dir.join("invariants.json"), report)?;
    }
    Ok(())
}

fn cmd_canonicalize(job: &Job, report: &mut Report) -> Result<()> {
    let m = job.immersion(Fixture::Jet, report)?;
    let opts = CanonicalizeOptions {
        tol_sep: job.cfg.tol_sep,
        analysis: job.analysis_options(report),
        ..Default::default()
    };
    report.tolerance("tol_canonical", opts.tol_canonical);
    let c = canonicalize(&m, &opts)?;
    let s = &c.separability;
    report
        .metric("case", c.triple.case.name())
        .metric("separability_dev_u", s.dev_u)
        .metric("separability_dev_v", s.dev_v)
        .metric("metric_deviation", c.metric_deviation)
        .metric("sigma_deviation", c.sigma_deviation)
        .metric("nu_v_spread", c.nu_v_spread)
        .tolerance("tol_sep", opts.tol_sep.unwrap_or_else(|| s.default_tol()));
    if let Some(dir) = job.output()? {
        io::write_triple(&dir.join("triple"), &c.triple)?;
        io::write_immersion(&dir.join("immersion.csv"), &c.immersion)?;
        let r = &c.reparametrization;
        io::write_json(
            &dir.join("reparametrization.json"),
            &json!({ "phi": r.phi, "psi": r.psi, "ubar": r.ubar, "vbar": r.vbar }),
        )?;
    }
    Ok(())
}

/// Interior max of `|a - b|` over the nodes of `b`.
pub fn interior_error(a: &ScalarField, b: &ScalarField) -> f64 {
    (a - b).interior_max_abs()
}

fn cmd_roundtrip(job: &Job, report: &mut Report) -> Result<()> {
    let tol = job.cfg.tol_recovery.unwrap_or(TOL_RECOVERY);
    report.tolerance("tol_recovery", tol);
    let t = job.triple(Fixture::Jet, report)?;
    let opts = job.reconstruct_options(report);
    let b = reconstruct(&t, MinkVec::ZERO, &standard_frame(), opts)?;
    report.metric("gram_drift", b.diagnostics.gram_drift);
    let a = analyze(&b.immersion, &job.analysis_options(report))?;
    let f = &a.functions;
    let errs = [
        interior_error(&f.lambda1, &t.lambda),
        interior_error(&f.mu1, &t.mu),
        interior_error(&f.nu, &t.nu),
    ];
    let recovery = errs.iter().fold(0.0f64, |m, &e| m.max(e));
    report
        .metric("lambda_error", errs[0])
        .metric("mu_error", errs[1])
        .metric("nu_error", errs[2])
        .metric("recovery_error", recovery)
        .metric("classification", a.invariants.overall.name())
        .metric("beta_max", f.beta_max())
        .metric("beta_interior_max", f.beta_interior_max());
    let g = *t.grid();
    if let Ok((case, _)) = a.case_at(g.nu / 2, g.nv / 2) {
        report.metric("recovered_case", case.name());
    }
    if !(recovery <= tol) {
        return Err(CliError::Tolerance { what: "recovery_error", measured: recovery, tol });
    }
    Ok(())
}

fn cmd_export(job: &Job, report: &mut Report) -> Result<()> {
    let input = job.cfg.input.as_ref().ok_or_else(|| CliError::Config("export needs --input".into()))?;
    let csv = immersion_path(input);
    let m = io::read_immersion(&csv)?;
    let out = match &job.cfg.output {
        Some(p) => p.clone(),
        None => csv.with_extension("vtk"),
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        io::create_dir(parent)?;
    }
    // Normals need a non-minimal surface; without them only points are written.
    let frames = geometric_frame(&m).ok();
    io::write_vtk(&out, &m, frames.as_ref().map(|g| &g.frames))?;
    report
        .metric("points", m.grid().len())
        .metric("normals", frames.is_some())
        .metric("vtk", out.display().to_string());
    Ok(())
}
