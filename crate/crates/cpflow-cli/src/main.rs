//! `cpflow`: generate complexes, run flows, analyze and render the results.
//!
//! Exit codes: 0 success or converged, 2 ran but did not converge, 1 any
//! usage, input or configuration error.

mod angle;
mod config;
mod manifest;

use angle::parse_angle;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use config::{FlowArgs, FreeSet, InitKind, KHat};
use cpflow::complex::generate::{self, GeneratorParams};
use cpflow::curvature;
use cpflow::flow::{self, FlowTrace, Status};
use cpflow::layout::{self, sphere, svg, EmbedOptions};
use cpflow::{CellComplex, Error, FlowConfig, FlowProblem, Infinity, Metric};
use manifest::{artifact, config_hash, unix_now, RunManifest, Summary};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "cpflow", version, about = "Ricci flows for ideal circle patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated complex as JSON
    Generate(GenerateArgs),
    /// Check a complex JSON file and report its structure
    Validate(ValidateArgs),
    /// Run a flow and write trace, final metric and manifest to a directory
    Flow(FlowCmd),
    /// Fit convergence rates of a finished run
    Analyze(AnalyzeArgs),
    /// Lay out a finished run as SVG
    Render(RenderArgs),
    /// Build ideal polyhedron data from exterior dihedral angles
    Polyhedron(PolyhedronArgs),
}

#[derive(clap::Args, Debug)]
struct GenerateArgs {
    /// One of z2_lattice, hex_lattice, pq_tiling, square_torus, cube, octahedron, dodecahedron, icosahedron
    name: String,
    /// Hop radius (z2_lattice) or face layers (hex_lattice, pq_tiling)
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, value_parser = parse_angle)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Side of the square torus
    #[arg(long)]
    n: Option<usize>,
    /// Mark this face as the face at infinity
    #[arg(long)]
    infinity_face: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct ValidateArgs {
    complex: PathBuf,
    /// Slack on each face's weight sum
    #[arg(long, default_value_t = cpflow::tolerances::FACE_ANGLE_SUM)]
    tol: f64,
}

#[derive(clap::Args, Debug)]
struct FlowCmd {
    /// Complex JSON
    complex: PathBuf,
    /// Run directory (created)
    #[arg(long, short, default_value = "cpflow-run")]
    out: PathBuf,
    #[command(flatten)]
    flow: FlowArgs,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    /// Run directory written by `cpflow flow`
    run: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Coloring {
    None,
    U,
    Curvature,
}

#[derive(clap::Args, Debug)]
struct RenderArgs {
    /// Run directory written by `cpflow flow`
    run: PathBuf,
    /// SVG of the pattern; defaults to <run>/pattern.svg
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write a log-log plot of the energy decay
    #[arg(long)]
    decay: Option<PathBuf>,
    /// Also write the layout as JSON
    #[arg(long)]
    layout_json: Option<PathBuf>,
    /// Draw segments between centers of adjacent circles
    #[arg(long)]
    triangulation: bool,
    #[arg(long, value_enum, default_value_t = Coloring::None)]
    color: Coloring,
    /// Render a run that did not converge
    #[arg(long)]
    force: bool,
}

#[derive(clap::Args, Debug)]
struct PolyhedronArgs {
    /// Complex whose edge weights are exterior dihedral angles
    complex: PathBuf,
    /// Output JSON; stdout when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also draw the planar circle pattern
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    tol_k: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
}

/// How a command that ran to completion ended.
enum Outcome {
    Done,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `CPFLOW_THREADS` sizes the worker pool used by sweeps and curvature assembly.
fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("CPFLOW_THREADS") else { return Ok(()) };
    let n: usize = value.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("CPFLOW_THREADS={value} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Render(a) => cmd_render(a),
        Command::Polyhedron(a) => cmd_polyhedron(a),
    }
}

fn read_complex(path: &Path) -> Result<CellComplex> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CellComplex::from_json_str(&text).with_context(|| format!("loading complex {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => print_stdout(text),
    }
}

/// Print a line, treating a closed pipe (`cpflow ... | head`) as success.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<Outcome> {
    let params = GeneratorParams { radius: a.radius, theta: a.theta, p: a.p, q: a.q, n: a.n };
    let mut complex = generate::by_name(&a.name, &params)?.complex;
    if let Some(f) = a.infinity_face {
        complex.set_infinity(Some(Infinity::Face(f)))?;
    }
    emit(a.out.as_deref(), &complex.to_json_string())?;
    Ok(Outcome::Done)
}

fn cmd_validate(a: ValidateArgs) -> Result<Outcome> {
    let complex = read_complex(&a.complex)?;
    let violations = complex.validate_c1_with(a.tol);
    let interior = complex.interior_vertices();
    let characters: Vec<f64> = interior.iter().filter_map(|&v| complex.normalized_character(v).ok()).collect();
    let (lo, hi) = characters.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &c| (l.min(c), h.max(c)));
    let report = json!({
        "vertices": complex.vertex_count(),
        "edges": complex.edge_count(),
        "faces": complex.face_count(),
        "interior_vertices": interior.len(),
        "closed": complex.is_closed(),
        "infinity_vertices": complex.infinity_vertices().len(),
        "normalized_character": if characters.is_empty() { json!(null) } else { json!({"min": lo, "max": hi}) },
        "complex_hash": complex.content_hash(),
        "face_angle_violations": violations.iter().map(|v| json!({"face": v.face, "sum": v.sum, "expected": v.expected})).collect::<Vec<_>>(),
    });
    print_stdout(&serde_json::to_string_pretty(&report)?)?;
    if !violations.is_empty() {
        bail!("{} faces violate the angle-sum condition", violations.len());
    }
    Ok(Outcome::Done)
}

fn cmd_flow(a: FlowCmd) -> Result<Outcome> {
    let started_unix = unix_now();
    let settings = a.flow.resolve()?;
    let mut complex = read_complex(&a.complex)?;
    if let Some(t) = settings.theta_const {
        complex = complex.with_uniform_theta(t)?;
    }
    let (complex, target) = match settings.k_hat {
        KHat::Zero => (complex, None),
        KHat::FromInfinityMarks => {
            let hat = curvature::prescribed_curvature_hat(&complex)?;
            let (reduced, map) = complex.remove_infinity()?;
            let target: Vec<f64> = map.iter().map(|&v| hat[v]).collect();
            (reduced, Some(target))
        }
    };
    let n = complex.vertex_count();
    let free = match settings.free {
        FreeSet::Interior => complex.interior_vertices(),
        FreeSet::All => (0..n).collect(),
    };
    if free.is_empty() {
        bail!("no free vertices: the complex has no vertex with a complete star (try --free all)");
    }
    let mut problem = FlowProblem::with_free_vertices(&complex, settings.geometry, free.clone())?;
    if let Some(t) = target {
        problem = problem.with_target(t)?;
    }
    let mut u = match settings.init {
        InitKind::Zero => vec![0.0; n],
        InitKind::Character => flow::initial_metric_hyperbolic_character(&complex, &free, settings.c_hat)?.u,
    };
    if settings.perturb > 0.0 {
        for (x, dx) in u.iter_mut().zip(flow::white_noise(n, &free, settings.perturb, settings.seed)) {
            *x += dx;
        }
    }
    let initial = Metric::new(settings.geometry, u)?;
    let trace = flow::integrate(&problem, &initial, &settings.flow)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let complex_path = a.out.join("complex.json");
    let csv_path = a.out.join("trace.csv");
    let trace_path = a.out.join("trace.json");
    write(&complex_path, complex.to_json_string())?;
    write(&csv_path, trace_csv(&trace))?;
    write(&trace_path, serde_json::to_string(&trace)?)?;
    let summary = Summary {
        converged: trace.converged,
        final_residual: trace.final_residual(),
        t_final: trace.times.last().copied().unwrap_or(0.0),
        steps: trace.steps,
        rejected_steps: trace.rejected,
    };
    let manifest = RunManifest {
        command: "flow".into(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(&settings),
        config: &settings,
        input: artifact(&a.complex)?,
        complex_hash: complex.content_hash(),
        started_unix,
        finished_unix: unix_now(),
        outputs: vec![artifact(&complex_path)?, artifact(&csv_path)?, artifact(&trace_path)?],
        summary,
    };
    write(&a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    print_stdout(&format!(
        "{}: residual {:.3e} at t = {:.4} after {} steps ({} free vertices)",
        if trace.converged { "converged" } else { "not converged" },
        manifest.summary.final_residual,
        manifest.summary.t_final,
        trace.steps,
        free.len()
    ))?;
    Ok(if trace.converged { Outcome::Done } else { Outcome::NotConverged })
}

/// One row per accepted sample; floats in shortest round-trip form.
fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = String::from("t,residual,energy,u_min,u_max,du_min,du_max\n");
    for (t, d) in trace.times.iter().zip(&trace.diagnostics) {
        out.push_str(&format!("{t},{},{},{},{},{},{}\n", d.residual, d.energy, d.u_min, d.u_max, d.du_min, d.du_max));
    }
    out
}

fn load_run(dir: &Path) -> Result<(CellComplex, FlowTrace)> {
    let complex = read_complex(&dir.join("complex.json"))?;
    let path = dir.join("trace.json");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let trace: FlowTrace = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if trace.final_u.len() != complex.vertex_count() {
        bail!("trace and complex in {} disagree on the vertex count", dir.display());
    }
    Ok((complex, trace))
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<Outcome> {
    let (_, trace) = load_run(&a.run)?;
    let report = match flow::convergence_report(&trace) {
        // too short to fit; still classify so the exit code stays meaningful
        Err(Error::InsufficientData(_)) => flow::ConvergenceReport {
            status: if trace.converged { Status::Converged } else { Status::Stalled },
            final_residual: trace.final_residual(),
            exponential_rate: None,
            power_exponent: None,
            samples: trace.len(),
        },
        other => other?,
    };
    let energy_bound = trace
        .times
        .iter()
        .zip(&trace.diagnostics)
        .map(|(t, d)| d.energy * (1.0 + t))
        .fold(0.0, f64::max);
    let out = json!({
        "report": report,
        "max_energy_times_1_plus_t": energy_bound,
        "u_non_decreasing": trace.is_non_decreasing(cpflow::tolerances::TRACE_MONOTONE),
        "u_non_increasing": trace.is_non_increasing(cpflow::tolerances::TRACE_MONOTONE),
    });
    print_stdout(&serde_json::to_string_pretty(&out)?)?;
    Ok(if report.status == Status::Converged { Outcome::Done } else { Outcome::NotConverged })
}

fn cmd_render(a: RenderArgs) -> Result<Outcome> {
    let (complex, trace) = load_run(&a.run)?;
    if !trace.converged && !a.force {
        bail!("run in {} did not converge (residual {:.3e}); pass --force to render it anyway", a.run.display(), trace.final_residual());
    }
    let metric = trace.final_metric();
    let mut options = EmbedOptions { core_vertices: Some(trace.free.clone()), ..EmbedOptions::default() };
    if a.force {
        // an unconverged metric does not close up; draw it as laid out
        options.tolerance = f64::INFINITY;
    }
    let layout = layout::embed(&complex, &metric, &options)?;
    let coloring = match a.color {
        Coloring::None => None,
        Coloring::U => Some(metric.u.clone()),
        Coloring::Curvature => Some(curvature::curvatures(&complex, &metric)?),
    };
    let style = svg::SvgStyle { triangulation: a.triangulation, coloring, ..svg::SvgStyle::default() };
    let out = a.out.clone().unwrap_or_else(|| a.run.join("pattern.svg"));
    write(&out, svg::render_svg(&layout, &complex, &style))?;
    for w in &layout.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &a.decay {
        let energies: Vec<f64> = trace.diagnostics.iter().map(|d| d.energy).collect();
        write(p, svg::render_decay_plot(&trace.times, &energies))?;
    }
    if let Some(p) = &a.layout_json {
        write(p, serde_json::to_string_pretty(&layout.to_json(&complex))?)?;
    }
    Ok(Outcome::Done)
}

fn cmd_polyhedron(a: PolyhedronArgs) -> Result<Outcome> {
    let complex = read_complex(&a.complex)?;
    let defaults = FlowConfig::default();
    let config = FlowConfig {
        tol_k: a.tol_k.unwrap_or(defaults.tol_k),
        t_max: a.t_max.unwrap_or(defaults.t_max),
        snapshot_stride: usize::MAX,
        ..defaults
    };
    let run = match sphere::polyhedron_from_exterior_angles(&complex, &config) {
        Ok(run) => run,
        Err(e @ Error::Integrator { .. }) => {
            eprintln!("error: {e}");
            return Ok(Outcome::NotConverged);
        }
        Err(e) => return Err(e.into()),
    };
    let labels = complex.labels();
    let dihedral: Vec<_> = run
        .data
        .dihedral_angles
        .iter()
        .map(|d| {
            let e = &complex.edges()[d.edge];
            json!({"edge": d.edge, "u": labels[e.u], "v": labels[e.v], "exterior": d.exterior, "target": e.theta})
        })
        .collect();
    let max_error = run
        .data
        .dihedral_angles
        .iter()
        .map(|d| (d.exterior - complex.edges()[d.edge].theta).abs())
        .fold(0.0, f64::max);
    let out = json!({
        "complex_hash": complex.content_hash(),
        "flow": {"converged": run.trace.converged, "final_residual": run.trace.final_residual(), "steps": run.trace.steps},
        "max_exterior_angle_error": max_error,
        "max_ideal_vertex_error": run.data.max_ideal_vertex_error(&run.pattern),
        "dihedral_angles": dihedral,
        "half_spaces": run.data.half_spaces,
        "ideal_vertices": run.data.ideal_vertices,
        "warnings": run.data.warnings,
    });
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&out)?)?;
    if let Some(p) = &a.svg {
        write(p, svg::render_svg(&run.layout, &run.pattern, &svg::SvgStyle::default()))?;
    }
    Ok(Outcome::Done)
}
