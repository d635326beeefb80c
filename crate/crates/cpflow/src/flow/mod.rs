//! Ricci flow on finite truncations.
//!
//! Free vertices evolve by `du/dt = -(K - K̂)`; every other vertex keeps its
//! initial value bit for bit.

pub mod ode;

pub use ode::{Control, OdeSystem, Scheme, SolveStats, SolverOptions};

use crate::complex::{CellComplex, Exhaustion};
use crate::curvature::{self, Metric};
use crate::error::{Error, Result};
use crate::geometry::{self, Background};
use crate::tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256.
pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A complex, a background, the free vertex set and the curvature target.
#[derive(Clone, Debug)]
pub struct FlowProblem<'a> {
    complex: &'a CellComplex,
    background: Background,
    free: Vec<usize>,
    is_free: Vec<bool>,
    target: Vec<f64>,
}

impl<'a> FlowProblem<'a> {
    /// Vertices with complete stars are free; the target is zero.
    pub fn new(complex: &'a CellComplex, background: Background) -> Result<Self> {
        FlowProblem::with_free_vertices(complex, background, complex.interior_vertices())
    }

    /// Problem with an explicit free set; needed when no vertex is interior.
    pub fn with_free_vertices(complex: &'a CellComplex, background: Background, free: Vec<usize>) -> Result<Self> {
        let n = complex.vertex_count();
        FlowProblem { complex, background, free: Vec::new(), is_free: vec![false; n], target: vec![0.0; n] }
            .with_free(free)
    }

    pub fn with_free(mut self, mut free: Vec<usize>) -> Result<Self> {
        free.sort_unstable();
        free.dedup();
        if free.is_empty() {
            return Err(Error::Config("flow needs at least one free vertex".into()));
        }
        if let Some(&v) = free.iter().find(|&&v| v >= self.complex.vertex_count()) {
            return Err(Error::Lookup(format!("free vertex {v} does not exist")));
        }
        if let Some(&v) = free.iter().find(|&&v| self.complex.degree(v) == 0) {
            return Err(Error::Precondition(format!("free vertex {v} is isolated")));
        }
        self.is_free = vec![false; self.complex.vertex_count()];
        for &v in &free {
            self.is_free[v] = true;
        }
        self.free = free;
        Ok(self)
    }

    pub fn with_target(mut self, target: Vec<f64>) -> Result<Self> {
        if target.len() != self.complex.vertex_count() {
            return Err(Error::Precondition(format!(
                "target has {} entries for {} vertices",
                target.len(),
                self.complex.vertex_count()
            )));
        }
        if target.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("target curvature must be finite".into()));
        }
        self.target = target;
        Ok(self)
    }

    pub fn complex(&self) -> &'a CellComplex {
        self.complex
    }

    pub fn background(&self) -> Background {
        self.background
    }

    /// Sorted free vertices.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.is_free[v]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    fn check_metric(&self, metric: &Metric) -> Result<()> {
        if metric.background != self.background {
            return Err(Error::Config(format!(
                "metric is {} but the problem is {}",
                metric.background.name(),
                self.background.name()
            )));
        }
        if metric.len() != self.complex.vertex_count() {
            return Err(Error::Precondition(format!(
                "metric has {} values for {} vertices",
                metric.len(),
                self.complex.vertex_count()
            )));
        }
        Ok(())
    }

    /// `K - K̂` on the free vertices, in `free()` order.
    fn defects(&self, u: &[f64]) -> Vec<f64> {
        let bg = self.background;
        let radii = curvature::radii_of(bg, u);
        self.free
            .par_iter()
            .with_min_len(256)
            .map(|&v| curvature::curvature_at(self.complex, bg, &radii, v) - self.target[v])
            .collect()
    }

    /// `max |K - K̂|` over free vertices.
    pub fn residual(&self, metric: &Metric) -> Result<f64> {
        self.check_metric(metric)?;
        Ok(self.defects(&metric.u).iter().fold(0.0, |m, d| m.max(d.abs())))
    }
}

/// `du/dt` for every vertex; zero on frozen vertices.
pub fn ricci_flow_rhs(problem: &FlowProblem, metric: &Metric) -> Result<Vec<f64>> {
    problem.check_metric(metric)?;
    let mut du = vec![0.0; metric.len()];
    for (&v, d) in problem.free.iter().zip(problem.defects(&metric.u)) {
        du[v] = -d;
    }
    Ok(du)
}

/// `Σ_edges (u_i - u_j)²`.
pub fn dirichlet_energy(complex: &CellComplex, u: &[f64]) -> f64 {
    complex.edges().iter().map(|e| (u[e.u] - u[e.v]).powi(2)).sum()
}

struct RicciSystem<'p, 'a> {
    problem: &'p FlowProblem<'a>,
    u_cap: f64,
}

impl OdeSystem for RicciSystem<'_, '_> {
    fn dim(&self) -> usize {
        self.problem.complex.vertex_count()
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy.fill(0.0);
        for (&v, d) in self.problem.free.iter().zip(self.problem.defects(y)) {
            dy[v] = -d;
        }
        Ok(())
    }

    fn admissible(&self, y: &[f64]) -> bool {
        let bg = self.problem.background;
        self.problem.free.iter().all(|&v| bg.admits_u(y[v]) && y[v].abs() <= self.u_cap)
    }

    /// Gershgorin bound over the free rows of the curvature Jacobian.
    fn spectral_bound(&self, y: &[f64]) -> Option<f64> {
        let complex = self.problem.complex;
        let bg = self.problem.background;
        let radii = curvature::radii_of(bg, y);
        let row = |v: usize| -> f64 {
            complex
                .neighbors(v)
                .iter()
                .map(|&(w, e)| {
                    let (own, cross) =
                        geometry::d_theta_d_u_unchecked(bg, radii[v], radii[w], complex.edges()[e].theta);
                    2.0 * (own.abs() + if self.problem.is_free[w] { cross.abs() } else { 0.0 })
                })
                .sum()
        };
        let bound = self.problem.free.iter().map(|&v| row(v)).fold(0.0, f64::max);
        bound.is_finite().then_some(bound)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub integrator: Scheme,
    pub dt_init: f64,
    pub t_max: f64,
    /// Stop once `max |K - K̂|` over free vertices drops to this.
    pub tol_k: f64,
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Keep a full snapshot every this many accepted steps (and the last).
    pub snapshot_stride: usize,
    /// Free coordinates with `|u|` above this are treated as divergence.
    pub u_cap: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            integrator: Scheme::Rk45,
            dt_init: 1e-2,
            t_max: 1e4,
            tol_k: tolerances::CURVATURE_RESIDUAL,
            atol: tolerances::STEP_ERROR,
            rtol: tolerances::STEP_ERROR,
            max_steps: 2_000_000,
            snapshot_stride: 10,
            u_cap: 700.0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_k > 0.0) {
            return Err(Error::Config(format!("tol_k = {} must be positive", self.tol_k)));
        }
        if !(self.dt_init > 0.0) {
            return Err(Error::Config(format!("dt_init = {} must be positive", self.dt_init)));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::Config(format!("t_max = {} must be non-negative", self.t_max)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            scheme: self.integrator,
            dt: self.dt_init,
            atol: self.atol,
            rtol: self.rtol,
            max_steps: self.max_steps,
            ..SolverOptions::default()
        }
    }
}

/// Scalar diagnostics at one accepted time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `max |K - K̂|` over free vertices.
    pub residual: f64,
    pub energy: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Extreme per-vertex changes of `u` since the previous sample.
    pub du_min: f64,
    pub du_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub u: Vec<f64>,
    /// Curvature on the free vertices, in `FlowTrace::free` order.
    pub curvature: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub background: Background,
    pub free: Vec<usize>,
    pub times: Vec<f64>,
    pub diagnostics: Vec<Diagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub converged: bool,
    pub tol_k: f64,
    pub steps: usize,
    pub rejected: usize,
    pub final_u: Vec<f64>,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_metric(&self) -> Metric {
        Metric { background: self.background, u: self.final_u.clone() }
    }

    pub fn final_residual(&self) -> f64 {
        self.diagnostics.last().map_or(f64::NAN, |d| d.residual)
    }

    /// Whether `u` never decreased (resp. increased) by more than `slack` in one step.
    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.diagnostics.iter().all(|d| d.du_min >= -slack)
    }

    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.diagnostics.iter().all(|d| d.du_max <= slack)
    }
}

/// Integrate until the curvature residual reaches `tol_k` or `t_max` passes.
pub fn integrate(problem: &FlowProblem, initial: &Metric, config: &FlowConfig) -> Result<FlowTrace> {
    config.validate()?;
    problem.check_metric(initial)?;
    let system = RicciSystem { problem, u_cap: config.u_cap };
    let complex = problem.complex;
    let mut u = initial.u.clone();
    let mut trace = FlowTrace {
        background: problem.background,
        free: problem.free.clone(),
        times: Vec::new(),
        diagnostics: Vec::new(),
        snapshots: Vec::new(),
        converged: false,
        tol_k: config.tol_k,
        steps: 0,
        rejected: 0,
        final_u: Vec::new(),
    };
    let mut previous = u.clone();
    let mut step = 0usize;
    let mut last_snapshot = usize::MAX;
    let outcome = ode::solve(&system, 0.0, &mut u, config.t_max, &config.solver_options(), |t, y, dy| {
        let (mut residual, mut du_min, mut du_max) = (0.0f64, 0.0f64, 0.0f64);
        for &v in &problem.free {
            residual = residual.max(dy[v].abs());
            let change = y[v] - previous[v];
            du_min = du_min.min(change);
            du_max = du_max.max(change);
        }
        let (u_min, u_max) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        trace.times.push(t);
        trace.diagnostics.push(Diagnostics {
            residual,
            energy: dirichlet_energy(complex, y),
            u_min,
            u_max,
            du_min,
            du_max,
        });
        let done = residual <= config.tol_k;
        if step.is_multiple_of(config.snapshot_stride) || done {
            trace.snapshots.push(snapshot(problem, step, t, y, dy));
            last_snapshot = step;
        }
        previous.copy_from_slice(y);
        step += 1;
        if done {
            Control::Stop
        } else {
            Control::Continue
        }
    });
    let stats = match outcome {
        Ok(stats) => stats,
        Err(Error::Integrator { t, reason }) => {
            let last = trace.diagnostics.last();
            return Err(Error::Integrator {
                t,
                reason: format!(
                    "{reason}; last residual {:.3e}, u in [{:.3e}, {:.3e}]",
                    last.map_or(f64::NAN, |d| d.residual),
                    last.map_or(f64::NAN, |d| d.u_min),
                    last.map_or(f64::NAN, |d| d.u_max)
                ),
            });
        }
        Err(e) => return Err(e),
    };
    trace.converged = trace.final_residual() <= config.tol_k;
    trace.steps = stats.steps;
    trace.rejected = stats.rejected;
    if last_snapshot != step - 1 {
        let mut dy = vec![0.0; u.len()];
        system.rhs(stats.t, &u, &mut dy)?;
        trace.snapshots.push(snapshot(problem, step - 1, stats.t, &u, &dy));
    }
    trace.final_u = u;
    Ok(trace)
}

fn snapshot(problem: &FlowProblem, step: usize, t: f64, y: &[f64], dy: &[f64]) -> Snapshot {
    Snapshot {
        step,
        t,
        u: y.to_vec(),
        curvature: problem.free.iter().map(|&v| problem.target[v] - dy[v]).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Stalled,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: Status,
    pub final_residual: f64,
    /// Fitted `γ` in `residual ~ e^{-γ t}` over the second half of the run.
    pub exponential_rate: Option<f64>,
    /// Fitted slope of `ln E` against `ln(1 + t)` over the middle of the run.
    pub power_exponent: Option<f64>,
    pub samples: usize,
}

/// Ordinary least squares `y ≈ slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// `-slope` of `ln value` against `t` over samples with `t ≥ from · t_end`.
pub fn exponential_rate(times: &[f64], values: &[f64], from: f64) -> Option<f64> {
    let t_end = *times.last()?;
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|&(&t, &v)| t >= from * t_end && v > 0.0 && v.is_finite())
        .map(|(&t, &v)| (t, v.ln()))
        .unzip();
    if x.len() < 3 {
        return None;
    }
    linear_fit(&x, &y).map(|(s, _)| -s)
}

/// Slope of `ln value` against `ln(1 + t)` over the window of `ln(1 + t)`
/// between fractions `lo` and `hi` of its final value.
pub fn power_law_exponent(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let span = (1.0 + *times.last()?).ln();
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .map(|(&t, &v)| ((1.0 + t).ln(), v))
        .filter(|&(s, v)| s >= lo * span && s <= hi * span && v > 0.0 && v.is_finite())
        .map(|(s, v)| (s, v.ln()))
        .unzip();
    if x.len() < 3 {
        return None;
    }
    linear_fit(&x, &y).map(|(s, _)| s)
}

pub fn convergence_report(trace: &FlowTrace) -> Result<ConvergenceReport> {
    let final_residual = trace.final_residual();
    if trace.converged && trace.len() < 10 {
        return Ok(ConvergenceReport {
            status: Status::Converged,
            final_residual,
            exponential_rate: None,
            power_exponent: None,
            samples: trace.len(),
        });
    }
    if trace.len() < 10 {
        return Err(Error::InsufficientData(format!("trace has {} < 10 samples", trace.len())));
    }
    let residuals: Vec<f64> = trace.diagnostics.iter().map(|d| d.residual).collect();
    let energies: Vec<f64> = trace.diagnostics.iter().map(|d| d.energy).collect();
    let exponential_rate = exponential_rate(&trace.times, &residuals, 0.5);
    let power_exponent = power_law_exponent(&trace.times, &energies, 0.25, 0.75);
    let status = if trace.converged {
        Status::Converged
    } else if !final_residual.is_finite() || final_residual > 10.0 * residuals[0] || exponential_rate.is_some_and(|g| g < 0.0) {
        Status::Diverged
    } else {
        Status::Stalled
    };
    Ok(ConvergenceReport { status, final_residual, exponential_rate, power_exponent, samples: trace.len() })
}

/// Bisection cap on the diagonal radius; `ln tanh(r/2)` stays below zero.
const DIAGONAL_RADIUS_CAP: f64 = 30.0;

/// Constant hyperbolic metric with `K ≤ 0` on the free vertices.
///
/// Requires normalized character `≥ c_hat > 0` at every free vertex. Each
/// edge touching a free vertex then needs `θ(t,t) ≥ Θ/2 - c_hat/2`, which
/// gives `K_v ≤ d_v (c_hat - normalized character) ≤ 0`.
pub fn initial_metric_hyperbolic_character(complex: &CellComplex, free: &[usize], c_hat: f64) -> Result<Metric> {
    if !(c_hat > 0.0 && c_hat.is_finite()) {
        return Err(Error::Config(format!("c_hat = {c_hat} must be positive")));
    }
    let mut offending = Vec::new();
    for &v in free {
        let c = complex.normalized_character(v)?;
        if c < c_hat {
            offending.push(format!("{} ({c:.6})", complex.labels()[v]));
        }
    }
    if !offending.is_empty() {
        return Err(Error::Precondition(format!(
            "normalized character below {c_hat} at vertices {}",
            offending.join(", ")
        )));
    }
    let mut t = DIAGONAL_RADIUS_CAP;
    for &v in free {
        for &(_, e) in complex.neighbors(v) {
            let theta = complex.edges()[e].theta;
            let need = geometry::diagonal_radius_for_angle(
                theta,
                theta / 2.0 - c_hat / 2.0,
                DIAGONAL_RADIUS_CAP,
                tolerances::BISECTION_STEPS,
            )?;
            t = t.min(need);
        }
    }
    if !(t > 0.0) {
        return Err(Error::Precondition("diagonal radius collapsed to zero".into()));
    }
    let metric = Metric::constant_radius(Background::Hyperbolic, complex.vertex_count(), t)?;
    let k = curvature::curvatures(complex, &metric)?;
    if let Some(&v) = free.iter().find(|&&v| k[v] > 0.0) {
        return Err(Error::Precondition(format!(
            "constant metric r = {t} leaves K = {:.3e} > 0 at vertex {}",
            k[v],
            complex.labels()[v]
        )));
    }
    Ok(metric)
}

/// Gaussian white noise on `support`, rescaled to the given l² norm.
pub fn white_noise(n: usize, support: &[usize], l2_norm: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = vec![0.0; n];
    for &v in support {
        field[v] = StandardNormal.sample(&mut rng);
    }
    let norm = field.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut field {
            *x *= l2_norm / norm;
        }
    }
    field
}

/// Undirected graph for the linear heat harness.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl HeatGraph {
    pub fn from_complex(complex: &CellComplex) -> Self {
        HeatGraph { n: complex.vertex_count(), edges: complex.edges().iter().map(|e| (e.u, e.v)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatTrace {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl HeatTrace {
    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().fold(f64::INFINITY, |m, &x| m.min(x))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

struct HeatSystem<'g, C> {
    graph: &'g HeatGraph,
    coefficients: C,
}

impl<C: Fn(f64, &mut [f64], &mut [f64])> OdeSystem for HeatSystem<'_, C> {
    fn dim(&self) -> usize {
        self.graph.n
    }

    fn rhs(&self, t: f64, f: &[f64], df: &mut [f64]) -> Result<()> {
        let mut omega = vec![0.0; self.graph.edges.len()];
        let mut g = vec![0.0; self.graph.n];
        (self.coefficients)(t, &mut omega, &mut g);
        for (i, d) in df.iter_mut().enumerate() {
            *d = g[i] * f[i];
        }
        for (k, &(i, j)) in self.graph.edges.iter().enumerate() {
            let w = omega[k];
            if !(w >= 0.0) {
                return Err(Error::Precondition(format!("edge weight ω[{k}] = {w} at t = {t} is negative")));
            }
            df[i] += w * (f[j] - f[i]);
            df[j] += w * (f[i] - f[j]);
        }
        Ok(())
    }
}

/// `df/dt = Δ_ω f + g f` with `Δ_ω f_i = Σ_j ω_ij (f_j - f_i)`.
///
/// `coefficients(t, omega, g)` fills the per-edge weights and per-vertex
/// potential at time `t`.
pub fn heat_equation_simulate<C>(
    graph: &HeatGraph,
    coefficients: C,
    f0: &[f64],
    horizon: f64,
    options: &SolverOptions,
) -> Result<HeatTrace>
where
    C: Fn(f64, &mut [f64], &mut [f64]),
{
    if f0.len() != graph.n {
        return Err(Error::Precondition(format!("f0 has {} entries for {} vertices", f0.len(), graph.n)));
    }
    let system = HeatSystem { graph, coefficients };
    let mut f = f0.to_vec();
    let mut trace = HeatTrace { times: Vec::new(), values: Vec::new() };
    ode::solve(&system, 0.0, &mut f, horizon, options, |t, y, _| {
        trace.times.push(t);
        trace.values.push(y.to_vec());
        Control::Continue
    })?;
    Ok(trace)
}

/// One exhaustion level's run.
#[derive(Clone, Debug)]
pub struct LevelRun {
    pub radius: usize,
    pub trace: FlowTrace,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub levels: Vec<LevelRun>,
    /// `max |u_k - u_{k+1}|` over the inner half (by hop radius) of level `k`.
    pub deltas: Vec<f64>,
}

/// Run the flow with each exhaustion level free and everything else frozen
/// at `initial`, in parallel, and compare consecutive levels.
pub fn truncation_sweep(
    complex: &CellComplex,
    exhaustion: &Exhaustion,
    background: Background,
    target: Option<&[f64]>,
    initial: &Metric,
    config: &FlowConfig,
) -> Result<SweepReport> {
    let levels: Vec<LevelRun> = exhaustion
        .levels
        .par_iter()
        .zip(&exhaustion.radii)
        .map(|(level, &radius)| {
            let mut problem = FlowProblem::new(complex, background)?.with_free(level.clone())?;
            if let Some(t) = target {
                problem = problem.with_target(t.to_vec())?;
            }
            Ok(LevelRun { radius, trace: integrate(&problem, initial, config)? })
        })
        .collect::<Result<_>>()?;
    let dist = complex.distances_from(exhaustion.root);
    let deltas = levels
        .windows(2)
        .map(|w| {
            let inner = w[0].radius / 2;
            (0..complex.vertex_count())
                .filter(|&v| dist[v].is_some_and(|d| d <= inner))
                .map(|v| (w[0].trace.final_u[v] - w[1].trace.final_u[v]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(SweepReport { levels, deltas })
}
