//! Explicit Runge–Kutta integrators for autonomous-or-not ODE systems.

use crate::error::{Error, Result};
use crate::tolerances;
use serde::{Deserialize, Serialize};

/// `dy/dt = f(t, y)` on an open state domain.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
    /// Whether `y` lies in the state domain.
    fn admissible(&self, _y: &[f64]) -> bool {
        true
    }
    /// Upper bound on the spectral radius of the Jacobian at `y`. Adaptive
    /// steps are kept inside the stability interval of the scheme, so stiff
    /// modes decay instead of hovering at the error tolerance.
    fn spectral_bound(&self, _y: &[f64]) -> Option<f64> {
        None
    }
}

/// Fraction of the real stability interval used by capped adaptive steps.
const STABILITY_FRACTION: f64 = 0.9;
/// Length of the negative real interval inside the Dormand–Prince stability region.
const DOPRI_REAL_STABILITY: f64 = 3.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Dormand–Prince 5(4) with error control and first-same-as-last reuse.
    Rk45,
    /// Classical fourth order with fixed step.
    Rk4,
}

impl Scheme {
    /// Nominal convergence order.
    pub fn order(self) -> u32 {
        match self {
            Scheme::Rk45 => 5,
            Scheme::Rk4 => 4,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk45" | "dopri5" => Ok(Scheme::Rk45),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(Error::Config(format!("unknown integrator '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub scheme: Scheme,
    /// Initial step (adaptive) or the step (fixed).
    pub dt: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scheme: Scheme::Rk45,
            dt: 1e-3,
            dt_min: 1e-14,
            dt_max: f64::INFINITY,
            atol: tolerances::STEP_ERROR,
            rtol: tolerances::STEP_ERROR,
            max_steps: 10_000_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("step {} must be positive", self.dt)));
        }
        if !(self.atol > 0.0 && self.rtol >= 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return Err(Error::Config("need 0 < dt_min ≤ dt_max".into()));
        }
        Ok(())
    }
}

/// Observer verdict after each accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveStats {
    pub t: f64,
    pub steps: usize,
    pub rejected: usize,
    /// The observer asked to stop before `t_end`.
    pub stopped: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrate from `t0` toward `t_end`, updating `y` in place.
///
/// `observe(t, y, f(t, y))` runs at `t0` and after every accepted step.
pub fn solve<S: OdeSystem>(
    system: &S,
    t0: f64,
    y: &mut [f64],
    t_end: f64,
    options: &SolverOptions,
    mut observe: impl FnMut(f64, &[f64], &[f64]) -> Control,
) -> Result<SolveStats> {
    options.validate()?;
    let n = system.dim();
    if y.len() != n {
        return Err(Error::Precondition(format!("state has {} entries, system {n}", y.len())));
    }
    if !system.admissible(y) || !finite(y) {
        return Err(Error::Domain("initial state outside the domain".into()));
    }
    let mut t = t0;
    let mut f = vec![0.0; n];
    system.rhs(t, y, &mut f)?;
    let mut stats = SolveStats { t, steps: 0, rejected: 0, stopped: false };
    if observe(t, y, &f) == Control::Stop {
        stats.stopped = true;
        return Ok(stats);
    }
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut dt = options.dt.min(options.dt_max);
    let mut last_rejected = false;
    let stability_cap = |y: &[f64]| match options.scheme {
        Scheme::Rk45 => system
            .spectral_bound(y)
            .filter(|b| *b > 0.0)
            .map_or(f64::INFINITY, |b| STABILITY_FRACTION * DOPRI_REAL_STABILITY / b),
        Scheme::Rk4 => f64::INFINITY,
    };
    let mut cap = stability_cap(y);
    while t < t_end {
        if stats.steps >= options.max_steps {
            return Err(Error::Integrator { t, reason: format!("step budget {} exhausted", options.max_steps) });
        }
        let h = dt.min(cap).min(t_end - t);
        k[0].copy_from_slice(&f);
        let accepted = match options.scheme {
            Scheme::Rk45 => dopri_step(system, t, y, h, &mut k, &mut stage, &mut next, options)?,
            Scheme::Rk4 => rk4_step(system, t, y, h, &mut k, &mut stage, &mut next)?.then_some(1.0),
        };
        match accepted {
            Some(err) if err <= 1.0 => {
                t = if h == t_end - t { t_end } else { t + h };
                y.copy_from_slice(&next);
                match options.scheme {
                    Scheme::Rk45 => f.copy_from_slice(&k[6]),
                    Scheme::Rk4 => system.rhs(t, y, &mut f)?,
                }
                stats.steps += 1;
                cap = stability_cap(y);
                if options.scheme == Scheme::Rk45 {
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    dt = (h * if last_rejected { grow.min(1.0) } else { grow }).min(options.dt_max);
                }
                last_rejected = false;
                stats.t = t;
                if observe(t, y, &f) == Control::Stop {
                    stats.stopped = true;
                    return Ok(stats);
                }
            }
            other => {
                stats.rejected += 1;
                last_rejected = true;
                dt = match other {
                    Some(err) if err.is_finite() => h * (0.9 * err.powf(-0.2)).clamp(0.2, 0.5),
                    _ => h * 0.5,
                };
                if dt < options.dt_min {
                    return Err(Error::Integrator {
                        t,
                        reason: format!("step size {dt:.3e} underflowed below {:.3e}", options.dt_min),
                    });
                }
            }
        }
    }
    Ok(stats)
}

/// One Dormand–Prince attempt; `None` when a stage leaves the domain.
#[allow(clippy::too_many_arguments)]
fn dopri_step<S: OdeSystem>(
    system: &S,
    t: f64,
    y: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    stage: &mut [f64],
    next: &mut [f64],
    options: &SolverOptions,
) -> Result<Option<f64>> {
    for s in 1..7 {
        for i in 0..y.len() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            stage[i] = y[i] + h * acc;
        }
        if !finite(stage) || !system.admissible(stage) {
            return Ok(None);
        }
        let (_, tail) = k.split_at_mut(s);
        system.rhs(t + C[s] * h, stage, &mut tail[0])?;
        if !finite(&tail[0]) {
            return Ok(None);
        }
    }
    // the seventh stage state is the fifth-order solution
    next.copy_from_slice(stage);
    let mut err: f64 = 0.0;
    for i in 0..y.len() {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            e += E[j] * kj[i];
        }
        let scale = options.atol + options.rtol * y[i].abs().max(next[i].abs());
        err = err.max((h * e).abs() / scale);
    }
    Ok(Some(err))
}

/// One classical RK4 step; `false` when a stage leaves the domain.
fn rk4_step<S: OdeSystem>(
    system: &S,
    t: f64,
    y: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    stage: &mut [f64],
    next: &mut [f64],
) -> Result<bool> {
    const NODES: [f64; 3] = [0.5, 0.5, 1.0];
    for s in 0..3 {
        for i in 0..y.len() {
            stage[i] = y[i] + NODES[s] * h * k[s][i];
        }
        if !finite(stage) || !system.admissible(stage) {
            return Ok(false);
        }
        let (_, tail) = k.split_at_mut(s + 1);
        system.rhs(t + NODES[s] * h, stage, &mut tail[0])?;
    }
    for i in 0..y.len() {
        next[i] = y[i] + h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
    Ok(finite(next) && system.admissible(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = -y[0];
            dy[1] = t.cos();
            Ok(())
        }
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let mut y = vec![1.0, 0.0];
        let stats = solve(&Decay, 0.0, &mut y, 3.0, &SolverOptions::default(), |_, _, _| Control::Continue).unwrap();
        assert_eq!(stats.t, 3.0);
        assert!((y[0] - (-3f64).exp()).abs() < 1e-8);
        assert!((y[1] - 3f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |dt: f64| {
            let mut y = vec![1.0, 0.0];
            let opts = SolverOptions { scheme: Scheme::Rk4, dt, ..Default::default() };
            solve(&Decay, 0.0, &mut y, 2.0, &opts, |_, _, _| Control::Continue).unwrap();
            (y[0] - (-2f64).exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    struct Negative;
    impl OdeSystem for Negative {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _: f64, _: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = 1.0;
            Ok(())
        }
        fn admissible(&self, y: &[f64]) -> bool {
            y[0] < 0.0
        }
    }

    #[test]
    fn leaving_the_domain_underflows() {
        let mut y = vec![-1.0];
        let err = solve(&Negative, 0.0, &mut y, 5.0, &SolverOptions::default(), |_, _, _| Control::Continue);
        assert!(matches!(err, Err(Error::Integrator { .. })));
        assert!(y[0] < 0.0);
    }

    #[test]
    fn observer_can_stop() {
        let mut y = vec![1.0, 0.0];
        let mut calls = 0;
        let stats = solve(&Decay, 0.0, &mut y, 10.0, &SolverOptions::default(), |_, _, _| {
            calls += 1;
            if calls == 3 { Control::Stop } else { Control::Continue }
        })
        .unwrap();
        assert!(stats.stopped);
        assert_eq!(stats.steps, 2);
    }
}
