//! Flow settings resolved from flags, an optional TOML file and defaults,
//! in that order of precedence.

use crate::angle::parse_angle;
use anyhow::{bail, Context, Result};
use clap::Args;
use cpflow::flow::Scheme;
use cpflow::{Background, FlowConfig};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Angle given in a config file as a number or a symbolic string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Text(String),
}

impl AngleValue {
    fn radians(&self) -> Result<f64> {
        match self {
            AngleValue::Radians(x) => Ok(*x),
            AngleValue::Text(s) => parse_angle(s).map_err(anyhow::Error::msg),
        }
    }
}

/// Every field optional; missing ones fall through to the defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub geometry: Option<Background>,
    pub theta_const: Option<AngleValue>,
    pub perturb: Option<f64>,
    pub seed: Option<u64>,
    pub init: Option<InitKind>,
    pub c_hat: Option<f64>,
    pub k_hat: Option<KHat>,
    pub free: Option<FreeSet>,
    pub integrator: Option<Scheme>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub tol_k: Option<f64>,
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    pub max_steps: Option<usize>,
    pub snapshot_stride: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `u = 0` (unit radii; Euclidean only).
    Zero,
    /// Constant hyperbolic metric with `K ≤ 0` from the normalized characters.
    Character,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KHat {
    Zero,
    /// Targets from the infinity marks; the marked vertices are removed first.
    FromInfinityMarks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FreeSet {
    /// Vertices with a complete star; the rim stays frozen.
    Interior,
    All,
}

#[derive(Clone, Debug, Default, Args)]
pub struct FlowArgs {
    /// TOML file with any of the flow settings below (flags win)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_background)]
    pub geometry: Option<Background>,
    /// Replace every edge weight, e.g. pi/2
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_const: Option<f64>,
    /// l² norm of Gaussian noise added to u(0) on the free vertices
    #[arg(long)]
    pub perturb: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub init: Option<InitKind>,
    /// Character margin for --init character
    #[arg(long)]
    pub c_hat: Option<f64>,
    #[arg(long, value_enum)]
    pub k_hat: Option<KHat>,
    #[arg(long, value_enum)]
    pub free: Option<FreeSet>,
    #[arg(long, value_parser = parse_scheme)]
    pub integrator: Option<Scheme>,
    /// Initial (rk45) or fixed (rk4) step
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Stop once max |K - K̂| over free vertices is below this
    #[arg(long)]
    pub tol_k: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
}

fn parse_background(s: &str) -> Result<Background, String> {
    s.parse().map_err(|e: cpflow::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: cpflow::Error| e.to_string())
}

/// Fully resolved settings, recorded verbatim in the run manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSettings {
    pub geometry: Background,
    pub theta_const: Option<f64>,
    pub perturb: f64,
    pub seed: u64,
    pub init: InitKind,
    pub c_hat: f64,
    pub k_hat: KHat,
    pub free: FreeSet,
    pub flow: FlowConfig,
}

impl FlowArgs {
    pub fn resolve(&self) -> Result<FlowSettings> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let geometry = self.geometry.or(file.geometry).unwrap_or(Background::Euclidean);
        let theta_const = match (self.theta_const, &file.theta_const) {
            (Some(t), _) => Some(t),
            (None, Some(a)) => Some(a.radians()?),
            (None, None) => None,
        };
        let default_init = match geometry {
            Background::Euclidean => InitKind::Zero,
            Background::Hyperbolic => InitKind::Character,
        };
        let defaults = FlowConfig { snapshot_stride: 100, ..FlowConfig::default() };
        let flow = FlowConfig {
            integrator: self.integrator.or(file.integrator).unwrap_or(defaults.integrator),
            dt_init: self.dt.or(file.dt).unwrap_or(defaults.dt_init),
            t_max: self.t_max.or(file.t_max).unwrap_or(defaults.t_max),
            tol_k: self.tol_k.or(file.tol_k).unwrap_or(defaults.tol_k),
            atol: self.atol.or(file.atol).unwrap_or(defaults.atol),
            rtol: self.rtol.or(file.rtol).unwrap_or(defaults.rtol),
            max_steps: self.max_steps.or(file.max_steps).unwrap_or(defaults.max_steps),
            snapshot_stride: self.snapshot_stride.or(file.snapshot_stride).unwrap_or(defaults.snapshot_stride),
            ..defaults
        };
        flow.validate()?;
        let settings = FlowSettings {
            geometry,
            theta_const,
            perturb: self.perturb.or(file.perturb).unwrap_or(0.0),
            seed: self.seed.or(file.seed).unwrap_or(0),
            init: self.init.or(file.init).unwrap_or(default_init),
            c_hat: self.c_hat.or(file.c_hat).unwrap_or(0.5),
            k_hat: self.k_hat.or(file.k_hat).unwrap_or(KHat::Zero),
            free: self.free.or(file.free).unwrap_or(FreeSet::Interior),
            flow,
        };
        if !(settings.perturb >= 0.0 && settings.perturb.is_finite()) {
            bail!("--perturb must be a finite non-negative l² norm");
        }
        if settings.init == InitKind::Zero && geometry == Background::Hyperbolic {
            bail!("--init zero is not a hyperbolic metric (u must be negative); use --init character");
        }
        if settings.init == InitKind::Character && geometry == Background::Euclidean {
            bail!("--init character builds a hyperbolic metric; use --geometry hyperbolic");
        }
        Ok(settings)
    }
}
