//! Two-circle configurations.
//!
//! Two circles of radii `r_i`, `r_j` centered at `v_i`, `v_j` meet at an
//! intersection point `v_f` with exterior intersection angle `Θ`, so the
//! triangle `(v_i, v_j, v_f)` has sides `r_i`, `r_j` at `v_f` enclosing the
//! angle `π - Θ`. `Θ = 0` is external tangency. The half-angle `θ_ij` is the
//! triangle angle at `v_i`.

pub mod hyperboloid;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Background geometry of a packing metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    Euclidean,
    Hyperbolic,
}

/// Radii above this go through log-space hyperbolic evaluation.
const LOG_SPACE_RADIUS: f64 = 30.0;

impl Background {
    /// `ln r` or `ln tanh(r/2)`.
    pub fn u_from_radius(self, r: f64) -> f64 {
        match self {
            Background::Euclidean => r.ln(),
            // ln(1 - 2t / (1 + t)) with t = e^{-r}; stays accurate where tanh rounds to 1
            Background::Hyperbolic => {
                let t = (-r).exp();
                (-2.0 * t / (1.0 + t)).ln_1p()
            }
        }
    }

    /// Inverse of [`Background::u_from_radius`]. Hyperbolic requires `u < 0`.
    pub fn radius_from_u(self, u: f64) -> f64 {
        match self {
            Background::Euclidean => u.exp(),
            // 2 artanh(e^u) = ln(1 + e^u) - ln(1 - e^u)
            Background::Hyperbolic => u.exp().ln_1p() - (-u.exp_m1()).ln(),
        }
    }

    /// Whether `u` lies in the coordinate domain.
    pub fn admits_u(self, u: f64) -> bool {
        match self {
            Background::Euclidean => u.is_finite(),
            Background::Hyperbolic => u.is_finite() && u < 0.0,
        }
    }

    /// `dr/du`: `r` (Euclidean) or `sinh r` (hyperbolic).
    pub fn radius_speed(self, r: f64) -> f64 {
        match self {
            Background::Euclidean => r,
            Background::Hyperbolic => r.sinh(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Background::Euclidean => "euclidean",
            Background::Hyperbolic => "hyperbolic",
        }
    }
}

impl std::str::FromStr for Background {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "e" => Ok(Background::Euclidean),
            "hyperbolic" | "h" => Ok(Background::Hyperbolic),
            other => Err(Error::Config(format!("unknown background '{other}'"))),
        }
    }
}

fn check_domain(r_i: f64, r_j: f64, theta: f64) -> Result<()> {
    if !(r_i > 0.0 && r_i.is_finite() && r_j > 0.0 && r_j.is_finite()) {
        return Err(Error::Domain(format!(
            "radii must be positive and finite, got ({r_i}, {r_j})"
        )));
    }
    check_weight(theta)
}

pub(crate) fn check_weight(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("intersection angle {theta} outside (0, π)")));
    }
    Ok(())
}

/// `ln sinh x` for `x > 0`, accurate for large and small `x`.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

/// `cosh l - 1` for the hyperbolic two-circle length, cancellation free.
fn hyperbolic_cosh_length_m1(r_i: f64, r_j: f64, theta: f64) -> f64 {
    let half_diff = ((r_i - r_j) / 2.0).sinh();
    let half_cos = (theta / 2.0).cos();
    2.0 * half_diff * half_diff + 2.0 * r_i.sinh() * r_j.sinh() * half_cos * half_cos
}

/// Edge length between the two centers.
pub fn edge_length(bg: Background, r_i: f64, r_j: f64, theta: f64) -> Result<f64> {
    check_domain(r_i, r_j, theta)?;
    Ok(edge_length_unchecked(bg, r_i, r_j, theta))
}

pub(crate) fn edge_length_unchecked(bg: Background, r_i: f64, r_j: f64, theta: f64) -> f64 {
    match bg {
        Background::Euclidean => {
            let c = (theta / 2.0).cos();
            ((r_i - r_j) * (r_i - r_j) + 4.0 * r_i * r_j * c * c).sqrt()
        }
        Background::Hyperbolic => {
            if r_i.max(r_j) <= LOG_SPACE_RADIUS {
                let x = hyperbolic_cosh_length_m1(r_i, r_j, theta);
                (x + (x * (x + 2.0)).sqrt()).ln_1p()
            } else {
                // cosh l = e^{r_i + r_j} / 4 * bracket
                let a = (-2.0 * r_i).exp();
                let b = (-2.0 * r_j).exp();
                let bracket = (1.0 + a) * (1.0 + b) + (1.0 - a) * (1.0 - b) * theta.cos();
                let ln_cosh = r_i + r_j - 2.0 * LN_2 + bracket.ln();
                ln_cosh + (1.0 + (1.0 - (-2.0 * ln_cosh).exp()).sqrt()).ln()
            }
        }
    }
}

/// Half-angle `θ_ij` at the center of circle `i`.
pub fn half_angle(bg: Background, r_i: f64, r_j: f64, theta: f64) -> Result<f64> {
    check_domain(r_i, r_j, theta)?;
    Ok(half_angle_unchecked(bg, r_i, r_j, theta))
}

pub(crate) fn half_angle_unchecked(bg: Background, r_i: f64, r_j: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match bg {
        // law of tangents: exact Θ/2 on the diagonal
        Background::Euclidean => theta / 2.0 + ((r_j - r_i) / (r_j + r_i) * (theta / 2.0).tan()).atan(),
        Background::Hyperbolic => {
            if r_i.max(r_j) <= LOG_SPACE_RADIUS {
                (s * r_j.sinh()).atan2(r_i.sinh() * r_j.cosh() + r_i.cosh() * r_j.sinh() * c)
            } else {
                // divide both arguments by e^{r_j}; sinh x = e^x S(x), cosh x = e^x C(x)
                let ei = (-2.0 * r_i).exp();
                let ej = (-2.0 * r_j).exp();
                let (si, ci) = ((1.0 - ei) / 2.0, (1.0 + ei) / 2.0);
                let (sj, cj) = ((1.0 - ej) / 2.0, (1.0 + ej) / 2.0);
                (s * sj).atan2(r_i.exp() * (si * cj + ci * sj * c))
            }
        }
    }
}

/// `(∂θ_ij/∂u_i, ∂θ_ij/∂u_j)`.
pub fn d_theta_d_u(bg: Background, r_i: f64, r_j: f64, theta: f64) -> Result<(f64, f64)> {
    check_domain(r_i, r_j, theta)?;
    Ok(d_theta_d_u_unchecked(bg, r_i, r_j, theta))
}

pub(crate) fn d_theta_d_u_unchecked(bg: Background, r_i: f64, r_j: f64, theta: f64) -> (f64, f64) {
    let l = edge_length_unchecked(bg, r_i, r_j, theta);
    match bg {
        Background::Euclidean => {
            // altitude from v_f over the edge length: d/l = r_i r_j sinΘ / l²
            let cross = r_i * r_j * theta.sin() / (l * l);
            (-cross, cross)
        }
        Background::Hyperbolic => {
            // sinh d / sinh l with sinh d = sinh r_i sinh r_j sinΘ / sinh l;
            // the own derivative is -cosh l times the cross one
            let log_cross = ln_sinh(r_i) + ln_sinh(r_j) - 2.0 * ln_sinh(l);
            let ln_cosh = l + (-2.0 * l).exp().ln_1p() - LN_2;
            let s = theta.sin();
            (-s * (log_cross + ln_cosh).exp(), s * log_cross.exp())
        }
    }
}

/// Derived geometry of one weighted edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCircle {
    pub background: Background,
    pub r_i: f64,
    pub r_j: f64,
    pub theta_big: f64,
    pub length: f64,
    pub theta_i: f64,
    pub theta_j: f64,
    /// Distance from `v_f` to the line of centers (altitude).
    pub altitude: f64,
}

impl TwoCircle {
    pub fn new(bg: Background, r_i: f64, r_j: f64, theta_big: f64) -> Result<Self> {
        check_domain(r_i, r_j, theta_big)?;
        let length = edge_length_unchecked(bg, r_i, r_j, theta_big);
        let theta_i = half_angle_unchecked(bg, r_i, r_j, theta_big);
        let theta_j = half_angle_unchecked(bg, r_j, r_i, theta_big);
        let altitude = match bg {
            Background::Euclidean => r_i * theta_i.sin(),
            Background::Hyperbolic => (r_i.sinh() * theta_i.sin()).asinh(),
        };
        Ok(TwoCircle {
            background: bg,
            r_i,
            r_j,
            theta_big,
            length,
            theta_i,
            theta_j,
            altitude,
        })
    }

    /// `(∂θ_ij/∂u_i, ∂θ_ij/∂u_j)`.
    pub fn derivatives(&self) -> (f64, f64) {
        d_theta_d_u_unchecked(self.background, self.r_i, self.r_j, self.theta_big)
    }
}

/// Closed form of the hyperbolic half-angle on the diagonal `r_i = r_j = t`.
///
/// `sin²θ = sin²Θ / (2(1+cosΘ) + (1+cosΘ)² sinh² t)`; the Euclidean value is `Θ/2`.
pub fn diagonal_half_angle(bg: Background, t: f64, theta: f64) -> Result<f64> {
    check_domain(t, t, theta)?;
    Ok(match bg {
        Background::Euclidean => theta / 2.0,
        Background::Hyperbolic => diagonal_sin_sq(t, theta).sqrt().asin(),
    })
}

/// `sin²θ(t,t)` in the hyperbolic background.
pub fn diagonal_sin_sq(t: f64, theta: f64) -> f64 {
    let one_c = 1.0 + theta.cos();
    let sh = t.sinh();
    let s = theta.sin();
    s * s / (2.0 * one_c + one_c * one_c * sh * sh)
}

/// Largest diagonal radius `t` with `θ(t,t) ≥ target` (hyperbolic), by bisection.
///
/// `θ(t,t)` decreases strictly from `Θ/2` to `0`, so the answer is the root of
/// `θ(t,t) = target`. Returns the lower bracket, which satisfies the inequality.
/// A non-positive target is met everywhere and yields `cap`.
pub fn diagonal_radius_for_angle(theta: f64, target: f64, cap: f64, steps: usize) -> Result<f64> {
    check_weight(theta)?;
    if target >= theta / 2.0 {
        return Err(Error::Domain(format!(
            "diagonal half-angle never reaches {target} ≥ Θ/2 = {}",
            theta / 2.0
        )));
    }
    let angle = |t: f64| diagonal_sin_sq(t, theta).sqrt().asin();
    if target <= 0.0 || angle(cap) >= target {
        return Ok(cap);
    }
    let (mut lo, mut hi) = (0.0_f64, cap);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if angle(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Supremum over `r_j > 0` of the hyperbolic half-angle at fixed `r_i`.
///
/// `θ_ij` increases in `r_j`; the limit `r_j → ∞` is `atan2(sinΘ, sinh r_i + cosh r_i cosΘ)`.
pub fn half_angle_supremum(r_i: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    if r_i <= LOG_SPACE_RADIUS {
        s.atan2(r_i.sinh() + r_i.cosh() * c)
    } else {
        let e = (-2.0 * r_i).exp();
        let scale = r_i.exp() / 2.0;
        s.atan2(scale * ((1.0 - e) + (1.0 + e) * c))
    }
}

/// Radius `L` with `θ_ij < ε` for every `r_i > L` and every `r_j > 0` (hyperbolic).
pub fn theta_upper_bound_radius(epsilon: f64, theta: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < FRAC_PI_2) {
        return Err(Error::Domain(format!("ε = {epsilon} outside (0, π/2)")));
    }
    check_weight(theta)?;
    // the supremum at r_i → 0 is Θ itself
    if half_angle_supremum(0.0, theta) <= epsilon {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while half_angle_supremum(hi, theta) > epsilon {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Domain(format!("no finite radius bounds θ by {epsilon}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if half_angle_supremum(mid, theta) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
