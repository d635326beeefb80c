//! Difference calculus on the square lattice.
//!
//! A [`LatticeField`] is dense on an explicit box and exactly zero outside it,
//! so every operator below is exact on finitely supported data: outputs grow
//! their box by one cell per difference.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    m0: i64,
    n0: i64,
    width: usize,
    height: usize,
    data: Vec<f64>,
}

/// The four basic differences: `D1` east, `D2` north, `D3` west, `D4` south,
/// each `u(neighbor) - u(here)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    D1,
    D2,
    D3,
    D4,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::D1, Direction::D2, Direction::D3, Direction::D4];

    pub fn offset(self) -> (i64, i64) {
        match self {
            Direction::D1 => (1, 0),
            Direction::D2 => (0, 1),
            Direction::D3 => (-1, 0),
            Direction::D4 => (0, -1),
        }
    }
}

impl LatticeField {
    /// Zero field on `[m0, m1] × [n0, n1]`.
    pub fn zeros(m0: i64, m1: i64, n0: i64, n1: i64) -> Self {
        assert!(m0 <= m1 && n0 <= n1, "empty box");
        let width = (m1 - m0 + 1) as usize;
        let height = (n1 - n0 + 1) as usize;
        LatticeField { m0, n0, width, height, data: vec![0.0; width * height] }
    }

    pub fn from_fn(m0: i64, m1: i64, n0: i64, n1: i64, f: impl Fn(i64, i64) -> f64) -> Self {
        let mut field = LatticeField::zeros(m0, m1, n0, n1);
        for n in n0..=n1 {
            for m in m0..=m1 {
                let k = field.index(m, n).unwrap();
                field.data[k] = f(m, n);
            }
        }
        field
    }

    /// Unit mass at the origin.
    pub fn delta() -> Self {
        LatticeField::from_fn(0, 0, 0, 0, |_, _| 1.0)
    }

    /// Values at integer coordinates; unlisted points are zero.
    pub fn from_coords(coords: &[[i64; 2]], values: &[f64]) -> Result<Self> {
        if coords.len() != values.len() || coords.is_empty() {
            return Err(Error::Precondition("need one value per coordinate".into()));
        }
        let m0 = coords.iter().map(|c| c[0]).min().unwrap();
        let m1 = coords.iter().map(|c| c[0]).max().unwrap();
        let n0 = coords.iter().map(|c| c[1]).min().unwrap();
        let n1 = coords.iter().map(|c| c[1]).max().unwrap();
        let mut field = LatticeField::zeros(m0, m1, n0, n1);
        for (c, &x) in coords.iter().zip(values) {
            field.set(c[0], c[1], x)?;
        }
        Ok(field)
    }

    /// `(m0, m1, n0, n1)`.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        (self.m0, self.m0 + self.width as i64 - 1, self.n0, self.n0 + self.height as i64 - 1)
    }

    fn index(&self, m: i64, n: i64) -> Option<usize> {
        let (dm, dn) = (m - self.m0, n - self.n0);
        if dm < 0 || dn < 0 || dm >= self.width as i64 || dn >= self.height as i64 {
            return None;
        }
        Some(dn as usize * self.width + dm as usize)
    }

    pub fn get(&self, m: i64, n: i64) -> f64 {
        self.index(m, n).map_or(0.0, |k| self.data[k])
    }

    pub fn set(&mut self, m: i64, n: i64, value: f64) -> Result<()> {
        let k = self
            .index(m, n)
            .ok_or_else(|| Error::Lookup(format!("({m}, {n}) outside the support box")))?;
        self.data[k] = value;
        Ok(())
    }

    pub fn sample(&self, coords: &[[i64; 2]]) -> Vec<f64> {
        coords.iter().map(|c| self.get(c[0], c[1])).collect()
    }

    /// `(m, n, value)` over the box.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.data.iter().enumerate().map(move |(k, &x)| {
            (self.m0 + (k % self.width) as i64, self.n0 + (k / self.width) as i64, x)
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Same values on a box enlarged by `k` in every direction.
    pub fn grown(&self, k: i64) -> Self {
        let (m0, m1, n0, n1) = self.bounds();
        LatticeField::from_fn(m0 - k, m1 + k, n0 - k, n1 + k, |m, n| self.get(m, n))
    }

    fn union_box(&self, other: &LatticeField) -> (i64, i64, i64, i64) {
        let (a0, a1, b0, b1) = self.bounds();
        let (c0, c1, d0, d1) = other.bounds();
        (a0.min(c0), a1.max(c1), b0.min(d0), b1.max(d1))
    }

    pub fn add(&self, other: &LatticeField) -> Self {
        let (m0, m1, n0, n1) = self.union_box(other);
        LatticeField::from_fn(m0, m1, n0, n1, |m, n| self.get(m, n) + other.get(m, n))
    }

    pub fn sub(&self, other: &LatticeField) -> Self {
        let (m0, m1, n0, n1) = self.union_box(other);
        LatticeField::from_fn(m0, m1, n0, n1, |m, n| self.get(m, n) - other.get(m, n))
    }

    pub fn scale(&self, s: f64) -> Self {
        LatticeField { data: self.data.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    /// `l^p` norm; `p = f64::INFINITY` gives the sup norm.
    pub fn norm(&self, p: f64) -> f64 {
        lp(self.data.iter().copied(), p)
    }

    /// `(f, g) = Σ f g`.
    pub fn inner(&self, other: &LatticeField) -> f64 {
        self.iter().map(|(m, n, x)| x * other.get(m, n)).sum()
    }

    /// `Σ_edges (f_i - f_j)(g_i - g_j)` by direct enumeration of east and north edges.
    pub fn edge_sum(&self, other: &LatticeField) -> f64 {
        let (m0, m1, n0, n1) = self.union_box(other);
        let mut total = 0.0;
        for n in n0 - 1..=n1 {
            for m in m0 - 1..=m1 {
                for (dm, dn) in [(1, 0), (0, 1)] {
                    let df = self.get(m + dm, n + dn) - self.get(m, n);
                    let dg = other.get(m + dm, n + dn) - other.get(m, n);
                    total += df * dg;
                }
            }
        }
        total
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, x| m.max(x.abs()))
    } else {
        values.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `D u (m, n) = u(neighbor) - u(m, n)`.
pub fn difference(field: &LatticeField, which: Direction) -> LatticeField {
    let (dm, dn) = which.offset();
    let (m0, m1, n0, n1) = field.bounds();
    LatticeField::from_fn(m0 - 1, m1 + 1, n0 - 1, n1 + 1, |m, n| field.get(m + dm, n + dn) - field.get(m, n))
}

/// `Δ = D1 + D2 + D3 + D4`.
pub fn laplacian(field: &LatticeField) -> LatticeField {
    let (m0, m1, n0, n1) = field.bounds();
    LatticeField::from_fn(m0 - 1, m1 + 1, n0 - 1, n1 + 1, |m, n| {
        field.get(m + 1, n) + field.get(m - 1, n) + field.get(m, n + 1) + field.get(m, n - 1)
            - 4.0 * field.get(m, n)
    })
}

/// Zeroth, first and second order seminorms for one exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
}

/// `N0 = ‖u‖_p`, `N1 = (Σ_i ‖D_i u‖_p^p)^{1/p}`, `N2 = (Σ_{i,j} ‖D_i D_j u‖_p^p)^{1/p}`;
/// for `p = ∞` the outer sums become maxima.
pub fn norms(field: &LatticeField, p: f64) -> Norms {
    let first: Vec<LatticeField> = Direction::ALL.iter().map(|&d| difference(field, d)).collect();
    let n1 = lp(first.iter().map(|f| f.norm(p)), p);
    let n2 = lp(
        first.iter().flat_map(|f| Direction::ALL.iter().map(move |&d| difference(f, d).norm(p))),
        p,
    );
    Norms { n0: field.norm(p), n1, n2 }
}

/// Residuals of the discrete Green identities on `(f, g)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenResiduals {
    /// `N1,2²(f) - 2 Σ_edges (f_i - f_j)²`.
    pub energy: f64,
    /// `(f, Δg) + Σ_edges (f_i - f_j)(g_i - g_j)`.
    pub green: f64,
    /// `(f, Δf) + N1,2²(f) / 2`.
    pub dirichlet: f64,
    /// `N0,2(Δf) - N2,2(f) / 2`.
    pub second_order: f64,
    /// Magnitude of the terms involved, for relative comparison.
    pub scale: f64,
}

impl GreenResiduals {
    pub fn max_abs(&self) -> f64 {
        self.energy.abs().max(self.green.abs()).max(self.dirichlet.abs()).max(self.second_order.abs())
    }
}

pub fn green_identities_check(f: &LatticeField, g: &LatticeField) -> GreenResiduals {
    let nf = norms(f, 2.0);
    let edge_ff = f.edge_sum(f);
    let edge_fg = f.edge_sum(g);
    let f_lap_g = f.inner(&laplacian(g));
    let f_lap_f = f.inner(&laplacian(f));
    let lap_norm = laplacian(f).norm(2.0);
    GreenResiduals {
        energy: nf.n1 * nf.n1 - 2.0 * edge_ff,
        green: f_lap_g + edge_fg,
        dirichlet: f_lap_f + 0.5 * nf.n1 * nf.n1,
        second_order: lap_norm - 0.5 * nf.n2,
        scale: 1.0f64.max(nf.n1 * nf.n1).max(edge_fg.abs()).max(nf.n2),
    }
}

/// `F(x) = 2 arctan(eˣ) - x - π/2`, evaluated as `arctan(sinh x) - x`.
pub fn nonlinearity_f(x: f64) -> f64 {
    x.sinh().atan() - x
}

/// Reference form of [`nonlinearity_f`] straight from its definition.
pub fn nonlinearity_f_direct(x: f64) -> f64 {
    2.0 * x.exp().atan() - x - FRAC_PI_2
}

/// `F'(x) = sech x - 1 = -2 sinh²(x/2) / cosh x`.
pub fn nonlinearity_f_prime(x: f64) -> f64 {
    let s = (x / 2.0).sinh();
    -2.0 * s * s / x.cosh()
}

/// Smallest `C` with `|F(x)| ≤ C x²` and `|F'(x)| ≤ C |x|` on `samples`
/// equally spaced points of `0 < |x| ≤ delta0`.
pub fn fit_nonlinearity_constant(delta0: f64, samples: usize) -> f64 {
    (1..=samples)
        .map(|k| delta0 * k as f64 / samples as f64)
        .flat_map(|x| [x, -x])
        .map(|x| (nonlinearity_f(x).abs() / (x * x)).max(nonlinearity_f_prime(x).abs() / x.abs()))
        .fold(0.0, f64::max)
}

/// `Δu + F̃(u)` with `F̃_i = Σ_{j~i} F(u_j - u_i)`; points outside the box are zeros.
pub fn semilinear_rhs(field: &LatticeField) -> LatticeField {
    let (m0, m1, n0, n1) = field.bounds();
    LatticeField::from_fn(m0 - 1, m1 + 1, n0 - 1, n1 + 1, |m, n| {
        let here = field.get(m, n);
        Direction::ALL
            .iter()
            .map(|d| {
                let (dm, dn) = d.offset();
                let x = field.get(m + dm, n + dn) - here;
                x + nonlinearity_f(x)
            })
            .sum()
    })
}

/// Homogeneous heat flow `du/dt = Δu` on a fixed box with zero exterior,
/// by classical RK4 with step `dt`. The box does not grow; keep it padded.
pub fn heat_flow_box(field: &LatticeField, dt: f64, steps: usize, mut observe: impl FnMut(f64, &LatticeField)) -> LatticeField {
    let (m0, m1, n0, n1) = field.bounds();
    let clip = |f: &LatticeField| LatticeField::from_fn(m0, m1, n0, n1, |m, n| f.get(m, n));
    let rhs = |f: &LatticeField| clip(&laplacian(f));
    let mut u = field.clone();
    observe(0.0, &u);
    for k in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&u.add(&k1.scale(dt / 2.0)));
        let k3 = rhs(&u.add(&k2.scale(dt / 2.0)));
        let k4 = rhs(&u.add(&k3.scale(dt)));
        let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(dt / 6.0);
        u = clip(&u.add(&incr));
        observe((k + 1) as f64 * dt, &u);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_differences() {
        let d1 = difference(&LatticeField::delta(), Direction::D1);
        assert_eq!(d1.get(0, 0), -1.0);
        assert_eq!(d1.get(-1, 0), 1.0);
        assert_eq!(d1.iter().filter(|t| t.2 != 0.0).count(), 2);
    }

    #[test]
    fn delta_laplacian_and_norms() {
        let delta = LatticeField::delta();
        let lap = laplacian(&delta);
        assert_eq!(lap.get(0, 0), -4.0);
        for (m, n) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            assert_eq!(lap.get(m, n), 1.0);
        }
        let nm = norms(&delta, 2.0);
        assert_eq!(nm.n0, 1.0);
        assert!((nm.n1 * nm.n1 - 8.0).abs() < 1e-14);
        assert!((nm.n2 * nm.n2 - 80.0).abs() < 1e-12);
        assert_eq!(delta.inner(&lap), -4.0);
    }

    #[test]
    fn constant_and_linear_fields_are_harmonic_inside() {
        let c = LatticeField::from_fn(-3, 3, -3, 3, |_, _| 2.5);
        let lin = LatticeField::from_fn(-3, 3, -3, 3, |m, _| m as f64);
        for m in -2..=2 {
            for n in -2..=2 {
                assert_eq!(difference(&c, Direction::D3).get(m, n), 0.0);
                assert_eq!(laplacian(&lin).get(m, n), 0.0);
            }
        }
    }

    #[test]
    fn zero_field_norms() {
        let z = LatticeField::zeros(-2, 2, -1, 1);
        let nm = norms(&z, 1.0);
        assert_eq!((nm.n0, nm.n1, nm.n2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn nonlinearity_basics() {
        assert_eq!(nonlinearity_f(0.0), 0.0);
        assert_eq!(nonlinearity_f_prime(0.0), 0.0);
        for k in 1..100 {
            let x = k as f64 * 0.05;
            assert_eq!(nonlinearity_f(-x), -nonlinearity_f(x));
            assert!((nonlinearity_f(x) - nonlinearity_f_direct(x)).abs() < 1e-14);
        }
        let c0 = fit_nonlinearity_constant(0.5, 1000);
        assert!(c0 > 0.0 && c0 < 0.3);
    }

    #[test]
    fn coordinate_roundtrip() {
        let coords = [[0, 0], [1, 0], [-2, 3]];
        let f = LatticeField::from_coords(&coords, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.sample(&coords), vec![1.0, 2.0, 3.0]);
        assert_eq!(f.get(5, 5), 0.0);
    }
}
