//! Hyperboloid model `{x : -x0² + x1² + x2² = -1, x0 > 0}` of the hyperbolic plane.

pub type Vec3 = [f64; 3];

pub const ORIGIN: Vec3 = [1.0, 0.0, 0.0];

/// Minkowski form `-a0 b0 + a1 b1 + a2 b2`.
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Minkowski-orthogonal to both inputs.
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    [-c[0], c[1], c[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Hyperbolic distance between two points.
pub fn distance(a: Vec3, b: Vec3) -> f64 {
    (-dot(a, b)).max(1.0).acosh()
}

/// Re-project onto the upper sheet to kill drift.
pub fn renormalize(p: Vec3) -> Vec3 {
    let x0 = (1.0 + p[1] * p[1] + p[2] * p[2]).sqrt();
    [x0, p[1], p[2]]
}

/// Unit tangent at `p` pointing toward `q`.
pub fn direction(p: Vec3, q: Vec3) -> Vec3 {
    let v = add(q, scale(p, dot(p, q)));
    let n = dot(v, v).max(0.0).sqrt();
    scale(v, 1.0 / n)
}

/// Point at distance `r` from `p` along unit tangent `d`.
pub fn exp(p: Vec3, d: Vec3, r: f64) -> Vec3 {
    renormalize(add(scale(p, r.cosh()), scale(d, r.sinh())))
}

/// Rotate unit tangent `d` at `p` counterclockwise by `angle`.
pub fn rotate(p: Vec3, d: Vec3, angle: f64) -> Vec3 {
    let e = cross(p, d);
    let (s, c) = angle.sin_cos();
    add(scale(d, c), scale(e, s))
}

/// Reflection of `x` across the geodesic through `a` and `b`.
pub fn reflect(x: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    let n = cross(a, b);
    let nn = dot(n, n);
    renormalize(add(x, scale(n, -2.0 * dot(x, n) / nn)))
}

/// Lorentz boost along the first spatial axis by signed distance `s`.
pub fn boost_x(p: Vec3, s: f64) -> Vec3 {
    let (sh, ch) = (s.sinh(), s.cosh());
    [ch * p[0] + sh * p[1], sh * p[0] + ch * p[1], p[2]]
}

/// Poincaré disk coordinates.
pub fn to_poincare(p: Vec3) -> [f64; 2] {
    [p[1] / (1.0 + p[0]), p[2] / (1.0 + p[0])]
}

/// Klein disk coordinates; geodesics are straight chords.
pub fn to_klein(p: Vec3) -> [f64; 2] {
    [p[1] / p[0], p[2] / p[0]]
}

pub fn from_poincare(z: [f64; 2]) -> Vec3 {
    let s = z[0] * z[0] + z[1] * z[1];
    let k = 1.0 / (1.0 - s);
    [(1.0 + s) * k, 2.0 * z[0] * k, 2.0 * z[1] * k]
}

/// Euclidean center and radius in the Poincaré disk of the hyperbolic circle
/// of radius `r` about `c`.
pub fn circle_to_poincare(c: Vec3, r: f64) -> ([f64; 2], f64) {
    let rho = c[0].max(1.0).acosh();
    let norm = (c[1] * c[1] + c[2] * c[2]).sqrt();
    let dir = if norm > 0.0 { [c[1] / norm, c[2] / norm] } else { [1.0, 0.0] };
    let near = ((rho - r) / 2.0).tanh();
    let far = ((rho + r) / 2.0).tanh();
    let mid = 0.5 * (near + far);
    ([dir[0] * mid, dir[1] * mid], 0.5 * (far - near))
}
