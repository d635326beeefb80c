//! Angles in radians, with symbolic multiples of π.

use std::f64::consts::PI;

/// Parse `1.5708`, `pi`, `pi/2`, `2pi/3`, `2*pi/3`, `-pi/4` or `0.5pi`.
///
/// Symbolic forms are evaluated as `c · π / d` in double-double arithmetic
/// and rounded once, so `pi/3` is the correctly rounded `FRAC_PI_3`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let bad = || format!("'{text}' is not an angle (radians, or a multiple of pi such as 2pi/3)");
    let Some(at) = s.find("pi").or_else(|| s.find('π')) else {
        return s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    };
    let marker = if s[at..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
    let (head, tail) = (&s[..at], &s[at + marker..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?,
    };
    if den == 0.0 || !coef.is_finite() || !den.is_finite() {
        return Err(bad());
    }
    Ok(pi_fraction(coef, den))
}

/// Low part of π beyond `f64::consts::PI`.
const PI_LO: f64 = 1.2246467991473532e-16;

/// `c · π / d` with a single final rounding in all but pathological cases.
fn pi_fraction(c: f64, d: f64) -> f64 {
    let hi = c * PI;
    let lo = c.mul_add(PI, -hi) + c * PI_LO;
    let q = hi / d;
    let rem = (-q).mul_add(d, hi) + lo;
    q + rem / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn symbolic_forms() {
        assert_eq!(parse_angle("pi/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle("-pi/4").unwrap(), -FRAC_PI_4);
        assert_eq!(parse_angle("pi/3").unwrap(), FRAC_PI_3);
        assert_eq!(parse_angle("pi/6").unwrap(), FRAC_PI_6);
        assert_eq!(parse_angle("2pi/3").unwrap(), parse_angle("2*pi/3").unwrap());
        assert!((parse_angle("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() <= 4.0 * f64::EPSILON);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("π/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
    }

    #[test]
    fn malformed_angles() {
        for s in ["", "pi/", "pi/0", "xpi", "pi2", "abc", "nan", "inf"] {
            assert!(parse_angle(s).is_err(), "{s}");
        }
    }
}
