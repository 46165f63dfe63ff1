use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;

/// A spider phase: an exact rational multiple of π, or radians.
#[derive(Clone, Copy, Debug)]
pub enum Angle {
    /// `(num/den)·π`, reduced, `0 ≤ num < 2·den`.
    ExactPi { num: i64, den: i64 },
    Real(f64),
}

const REAL_TOL: f64 = 1e-12;

impl Angle {
    pub fn pi_frac(num: i64, den: i64) -> Angle {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Angle::ExactPi { num: num.rem_euclid(2 * den), den }
    }

    pub fn zero() -> Angle {
        Angle::pi_frac(0, 1)
    }

    pub fn pi() -> Angle {
        Angle::pi_frac(1, 1)
    }

    /// Radians, reduced to `[0, 2π)`. Panics on non-finite input.
    pub fn real(r: f64) -> Angle {
        assert!(r.is_finite(), "angle must be finite");
        let v = r.rem_euclid(2.0 * PI);
        Angle::Real(if v >= 2.0 * PI { 0.0 } else { v })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::ExactPi { .. })
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Angle::ExactPi { num, .. } => num == 0,
            Angle::Real(r) => r.abs() < REAL_TOL || (2.0 * PI - r).abs() < REAL_TOL,
        }
    }

    pub fn is_pi(&self) -> bool {
        match *self {
            Angle::ExactPi { num, den } => num == den,
            Angle::Real(r) => (r - PI).abs() < REAL_TOL,
        }
    }

    /// Denominator of the exact fraction of π.
    pub fn denominator(&self) -> Option<i64> {
        match *self {
            Angle::ExactPi { den, .. } => Some(den),
            Angle::Real(_) => None,
        }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::ExactPi { num, den } => num as f64 * PI / den as f64,
            Angle::Real(r) => r,
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (*self, *other) {
            (Angle::ExactPi { num: a, den: b }, Angle::ExactPi { num: c, den: d }) => {
                let l = b.lcm(&d);
                Angle::pi_frac(a * (l / b) + c * (l / d), l)
            }
            _ => Angle::real(self.radians() + other.radians()),
        }
    }

    pub fn neg(&self) -> Angle {
        match *self {
            Angle::ExactPi { num, den } => Angle::pi_frac(-num, den),
            Angle::Real(r) => Angle::real(-r),
        }
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Angle {
        match *self {
            Angle::ExactPi { num, den } => Angle::pi_frac(((num as i128 * k as i128) % (2 * den as i128)) as i64, den),
            Angle::Real(r) => Angle::real(r * k as f64),
        }
    }

    /// Exponent `e` with `e^{iθ} = ζ_order^e`, when the angle lives at that order.
    pub fn root_exponent(&self, order: u64) -> Option<i64> {
        match *self {
            Angle::ExactPi { num, den } => {
                let n = num as i128 * order as i128;
                let d = 2 * den as i128;
                (n % d == 0).then(|| (n / d) as i64)
            }
            Angle::Real(_) => None,
        }
    }

    /// Equality modulo 2π, with a small tolerance when either side is real.
    pub fn approx_eq(&self, other: &Angle) -> bool {
        match (self, other) {
            (Angle::ExactPi { .. }, Angle::ExactPi { .. }) => self == other,
            _ => {
                let d = (self.radians() - other.radians()).rem_euclid(2.0 * PI);
                d < 1e-9 || 2.0 * PI - d < 1e-9
            }
        }
    }

    /// Fraction string used by the JSON format: `"num/den"`.
    pub fn fraction_string(&self) -> Option<String> {
        match *self {
            Angle::ExactPi { num, den } => Some(format!("{num}/{den}")),
            Angle::Real(_) => None,
        }
    }

    pub fn parse_fraction(s: &str) -> Result<Angle, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: i64 = n.parse().map_err(|_| format!("bad phase numerator `{n}`"))?;
        let den: i64 = d.parse().map_err(|_| format!("bad phase denominator `{d}`"))?;
        if den == 0 {
            return Err("phase denominator is zero".into());
        }
        Ok(Angle::pi_frac(num, den))
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Angle) -> bool {
        match (self, other) {
            (Angle::ExactPi { num: a, den: b }, Angle::ExactPi { num: c, den: d }) => a == c && b == d,
            (Angle::Real(a), Angle::Real(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::ExactPi { num: 0, .. } => write!(f, "0"),
            Angle::ExactPi { num, den: 1 } => write!(f, "{num}π"),
            Angle::ExactPi { num, den } => write!(f, "{num}π/{den}"),
            Angle::Real(r) => write!(f, "{r}rad"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(Angle::pi_frac(-1, 4), Angle::pi_frac(7, 4));
        assert_eq!(Angle::pi_frac(2, 8), Angle::pi_frac(1, 4));
        assert_eq!(Angle::pi_frac(9, 4), Angle::pi_frac(1, 4));
        assert_eq!(Angle::pi_frac(3, -6), Angle::pi_frac(3, 2));
        assert!(Angle::pi_frac(4, 2).is_zero());
        let r = Angle::real(-0.5);
        assert!((r.radians() - (2.0 * PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn arithmetic() {
        let q = Angle::pi_frac(1, 4);
        assert_eq!(q.add(&Angle::pi_frac(1, 3)), Angle::pi_frac(7, 12));
        assert_eq!(q.neg(), Angle::pi_frac(7, 4));
        assert_eq!(Angle::pi_frac(1, 12).scale(9), Angle::pi_frac(3, 4));
        assert!(q.add(&Angle::real(0.1)).approx_eq(&Angle::real(PI / 4.0 + 0.1)));
    }

    #[test]
    fn root_exponents() {
        assert_eq!(Angle::pi_frac(1, 4).root_exponent(8), Some(1));
        assert_eq!(Angle::pi_frac(1, 3).root_exponent(24), Some(4));
        assert_eq!(Angle::pi_frac(1, 3).root_exponent(8), None);
        assert_eq!(Angle::real(1.0).root_exponent(8), None);
    }

    #[test]
    fn parsing() {
        assert_eq!(Angle::parse_fraction("1/4").unwrap(), Angle::pi_frac(1, 4));
        assert_eq!(Angle::parse_fraction("1").unwrap(), Angle::pi());
        assert!(Angle::parse_fraction("1/0").is_err());
        assert!(Angle::parse_fraction("x").is_err());
    }
}
