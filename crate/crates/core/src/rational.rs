//! Exact phase exponents.
//!
//! Phases are kept as rationals `r` standing for the unit complex number
//! `exp(2πi r)`. Only the fractional part matters, so most values are stored
//! reduced into `[0, 1)`.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Rational = Ratio<i64>;

/// Reduces `r` into `[0, 1)`.
pub fn mod_one(r: Rational) -> Rational {
    r - r.floor()
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

/// Formats as `p/q`, including `0/1` and `1/1`.
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer.
pub fn parse_pq(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => text.parse::<i64>().ok().map(Rational::from_integer),
    }
}

/// `exp(2πi r)`. Multiples of 1/4 come out exact.
pub fn unit_phase(r: Rational) -> Complex64 {
    let r = mod_one(r);
    let quarter = (r * 4).floor();
    let rem = r - quarter / 4;
    let (s, c) = if rem.is_zero() {
        (0.0, 1.0)
    } else {
        let angle = std::f64::consts::TAU * (*rem.numer() as f64) / (*rem.denom() as f64);
        angle.sin_cos()
    };
    match quarter.to_integer() {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `exp(2πi t)` for a real `t`, reducing the argument first to keep the
/// angle small.
pub fn unit_phase_f64(t: f64) -> Complex64 {
    let f = t - t.floor();
    let (s, c) = (std::f64::consts::TAU * f).sin_cos();
    Complex64::new(c, s)
}

pub(crate) fn one() -> Rational {
    Rational::one()
}

pub(crate) fn zero() -> Rational {
    Rational::zero()
}
