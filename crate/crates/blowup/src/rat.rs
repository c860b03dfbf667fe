//! Exact rational arithmetic used for densities, regularity thresholds and the
//! parameter cascade. Comparisons against integer counts go through
//! cross-multiplication, so no floating point is involved in any decision.

use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// The rational type of the crate. `i128` components keep products of the form
/// `count * a^2 * b^2` exact for instances up to a few thousand vertices.
pub type Rat = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.25"` into an
/// exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Usage(format!("cannot parse rational from {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Usage(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let int: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let frac: i128 = frac.parse().map_err(|_| bad())?;
        return Ok(Rat::new(int * scale + sign * frac, scale));
    }
    let p: i128 = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(p))
}

/// Canonical `"p/q"` rendering (integers render without the denominator).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `ceil(r * n)` as a usize; negative values clamp to 0.
pub fn ceil_mul(r: &Rat, n: usize) -> usize {
    let v = r * Rat::from_integer(n as i128);
    let c = v.ceil();
    if c.numer().is_negative() {
        0
    } else {
        c.to_integer() as usize
    }
}

/// `floor(r * n)` as a usize; negative values clamp to 0.
pub fn floor_mul(r: &Rat, n: usize) -> usize {
    let v = r * Rat::from_integer(n as i128);
    let f = v.floor();
    if f.numer().is_negative() {
        0
    } else {
        f.to_integer() as usize
    }
}

/// Exact test of `count >= r * n` by cross-multiplication.
pub fn count_ge_mul(count: usize, r: &Rat, n: usize) -> bool {
    (count as i128) * r.denom() >= r.numer() * (n as i128)
}

/// Exact test of `count <= r * n`.
pub fn count_le_mul(count: usize, r: &Rat, n: usize) -> bool {
    (count as i128) * r.denom() <= r.numer() * (n as i128)
}

/// Exact test of `count < r * n`.
pub fn count_lt_mul(count: usize, r: &Rat, n: usize) -> bool {
    (count as i128) * r.denom() < r.numer() * (n as i128)
}

/// Serde adapter storing rationals as `"p/q"` strings, which keeps files
/// bit-exact across round trips.
pub mod rat_serde {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Wrapper making a `Rat` display as `p/q`.
pub struct DisplayRat<'a>(pub &'a Rat);

impl fmt::Display for DisplayRat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rat(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn round_trip_format() {
        for s in ["1/2", "7/3", "0", "5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn integer_multiples() {
        assert_eq!(ceil_mul(&rat(1, 8), 200), 25);
        assert_eq!(ceil_mul(&rat(1, 8), 5), 1);
        assert_eq!(floor_mul(&rat(3, 32), 400), 37);
        assert!(count_ge_mul(100, &rat(1, 2), 200));
        assert!(!count_ge_mul(99, &rat(1, 2), 200));
        assert!(count_lt_mul(2, &rat(9, 100), 25));
    }
}
