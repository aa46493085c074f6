//! Exact rational arithmetic.
//!
//! All combinatorial modules compare function values exactly; a strict
//! inequality `f(u) > f(v)` must never be blurred by rounding. Values are
//! `Ratio<i128>`, plenty for the integer-scale constructions in this crate
//! (witnesses, eighth-step noise, margin normalizations).
//!
//! In files, rationals are the strings `"p/q"` (or `"p"` for integers).

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = Ratio<i128>;

/// Shorthand constructor, `rat(p, q) = p/q`.
pub fn rat(p: i128, q: i128) -> Rat {
    Ratio::new(p, q)
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i128 = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let q: i128 = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if q == 0 {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Ratio::new(p, q))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest multiple of `2^-60`, rounding half away from zero.
///
/// Monotone (`x <= y` implies `to_rat(x) <= to_rat(y)`), so it can hide a
/// strict inequality between nearly equal floats but never invent one. Used
/// where float-mode data has to cross into the exact modules.
pub fn rat_from_f64_rounded(x: f64) -> Result<Rat> {
    const SHIFT: i32 = 60;
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    let scaled = x * (2f64.powi(SHIFT));
    if scaled.abs() >= 2f64.powi(120) {
        return Err(Error::Parse(format!("value {x} too large for exact form")));
    }
    let p = scaled.round() as i128;
    Ok(Ratio::new(p, 1i128 << SHIFT))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // i128 -> f64 is lossy but fine for reporting.
    *r.numer() as f64 / *r.denom() as f64
}

/// Floor of `r` as an integer.
pub fn rat_floor(r: &Rat) -> i128 {
    r.floor().to_integer()
}

/// Ceiling of `r` as an integer.
pub fn rat_ceil(r: &Rat) -> i128 {
    r.ceil().to_integer()
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

pub fn rat_is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// Serde adapter: a rational as the string `"p/q"`.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: a vector of rationals as `["p/q", ...]`.
pub mod serde_rat_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Rat>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
