//! Exact rational scalars and their canonical text form.
//!
//! All geometry and measure bookkeeping in this crate is done over ℚ with
//! arbitrary-precision integers, so volumes, translation parameters and
//! measure values are exact: equality tests are decidable and identities can
//! be asserted with `==` rather than with tolerances.
//!
//! The canonical text form is `"p/q"` in lowest terms with `q > 0`; integers
//! are written without the slash (`"7"`, `"-3"`). This is the form used in
//! every serialized artifact so that reruns are byte-identical.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Builds the rational `n` (an integer).
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Builds the rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "rational denominator must be nonzero");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational in canonical form: `"p/q"` in lowest terms with
/// `q > 0`, or just `"p"` when the value is an integer.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a rational as a decimal with 12 significant digits.
///
/// Used alongside the exact form in human-facing reports. The conversion
/// goes through `f64`, which carries more than 12 significant digits for the
/// magnitudes that occur here.
pub fn format_rat_decimal(r: &Rat) -> String {
    let v = rat_to_f64(r);
    format!("{:.*e}", 11, v)
}

/// Converts a rational to the nearest `f64`.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of leading digits when the raw parts
        // overflow f64 range; adequate for reporting.
        let n = r.numer();
        let d = r.denom();
        let shift = (n.bits().max(d.bits()) as i64 - 500).max(0) as u64;
        let n2 = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let d2 = (d >> shift).to_f64().unwrap_or(f64::NAN);
        n2 / d2
    })
}

/// Parses the canonical text form: `"p/q"` or `"p"`, with optional sign and
/// surrounding whitespace. The result is normalized (lowest terms, positive
/// denominator) by construction.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| Error::Serde(format!("invalid rational numerator in {s:?}")))?;
    let denom: BigInt = den_str
        .parse()
        .map_err(|_| Error::Serde(format!("invalid rational denominator in {s:?}")))?;
    if denom.is_zero() {
        return Err(Error::Serde(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Serde adapter serializing a [`Rat`] as its canonical string.
///
/// Use as `#[serde(with = "crate::rat::serde_rat")]`.
pub mod serde_rat {
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        format_rat(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<Rat>`: `"p/q"` when present, `null` when not.
pub mod serde_rat_opt {
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(format_rat).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rat(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `Vec<Rat>` as a list of canonical strings.
pub mod serde_rat_vec {
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rat(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Returns `|r|`.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

/// Returns the smaller of two rationals by value (clones the winner).
pub fn rat_min(a: &Rat, b: &Rat) -> Rat {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Returns the larger of two rationals by value (clones the winner).
pub fn rat_max(a: &Rat, b: &Rat) -> Rat {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Smallest integer `k` with `k >= r`, as a `Rat`.
pub fn rat_ceil(r: &Rat) -> Rat {
    Rat::from_integer(r.ceil().to_integer())
}
