//! Exact rational scalars and their text representation.
//!
//! Every mass, flow value and cost in this crate is a [`Rat`]. Text form
//! accepts integers (`"2"`), fractions (`"3/10"`) and decimal literals
//! (`"0.25"`, parsed as exact decimal fractions rather than through
//! floating point).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Positive part `[a]_+`.
pub fn pos_part(a: &Rat) -> Rat {
    if a.is_positive() {
        a.clone()
    } else {
        Rat::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?} (expected \"p/q\", an integer or a decimal)")]
pub struct ParseRatError(pub String);

/// Parses `"p/q"`, integer and decimal literals into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRatError(s.to_owned()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| ParseRatError(s.to_owned()))?;
        let d: BigInt = den.trim().parse().map_err(|_| ParseRatError(s.to_owned()))?;
        if d.is_zero() {
            return Err(ParseRatError(s.to_owned()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let (sign, int) = match int.as_bytes().first() {
            Some(b'-') => (-1, &int[1..]),
            Some(b'+') => (1, &int[1..]),
            _ => (1, int),
        };
        if !frac.bytes().all(|b| b.is_ascii_digit()) || frac.is_empty() {
            return Err(ParseRatError(s.to_owned()));
        }
        let int_part: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| ParseRatError(s.to_owned()))?
        };
        if int_part.is_negative() {
            // sign was already split off; a second '-' is malformed
            return Err(ParseRatError(s.to_owned()));
        }
        let frac_num: BigInt = frac.parse().map_err(|_| ParseRatError(s.to_owned()))?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        let value = Rat::from_integer(int_part) + Rat::new(frac_num, denom);
        return Ok(value * rat(sign));
    }
    let n: BigInt = t.parse().map_err(|_| ParseRatError(s.to_owned()))?;
    Ok(Rat::from_integer(n))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// Lossy conversion for `--float` style output.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
