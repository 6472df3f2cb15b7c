//! Exact rational scalars.
//!
//! All basis and projection arithmetic in this crate is exact; `Rat` is an
//! arbitrary-precision rational kept reduced with a positive denominator.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `base^exp` for a small integer base, as a rational.
pub fn ipow(base: i64, exp: u32) -> Rat {
    Rat::from_integer(BigInt::from(base).pow(exp))
}

/// `(n/d)^exp`.
pub fn fpow(n: i64, d: i64, exp: u32) -> Rat {
    Rat::new(BigInt::from(n).pow(exp), BigInt::from(d).pow(exp))
}

/// Render as `p/q` with an explicit denominator, e.g. `3/2`, `-1/8`, `4/1`.
pub fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal convenience rendering; lossy, for human output only.
pub fn rat_f64(r: &Rat) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Parse `p/q` or a plain integer string.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let mk_err = || Error::Parse(format!("cannot parse rational from {s:?}"));
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| mk_err())?;
            let d: BigInt = den.trim().parse().map_err(|_| mk_err())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| mk_err())?;
            Ok(Rat::from_integer(n))
        }
    }
}

pub fn sgn(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_keeps_explicit_denominator() {
        assert_eq!(rat_str(&rat(3, 2)), "3/2");
        assert_eq!(rat_str(&int(4)), "4/1");
        assert_eq!(rat_str(&rat(-2, 16)), "-1/8");
        assert_eq!(rat_str(&Rat::zero()), "0/1");
    }

    #[test]
    fn parsing_round_trips() {
        for s in ["3/2", "-1/8", "7", "0/1", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&rat_str(&r)).unwrap(), r);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(ipow(6, 3), int(216));
        assert_eq!(fpow(4, 3, 2), rat(16, 9));
        assert_eq!(fpow(3, 4, 0), int(1));
    }
}
