//! Exact rational scalars and the `"p/q"` text form used by every file format.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Arbitrary precision integer.
pub type Int = BigInt;

/// Precision (in bits) used when rounding square roots to rationals.
pub const SQRT_BITS: u32 = 64;

#[inline]
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[inline]
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.5"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let w: BigInt = if whole_abs.is_empty() {
            BigInt::zero()
        } else {
            whole_abs.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let mag = Rat::new(w * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(p))
}

/// Formats as `"p/q"`, or `"p"` when the value is an integer.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Integer square root if `x` is a perfect square of a rational.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let (p, q) = (x.numer(), x.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    (&sp * &sp == *p && &sq * &sq == *q).then(|| Rat::new(sp, sq))
}

fn sqrt_bracket(x: &Rat, bits: u32) -> (Rat, Rat) {
    assert!(!x.is_negative(), "square root of a negative rational");
    if let Some(s) = exact_sqrt(x) {
        return (s.clone(), s);
    }
    // sqrt(p/q) = sqrt(p*q)/q; scale by 2^bits before taking the integer root.
    let (p, q) = (x.numer(), x.denom());
    let scale = BigInt::one() << bits;
    let n = p * q * &scale * &scale;
    let s = n.sqrt();
    let den = q * &scale;
    (Rat::new(s.clone(), den.clone()), Rat::new(s + 1, den))
}

/// Rational upper bound on `sqrt(x)` within `2^-bits / denom(x)`.
pub fn sqrt_upper(x: &Rat, bits: u32) -> Rat {
    sqrt_bracket(x, bits).1
}

/// Rational lower bound on `sqrt(x)` within `2^-bits / denom(x)`.
pub fn sqrt_lower(x: &Rat, bits: u32) -> Rat {
    sqrt_bracket(x, bits).0
}

/// Rational upper bound on `x^(1/n)` for `x >= 0` by bisection to width `2^-bits`.
pub fn root_upper(x: &Rat, n: u32, bits: u32) -> Rat {
    assert!(n >= 1 && !x.is_negative());
    if n == 1 {
        return x.clone();
    }
    if n == 2 {
        return sqrt_upper(x, bits);
    }
    let mut lo = Rat::zero();
    let mut hi = if x > &Rat::one() { x.clone() } else { Rat::one() };
    let width = Rat::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / int(2);
        if num::pow(mid.clone(), n as usize) >= *x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `n^(3/2)` rounded up to a rational.
pub fn pow_three_halves_upper(n: usize) -> Rat {
    let n3 = int((n * n * n) as i64);
    sqrt_upper(&n3, SQRT_BITS)
}

/// Serde adapters for rationals in `"p/q"` form.
pub mod serde_rat {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = RatRepr::deserialize(d)?;
        raw.into_rat().map_err(serde::de::Error::custom)
    }

    /// Accepts `"p/q"` strings as well as bare JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RatRepr {
        Str(String),
        Int(i64),
    }

    impl RatRepr {
        pub(crate) fn into_rat(self) -> Result<Rat, crate::Error> {
            match self {
                RatRepr::Str(s) => parse_rat(&s),
                RatRepr::Int(i) => Ok(super::int(i)),
            }
        }
    }

    pub mod vec {
        use super::{fmt_rat, Rat, RatRepr};
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&fmt_rat(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
            Vec::<RatRepr>::deserialize(d)?
                .into_iter()
                .map(|r| r.into_rat().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), int(-4));
        assert_eq!(parse_rat("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rat(" 2 / -4 ").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1.").is_err());
    }

    #[test]
    fn format_round_trip() {
        for s in ["1/3", "-7/2", "5", "0"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let two = int(2);
        let (lo, hi) = (sqrt_lower(&two, 64), sqrt_upper(&two, 64));
        assert!(&lo * &lo < two && &hi * &hi > two);
        assert!(&hi - &lo <= Rat::new(BigInt::one(), BigInt::one() << 64));
        assert_eq!(sqrt_upper(&rat(9, 4), 64), rat(3, 2));
        let c = root_upper(&int(27), 3, 40);
        assert!(c >= int(3) && c < int(3) + rat(1, 1 << 30));
    }
}
