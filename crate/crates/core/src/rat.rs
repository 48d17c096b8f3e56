//! Exact rational scalars.
//!
//! Every coefficient in the engine is a `Rat`: an arbitrary-precision
//! rational kept in canonical form (positive denominator, gcd-reduced).
//! There is no floating point anywhere in this crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision rational.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Nonnegative integer power.
pub fn rat_pow(base: &Rat, exp: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Binomial coefficient C(n, k) as a rational.
pub fn binomial(n: usize, k: usize) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= rat_int((n - i) as i64);
        acc /= rat_int((i + 1) as i64);
    }
    acc
}

/// Parses "p/q" or "p" with optional sign, exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational numerator in {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Renders a rational as "p" or "p/q" (the canonical form has q > 0).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True if the rational is a (possibly negative) integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Extracts an integer value; errors if the rational is not integral
/// or overflows i64.
pub fn to_i64(r: &Rat) -> Result<i64> {
    if !is_integer(r) {
        return Err(Error::InvalidInput(format!(
            "expected integer, got {}",
            format_rat(r)
        )));
    }
    let n = r.numer();
    i64::try_from(n.clone())
        .map_err(|_| Error::InvalidInput(format!("integer {} out of i64 range", n)))
}

/// Sign as -1, 0, +1.
pub fn sign(r: &Rat) -> i32 {
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
    fn canonical_form() {
        let r = rat(2, -4);
        assert_eq!(format_rat(&r), "-1/2");
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "1/2", "-22/7", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("4/8").unwrap()), "1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), rat_int(10));
        assert_eq!(binomial(4, 0), rat_int(1));
        assert_eq!(binomial(3, 5), rat_int(0));
    }
}
