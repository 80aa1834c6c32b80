use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complete, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Serialized as the string `"p/q"` (or `"p"` when the denominator is one).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(pub(crate) Rational);

impl Rat {
    pub fn zero() -> Self {
        Rat(Rational::new())
    }

    pub fn one() -> Self {
        Rat(Rational::from(1))
    }

    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self> {
        let den: Integer = den.into();
        if den == 0 {
            return Err(Error::ZeroDenominator("rational with zero denominator".into()));
        }
        Ok(Rat(Rational::from((num.into(), den))))
    }

    pub fn from_int(n: impl Into<Integer>) -> Self {
        Rat(Rational::from(n.into()))
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.clone().abs())
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(self.0.clone().recip()))
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat((&self.0 / &other.0).complete()))
    }

    pub fn pow(&self, e: u32) -> Rat {
        Rat(self.0.clone().pow(e))
    }

    pub fn square(&self) -> Rat {
        Rat(self.0.clone().square())
    }

    /// Exact square root when the value is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.signum() < 0 {
            return None;
        }
        let (n, d) = (self.0.numer(), self.0.denom());
        if n.is_perfect_square() && d.is_perfect_square() {
            Some(Rat(Rational::from((n.clone().sqrt(), d.clone().sqrt()))))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Parses `"p/q"`, an integer, or a plain decimal like `"-1.25"` (converted
    /// exactly through a power of ten).
    pub fn parse(s: &str) -> Result<Rat> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = Integer::from_str(p.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
            let q = Integer::from_str(q.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
            return Rat::new(p, q).map_err(|_| Error::Parse(format!("{s}: zero denominator")));
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = s[i + 1..]
                    .parse()
                    .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, body) = match mantissa.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::Parse(format!("not a rational or decimal: {s}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let mut n = Integer::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if neg {
            n = -n;
        }
        let scale = exp - frac_part.len() as i32;
        let ten = Integer::from(10);
        let r = if scale >= 0 {
            Rational::from(n * ten.pow(scale as u32))
        } else {
            Rational::from((n, ten.pow((-scale) as u32)))
        };
        Ok(Rat(r))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Rat::parse(s)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rat::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat(Rational::from(n))
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat(Rational::from(n))
    }
}

impl From<Integer> for Rat {
    fn from(n: Integer) -> Self {
        Rat(Rational::from(n))
    }
}

impl From<Rational> for Rat {
    fn from(r: Rational) -> Self {
        Rat(r)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat($tr::$m(&self.0, &rhs.0).complete())
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat($tr::$m(self.0, &rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat($tr::$m(&self.0, rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);

/// Panics on division by zero; use [`Rat::checked_div`] when the divisor may vanish.
impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rat((&self.0 / &rhs.0).complete())
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat((-&self.0).complete())
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_sign_and_gcd() {
        let r = Rat::new(6, -4).unwrap();
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.denom(), &Integer::from(2));
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(Rat::parse("3/6").unwrap(), Rat::new(1, 2).unwrap());
        assert_eq!(Rat::parse("-1.25").unwrap(), Rat::new(-5, 4).unwrap());
        assert_eq!(Rat::parse(".5").unwrap(), Rat::new(1, 2).unwrap());
        assert_eq!(Rat::parse("2e3").unwrap(), Rat::from(2000));
        assert_eq!(Rat::parse("1.5e-1").unwrap(), Rat::new(3, 20).unwrap());
        assert!(Rat::parse("1/0").is_err());
        assert!(Rat::parse("abc").is_err());
        assert!(Rat::parse("").is_err());
    }

    #[test]
    fn serde_uses_p_over_q_strings() {
        let r = Rat::new(-7, 3).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"-7/3\"");
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sqrt_exact_only_for_squares() {
        assert_eq!(Rat::new(9, 4).unwrap().sqrt_exact(), Some(Rat::new(3, 2).unwrap()));
        assert_eq!(Rat::from(2).sqrt_exact(), None);
        assert_eq!(Rat::from(-4).sqrt_exact(), None);
    }
}
